//! Small dense real matrix kernels.
//!
//! Everything here targets n <= 8. The central factorization is
//! `Y = U V U^T` with `U` unit upper-triangular and `V` positive diagonal;
//! its pivots double as the positive-definiteness test, and the
//! upper-triangular square root is `U V^{1/2}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fx;
use crate::MAX_RANK;

/// Relative pivot tolerance for the positive-definiteness check.
pub const PD_PIVOT_RTOL: f64 = 1e-12;

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RMat {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
}

impl RMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMat { rows, cols, a: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = RMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        RMat::from_fn(r, c, |i, j| rows[i][j])
    }

    #[inline(always)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline(always)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RMat {
        RMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &RMat) -> RMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = RMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let s = self.get(i, k);
                if s == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.a[i * other.cols + j] += s * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &RMat) -> RMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: f64) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| s * self.get(i, j))
    }

    pub fn neg(&self) -> RMat {
        self.scale(-1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, &x| m.max(fx::abs(x)))
    }

    pub fn max_abs_diff(&self, other: &RMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.a
            .iter()
            .zip(&other.a)
            .fold(0.0f64, |m, (&x, &y)| m.max(fx::abs(x - y)))
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                out[j] += vi * self.get(i, j);
            }
        }
        out
    }

    /// Extract the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> RMat {
        RMat::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Write `block` into position `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &RMat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j));
            }
        }
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.a.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = fx::abs(a[k * n + k]);
            for i in k + 1..n {
                let v = fx::abs(a[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k];
            det *= piv;
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<RMat, Error> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.a.clone();
        let mut inv = RMat::identity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = fx::abs(a[k * n + k]);
            for i in k + 1..n {
                let v = fx::abs(a[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::NumericalBreakdown("singular matrix inverse"));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.a.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= piv;
                inv.a[k * n + j] /= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] -= f * a[k * n + j];
                    inv.a[i * n + j] -= f * inv.a[k * n + j];
                }
            }
        }
        Ok(inv)
    }

    /// Inverse of an upper-triangular matrix by back substitution.
    pub fn inverse_upper_triangular(&self) -> Result<RMat, Error> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut inv = RMat::zeros(n, n);
        for j in (0..n).rev() {
            let d = self.get(j, j);
            if d == 0.0 || !d.is_finite() {
                return Err(Error::NumericalBreakdown("singular triangular inverse"));
            }
            inv.set(j, j, 1.0 / d);
            for i in (0..j).rev() {
                let mut s = 0.0;
                for k in i + 1..=j {
                    s += self.get(i, k) * inv.get(k, j);
                }
                inv.set(i, j, -s / self.get(i, i));
            }
        }
        Ok(inv)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|x| x.is_finite())
    }
}

/// Real symmetric matrix; storage is exactly symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    n: usize,
    m: RMat,
}

impl SymMat {
    /// Build from a general matrix, averaging the off-diagonal pairs so the
    /// stored entries are exactly symmetric.
    pub fn symmetrized(m: &RMat) -> Self {
        assert_eq!(m.rows(), m.cols());
        let n = m.rows();
        let mut s = RMat::zeros(n, n);
        for i in 0..n {
            s.set(i, i, m.get(i, i));
            for j in i + 1..n {
                let v = 0.5 * (m.get(i, j) + m.get(j, i));
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        SymMat { n, m: s }
    }

    /// Build from entries that are already exactly symmetric.
    pub fn new(m: RMat) -> Result<Self, Error> {
        assert_eq!(m.rows(), m.cols());
        let n = m.rows();
        if n > MAX_RANK {
            return Err(Error::DimensionMismatch);
        }
        for i in 0..n {
            for j in i + 1..n {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::DimensionMismatch);
                }
            }
        }
        Ok(SymMat { n, m })
    }

    pub fn zeros(n: usize) -> Self {
        SymMat { n, m: RMat::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        SymMat { n, m: RMat::identity(n) }
    }

    pub fn diag(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = RMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, v[i]);
        }
        SymMat { n, m }
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    /// Set entry `(i, j)` and its mirror.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.m.set(i, j, v);
        self.m.set(j, i, v);
    }

    pub fn mat(&self) -> &RMat {
        &self.m
    }

    /// Quadratic form `x A x^T` for a row vector `x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut s = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in 0..self.n {
                row += self.m.get(i, j) * x[j];
            }
            s += x[i] * row;
        }
        s
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.m.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }
}

/// The factorization `Y = U V U^T`, `U` unit upper-triangular, `V` positive
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct UVDecomp {
    u: RMat,
    v: Vec<f64>,
}

impl UVDecomp {
    pub fn u(&self) -> &RMat {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn det_v(&self) -> f64 {
        self.v.iter().product()
    }

    /// Multiply the factors back together.
    pub fn reconstruct(&self) -> SymMat {
        let n = self.v.len();
        let mut y = RMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in j.max(i)..n {
                    s += self.u.get(i, k) * self.v[k] * self.u.get(j, k);
                }
                y.set(i, j, s);
            }
        }
        SymMat::symmetrized(&y)
    }
}

/// Positive definite symmetric matrix with its cached `U V U^T` factorization.
/// Construction runs the factorization; a failed pivot rejects the input.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDefMat {
    s: SymMat,
    uv: UVDecomp,
}

impl PosDefMat {
    pub fn new(s: SymMat) -> Result<Self, Error> {
        let uv = uv_factor(&s)?;
        Ok(PosDefMat { s, uv })
    }

    pub fn identity(n: usize) -> Self {
        PosDefMat::new(SymMat::identity(n)).expect("identity is positive definite")
    }

    pub fn from_diag(v: &[f64]) -> Result<Self, Error> {
        PosDefMat::new(SymMat::diag(v))
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.s.n()
    }

    pub fn sym(&self) -> &SymMat {
        &self.s
    }

    pub fn mat(&self) -> &RMat {
        self.s.mat()
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s.get(i, j)
    }

    pub fn uv(&self) -> &UVDecomp {
        &self.uv
    }

    pub fn det(&self) -> f64 {
        self.uv.det_v()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.s.quad_form(x)
    }

    /// Inverse, computed from the triangular factors.
    pub fn inverse(&self) -> PosDefMat {
        let r = sqrt_upper(self);
        let rinv = r
            .inverse_upper_triangular()
            .expect("square root has positive diagonal");
        // Y^{-1} = R^{-T} R^{-1}
        let yinv = rinv.transpose().mul(&rinv);
        PosDefMat::new(SymMat::symmetrized(&yinv)).expect("inverse of SPD is SPD")
    }
}

/// Factor a symmetric matrix as `U V U^T`.
///
/// The pivots are computed from the bottom-right corner upward; a pivot that
/// is non-positive (relative tolerance [`PD_PIVOT_RTOL`]) or non-finite
/// rejects the matrix.
pub fn uv_factor(y: &SymMat) -> Result<UVDecomp, Error> {
    let n = y.n();
    // R upper-triangular with R R^T = Y, built column by column from the right.
    let mut r = RMat::zeros(n, n);
    for j in (0..n).rev() {
        let mut s = y.get(j, j);
        for k in j + 1..n {
            s -= r.get(j, k) * r.get(j, k);
        }
        // relative to the local diagonal entry: pivots of a well-conditioned
        // but widely scaled matrix must not be compared across rows
        let local = fx::abs(y.get(j, j)).max(f64::MIN_POSITIVE);
        if !(s.is_finite() && s > PD_PIVOT_RTOL * local) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = fx::sqrt(s);
        r.set(j, j, d);
        for i in (0..j).rev() {
            let mut s = y.get(i, j);
            for k in j + 1..n {
                s -= r.get(i, k) * r.get(j, k);
            }
            r.set(i, j, s / d);
        }
    }
    let mut u = RMat::identity(n);
    let mut v = vec![0.0; n];
    for j in 0..n {
        let d = r.get(j, j);
        v[j] = d * d;
        for i in 0..j {
            u.set(i, j, r.get(i, j) / d);
        }
    }
    Ok(UVDecomp { u, v })
}

/// The `U V U^T` factorization of a positive definite matrix.
pub fn uv_decompose(y: &PosDefMat) -> UVDecomp {
    y.uv().clone()
}

/// The upper-triangular square root `R` with `R R^T = Y` and positive
/// diagonal; equals `U V^{1/2}`.
pub fn sqrt_upper(y: &PosDefMat) -> RMat {
    let uv = y.uv();
    let n = y.n();
    let mut r = RMat::zeros(n, n);
    for j in 0..n {
        let d = fx::sqrt(uv.v[j]);
        r.set(j, j, d);
        for i in 0..j {
            r.set(i, j, uv.u.get(i, j) * d);
        }
    }
    r
}

/// The matrix inverse of [`sqrt_upper`], still upper-triangular.
pub fn inv_sqrt_upper(y: &PosDefMat) -> RMat {
    sqrt_upper(y)
        .inverse_upper_triangular()
        .expect("square root has positive diagonal")
}

/// Lower-triangular Cholesky factor `L` with `L L^T = W`, built from the
/// top-left corner. Same per-pivot rejection rule as [`uv_factor`].
pub fn chol_lower(w: &SymMat) -> Result<RMat, Error> {
    let n = w.n();
    let mut l = RMat::zeros(n, n);
    for i in 0..n {
        let mut s = w.get(i, i);
        for k in 0..i {
            s -= l.get(i, k) * l.get(i, k);
        }
        let local = fx::abs(w.get(i, i)).max(f64::MIN_POSITIVE);
        if !(s.is_finite() && s > PD_PIVOT_RTOL * local) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = fx::sqrt(s);
        l.set(i, i, d);
        for j in i + 1..n {
            let mut s = w.get(j, i);
            for k in 0..i {
                s -= l.get(j, k) * l.get(i, k);
            }
            l.set(j, i, s / d);
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn inverse_lower_triangular(l: &RMat) -> Result<RMat, Error> {
    Ok(l.transpose().inverse_upper_triangular()?.transpose())
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the orthogonal matrix whose
/// columns are the corresponding eigenvectors (`A = Q diag(l) Q^T`). The
/// eigenvector signs are canonicalized so the largest-magnitude component
/// is positive, keeping the output deterministic.
pub fn sym_eigen(a: &SymMat) -> (Vec<f64>, RMat) {
    let n = a.n();
    let mut m = a.mat().clone();
    let mut q = RMat::identity(n);
    if n > 1 {
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for _sweep in 0..64 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    off = off.max(fx::abs(m.get(i, j)));
                }
            }
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for r in p + 1..n {
                    let apr = m.get(p, r);
                    if fx::abs(apr) <= 1e-18 * scale {
                        continue;
                    }
                    let app = m.get(p, p);
                    let arr = m.get(r, r);
                    let theta = 0.5 * fx::atan2(2.0 * apr, arr - app);
                    let (s, c) = (fx::sin(theta), fx::cos(theta));
                    for k in 0..n {
                        let mkp = m.get(k, p);
                        let mkr = m.get(k, r);
                        m.set(k, p, c * mkp - s * mkr);
                        m.set(k, r, s * mkp + c * mkr);
                    }
                    for k in 0..n {
                        let mpk = m.get(p, k);
                        let mrk = m.get(r, k);
                        m.set(p, k, c * mpk - s * mrk);
                        m.set(r, k, s * mpk + c * mrk);
                    }
                    for k in 0..n {
                        let qkp = q.get(k, p);
                        let qkr = q.get(k, r);
                        q.set(k, p, c * qkp - s * qkr);
                        q.set(k, r, s * qkp + c * qkr);
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let mut vals = Vec::with_capacity(n);
    let mut vecs = RMat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vals.push(m.get(src, src));
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for k in 0..n {
            let v = fx::abs(q.get(k, src));
            if v > best_abs {
                best_abs = v;
                best = k;
            }
        }
        let sign = if q.get(best, src) < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vecs.set(k, col, sign * q.get(k, src));
        }
    }
    (vals, vecs)
}

/// Largest eigenvalue bound via trace (all eigenvalues positive).
pub fn spd_lambda_max_bound(y: &PosDefMat) -> f64 {
    y.sym().trace()
}

/// Smallest eigenvalue of an SPD matrix (exact via Jacobi for n <= 8).
pub fn spd_lambda_min(y: &PosDefMat) -> f64 {
    let (vals, _) = sym_eigen(y.sym());
    vals[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Counter;

    fn seeded_spd(n: usize, seed: u64) -> PosDefMat {
        // G^T G + I with seeded G
        let ctr = Counter::new(seed, 0);
        let mut k = 0u64;
        let g = RMat::from_fn(n, n, |_, _| {
            k += 1;
            2.0 * ctr.uniform(k) - 1.0
        });
        let gtg = g.transpose().mul(&g);
        let mut s = SymMat::symmetrized(&gtg);
        for i in 0..n {
            let v = s.get(i, i) + 1.0;
            s.set_sym(i, i, v);
        }
        PosDefMat::new(s).unwrap()
    }

    #[test]
    fn uv_identity_and_diag() {
        let y = PosDefMat::identity(2);
        let uv = uv_decompose(&y);
        assert_eq!(uv.v(), &[1.0, 1.0]);
        assert_eq!(uv.u().max_abs_diff(&RMat::identity(2)), 0.0);

        let y = PosDefMat::from_diag(&[4.0, 9.0]).unwrap();
        let uv = uv_decompose(&y);
        assert_eq!(uv.v(), &[4.0, 9.0]);
        assert_eq!(uv.u().max_abs_diff(&RMat::identity(2)), 0.0);
    }

    #[test]
    fn uv_reconstruction_seeded() {
        for n in 1..=4 {
            for seed in 0..50 {
                let y = seeded_spd(n, 1000 * n as u64 + seed);
                let rec = y.uv().reconstruct();
                let err = rec.mat().max_abs_diff(y.mat());
                let scale = y.mat().max_abs().max(1.0);
                assert!(err / scale < 1e-10, "n={n} seed={seed} err={err}");
            }
        }
    }

    #[test]
    fn sqrt_upper_cases() {
        let y = PosDefMat::identity(3);
        assert!(sqrt_upper(&y).max_abs_diff(&RMat::identity(3)) == 0.0);

        let y = PosDefMat::from_diag(&[4.0, 9.0]).unwrap();
        let r = sqrt_upper(&y);
        assert!((r.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((r.get(1, 1) - 3.0).abs() < 1e-15);

        let y = PosDefMat::new(SymMat::symmetrized(&RMat::from_rows(&[
            vec![2.0, 1.0],
            vec![1.0, 1.0],
        ])))
        .unwrap();
        let r = sqrt_upper(&y);
        let back = r.mul(&r.transpose());
        assert!(back.max_abs_diff(y.mat()) < 1e-12);
    }

    #[test]
    fn sqrt_roundtrip_seeded() {
        for n in 1..=4usize {
            for seed in 0..250 {
                let y = seeded_spd(n, 7000 * n as u64 + seed);
                let r = sqrt_upper(&y);
                let back = r.mul(&r.transpose());
                let scale = y.mat().max_abs().max(1.0);
                assert!(back.max_abs_diff(y.mat()) / scale < 1e-10);
                // upper triangular with positive diagonal
                for i in 0..n {
                    assert!(r.get(i, i) > 0.0);
                    for j in 0..i {
                        assert_eq!(r.get(i, j), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn inv_sqrt_inverse() {
        let y = PosDefMat::from_diag(&[4.0, 9.0]).unwrap();
        let ri = inv_sqrt_upper(&y);
        assert!((ri.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((ri.get(1, 1) - 1.0 / 3.0).abs() < 1e-15);

        for seed in 0..100 {
            let y = seeded_spd(3, 31 + seed);
            let r = sqrt_upper(&y);
            let ri = inv_sqrt_upper(&y);
            let prod = r.mul(&ri);
            assert!(prod.max_abs_diff(&RMat::identity(3)) < 1e-10);
            let prod2 = ri.mul(&r);
            assert!(prod2.max_abs_diff(&RMat::identity(3)) < 1e-10);
        }
    }

    #[test]
    fn rejects_non_positive_definite() {
        let s = SymMat::symmetrized(&RMat::from_rows(&[vec![1.0, 5.0], vec![5.0, 1.0]]));
        assert_eq!(PosDefMat::new(s).unwrap_err(), Error::NotPositiveDefinite);
        let s = SymMat::diag(&[1.0, 0.0]);
        assert_eq!(PosDefMat::new(s).unwrap_err(), Error::NotPositiveDefinite);
    }

    #[test]
    fn jacobi_eigen_small() {
        let s = SymMat::symmetrized(&RMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]));
        let (vals, q) = sym_eigen(&s);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        // A Q = Q diag(vals)
        let aq = s.mat().mul(&q);
        let qd = q.mul(&RMat::from_fn(2, 2, |i, j| if i == j { vals[i] } else { 0.0 }));
        assert!(aq.max_abs_diff(&qd) < 1e-12);
    }

    #[test]
    fn eigen_seeded_orthogonality() {
        for seed in 0..40 {
            let y = seeded_spd(4, 999 + seed);
            let (vals, q) = sym_eigen(y.sym());
            let qtq = q.transpose().mul(&q);
            assert!(qtq.max_abs_diff(&RMat::identity(4)) < 1e-12);
            for w in vals.windows(2) {
                assert!(w[0] <= w[1] + 1e-14);
            }
            assert!(vals[0] > 0.0);
        }
    }
}

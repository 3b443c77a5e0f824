//! Exact integer matrix kernels: unimodular completions, Bareiss
//! determinants, adjugate inverses, and a Hermite-form canonicalization used
//! to deduplicate certification pairs.
//!
//! Entries are guarded against growth past `2^40`; generator words of the
//! lengths used here stay far below that.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::mat::RMat;

/// Entry guard for exact integer arithmetic.
pub const ENTRY_GUARD: i64 = 1 << 40;

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IMat {
    rows: usize,
    cols: usize,
    a: Vec<i64>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut m = IMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        IMat::from_fn(r, c, |i, j| rows[i][j])
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
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.cols + j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[i64] {
        &self.a
    }

    pub fn transpose(&self) -> IMat {
        IMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn neg(&self) -> IMat {
        IMat::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn max_abs(&self) -> i64 {
        self.a.iter().fold(0i64, |m, &x| m.max(x.abs()))
    }

    /// Exact product with the `2^40` entry guard.
    pub fn mul(&self, other: &IMat) -> Result<IMat, Error> {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s: i128 = 0;
                for k in 0..self.cols {
                    s += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                if s.unsigned_abs() > ENTRY_GUARD as u128 {
                    return Err(Error::EntryOverflow);
                }
                out.set(i, j, s as i64);
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == IMat::identity(self.rows)
    }

    pub fn to_rmat(&self) -> RMat {
        RMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as f64)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i128 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let mut p = None;
                for i in k + 1..n {
                    if a[i * n + k] != 0 {
                        p = Some(i);
                        break;
                    }
                }
                match p {
                    None => return 0,
                    Some(p) => {
                        for j in 0..n {
                            a.swap(k * n + j, p * n + j);
                        }
                        sign = -sign;
                    }
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j];
                    a[i * n + j] = num / prev;
                }
                a[i * n + k] = 0;
            }
            prev = a[k * n + k];
        }
        sign * a[n * n - 1]
    }

    /// Exact inverse of a unimodular matrix (`det = +-1`) via the adjugate.
    pub fn unimodular_inverse(&self) -> Result<IMat, Error> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let d = self.det();
        if d != 1 && d != -1 {
            return Err(Error::NotIntegral);
        }
        let mut inv = IMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                // cofactor C_ji for the (i, j) entry of the inverse
                let minor = IMat::from_fn(n - 1, n - 1, |r, c| {
                    let rr = if r < j { r } else { r + 1 };
                    let cc = if c < i { c } else { c + 1 };
                    self.get(rr, cc)
                });
                let sgn = if (i + j) % 2 == 0 { 1 } else { -1 };
                let v = sgn as i128 * minor.det() * d;
                if v.unsigned_abs() > ENTRY_GUARD as u128 {
                    return Err(Error::EntryOverflow);
                }
                inv.set(i, j, v as i64);
            }
        }
        Ok(inv)
    }

    /// Row-style Hermite canonical form, used as a dedup key for the left
    /// `GL(n, Z)` coset of a stacked `[C | D]` matrix. The result is the
    /// unique echelon representative with positive pivots and entries below
    /// a pivot reduced into `[0, pivot)`.
    pub fn hnf_row(&self) -> IMat {
        let rows = self.rows;
        let cols = self.cols;
        let mut a: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let get = |a: &Vec<i128>, i: usize, j: usize| a[i * cols + j];
        let mut r = 0usize;
        for c in 0..cols {
            if r == rows {
                break;
            }
            // gcd sweep in column c over rows r..
            loop {
                let mut p = None;
                let mut best = i128::MAX;
                for i in r..rows {
                    let v = get(&a, i, c).abs();
                    if v != 0 && v < best {
                        best = v;
                        p = Some(i);
                    }
                }
                let p = match p {
                    None => break,
                    Some(p) => p,
                };
                if p != r {
                    for j in 0..cols {
                        a.swap(r * cols + j, p * cols + j);
                    }
                }
                let piv = get(&a, r, c);
                let mut done = true;
                for i in r + 1..rows {
                    let q = get(&a, i, c).div_euclid(piv);
                    if q != 0 {
                        for j in 0..cols {
                            a[i * cols + j] -= q * a[r * cols + j];
                        }
                    }
                    if get(&a, i, c) != 0 {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if get(&a, r, c) != 0 {
                if get(&a, r, c) < 0 {
                    for j in 0..cols {
                        a[r * cols + j] = -a[r * cols + j];
                    }
                }
                let piv = get(&a, r, c);
                for i in 0..r {
                    let q = get(&a, i, c).div_euclid(piv);
                    if q != 0 {
                        for j in 0..cols {
                            a[i * cols + j] -= q * a[r * cols + j];
                        }
                    }
                }
                r += 1;
            }
        }
        IMat::from_fn(rows, cols, |i, j| {
            let v = a[i * cols + j];
            debug_assert!(v.unsigned_abs() <= i64::MAX as u128);
            v as i64
        })
    }
}

/// Complete a primitive integer row vector to a unimodular matrix having it
/// as first row.
pub fn complete_unimodular(a: &[i64]) -> Result<IMat, Error> {
    let n = a.len();
    let mut v: Vec<i64> = a.to_vec();
    let mut w = IMat::identity(n);
    if n == 0 {
        return Ok(w);
    }
    // Column operations reduce v to e_1; the inverse row operations
    // accumulate in w, whose first row ends up equal to a.
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| v[i] != 0).collect();
        if nz.is_empty() {
            return Err(Error::NotIntegral);
        }
        let &p = nz
            .iter()
            .min_by_key(|&&i| v[i].unsigned_abs())
            .expect("nonempty");
        if nz.len() == 1 {
            if v[p].abs() != 1 {
                return Err(Error::NotIntegral); // not primitive
            }
            // move pivot to slot 0 and fix sign
            if p != 0 {
                v.swap(0, p);
                for j in 0..n {
                    let t = w.get(0, j);
                    w.set(0, j, w.get(p, j));
                    w.set(p, j, t);
                }
            }
            if v[0] == -1 {
                v[0] = 1;
                for j in 0..n {
                    w.set(0, j, -w.get(0, j));
                }
            }
            return Ok(w);
        }
        for i in 0..n {
            if i == p || v[i] == 0 {
                continue;
            }
            let q = v[i] / v[p];
            if q != 0 {
                v[i] -= q * v[p];
                // column op col_i -= q col_p  =>  row op on w: row_p += q row_i
                for j in 0..n {
                    let t = w.get(p, j) + q * w.get(i, j);
                    if t.abs() > ENTRY_GUARD {
                        return Err(Error::EntryOverflow);
                    }
                    w.set(p, j, t);
                }
            }
        }
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_primitive(v: &[i64]) -> bool {
    let g = v.iter().fold(0i64, |g, &x| gcd_i64(g, x));
    g == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_det() {
        let m = IMat::from_rows(&[vec![2, 3], vec![1, 4]]);
        assert_eq!(m.det(), 5);
        let m = IMat::from_rows(&[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        assert_eq!(m.det(), 1);
        let m3 = m.unimodular_inverse().unwrap();
        assert!(m.mul(&m3).unwrap().is_identity());
    }

    #[test]
    fn completion_has_first_row() {
        for a in [
            vec![1i64],
            vec![2, 3],
            vec![-4, 7],
            vec![6, 10, 15],
            vec![0, 0, 1],
            vec![3, -5, 7, 2],
        ] {
            let m = complete_unimodular(&a).unwrap();
            for (j, &x) in a.iter().enumerate() {
                assert_eq!(m.get(0, j), x);
            }
            let d = m.det();
            assert!(d == 1 || d == -1, "det {d}");
        }
    }

    #[test]
    fn completion_rejects_imprimitive() {
        assert!(complete_unimodular(&[2, 4]).is_err());
        assert!(complete_unimodular(&[0, 0]).is_err());
    }

    #[test]
    fn hnf_canonicalizes_cosets() {
        // [C | D] and U [C | D] must share a Hermite form for unimodular U
        let cd = IMat::from_rows(&[vec![1, 2, 0, 1], vec![0, 1, 1, 3]]);
        let u = IMat::from_rows(&[vec![2, 1], vec![1, 1]]);
        let ucd = u.mul(&cd).unwrap();
        assert_eq!(cd.hnf_row(), ucd.hnf_row());
        let u2 = IMat::from_rows(&[vec![1, 0], vec![-3, 1]]);
        let u2cd = u2.mul(&cd).unwrap();
        assert_eq!(cd.hnf_row(), u2cd.hnf_row());
    }
}

//! Exact action of the Schrodinger representation and of the oscillator
//! (Segal-Shale-Weil) operators `R(g)` on Gaussian packets
//! `f(x) = c e(x W x^T / 2 + x w^T)` with `Im W` positive definite.
//!
//! The family is closed under both representations. Upper block-triangular
//! elements act in closed form with the phase tracked exactly; partial
//! Fourier steps (the `J_S` factors and diagonal-unitary factors of the
//! maximal compact) multiply the amplitude by a Gaussian-integral constant
//! whose modulus is exact while the overall phase becomes path-dependent,
//! recorded by clearing `phase_exact`. General elements are routed through
//! the Iwasawa factorization; rotation angles with small sine are shifted by
//! a quarter turn (an exact Fourier step) so every triangular factor stays
//! well conditioned.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cmat::{e_complex, e_real, sqrt_principal, CMat};
use crate::error::Error;
use crate::fx;
use crate::jacobi::HeisenbergElem;
use crate::mat::{sqrt_upper, PosDefMat, RMat, SymMat};
use crate::rng::Counter;
use crate::symplectic::{iwasawa, SpMatrix};

/// `c e(x W x^T / 2 + x w^T)` with `Im W` positive definite.
#[derive(Debug, Clone)]
pub struct GaussianPacket {
    n: usize,
    w: CMat,
    wvec: Vec<Complex64>,
    c: Complex64,
    phase_exact: bool,
}

fn symmetrize_c(m: &CMat) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| (m.get(i, j) + m.get(j, i)).scale(0.5))
}

impl GaussianPacket {
    pub fn new(w: CMat, wvec: Vec<Complex64>, c: Complex64) -> Result<Self, Error> {
        let n = w.rows();
        if w.cols() != n || wvec.len() != n {
            return Err(Error::DimensionMismatch);
        }
        let w = symmetrize_c(&w);
        PosDefMat::new(SymMat::symmetrized(&w.im()))?;
        if !(c.norm() > 0.0) || !c.is_finite() {
            return Err(Error::NumericalBreakdown("zero or non-finite amplitude"));
        }
        Ok(GaussianPacket { n, w, wvec, c, phase_exact: true })
    }

    /// The standard Gaussian `exp(-pi x x^T)`: `W = iI`, `w = 0`, `c = 1`.
    pub fn standard(n: usize) -> Self {
        GaussianPacket {
            n,
            w: CMat::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            wvec: vec![Complex64::new(0.0, 0.0); n],
            c: Complex64::new(1.0, 0.0),
            phase_exact: true,
        }
    }

    /// `exp(-pi x P x^T)` for positive definite `P`: `W = iP`.
    pub fn siegel(p: &PosDefMat) -> Self {
        let n = p.n();
        GaussianPacket {
            n,
            w: CMat::from_fn(n, n, |i, j| Complex64::new(0.0, p.get(i, j))),
            wvec: vec![Complex64::new(0.0, 0.0); n],
            c: Complex64::new(1.0, 0.0),
            phase_exact: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &CMat {
        &self.w
    }

    pub fn wvec(&self) -> &[Complex64] {
        &self.wvec
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn phase_exact(&self) -> bool {
        self.phase_exact
    }

    /// Imaginary part of `W` as a positive definite matrix.
    pub fn im_w(&self) -> PosDefMat {
        PosDefMat::new(SymMat::symmetrized(&self.w.im())).expect("invariant: Im W > 0")
    }

    /// Evaluate at a real row vector.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.n);
        let mut phase = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..self.n {
                row += self.w.get(i, j).scale(x[j]);
            }
            phase += (row.scale(0.5) + self.wvec[i]).scale(x[i]);
        }
        self.c * e_complex(phase)
    }

    /// Closed-form `L^2` norm.
    pub fn l2_norm(&self) -> f64 {
        let im_w = self.im_w();
        let b: Vec<f64> = self.wvec.iter().map(|z| z.im).collect();
        let binv = im_w.inverse();
        let shift = binv.quad_form(&b);
        let det2: f64 = im_w.uv().v().iter().map(|v| 2.0 * v).product();
        let sq = self.c.norm_sqr() * fx::exp(core::f64::consts::TAU * shift) / fx::sqrt(det2);
        fx::sqrt(sq)
    }

    fn with_phase_cleared(mut self) -> Self {
        self.phase_exact = false;
        self
    }
}

/// `W(x, y, t) f(x0) = e(-t + x y^T/2 + x0 y^T) f(x0 + x)`, computed as an
/// exact packet transform.
pub fn schrodinger_apply(h: &HeisenbergElem, f: &GaussianPacket) -> Result<GaussianPacket, Error> {
    let n = f.n();
    if h.n() != n {
        return Err(Error::DimensionMismatch);
    }
    let w = f.w.clone();
    // w' = w + x W + y
    let mut wvec = f.wvec.clone();
    for j in 0..n {
        let mut xw = Complex64::new(0.0, 0.0);
        for i in 0..n {
            xw += f.w.get(i, j).scale(h.x[i]);
        }
        wvec[j] += xw + Complex64::new(h.y[j], 0.0);
    }
    // c' = c e(-t + x y^T/2 + x W x^T/2 + x w^T)
    let mut quad = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..n {
            row += f.w.get(i, j).scale(h.x[j]);
        }
        quad += (row.scale(0.5) + f.wvec[i]).scale(h.x[i]);
    }
    let xy: f64 = h.x.iter().zip(&h.y).map(|(a, b)| a * b).sum();
    let c = f.c * e_complex(quad + Complex64::new(-h.t + 0.5 * xy, 0.0));
    let mut out = GaussianPacket::new(w, wvec, c)?;
    out.phase_exact = f.phase_exact;
    Ok(out)
}

/// `A W A^T` for real `A`.
fn real_congruence(w: &CMat, a: &RMat) -> CMat {
    let n = a.rows();
    let m = a.cols();
    let mut aw = CMat::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..m {
                s += w.get(k, j).scale(a.get(i, k));
            }
            aw.set(i, j, s);
        }
    }
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..m {
                s += aw.get(i, k).scale(a.get(j, k));
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Exact action of `[[A, B], [0, A^{-T}]]`:
/// `R(g) f(x) = |det A|^{1/2} e(x (A B^T) x^T / 2) f(x A)`.
/// `ab_t` is the symmetric product `A B^T`. Phase exactness is preserved.
fn triangular_apply(a: &RMat, ab_t: &SymMat, f: &GaussianPacket) -> Result<GaussianPacket, Error> {
    let n = f.n();
    let mut w = real_congruence(&f.w, a);
    for i in 0..n {
        for j in 0..n {
            let v = w.get(i, j) + Complex64::new(ab_t.get(i, j), 0.0);
            w.set(i, j, v);
        }
    }
    let mut wvec = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..n {
            s += f.wvec[k].scale(a.get(i, k));
        }
        wvec[i] = s;
    }
    let det = fx::abs(a.det());
    if det == 0.0 {
        return Err(Error::NumericalBreakdown("singular triangular factor"));
    }
    let c = f.c.scale(fx::sqrt(det));
    let mut out = GaussianPacket::new(w, wvec, c)?;
    out.phase_exact = f.phase_exact;
    Ok(out)
}

/// Action of a real orthogonal rotation: `R(k(Q1)) f(x) = f(x Q1)`.
fn orthogonal_apply(q: &RMat, f: &GaussianPacket) -> Result<GaussianPacket, Error> {
    triangular_apply(q, &SymMat::zeros(f.n()), f)
}

/// Partial Fourier transform over the coordinate subset `s` — the action of
/// the `J_S` element of the maximal compact. The Gaussian integral is closed
/// form; the amplitude picks up `det(-i W_SS)^{-1/2}` (principal branch,
/// guarded at the cut), and the phase flag is cleared.
fn partial_fourier(f: &GaussianPacket, s: &[usize]) -> Result<GaussianPacket, Error> {
    let n = f.n();
    let k = s.len();
    if k == 0 {
        return Ok(f.clone());
    }
    let in_s = |i: usize| s.contains(&i);
    let wss = CMat::from_fn(k, k, |a, b| f.w.get(s[a], s[b]));
    let det = wss.scale(Complex64::new(0.0, -1.0)).det();
    if det.re < 0.0 && fx::abs(det.im) <= 1e-12 * det.norm() {
        return Err(Error::NumericalBreakdown(
            "Gaussian determinant on the branch cut",
        ));
    }
    let amp = sqrt_principal(det).finv();
    let wss_inv = wss.inverse()?;
    // u = x G + w_S with G[i][col] = W[i][s_col] off S and -delta on S
    let g = CMat::from_fn(n, k, |i, col| {
        if in_s(i) {
            if i == s[col] {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        } else {
            f.w.get(i, s[col])
        }
    });
    let ws: Vec<Complex64> = s.iter().map(|&i| f.wvec[i]).collect();
    // W' = embed(W_FF) - G W_SS^{-1} G^T
    let gw = g.mul(&wss_inv);
    let gwg = gw.mul(&g.transpose());
    let w_new = CMat::from_fn(n, n, |i, j| {
        let base = if in_s(i) || in_s(j) {
            Complex64::new(0.0, 0.0)
        } else {
            f.w.get(i, j)
        };
        base - gwg.get(i, j)
    });
    // w' = embed(w_F) - w_S W_SS^{-1} G^T
    let wsm = wss_inv.left_mul_vec(&ws);
    let correction = g.transpose().left_mul_vec(&wsm);
    let mut wvec = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let base = if in_s(i) { Complex64::new(0.0, 0.0) } else { f.wvec[i] };
        wvec[i] = base - correction[i];
    }
    // c' = c det(-i W_SS)^{-1/2} e(-w_S W_SS^{-1} w_S^T / 2)
    let quad = wss_inv.quad_form(&ws);
    let c = f.c * amp * e_complex(quad.scale(-0.5));
    Ok(GaussianPacket::new(symmetrize_c(&w_new), wvec, c)?.with_phase_cleared())
}

/// Split a unitary matrix as `Q1 Qd Q2` with `Q1`, `Q2` real orthogonal and
/// `Qd` diagonal unitary: the commuting real and imaginary parts of
/// `Q0 Q0^T` are jointly diagonalized by `Q1`, `Qd` is the principal square
/// root of the resulting diagonal, and `Q2 = Qd^{-1} Q1^T Q0`.
pub fn unitary_split(q0: &CMat) -> Result<(RMat, Vec<Complex64>, RMat), Error> {
    let n = q0.rows();
    if q0.cols() != n {
        return Err(Error::DimensionMismatch);
    }
    if !q0.is_unitary(1e-9) {
        return Err(Error::NotUnitary);
    }
    let m = q0.mul(&q0.transpose());
    let re = SymMat::symmetrized(&m.re());
    let im = SymMat::symmetrized(&m.im());
    let (vals, mut q1) = crate::mat::sym_eigen(&re);
    // refine within eigenvalue clusters so the imaginary part is diagonal too
    let mut start = 0usize;
    while start < n {
        let mut end = start + 1;
        while end < n && fx::abs(vals[end] - vals[start]) < 1e-8 {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let block = RMat::from_fn(n, size, |i, j| q1.get(i, start + j));
            let proj = SymMat::symmetrized(&block.transpose().mul(im.mat()).mul(&block));
            let (_, rot) = crate::mat::sym_eigen(&proj);
            let rotated = block.mul(&rot);
            for i in 0..n {
                for j in 0..size {
                    q1.set(i, start + j, rotated.get(i, j));
                }
            }
        }
        start = end;
    }
    let lam = real_congruence(&m, &q1.transpose());
    for i in 0..n {
        for j in 0..n {
            if i != j && lam.get(i, j).norm() > 1e-7 {
                return Err(Error::DegenerateSpectrum);
            }
        }
    }
    let qd: Vec<Complex64> = (0..n)
        .map(|i| {
            let z = lam.get(i, i);
            sqrt_principal(z / z.norm())
        })
        .collect();
    let qd_inv = CMat::diag(&qd.iter().map(|z| z.conj()).collect::<Vec<_>>());
    let q2c = qd_inv.mul(&CMat::from_real(&q1.transpose()).mul(q0));
    if q2c.im().max_abs() > 1e-7 {
        return Err(Error::DegenerateSpectrum);
    }
    Ok((q1, qd, q2c.re()))
}

/// Action of a diagonal unitary `k(diag(z))`. Coordinates whose rotation is
/// close to the real axis are first turned a quarter turn by an exact
/// Fourier step so the triangular factors of the remaining rotation are
/// well conditioned.
fn diagonal_unitary_apply(z: &[Complex64], f: &GaussianPacket) -> Result<GaussianPacket, Error> {
    let n = f.n();
    assert_eq!(z.len(), n);
    let mut z: Vec<Complex64> = z.iter().map(|v| v / v.norm()).collect();
    let mut out = f.clone();
    let mut shift: Vec<usize> = Vec::new();
    let mut flips: Vec<f64> = vec![1.0; n];
    let mut skip = vec![false; n];
    for (j, zj) in z.iter_mut().enumerate() {
        if (*zj - Complex64::new(1.0, 0.0)).norm() <= 1e-12 {
            skip[j] = true;
        } else if (*zj + Complex64::new(1.0, 0.0)).norm() <= 1e-12 {
            skip[j] = true;
            flips[j] = -1.0;
        } else if fx::abs(zj.im) < core::f64::consts::FRAC_1_SQRT_2 {
            shift.push(j);
            *zj *= Complex64::new(0.0, -1.0);
        }
    }
    if !shift.is_empty() {
        out = partial_fourier(&out, &shift)?;
    }
    let machinery: Vec<usize> = (0..n).filter(|&j| !skip[j]).collect();
    if !machinery.is_empty() {
        // k(diag(z)) = [[I, P], [0, I]] J_S [[S, C], [0, S^{-1}]] per
        // coordinate, with S = diag(sin), C = diag(cos), P = diag(cot)
        let mut a_m = RMat::identity(n);
        let mut ab_m = SymMat::zeros(n);
        let mut p_up = SymMat::zeros(n);
        for &j in &machinery {
            let (c, s) = (z[j].re, z[j].im);
            a_m.set(j, j, s);
            ab_m.set_sym(j, j, s * c);
            p_up.set_sym(j, j, c / s);
        }
        out = triangular_apply(&a_m, &ab_m, &out)?;
        out = partial_fourier(&out, &machinery)?;
        out = triangular_apply(&RMat::identity(n), &p_up, &out)?;
    }
    if flips.iter().any(|&v| v < 0.0) {
        let e = RMat::from_fn(n, n, |i, j| if i == j { flips[i] } else { 0.0 });
        out = orthogonal_apply(&e, &out)?;
    }
    Ok(out)
}

/// The oscillator-representation action `R(g)` on a Gaussian packet.
///
/// Upper block-triangular `g` acts in closed form with the phase exact.
/// General `g` routes through the Iwasawa factorization; the modulus of the
/// result is exact, while the overall phase is path-dependent once a Fourier
/// step fires (`phase_exact` cleared).
pub fn weil_apply(g: &SpMatrix, f: &GaussianPacket) -> Result<GaussianPacket, Error> {
    let n = f.n();
    if g.n() != n {
        return Err(Error::DimensionMismatch);
    }
    let scale = g.max_abs().max(1.0);
    if g.c().max_abs() <= 1e-14 * scale {
        let ab_t = SymMat::symmetrized(&g.a().mul(&g.b().transpose()));
        return triangular_apply(g.a(), &ab_t, f);
    }
    let coords = iwasawa(g)?;
    let (q1, qd, q2) = unitary_split(&coords.q)?;
    let mut out = orthogonal_apply(&q2, f)?;
    out = diagonal_unitary_apply(&qd, &out)?;
    out = orthogonal_apply(&q1, &out)?;
    let r = sqrt_upper(&coords.y);
    triangular_apply(&r, &coords.x, &out)
}

/// Max over seeded sample points of
/// `| |R(g1 g2) f(x)| - |R(g1) R(g2) f(x)| |` — the modulus-level cocycle
/// identity.
pub fn cocycle_modulus_check(
    g1: &SpMatrix,
    g2: &SpMatrix,
    f: &GaussianPacket,
) -> Result<f64, Error> {
    let n = f.n();
    let combined = weil_apply(&g1.mul(g2), f)?;
    let staged = weil_apply(g1, &weil_apply(g2, f)?)?;
    let ctr = Counter::new(0xC0CFCE, 0);
    let mut worst = 0.0f64;
    for p in 0..16u64 {
        let x: Vec<f64> = (0..n)
            .map(|i| ctr.uniform_in(p * 8 + i as u64, -1.5, 1.5))
            .collect();
        let d = fx::abs(combined.eval(&x).norm() - staged.eval(&x).norm());
        worst = worst.max(d);
    }
    Ok(worst)
}

const GL16_NODES: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// Independent numerical evaluation of `R(g) f(x)` by direct quadrature of
/// the integral formula on the chart where the `C` block is invertible
/// (or the closed form when `C = 0`). Test oracle only; `n <= 2`.
pub fn weil_quadrature_oracle(
    g: &SpMatrix,
    f: &GaussianPacket,
    x: &[f64],
) -> Result<Complex64, Error> {
    let n = f.n();
    if g.n() != n || x.len() != n {
        return Err(Error::DimensionMismatch);
    }
    if n > 2 {
        return Err(Error::TooLarge(n as u64));
    }
    let scale = g.max_abs().max(1.0);
    if g.c().max_abs() <= 1e-14 * scale {
        let ab_t = SymMat::symmetrized(&g.a().mul(&g.b().transpose()));
        let packet = triangular_apply(g.a(), &ab_t, f)?;
        return Ok(packet.eval(x));
    }
    let det_c = g.c().det();
    if fx::abs(det_c) <= 1e-10 {
        return Err(Error::ChartSingular);
    }
    let c_inv = g.c().inverse()?;
    let cd = SymMat::symmetrized(&c_inv.mul(g.d()));
    let ac = SymMat::symmetrized(&g.a().mul(&c_inv));
    let xc: Vec<f64> = c_inv.transpose().left_mul_vec(x); // x C^{-T} as a row
    let im_w = f.im_w();
    let b_im: Vec<f64> = f.wvec.iter().map(|z| z.im).collect();
    let center = {
        let inv = im_w.inverse();
        let mut c0 = inv.mat().left_mul_vec(&b_im);
        for v in c0.iter_mut() {
            *v = -*v;
        }
        c0
    };
    let inv = im_w.inverse();
    let t_cut = fx::ln(1e14) / core::f64::consts::TAU;
    // oscillation frequency estimate per axis sizes the panel count
    let mut radius = vec![0.0; n];
    for i in 0..n {
        radius[i] = fx::sqrt(2.0 * t_cut * inv.get(i, i));
    }
    let mut panels = vec![0usize; n];
    for i in 0..n {
        let mut freq = fx::abs(f.wvec[i].re) + fx::abs(xc[i]);
        for j in 0..n {
            freq += (fx::abs(f.w.get(i, j).re) + fx::abs(f.w.get(i, j).im) + fx::abs(cd.get(i, j)))
                * (fx::abs(center[j]) + radius[j]);
        }
        panels[i] = fx::ceil(2.0 * radius[i] * freq / 2.5) as usize + 6;
    }
    let total: u64 = panels
        .iter()
        .map(|&p| (p * 16) as u64)
        .product();
    if total > 40_000_000 {
        return Err(Error::TooLarge(total));
    }
    // tensor Gauss-Legendre over the truncated box
    let axis_points = |i: usize| -> Vec<(f64, f64)> {
        let lo = center[i] - radius[i];
        let hi = center[i] + radius[i];
        let np = panels[i];
        let h = (hi - lo) / np as f64;
        let mut pts = Vec::with_capacity(np * 16);
        for p in 0..np {
            let a = lo + p as f64 * h;
            let mid = a + 0.5 * h;
            for k in 0..8 {
                let dx = 0.5 * h * GL16_NODES[k];
                let wk = 0.5 * h * GL16_WEIGHTS[k];
                pts.push((mid - dx, wk));
                pts.push((mid + dx, wk));
            }
        }
        pts
    };
    let integrand = |y: &[f64]| -> Complex64 {
        let fy = f.eval(y);
        let mut phase = 0.5 * cd.quad_form(y);
        for i in 0..n {
            phase -= xc[i] * y[i];
        }
        fy * e_real(phase)
    };
    let mut integral = Complex64::new(0.0, 0.0);
    match n {
        1 => {
            for &(y0, w0) in &axis_points(0) {
                integral += integrand(&[y0]).scale(w0);
            }
        }
        2 => {
            let ax0 = axis_points(0);
            let ax1 = axis_points(1);
            for &(y0, w0) in &ax0 {
                let mut inner = Complex64::new(0.0, 0.0);
                for &(y1, w1) in &ax1 {
                    inner += integrand(&[y0, y1]).scale(w1);
                }
                integral += inner.scale(w0);
            }
        }
        _ => unreachable!(),
    }
    let pref = e_real(0.5 * ac.quad_form(x)).scale(1.0 / fx::sqrt(fx::abs(det_c)));
    Ok(pref * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeqRng;
    use crate::seeded;

    #[test]
    fn eval_standard_gaussian() {
        let f = GaussianPacket::standard(1);
        assert!((f.eval(&[0.0]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = f.eval(&[1.0]);
        assert!((v.re - fx::exp(-core::f64::consts::PI)).abs() < 1e-15);
        assert!(v.im.abs() < 1e-18);
    }

    #[test]
    fn eval_linear_term_absent_at_origin() {
        let mut f = GaussianPacket::standard(2);
        f.wvec[0] = Complex64::new(0.0, 0.5);
        assert!((f.eval(&[0.0, 0.0]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn schrodinger_matches_pointwise() {
        let mut rng = SeqRng::new(5, 11);
        for n in 1..=3 {
            for _ in 0..40 {
                let f = seeded::random_packet(n, &mut rng);
                let h = seeded::random_heisenberg(n, &mut rng, 1.5);
                let wf = schrodinger_apply(&h, &f).unwrap();
                for _ in 0..20 {
                    let x0: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.5, 1.5)).collect();
                    let lhs = wf.eval(&x0);
                    // e(-t + x y^T/2 + x0 y^T) f(x0 + x)
                    let xy: f64 = h.x.iter().zip(&h.y).map(|(a, b)| a * b).sum();
                    let x0y: f64 = x0.iter().zip(&h.y).map(|(a, b)| a * b).sum();
                    let arg: Vec<f64> = x0.iter().zip(&h.x).map(|(a, b)| a + b).collect();
                    let rhs = e_real(-h.t + 0.5 * xy + x0y) * f.eval(&arg);
                    assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn schrodinger_center_only_scales() {
        let f = GaussianPacket::standard(2);
        let h = HeisenbergElem::new(vec![0.0, 0.0], vec![0.0, 0.0], 0.3);
        let g = schrodinger_apply(&h, &f).unwrap();
        assert!((g.c() - e_real(-0.3)).norm() < 1e-15);
        assert!(g.phase_exact());
    }

    #[test]
    fn dilation_action() {
        // g = diag(a, 1/a) sends the standard Gaussian to a^{1/2} e^{-pi a^2 x^2}
        let a = 1.7;
        let g = SpMatrix::gl_embed(&RMat::from_rows(&[vec![a]])).unwrap();
        let f = GaussianPacket::standard(1);
        let out = weil_apply(&g, &f).unwrap();
        assert!(out.phase_exact());
        assert!((out.c() - Complex64::new(fx::sqrt(a), 0.0)).norm() < 1e-14);
        assert!((out.w().get(0, 0) - Complex64::new(0.0, a * a)).norm() < 1e-14);
    }

    #[test]
    fn fourier_self_dual() {
        let f = GaussianPacket::standard(1);
        let out = weil_apply(&SpMatrix::j0(1), &f).unwrap();
        assert!((out.c() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((out.w().get(0, 0) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!(out.wvec()[0].norm() < 1e-12);
        assert!(!out.phase_exact());
    }

    #[test]
    fn triangular_phase_exact_identity() {
        let mut rng = SeqRng::new(21, 7);
        for n in 1..=2 {
            for _ in 0..40 {
                let f = seeded::random_packet(n, &mut rng);
                // random upper triangular symplectic [[A, B], [0, A^{-T}]]
                let a = RMat::from_fn(n, n, |i, j| {
                    if i == j {
                        rng.uniform_in(0.5, 2.0)
                    } else {
                        rng.uniform_in(-1.0, 1.0)
                    }
                });
                let s = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 1.0)));
                let b = s.mat().mul(&a.inverse().unwrap().transpose());
                let g = SpMatrix::from_blocks(
                    a.clone(),
                    b,
                    RMat::zeros(n, n),
                    a.inverse().unwrap().transpose(),
                )
                .unwrap();
                let out = weil_apply(&g, &f).unwrap();
                assert!(out.phase_exact());
                for _ in 0..10 {
                    let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.2, 1.2)).collect();
                    let xa = a.left_mul_vec(&x);
                    let abt = SymMat::symmetrized(&a.mul(&g.b().transpose()));
                    let expected = f
                        .eval(&xa)
                        .scale(fx::sqrt(fx::abs(a.det())))
                        * e_real(0.5 * abt.quad_form(&x));
                    let got = out.eval(&x);
                    assert!((got - expected).norm() < 1e-12 * expected.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn unitary_split_reassembles() {
        let mut rng = SeqRng::new(33, 1);
        for n in 1..=3 {
            for _ in 0..70 {
                let q0 = seeded::random_unitary(n, &mut rng);
                let (q1, qd, q2) = unitary_split(&q0).unwrap();
                let prod = CMat::from_real(&q1)
                    .mul(&CMat::diag(&qd))
                    .mul(&CMat::from_real(&q2));
                assert!(prod.max_abs_diff(&q0) < 1e-8, "n={n}");
                // orthogonality of the real factors
                assert!(q1.mul(&q1.transpose()).max_abs_diff(&RMat::identity(n)) < 1e-9);
                assert!(q2.mul(&q2.transpose()).max_abs_diff(&RMat::identity(n)) < 1e-9);
            }
        }
    }

    #[test]
    fn unitary_split_orthogonal_input() {
        // orthogonal Q0 gives trivial diagonal
        let th = 0.7f64;
        let q0 = CMat::from_fn(2, 2, |i, j| {
            let m = [[th.cos(), -th.sin()], [th.sin(), th.cos()]];
            Complex64::new(m[i][j], 0.0)
        });
        let (q1, qd, q2) = unitary_split(&q0).unwrap();
        for z in &qd {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        }
        let prod = q1.mul(&q2);
        assert!(prod.max_abs_diff(&q0.re()) < 1e-9);
    }

    #[test]
    fn unitary_split_diagonal_input() {
        let d = [e_real(0.13), e_real(0.41)];
        let q0 = CMat::diag(&d);
        let (q1, qd, q2) = unitary_split(&q0).unwrap();
        let prod = CMat::from_real(&q1)
            .mul(&CMat::diag(&qd))
            .mul(&CMat::from_real(&q2));
        assert!(prod.max_abs_diff(&q0) < 1e-9);
    }

    #[test]
    fn closure_and_modulus_oracle() {
        let mut rng = SeqRng::new(101, 0);
        for n in 1..=2usize {
            for _ in 0..60 {
                let f = seeded::random_packet(n, &mut rng);
                let g = seeded::random_symplectic(n, &mut rng, 1.0);
                let out = weil_apply(&g, &f).unwrap();
                // closure: valid packet (Im W > 0 verified in constructor)
                assert_eq!(out.n(), n);
                // modulus against quadrature where the chart is comfortable
                let c_ok = fx::abs(g.c().det()) > 0.05
                    && g.c().inverse().map(|ci| ci.max_abs() < 20.0).unwrap_or(false);
                if c_ok {
                    for _ in 0..3 {
                        let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
                        let oracle = weil_quadrature_oracle(&g, &f, &x).unwrap();
                        let got = out.eval(&x);
                        assert!(
                            (got.norm() - oracle.norm()).abs() < 1e-7 * oracle.norm().max(1e-3),
                            "n={n} got={} oracle={}",
                            got.norm(),
                            oracle.norm()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_fourier_point() {
        // full Fourier transform of the standard Gaussian at x = 0.3
        let f = GaussianPacket::standard(1);
        let v = weil_quadrature_oracle(&SpMatrix::j0(1), &f, &[0.3]).unwrap();
        let expected = fx::exp(-core::f64::consts::PI * 0.09);
        assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn cocycle_modulus_bounds() {
        let mut rng = SeqRng::new(55, 9);
        let n = 2;
        let f = seeded::random_packet(n, &mut rng);
        // identity second factor
        let g1 = seeded::random_symplectic(n, &mut rng, 0.8);
        let dev = cocycle_modulus_check(&g1, &SpMatrix::identity(n), &f).unwrap();
        assert!(dev < 1e-12);
        // two upper triangular factors compose exactly
        let x1 = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 1.0)));
        let x2 = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 1.0)));
        let t1 = SpMatrix::translation(&x1);
        let t2 = SpMatrix::translation(&x2);
        let dev = cocycle_modulus_check(&t1, &t2, &f).unwrap();
        assert!(dev < 1e-10);
        // general pairs at modulus level
        for _ in 0..20 {
            let g1 = seeded::random_symplectic(n, &mut rng, 0.8);
            let g2 = seeded::random_symplectic(n, &mut rng, 0.8);
            let dev = cocycle_modulus_check(&g1, &g2, &f).unwrap();
            assert!(dev < 1e-8, "dev={dev}");
        }
    }

    #[test]
    fn l2_norm_preserved() {
        let mut rng = SeqRng::new(71, 3);
        for n in 1..=3 {
            for _ in 0..40 {
                let f = seeded::random_packet(n, &mut rng);
                let g = seeded::random_symplectic(n, &mut rng, 1.0);
                let out = weil_apply(&g, &f).unwrap();
                let a = f.l2_norm();
                let b = out.l2_norm();
                assert!((a - b).abs() < 1e-8 * a, "n={n} {a} vs {b}");
            }
        }
    }

    #[test]
    fn intertwining_modulus() {
        // R(g) W(h^g) f = W(h) R(g) f
        let mut rng = SeqRng::new(88, 4);
        for n in 1..=2 {
            for _ in 0..30 {
                let f = seeded::random_packet(n, &mut rng);
                let g = seeded::random_symplectic(n, &mut rng, 1.0);
                let h = seeded::random_heisenberg(n, &mut rng, 1.0);
                let hg = crate::jacobi::h_act(&g, &h).unwrap();
                let lhs = weil_apply(&g, &schrodinger_apply(&hg, &f).unwrap()).unwrap();
                let rhs = schrodinger_apply(&h, &weil_apply(&g, &f).unwrap()).unwrap();
                for _ in 0..6 {
                    let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.2, 1.2)).collect();
                    let a = lhs.eval(&x).norm();
                    let b = rhs.eval(&x).norm();
                    assert!((a - b).abs() < 1e-8 * a.max(1.0), "n={n} {a} vs {b}");
                }
            }
        }
    }
}

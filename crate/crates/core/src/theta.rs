//! Theta evaluators.
//!
//! * [`theta_direct_box`] — the finite exponential sum with quadratic phase
//!   over lattice points in a scaled open box, evaluated with a two-term
//!   phase recurrence in the innermost dimension.
//! * [`theta_direct_schwartz`] — the packet-weighted lattice sum, truncated
//!   by the Gaussian envelope.
//! * [`theta_auto`] — the automorphic evaluation in group coordinates: the
//!   packet is rotated by `R(k(Q))` and summed over the lattice against the
//!   quadratic phase read off the Iwasawa coordinates.
//! * [`theta_fast_modulus`] — reduce to the fundamental domain first and
//!   evaluate there, where the lattice sum has O(1) significant terms.
//! * [`dyadic_height_bound`] — the finite dyadic sum of reduced heights
//!   that dominates box-truncated theta sums.
//! * [`cusp_main_term`] — the rank-reduced main term of the deep-cusp
//!   expansion, with the shape of its remainder envelope.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use core::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;

use crate::cmat::e_real;
use crate::error::Error;
use crate::fx;
use crate::jacobi::{fold_heisenberg, h_act, h_gamma, h_mul, HeisenbergElem};
use crate::mat::{sqrt_upper, PosDefMat, RMat, SymMat};
use crate::reduction::ReduceContext;
use crate::symplectic::{embed_unitary, iwasawa, langlands_coords, SpMatrix};
use crate::weil::{weil_apply, GaussianPacket};

/// Query data `(M, X, x, y)` for a theta sum.
#[derive(Debug, Clone)]
pub struct ThetaQuery {
    pub m_scale: f64,
    pub x_mat: SymMat,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ThetaQuery {
    pub fn new(m_scale: f64, x_mat: SymMat, x: Vec<f64>, y: Vec<f64>) -> Result<Self, Error> {
        let n = x_mat.n();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch);
        }
        if !(m_scale >= 1.0) {
            return Err(Error::NumericalBreakdown("scale must be at least 1"));
        }
        Ok(ThetaQuery { m_scale, x_mat, x, y })
    }

    pub fn n(&self) -> usize {
        self.x_mat.n()
    }
}

/// The open box `(0, b_1) x ... x (0, b_n)`.
#[derive(Debug, Clone)]
pub struct BoxSpec {
    pub b: Vec<f64>,
}

impl BoxSpec {
    pub fn unit(n: usize) -> Self {
        BoxSpec { b: vec![1.0; n] }
    }
}

/// A dyadic index `(j, S)`: per-axis dyadic levels and a sign subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicIndex {
    pub j: Vec<u32>,
    pub s_mask: u32,
}

impl DyadicIndex {
    pub fn s_contains(&self, i: usize) -> bool {
        self.s_mask >> i & 1 == 1
    }

    pub fn j_sum(&self) -> u32 {
        self.j.iter().sum()
    }
}

/// A theta value together with the number of envelope-significant lattice
/// terms that produced it.
#[derive(Debug, Clone, Copy)]
pub struct ThetaValue {
    pub value: Complex64,
    pub terms: usize,
}

/// Lattice point budget for direct summation.
pub const LATTICE_GUARD: u64 = 100_000_000;

#[cfg(feature = "std")]
std::thread_local! {
    static PHASE_MUTATION: core::cell::Cell<bool> = const { core::cell::Cell::new(false) };
}
#[cfg(not(feature = "std"))]
static PHASE_MUTATION: AtomicBool = AtomicBool::new(false);

/// Verification hook: flip the sign of the automorphic prefactor phase.
/// Used by the mutation check of the verify suite; never enable otherwise.
/// Thread-local when the `std` feature is on, so concurrent callers are
/// unaffected.
pub fn set_phase_mutation(on: bool) {
    #[cfg(feature = "std")]
    PHASE_MUTATION.with(|c| c.set(on));
    #[cfg(not(feature = "std"))]
    PHASE_MUTATION.store(on, Ordering::SeqCst);
}

fn prefactor_phase_sign() -> f64 {
    #[cfg(feature = "std")]
    let on = PHASE_MUTATION.with(|c| c.get());
    #[cfg(not(feature = "std"))]
    let on = PHASE_MUTATION.load(Ordering::SeqCst);
    if on {
        -1.0
    } else {
        1.0
    }
}

#[derive(Default, Clone, Copy)]
struct KahanC {
    sum: Complex64,
    carry: Complex64,
}

impl KahanC {
    #[inline(always)]
    fn add(&mut self, v: Complex64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Enumerate the lattice points where the Gaussian envelope
/// `exp(-2 pi q(m))`, `q(m) = (m+o) B (m+o)^T / 2 + (m+o) beta^T`, is within
/// `exp(-2 pi t_cut)` of its peak, and accumulate `term(m)` over them in
/// lexicographic order.
fn lattice_sum(
    b: &PosDefMat,
    beta: &[f64],
    offset: &[f64],
    t_cut: f64,
    mut term: impl FnMut(&[f64]) -> Complex64,
) -> Result<(Complex64, usize), Error> {
    let n = b.n();
    if n == 0 {
        let mut acc = KahanC::default();
        acc.add(term(&[]));
        return Ok((acc.sum, 1));
    }
    let b_inv = b.inverse();
    // continuous minimizer of q
    let u_star: Vec<f64> = {
        let mut v = b_inv.mat().left_mul_vec(beta);
        for x in v.iter_mut() {
            *x = -*x;
        }
        v
    };
    let q_min = {
        let mut q = 0.5 * b.quad_form(&u_star);
        for i in 0..n {
            q += u_star[i] * beta[i];
        }
        q
    };
    let q_of = |m: &[f64]| -> f64 {
        let u: Vec<f64> = (0..n).map(|i| m[i] + offset[i]).collect();
        let mut q = 0.5 * b.quad_form(&u);
        for i in 0..n {
            q += u[i] * beta[i];
        }
        q
    };
    // The cutoff is relative to the best lattice point, which may sit well
    // below the continuous peak (deep cusp). Grow the box until it certainly
    // covers everything within t_cut of that best point.
    let mut t_eff = t_cut;
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    let mut q_best = f64::INFINITY;
    for _pass in 0..6 {
        let mut count_guard = 1u64;
        for i in 0..n {
            let center = u_star[i] - offset[i];
            let radius = fx::sqrt((2.0 * t_eff * b_inv.get(i, i)).max(0.0));
            lo[i] = fx::floor(center - radius) as i64;
            hi[i] = fx::ceil(center + radius) as i64;
            count_guard = count_guard.saturating_mul((hi[i] - lo[i] + 1).max(1) as u64);
        }
        if count_guard > LATTICE_GUARD {
            return Err(Error::TooLarge(count_guard));
        }
        q_best = f64::INFINITY;
        let mut m = lo.clone();
        let mut mf = vec![0.0f64; n];
        loop {
            for i in 0..n {
                mf[i] = m[i] as f64;
            }
            let q = q_of(&mf);
            if q < q_best {
                q_best = q;
            }
            let mut axis = 0;
            let mut rolled = false;
            loop {
                if axis == n {
                    rolled = true;
                    break;
                }
                m[axis] += 1;
                if m[axis] <= hi[axis] {
                    break;
                }
                m[axis] = lo[axis];
                axis += 1;
            }
            if rolled {
                break;
            }
        }
        let t_needed = (q_best - q_min) + t_cut;
        if t_needed <= t_eff * (1.0 + 1e-12) {
            break;
        }
        t_eff = t_needed;
    }
    let mut acc = KahanC::default();
    let mut used = 0usize;
    let mut m = lo.clone();
    let mut mf = vec![0.0f64; n];
    loop {
        for i in 0..n {
            mf[i] = m[i] as f64;
        }
        if q_of(&mf) <= q_best + t_cut {
            acc.add(term(&mf));
            used += 1;
        }
        let mut axis = 0;
        loop {
            if axis == n {
                return Ok((acc.sum, used));
            }
            m[axis] += 1;
            if m[axis] <= hi[axis] {
                break;
            }
            m[axis] = lo[axis];
            axis += 1;
        }
    }
}

/// Direct box-truncated theta sum: the exact finite sum of
/// `e(m X m^T / 2 + m y^T)` over integer `m` with `m + x` strictly inside
/// the scaled box.
pub fn theta_direct_box(q: &ThetaQuery, spec: &BoxSpec) -> Result<ThetaValue, Error> {
    let n = q.n();
    if spec.b.len() != n {
        return Err(Error::DimensionMismatch);
    }
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    let mut count = 1u64;
    for i in 0..n {
        if !(spec.b[i] > 0.0) {
            return Err(Error::NumericalBreakdown("box edge must be positive"));
        }
        // strict inequalities on both ends
        lo[i] = fx::floor(-q.x[i]) as i64 + 1;
        hi[i] = fx::ceil(q.m_scale * spec.b[i] - q.x[i]) as i64 - 1;
        if hi[i] < lo[i] {
            return Ok(ThetaValue { value: Complex64::new(0.0, 0.0), terms: 0 });
        }
        count = count.saturating_mul((hi[i] - lo[i] + 1) as u64);
    }
    if count > LATTICE_GUARD {
        return Err(Error::TooLarge(count));
    }
    let x_mat = &q.x_mat;
    let half_x00 = 0.5 * x_mat.get(0, 0);
    let step = e_real(2.0 * half_x00);
    let mut acc = KahanC::default();
    let mut outer = lo[1..].to_vec();
    loop {
        // inner phase a m0^2 + b m0 + c with a = X_00/2
        let mut bcoef = q.y[0];
        for j in 1..n {
            bcoef += x_mat.get(0, j) * outer[j - 1] as f64;
        }
        let mut ccoef = 0.0;
        for i in 1..n {
            for j in 1..n {
                ccoef += 0.5 * x_mat.get(i, j) * outer[i - 1] as f64 * outer[j - 1] as f64;
            }
            ccoef += q.y[i] * outer[i - 1] as f64;
        }
        let m0 = lo[0] as f64;
        let mut e = e_real(half_x00 * m0 * m0 + bcoef * m0 + ccoef);
        let mut f = e_real(2.0 * half_x00 * m0 + half_x00 + bcoef);
        for _ in lo[0]..=hi[0] {
            acc.add(e);
            e *= f;
            f *= step;
        }
        let mut axis = 1;
        loop {
            if axis == n {
                return Ok(ThetaValue { value: acc.sum, terms: count as usize });
            }
            outer[axis - 1] += 1;
            if outer[axis - 1] <= hi[axis] {
                break;
            }
            outer[axis - 1] = lo[axis];
            axis += 1;
        }
    }
}

/// Packet-weighted theta sum
/// `sum_m f(M^{-1}(m + x)) e(m X m^T / 2 + m y^T)`, truncated where the
/// packet envelope falls below `tail_tol` relative to its peak.
pub fn theta_direct_schwartz(
    q: &ThetaQuery,
    f: &GaussianPacket,
    tail_tol: f64,
) -> Result<ThetaValue, Error> {
    let n = q.n();
    if f.n() != n {
        return Err(Error::DimensionMismatch);
    }
    let m_inv = 1.0 / q.m_scale;
    let im_w = f.im_w();
    let b = PosDefMat::new(SymMat::symmetrized(
        &im_w.mat().scale(m_inv * m_inv),
    ))?;
    let beta: Vec<f64> = f.wvec().iter().map(|z| z.im * m_inv).collect();
    let t_cut = fx::ln(1.0 / tail_tol) / core::f64::consts::TAU;
    let x_mat = &q.x_mat;
    let (sum, used) = lattice_sum(&b, &beta, &q.x, t_cut, |m| {
        let arg: Vec<f64> = (0..n).map(|i| m_inv * (m[i] + q.x[i])).collect();
        let mut phase = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += x_mat.get(i, j) * m[j];
            }
            phase += 0.5 * m[i] * row + m[i] * q.y[i];
        }
        f.eval(&arg) * e_real(phase)
    })?;
    Ok(ThetaValue { value: sum, terms: used })
}

/// Automorphic theta evaluation in group coordinates:
/// `(det Y)^{1/4} e(-t + x y^T / 2)
///   sum_m f_Q((m + x) Y^{1/2}) e((m+x) X (m+x)^T / 2 + m y^T)`
/// with `f_Q = R(k(Q)) f`.
pub fn theta_auto(
    h: &HeisenbergElem,
    g: &SpMatrix,
    f: &GaussianPacket,
    tail_tol: f64,
) -> Result<ThetaValue, Error> {
    let coords = iwasawa(g)?;
    theta_auto_coords(h, &coords, f, tail_tol)
}

/// [`theta_auto`] when the Iwasawa coordinates are already known.
pub fn theta_auto_coords(
    h: &HeisenbergElem,
    coords: &crate::symplectic::IwasawaCoords,
    f: &GaussianPacket,
    tail_tol: f64,
) -> Result<ThetaValue, Error> {
    let n = coords.n();
    if h.n() != n || f.n() != n {
        return Err(Error::DimensionMismatch);
    }
    let fq = weil_apply(&embed_unitary(&coords.q)?, f)?;
    let r = sqrt_upper(&coords.y);
    let im_wq = fq.im_w();
    let b = PosDefMat::new(SymMat::symmetrized(
        &r.mul(im_wq.mat()).mul(&r.transpose()),
    ))?;
    let beta_raw: Vec<f64> = fq.wvec().iter().map(|z| z.im).collect();
    let beta = r.transpose().left_mul_vec(&beta_raw); // Im(w) R^T as a row
    let t_cut = fx::ln(1.0 / tail_tol) / core::f64::consts::TAU;
    let x_mat = &coords.x;
    let (sum, used) = lattice_sum(&b, &beta, &h.x, t_cut, |m| {
        let mx: Vec<f64> = (0..n).map(|i| m[i] + h.x[i]).collect();
        let arg = r.left_mul_vec(&mx); // (m+x) Y^{1/2} as a row
        let mut phase = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += x_mat.get(i, j) * mx[j];
            }
            phase += 0.5 * mx[i] * row + m[i] * h.y[i];
        }
        fq.eval(&arg) * e_real(phase)
    })?;
    let xy: f64 = h.x.iter().zip(&h.y).map(|(a, b)| a * b).sum();
    let pref = fx::powf(coords.det_v(), 0.25)
        * e_real(prefactor_phase_sign() * (-h.t + 0.5 * xy));
    Ok(ThetaValue { value: sum * pref, terms: used })
}

/// Result of the reduced (fast) modulus evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FastTheta {
    pub modulus: f64,
    pub terms: usize,
    pub reduction_iterations: usize,
}

/// Modulus of the theta function evaluated after reduction into the
/// fundamental domain, where the lattice sum has O(1) significant terms.
/// The group pair is transported by the integral element realizing the
/// reduction and the Heisenberg part is folded into the unit box; both
/// leave the modulus unchanged.
pub fn theta_fast_modulus(
    ctx: &ReduceContext,
    h: &HeisenbergElem,
    g: &SpMatrix,
    f: &GaussianPacket,
    tail_tol: f64,
) -> Result<FastTheta, Error> {
    let res = ctx.siegel_reduce(g)?;
    let h_tw = h_act(&res.gamma0.to_sp().inverse(), h)?;
    let moved = h_mul(&h_gamma(&res.gamma0), &h_tw)?;
    let folded = fold_heisenberg(&moved);
    let val = theta_auto_coords(&folded, &res.reduced, f, tail_tol)?;
    Ok(FastTheta {
        modulus: val.value.norm(),
        terms: val.terms,
        reduction_iterations: res.iterations,
    })
}

/// The group point `[[I, X], [0, I]] diag(M^{-1} I, M I)` attached to a
/// scaled theta query.
pub fn g_scaling(m_scale: f64, x_mat: &SymMat) -> SpMatrix {
    let n = x_mat.n();
    let a = RMat::identity(n).scale(1.0 / m_scale);
    let b = x_mat.mat().scale(m_scale);
    let d = RMat::identity(n).scale(m_scale);
    SpMatrix::from_blocks(a, b, RMat::zeros(n, n), d).expect("exact construction")
}

/// `[[I, X], [0, I]] diag(B^{-1}, B)` for a positive diagonal `B` given by
/// its entries (here the box edges scaled by `M`).
pub fn g_box_scaling(edges: &[f64], x_mat: &SymMat) -> SpMatrix {
    let n = x_mat.n();
    assert_eq!(edges.len(), n);
    let a = RMat::from_fn(n, n, |i, j| if i == j { 1.0 / edges[i] } else { 0.0 });
    let d = RMat::from_fn(n, n, |i, j| if i == j { edges[i] } else { 0.0 });
    let b = x_mat.mat().mul(&d);
    SpMatrix::from_blocks(a, b, RMat::zeros(n, n), d).expect("exact construction")
}

/// The dyadic scaling-and-reflection element `diag(A_j E_S, A_j^{-1} E_S)`.
pub fn g_dyadic(n: usize, idx: &DyadicIndex) -> SpMatrix {
    assert_eq!(idx.j.len(), n);
    let a = RMat::from_fn(n, n, |i, j| {
        if i == j {
            let sign = if idx.s_contains(i) { -1.0 } else { 1.0 };
            sign * (1u64 << idx.j[i]) as f64
        } else {
            0.0
        }
    });
    let d = RMat::from_fn(n, n, |i, j| {
        if i == j {
            let sign = if idx.s_contains(i) { -1.0 } else { 1.0 };
            sign / (1u64 << idx.j[i]) as f64
        } else {
            0.0
        }
    });
    SpMatrix::from_blocks(a, RMat::zeros(n, n), RMat::zeros(n, n), d)
        .expect("exact construction")
}

/// The Jacobi group pair `(h, g_{M, X})` whose automorphic theta value,
/// scaled by `M^{n/2}`, equals the direct lattice sum of the query exactly:
/// the linear phase is shifted by `-x X` and the center coordinate absorbs
/// the resulting constant.
pub fn jacobi_of_query(q: &ThetaQuery) -> (HeisenbergElem, SpMatrix) {
    let n = q.n();
    let g = g_scaling(q.m_scale, &q.x_mat);
    let xx = q.x_mat.mat().left_mul_vec(&q.x); // x X as a row
    let y_shift: Vec<f64> = (0..n).map(|i| q.y[i] - xx[i]).collect();
    let x_dot_y: f64 = q.x.iter().zip(&y_shift).map(|(a, b)| a * b).sum();
    let x_x_x: f64 = q.x.iter().zip(&xx).map(|(a, b)| a * b).sum();
    let t = 0.5 * x_dot_y + 0.5 * x_x_x;
    (HeisenbergElem::new(q.x.clone(), y_shift, t), g)
}

/// Result of the dyadic height bound.
#[derive(Debug, Clone, Copy)]
pub struct DyadicBound {
    pub value: f64,
    pub heights: usize,
}

/// Ceiling on `M max(b)` for the dyadic range guard.
pub const DYADIC_RANGE_GUARD: f64 = 16384.0;

/// The finite dyadic height sum dominating the box-truncated theta sum:
/// `scale * M^{n/2} sum_S sum_{j: 2^{j_i} <= M b_i} 2^{-|j|/2}
///  D(Gamma g_{MB, X} g_{j, S})^{1/4}`.
/// `scale` is the envelope constant calibrated by the harness.
pub fn dyadic_height_bound(
    ctx: &ReduceContext,
    q: &ThetaQuery,
    spec: &BoxSpec,
    scale: f64,
) -> Result<DyadicBound, Error> {
    let n = q.n();
    if spec.b.len() != n {
        return Err(Error::DimensionMismatch);
    }
    let m = q.m_scale;
    let mut caps = vec![0u32; n];
    for i in 0..n {
        let edge = m * spec.b[i];
        if edge > DYADIC_RANGE_GUARD {
            return Err(Error::TooLarge(edge as u64));
        }
        caps[i] = fx::floor(fx::log2(edge)).max(0.0) as u32;
    }
    let edges: Vec<f64> = (0..n).map(|i| m * spec.b[i]).collect();
    let g_base = g_box_scaling(&edges, &q.x_mat);
    let mut total = 0.0;
    let mut heights = 0usize;
    for idx in crate::cutoff::dyadic_indices(&caps) {
        // the per-axis condition is 2^{j_i} <= M b_i, sharper than the cap
        if (0..n).any(|i| (1u64 << idx.j[i]) as f64 > edges[i]) {
            continue;
        }
        let g = g_base.mul(&g_dyadic(n, &idx));
        let d = ctx.height(&g)?;
        heights += 1;
        total += fx::powf(2.0, -0.5 * idx.j_sum() as f64) * fx::powf(d, 0.25);
    }
    let value = scale * fx::powf(m, 0.5 * n as f64) * total;
    Ok(DyadicBound { value, heights })
}

/// Main term of the deep-cusp expansion at parabolic level `l`, together
/// with the shape `(det V_l)^{1/4} (v_l + x V x^T)^{-A}` of its remainder
/// envelope (constant left to empirical calibration).
pub fn cusp_main_term(
    ctx: &ReduceContext,
    h: &HeisenbergElem,
    g: &SpMatrix,
    f: &GaussianPacket,
    l: usize,
    a_exp: f64,
    tail_tol: f64,
) -> Result<(Complex64, f64), Error> {
    let n = g.n();
    if h.n() != n || f.n() != n {
        return Err(Error::DimensionMismatch);
    }
    if h.x.iter().chain(h.y.iter()).any(|v| fx::abs(*v) > 0.5 + 1e-12) {
        return Err(Error::NotInDomain);
    }
    let coords = iwasawa(g)?;
    let report = ctx.in_domain(&coords, 1e-6);
    if !report.ok {
        return Err(Error::NotInDomain);
    }
    let lg = langlands_coords(g, l)?;
    let k = n - l;
    // transported (x_l, y_l): row vector (x, y) times the two factors
    let f1 = lg.nilpotent_factor(n).to_full();
    let f2 = lg.unipotent_factor(n).to_full();
    let mut row = Vec::with_capacity(2 * n);
    row.extend_from_slice(&h.x);
    row.extend_from_slice(&h.y);
    let row = f2.left_mul_vec(&f1.left_mul_vec(&row));
    let (x_l, y_l) = row.split_at(n);
    let fq = weil_apply(&embed_unitary(&lg.q)?, f)?;
    // fixed first block of the packet argument
    let vl_sqrt: Vec<f64> = lg.v_l.iter().map(|&v| fx::sqrt(v)).collect();
    let u1: Vec<f64> = (0..l).map(|i| x_l[i] * vl_sqrt[i]).collect();
    let det_vl: f64 = lg.v_l.iter().product();
    let det_yl: f64 = lg.y_l.det();
    let xy_l: f64 = x_l.iter().zip(y_l).map(|(a, b)| a * b).sum();
    let pref = fx::powf(det_vl, 0.25) * fx::powf(det_yl, 0.25)
        * e_real(prefactor_phase_sign() * (-h.t + 0.5 * xy_l));
    let im_wq = fq.im_w();
    let sum = if k == 0 {
        fq.eval(&u1)
    } else {
        let r_yl = sqrt_upper(&lg.y_l);
        let b = PosDefMat::new(SymMat::symmetrized(&{
            let im22 = RMat::from_fn(k, k, |i, j| im_wq.get(l + i, l + j));
            r_yl.mul(&im22).mul(&r_yl.transpose())
        }))?;
        // linear envelope term: (u1 ImW_{12} + Im w^{(2)}) R^T
        let mut lin = vec![0.0; k];
        for j in 0..k {
            let mut s = fq.wvec()[l + j].im;
            for i in 0..l {
                s += u1[i] * im_wq.get(i, l + j);
            }
            lin[j] = s;
        }
        let beta = r_yl.transpose().left_mul_vec(&lin);
        let t_cut = fx::ln(1.0 / tail_tol) / core::f64::consts::TAU;
        let x_l2 = &x_l[l..];
        let y_l2 = &y_l[l..];
        let (s, _) = lattice_sum(&b, &beta, x_l2, t_cut, |m2| {
            let mx: Vec<f64> = (0..k).map(|i| m2[i] + x_l2[i]).collect();
            let u2 = r_yl.left_mul_vec(&mx);
            let mut arg = u1.clone();
            arg.extend_from_slice(&u2);
            let mut phase = 0.0;
            for i in 0..k {
                let mut rowp = 0.0;
                for j in 0..k {
                    rowp += lg.x_l.get(i, j) * mx[j];
                }
                phase += 0.5 * mx[i] * rowp + m2[i] * y_l2[i];
            }
            fq.eval(&arg) * e_real(phase)
        })?;
        s
    };
    // remainder envelope shape
    let v_full = coords.v();
    let v_l_entry = v_full[l - 1];
    let xvx: f64 = (0..n).map(|i| h.x[i] * h.x[i] * v_full[i]).sum();
    let shape = fx::powf(det_vl, 0.25) * fx::powf(v_l_entry + xvx, -a_exp);
    Ok((pref * sum, shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::CMat;
    use crate::rng::SeqRng;
    use crate::seeded;
    use crate::symplectic::coords_from_xy;

    fn query1(m: f64, x: f64, xs: f64, ys: f64) -> ThetaQuery {
        ThetaQuery::new(
            m,
            SymMat::symmetrized(&RMat::from_rows(&[vec![x]])),
            vec![xs],
            vec![ys],
        )
        .unwrap()
    }

    #[test]
    fn box_counts_open_interval() {
        // n=1, X=0, x=0, y=0, b=1, integer M: the open interval (0, M) holds
        // M-1 integers, every term 1
        for m in [2.0, 5.0, 17.0] {
            let q = query1(m, 0.0, 0.0, 0.0);
            let v = theta_direct_box(&q, &BoxSpec::unit(1)).unwrap();
            assert!((v.value.re - (m - 1.0)).abs() < 1e-12);
            assert!(v.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn box_alternating_bounded() {
        // X = 1: terms e(m^2/2) = (-1)^m, partial sums stay bounded by 1
        for m in 2..40 {
            let q = query1(m as f64, 1.0, 0.0, 0.0);
            let v = theta_direct_box(&q, &BoxSpec::unit(1)).unwrap().value;
            assert!(v.norm() <= 1.0 + 1e-12, "M={m} v={v}");
        }
    }

    #[test]
    fn box_matches_naive_double_loop() {
        let mut rng = SeqRng::new(7, 7);
        for _ in 0..25 {
            let n = 2;
            let x_mat = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.5, 0.5)));
            let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.4, 0.4)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.4, 0.4)).collect();
            let q = ThetaQuery::new(8.0, x_mat.clone(), x.clone(), y.clone()).unwrap();
            let spec = BoxSpec { b: vec![1.0, 1.2] };
            let fast = theta_direct_box(&q, &spec).unwrap().value;
            // independent reference: plain double loop, no recurrence
            let mut slow = Complex64::new(0.0, 0.0);
            for m0 in -20..30 {
                for m1 in -20..30 {
                    let mf = [m0 as f64, m1 as f64];
                    let inside = (0..n).all(|i| {
                        let t = mf[i] + x[i];
                        t > 0.0 && t < 8.0 * spec.b[i]
                    });
                    if inside {
                        let mut phase = 0.0;
                        for i in 0..n {
                            for j in 0..n {
                                phase += 0.5 * x_mat.get(i, j) * mf[i] * mf[j];
                            }
                            phase += mf[i] * y[i];
                        }
                        slow += e_real(phase);
                    }
                }
            }
            assert!((fast - slow).norm() < 1e-10 * slow.norm().max(1.0));
        }
    }

    #[test]
    fn box_periodicity() {
        let mut rng = SeqRng::new(8, 8);
        for _ in 0..20 {
            let q = query1(
                9.0,
                rng.uniform_in(-0.5, 0.5),
                rng.uniform_in(-0.3, 0.3),
                rng.uniform_in(-0.5, 0.5),
            );
            let spec = BoxSpec::unit(1);
            let base = theta_direct_box(&q, &spec).unwrap().value;
            // y -> y + k
            let mut q2 = q.clone();
            q2.y[0] += 3.0;
            let v2 = theta_direct_box(&q2, &spec).unwrap().value;
            assert!((base - v2).norm() < 1e-10);
            // X -> X + 2T
            let mut q3 = q.clone();
            let bumped = q3.x_mat.get(0, 0) + 2.0;
            q3.x_mat.set_sym(0, 0, bumped);
            let v3 = theta_direct_box(&q3, &spec).unwrap().value;
            assert!((base - v3).norm() < 1e-9);
        }
    }

    #[test]
    fn schwartz_standard_gaussian_value() {
        // sum e^{-pi m^2} = 1.0864348...
        let q = query1(1.0, 0.0, 0.0, 0.0);
        let f = GaussianPacket::standard(1);
        let v = theta_direct_schwartz(&q, &f, 1e-16).unwrap();
        let mut expected = 1.0;
        for m in 1..30 {
            expected += 2.0 * fx::exp(-core::f64::consts::PI * (m * m) as f64);
        }
        assert!((v.value.re - expected).abs() < 1e-12);
        assert!(v.value.im.abs() < 1e-14);
    }

    #[test]
    fn schwartz_periodicity() {
        let mut rng = SeqRng::new(9, 1);
        let f = GaussianPacket::standard(2);
        for _ in 0..10 {
            let n = 2;
            let x_mat = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.5, 0.5)));
            let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.4, 0.4)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.4, 0.4)).collect();
            let q = ThetaQuery::new(3.0, x_mat, x, y).unwrap();
            let base = theta_direct_schwartz(&q, &f, 1e-15).unwrap().value;
            let mut q2 = q.clone();
            q2.y[0] += 2.0;
            q2.y[1] -= 1.0;
            let v2 = theta_direct_schwartz(&q2, &f, 1e-15).unwrap().value;
            assert!((base - v2).norm() < 1e-10 * base.norm().max(1.0));
            let mut q3 = q.clone();
            q3.x_mat.set_sym(0, 1, q3.x_mat.get(0, 1) + 2.0);
            q3.x_mat.set_sym(0, 0, q3.x_mat.get(0, 0) - 2.0);
            let v3 = theta_direct_schwartz(&q3, &f, 1e-15).unwrap().value;
            assert!((base - v3).norm() < 1e-10 * base.norm().max(1.0));
        }
    }

    #[test]
    fn auto_matches_direct_at_identity() {
        let f = GaussianPacket::standard(1);
        let q = query1(1.0, 0.0, 0.0, 0.0);
        let direct = theta_direct_schwartz(&q, &f, 1e-16).unwrap().value;
        let auto = theta_auto(
            &HeisenbergElem::identity(1),
            &SpMatrix::identity(1),
            &f,
            1e-16,
        )
        .unwrap()
        .value;
        assert!((direct - auto).norm() < 1e-12);
    }

    #[test]
    fn auto_explicit_rank_one() {
        // (X, Y) = (0, 4): value 4^{1/4} sum e^{-4 pi m^2}
        let coords = coords_from_xy(SymMat::zeros(1), PosDefMat::from_diag(&[4.0]).unwrap());
        let g = crate::symplectic::assemble(&coords);
        let f = GaussianPacket::standard(1);
        let v = theta_auto(&HeisenbergElem::identity(1), &g, &f, 1e-16)
            .unwrap()
            .value;
        let mut expected = 1.0;
        for m in 1..10 {
            expected += 2.0 * fx::exp(-4.0 * core::f64::consts::PI * (m * m) as f64);
        }
        expected *= fx::powf(4.0, 0.25);
        assert!((v.re - expected).abs() < 1e-12, "{v} vs {expected}");
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn query_transport_identity() {
        // direct Schwartz sum = M^{n/2} theta_auto at the transported pair
        let mut rng = SeqRng::new(10, 4);
        for n in 1..=2usize {
            for _ in 0..30 {
                let x_mat =
                    SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.5, 0.5)));
                let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.5, 0.5)).collect();
                let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.5, 0.5)).collect();
                let m = fx::powf(2.0, rng.uniform_in(0.0, 5.0));
                let q = ThetaQuery::new(m, x_mat, x, y).unwrap();
                let f = seeded::random_packet(n, &mut rng);
                let dv = theta_direct_schwartz(&q, &f, 1e-15).unwrap();
                let direct = dv.value;
                let (h, g) = jacobi_of_query(&q);
                let auto = theta_auto(&h, &g, &f, 1e-15).unwrap().value;
                let scaled = auto.scale(fx::powf(m, 0.5 * n as f64));
                // the absolute floor covers near-total cancellation, where
                // the sum is zero to the precision of its own terms
                let floor = 1e-12 * dv.terms as f64;
                assert!(
                    (direct - scaled).norm() < 1e-9 * direct.norm().max(1e-6) + floor,
                    "n={n} M={m} direct={direct} scaled={scaled}"
                );
            }
        }
    }

    #[test]
    fn automorphy_modulus_invariance() {
        let mut rng = SeqRng::new(11, 6);
        for n in 1..=2usize {
            for _ in 0..25 {
                let h = seeded::random_heisenberg(n, &mut rng, 0.5);
                let g = seeded::random_symplectic(n, &mut rng, 1.0);
                let f = seeded::random_packet(n, &mut rng);
                let base = theta_auto(&h, &g, &f, 1e-15).unwrap().value.norm();
                let e = seeded::random_gamma_tilde(n, &mut rng, 8);
                let j = crate::jacobi::JacobiElem::new(h.clone(), g.clone()).unwrap();
                let moved = crate::jacobi::gamma_tilde_apply(&e, &j).unwrap();
                let v = theta_auto(&moved.h, &moved.g, &f, 1e-15).unwrap().value.norm();
                assert!(
                    (v - base).abs() <= 1e-8 * base.max(1e-9),
                    "n={n} base={base} moved={v}"
                );
            }
        }
    }

    #[test]
    fn fast_modulus_agrees_and_shrinks_work() {
        let mut rng = SeqRng::new(12, 2);
        let ctx = ReduceContext::with_defaults(1);
        let f = GaussianPacket::standard(1);
        // scaled query deep in the cusp; the linear phase must stay near an
        // integer or the value sits below the cancellation floor
        let m = 100.0;
        let q = query1(m, 0.0, 0.3, 0.002);
        let (h, g) = jacobi_of_query(&q);
        let direct = theta_auto(&h, &g, &f, 1e-14).unwrap();
        assert!(direct.value.norm() > 1e-3, "value too small: {}", direct.value.norm());
        let fast = theta_fast_modulus(&ctx, &h, &g, &f, 1e-14).unwrap();
        assert!(
            (fast.modulus - direct.value.norm()).abs() < 1e-7 * direct.value.norm().max(1e-9)
        );
        assert!(fast.terms * 30 <= direct.terms, "{} vs {}", fast.terms, direct.terms);
        // seeded moderate points agree too
        for _ in 0..15 {
            let h = seeded::random_heisenberg(1, &mut rng, 0.5);
            let g = seeded::random_symplectic(1, &mut rng, 1.5);
            let v = theta_auto(&h, &g, &f, 1e-15).unwrap().value.norm();
            let fast = theta_fast_modulus(&ctx, &h, &g, &f, 1e-15).unwrap();
            assert!((fast.modulus - v).abs() < 1e-7 * v.max(1e-9));
        }
    }

    #[test]
    fn dyadic_bound_rank_one() {
        // M < 2: only j = 0 survives; bound = 2 M^{1/2} D^{1/4} = 2 M
        let ctx = ReduceContext::with_defaults(1);
        let m = 1.9;
        let q = query1(m, 0.0, 0.0, 0.0);
        let b = dyadic_height_bound(&ctx, &q, &BoxSpec::unit(1), 1.0).unwrap();
        assert_eq!(b.heights, 2);
        assert!((b.value - 2.0 * m).abs() < 1e-6 * m, "bound {}", b.value);
    }

    #[test]
    fn dyadic_bound_dominates_direct_rank_one() {
        let ctx = ReduceContext::with_defaults(1);
        for m in [4.0, 16.0, 64.0] {
            let q = query1(m, 0.0, 0.0, 0.0);
            let theta = theta_direct_box(&q, &BoxSpec::unit(1)).unwrap().value.norm();
            let bound = dyadic_height_bound(&ctx, &q, &BoxSpec::unit(1), 1.0)
                .unwrap()
                .value;
            assert!(bound >= theta, "M={m} bound={bound} theta={theta}");
        }
    }

    #[test]
    fn cusp_main_term_collapses_at_top_level() {
        // l = n: empty inner sum; main term is the single packet value
        let ctx = ReduceContext::with_defaults(2);
        let coords = coords_from_xy(
            SymMat::symmetrized(&RMat::from_fn(2, 2, |i, j| {
                [[0.21, -0.17], [-0.17, 0.33]][i][j]
            })),
            PosDefMat::new(SymMat::symmetrized(&RMat::from_rows(&[
                vec![40.0, 0.4],
                vec![0.4, 1.1],
            ])))
            .unwrap(),
        );
        let g = crate::symplectic::assemble(&coords);
        let f = GaussianPacket::standard(2);
        let h = HeisenbergElem::new(vec![0.2, -0.1], vec![0.1, 0.3], 0.0);
        let (main, shape) = cusp_main_term(&ctx, &h, &g, &f, 2, 4.0, 1e-15).unwrap();
        assert!(main.is_finite());
        assert!(shape > 0.0);
    }

    #[test]
    fn cusp_main_term_approximates_theta() {
        // deep cusp: |theta - main| is tiny relative to |theta|
        let ctx = ReduceContext::with_defaults(2);
        let v1 = 400.0;
        let y = RMat::from_fn(2, 2, |i, j| {
            let u = [[1.0, 0.3], [0.0, 1.0]];
            let v = [v1, 1.1];
            (0..2).map(|k| u[i][k] * v[k] * u[j][k]).sum::<f64>()
        });
        let coords = coords_from_xy(
            SymMat::symmetrized(&RMat::from_fn(2, 2, |i, j| {
                [[0.21, -0.17], [-0.17, 0.33]][i][j]
            })),
            PosDefMat::new(SymMat::symmetrized(&y)).unwrap(),
        );
        let g = crate::symplectic::assemble(&coords);
        let f = GaussianPacket::standard(2);
        let h = HeisenbergElem::new(vec![0.2, -0.1], vec![0.1, 0.3], 0.0);
        let theta = theta_auto(&h, &g, &f, 1e-16).unwrap().value;
        let (main, _) = cusp_main_term(&ctx, &h, &g, &f, 1, 4.0, 1e-16).unwrap();
        let err = (theta - main).norm();
        assert!(
            err < 1e-10 * theta.norm(),
            "theta={theta} main={main} err={err}"
        );
    }

    #[test]
    fn gauss_sum_cross_check() {
        // |theta(M=q, X=2a/q) + 1| = sqrt(q) for odd q, gcd(a, q) = 1,
        // against the closed-form quadratic Gauss sum
        fn jacobi_symbol(mut a: i64, mut n: i64) -> i64 {
            a %= n;
            if a < 0 {
                a += n;
            }
            let mut t = 1i64;
            while a != 0 {
                while a % 2 == 0 {
                    a /= 2;
                    let r = n % 8;
                    if r == 3 || r == 5 {
                        t = -t;
                    }
                }
                core::mem::swap(&mut a, &mut n);
                if a % 4 == 3 && n % 4 == 3 {
                    t = -t;
                }
                a %= n;
            }
            if n == 1 {
                t
            } else {
                0
            }
        }
        for (a, qden) in [(1i64, 3i64), (2, 5), (3, 7), (5, 11), (4, 9), (7, 13)] {
            let q = query1(qden as f64, 2.0 * a as f64 / qden as f64, 0.0, 0.0);
            let theta = theta_direct_box(&q, &BoxSpec::unit(1)).unwrap().value;
            let full = theta + Complex64::new(1.0, 0.0); // include the m = 0 term
            let eps = if qden % 4 == 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 1.0)
            };
            let expected = eps
                .scale(jacobi_symbol(a, qden) as f64)
                .scale(fx::sqrt(qden as f64));
            assert!(
                (full - expected).norm() < 1e-9 * fx::sqrt(qden as f64),
                "a={a} q={qden} got {full} expected {expected}"
            );
            assert!((full.norm() - fx::sqrt(qden as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn phase_mutation_breaks_invariance() {
        // with the mutated prefactor phase, the transport identity fails
        let q = query1(3.0, 0.3, 0.2, 0.4);
        let f = GaussianPacket::standard(1);
        let direct = theta_direct_schwartz(&q, &f, 1e-15).unwrap().value;
        let (h, g) = jacobi_of_query(&q);
        set_phase_mutation(true);
        let mutated = theta_auto(&h, &g, &f, 1e-15)
            .unwrap()
            .value
            .scale(fx::powf(3.0, 0.5));
        set_phase_mutation(false);
        let clean = theta_auto(&h, &g, &f, 1e-15)
            .unwrap()
            .value
            .scale(fx::powf(3.0, 0.5));
        assert!((clean - direct).norm() < 1e-9 * direct.norm());
        assert!((mutated - direct).norm() > 1e-3 * direct.norm());
    }

    #[test]
    fn rejects_mismatched_dims() {
        let q = query1(2.0, 0.0, 0.0, 0.0);
        let f = GaussianPacket::standard(2);
        assert!(matches!(
            theta_direct_schwartz(&q, &f, 1e-14),
            Err(Error::DimensionMismatch)
        ));
        let spec = BoxSpec::unit(2);
        assert!(matches!(
            theta_direct_box(&q, &spec),
            Err(Error::DimensionMismatch)
        ));
    }

    #[test]
    fn guard_rejects_huge_boxes() {
        let q = ThetaQuery::new(
            20_000.0,
            SymMat::zeros(2),
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        )
        .unwrap();
        assert!(matches!(
            theta_direct_box(&q, &BoxSpec::unit(2)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn unitary_rotation_preserves_auto_value() {
        // theta_auto only depends on (h, g), not on how f_Q is reached:
        // sanity that Q from iwasawa is used consistently
        let mut rng = SeqRng::new(13, 5);
        let n = 2;
        let f = seeded::random_packet(n, &mut rng);
        let coords = seeded::random_coords(n, &mut rng, 1.0);
        let g = crate::symplectic::assemble(&coords);
        let h = seeded::random_heisenberg(n, &mut rng, 0.4);
        let v1 = theta_auto(&h, &g, &f, 1e-15).unwrap().value;
        let v2 = theta_auto(&h, &g, &f, 1e-15).unwrap().value;
        assert_eq!(v1, v2);
        let _ = CMat::identity(n);
    }
}

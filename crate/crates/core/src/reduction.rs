//! Reduction into fundamental domains and the height function.
//!
//! The `GL(n, Z)` side is a Grenier-style domain on positive definite
//! matrices in `U V U^T` coordinates, defined recursively by: the leading
//! pivot `v_1` is maximal over unimodular congruence, the trailing block is
//! reduced, and the first-row couplings `r` sit in the half-unit box with
//! the leading entry nonnegative. Maximality of `v_1(A Y A^T)` is a search
//! over primitive first rows of `A^{-T}`, since
//! `v_1(A Y A^T) = 1 / (a Y^{-1} a^T)` for that row `a`.
//!
//! The symplectic side alternates three moves until a fixed point:
//! Grenier-reduce `Y` (acts by `[[A, 0], [0, A^{-T}]]`), translate `X` into
//! the half-unit box, and apply an integral candidate with
//! `|det(C (X + iY) + D)| < 1`, which strictly increases `det Y`. The
//! candidate list doubles as the certification set for membership: it is a
//! deduplicated ball of generator words (deduplication by the Hermite form
//! of the stacked `[C | D]`, which is a left-coset invariant), always
//! containing the per-coordinate inversions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cmat::CMat;
use crate::error::Error;
use crate::fx;
use crate::imat::{complete_unimodular, is_primitive, IMat};
use crate::jacobi::{integral_generators, IntSpMatrix};
use crate::mat::{PosDefMat, RMat, SymMat};
use crate::symplectic::{iwasawa, IwasawaCoords, SpMatrix};

/// Tunable bounds for the reduction algorithms. Everything downstream is a
/// pure function of the configuration.
#[derive(Debug, Clone)]
pub struct ReduceConfig {
    /// Generator word length of the candidate/certification ball.
    pub word_len: usize,
    /// Cap on BFS ball size before coset deduplication.
    pub max_ball: usize,
    /// Cap on the deduplicated certification list.
    pub max_cert: usize,
    /// Outer iteration cap for the symplectic reduction loop.
    pub max_outer: usize,
    /// Apply an inversion candidate only when `|det| < 1 - move_margin`.
    pub move_margin: f64,
    /// Relative improvement margin for the pivot search.
    pub improve_margin: f64,
    /// Boundary slack for translations and sign fixes.
    pub round_slack: f64,
    /// Hard cap on the primitive-vector search radius.
    pub search_cap: i64,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            word_len: 8,
            max_ball: 20_000,
            max_cert: 1_200,
            max_outer: 1_000,
            move_margin: 1e-9,
            improve_margin: 1e-12,
            round_slack: 1e-9,
            search_cap: 96,
        }
    }
}

/// Result of reducing a positive definite matrix: `A Y A^T = reduced`.
#[derive(Debug, Clone)]
pub struct GLReduction {
    pub a: IMat,
    pub reduced: PosDefMat,
}

/// Result of symplectic reduction: `gamma0 * g` has the returned Iwasawa
/// coordinates and realizes the height `det V`.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub gamma0: IntSpMatrix,
    pub reduced: IwasawaCoords,
    pub det_v: f64,
    pub iterations: usize,
}

/// Membership report: every failed condition, by name.
#[derive(Debug, Clone)]
pub struct DomainReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn enumerate_primitive(k: usize, radius: i64, mut visit: impl FnMut(&[i64])) {
    let mut a = vec![-radius; k];
    loop {
        // canonical sign: first nonzero entry positive
        if let Some(first) = a.iter().find(|&&v| v != 0) {
            if *first > 0 && is_primitive(&a) {
                visit(&a);
            }
        }
        let mut axis = 0;
        loop {
            if axis == k {
                return;
            }
            a[axis] += 1;
            if a[axis] <= radius {
                break;
            }
            a[axis] = -radius;
            axis += 1;
        }
    }
}

/// Best primitive `a` minimizing `a W a^T` within `radius`, if it improves
/// on `W_00` by the relative margin.
fn best_pivot_vector(w: &PosDefMat, radius: i64, margin: f64) -> Option<Vec<i64>> {
    let k = w.n();
    let w00 = w.get(0, 0);
    let mut best_val = w00 * (1.0 - margin);
    let mut best: Option<Vec<i64>> = None;
    enumerate_primitive(k, radius, |a| {
        let af: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let val = w.quad_form(&af);
        if val < best_val {
            best_val = val;
            best = Some(a.to_vec());
        }
    });
    best
}

/// Rigorous search radius: any improving `a` has
/// `|a|^2 <= W_00 lambda_max(Y) <= W_00 trace(Y)`.
fn pivot_search_radius(w: &PosDefMat, block: &SymMat) -> i64 {
    let b2 = w.get(0, 0) * block.trace();
    (fx::ceil(fx::sqrt(b2.max(1.0))) as i64).max(1)
}

fn embed_gl(n: usize, offset: usize, a: &IMat) -> IMat {
    let k = a.rows();
    IMat::from_fn(n, n, |i, j| {
        if i < offset || j < offset {
            if i == j {
                1
            } else {
                0
            }
        } else if i - offset < k && j - offset < k {
            a.get(i - offset, j - offset)
        } else if i == j {
            1
        } else {
            0
        }
    })
}

fn congruence(y: &RMat, a: &IMat) -> RMat {
    let af = a.to_rmat();
    af.mul(y).mul(&af.transpose())
}

/// First-row coupling vector of the trailing block at `offset`:
/// `r = Y[off, off+1..] * (Y[off+1.., off+1..])^{-1}`.
fn coupling_row(y: &RMat, offset: usize) -> Result<Vec<f64>, Error> {
    let n = y.rows();
    let k = n - offset - 1;
    if k == 0 {
        return Ok(Vec::new());
    }
    let tail = PosDefMat::new(SymMat::symmetrized(&y.block(offset + 1, n, offset + 1, n)))?;
    let inv = tail.inverse();
    let row: Vec<f64> = (offset + 1..n).map(|j| y.get(offset, j)).collect();
    Ok(inv.mat().left_mul_vec(&row))
}

struct GrenierState {
    y: RMat,
    acc: IMat,
}

impl GrenierState {
    fn apply(&mut self, a: &IMat) -> Result<(), Error> {
        self.y = congruence(&self.y, a);
        self.acc = a.mul(&self.acc)?;
        Ok(())
    }

    /// One maximality sweep over all levels; returns whether anything moved.
    /// The search widens from radius 1 toward the rigorous bound; the cap
    /// only matters when no improvement exists anywhere below it, i.e. when
    /// maximality would have to be certified over an infeasible radius.
    fn pivot_sweep(&mut self, cfg: &ReduceConfig) -> Result<bool, Error> {
        let n = self.y.rows();
        let mut changed = false;
        for level in 0..n.saturating_sub(1) {
            let block = SymMat::symmetrized(&self.y.block(level, n, level, n));
            let block_pd = PosDefMat::new(block.clone())?;
            let w = block_pd.inverse();
            let rigorous = pivot_search_radius(&w, &block);
            let reachable = rigorous.min(cfg.search_cap);
            let mut radius = 1i64;
            let mut found = None;
            loop {
                if let Some(a) = best_pivot_vector(&w, radius, cfg.improve_margin) {
                    found = Some(a);
                    break;
                }
                if radius >= reachable {
                    break;
                }
                radius = (radius * 2).min(reachable);
            }
            match found {
                Some(a) => {
                    let m = complete_unimodular(&a)?;
                    let a_level = m.unimodular_inverse()?.transpose();
                    self.apply(&embed_gl(n, level, &a_level))?;
                    changed = true;
                }
                None => {
                    if rigorous > cfg.search_cap {
                        return Err(Error::IterationLimit("pivot search radius exceeds cap"));
                    }
                }
            }
        }
        Ok(changed)
    }

    /// Translate every coupling row into the half-unit box, deepest level
    /// first so earlier rows absorb the disturbance.
    fn round_pass(&mut self, cfg: &ReduceConfig) -> Result<bool, Error> {
        let n = self.y.rows();
        let mut changed = false;
        for level in (0..n.saturating_sub(1)).rev() {
            let r = coupling_row(&self.y, level)?;
            let mut shift = vec![0i64; r.len()];
            let mut any = false;
            for (j, &v) in r.iter().enumerate() {
                if fx::abs(v) > 0.5 + cfg.round_slack {
                    shift[j] = -fx::round(v) as i64;
                    any = true;
                }
            }
            if any {
                let mut t = IMat::identity(n);
                for (j, &s) in shift.iter().enumerate() {
                    t.set(level, level + 1 + j, s);
                }
                self.apply(&t)?;
                changed = true;
            }
        }
        Ok(changed)
    }

    /// Make the leading coupling entry of each level nonnegative, shallow
    /// level first so only later sign conditions are disturbed.
    fn sign_pass(&mut self, cfg: &ReduceConfig) -> Result<bool, Error> {
        let n = self.y.rows();
        let mut changed = false;
        for level in 0..n.saturating_sub(1) {
            let r = coupling_row(&self.y, level)?;
            if !r.is_empty() && r[0] < -cfg.round_slack {
                let mut s = IMat::identity(n);
                s.set(level + 1, level + 1, -1);
                self.apply(&s)?;
                changed = true;
            }
        }
        Ok(changed)
    }
}

/// Reduce a positive definite matrix into the recursive domain by unimodular
/// congruence.
pub fn grenier_reduce(y: &PosDefMat, cfg: &ReduceConfig) -> Result<GLReduction, Error> {
    let n = y.n();
    let mut st = GrenierState { y: y.mat().clone(), acc: IMat::identity(n) };
    let mut done = false;
    for _outer in 0..24 {
        // normalize the couplings first: a badly skewed unipotent part
        // inflates the search bound without changing the pivots
        st.round_pass(cfg)?;
        st.sign_pass(cfg)?;
        let mut moved = false;
        for _sweep in 0..64 {
            if !st.pivot_sweep(cfg)? {
                break;
            }
            moved = true;
        }
        if !moved {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::IterationLimit("pivot reduction did not stabilize"));
    }
    st.round_pass(cfg)?;
    st.sign_pass(cfg)?;
    let reduced = PosDefMat::new(SymMat::symmetrized(&st.y))?;
    Ok(GLReduction { a: st.acc, reduced })
}

/// Violations of the recursive domain conditions for `Y`, by level.
pub fn grenier_violations(y: &PosDefMat, tol: f64, cfg: &ReduceConfig) -> Vec<String> {
    let n = y.n();
    let mut out = Vec::new();
    let ym = y.mat();
    for level in 0..n.saturating_sub(1) {
        match coupling_row(ym, level) {
            Err(_) => out.push(format!("level {level}: trailing block not positive definite")),
            Ok(r) => {
                for (j, &v) in r.iter().enumerate() {
                    if fx::abs(v) > 0.5 + tol {
                        out.push(format!("level {level}: |r_{j}| = {v:.6} > 1/2"));
                    }
                }
                if !r.is_empty() && r[0] < -tol {
                    out.push(format!("level {level}: leading coupling {:.6} < 0", r[0]));
                }
            }
        }
        let block = SymMat::symmetrized(&ym.block(level, n, level, n));
        match PosDefMat::new(block.clone()) {
            Err(_) => out.push(format!("level {level}: block not positive definite")),
            Ok(pd) => {
                let w = pd.inverse();
                let radius = pivot_search_radius(&w, &block).min(cfg.search_cap);
                if let Some(a) = best_pivot_vector(&w, radius, tol) {
                    out.push(format!("level {level}: pivot not maximal (improved by {a:?})"));
                }
            }
        }
    }
    out
}

/// Candidate and certification machinery for a fixed rank. Pure and
/// deterministic given the configuration; safe to share across threads.
#[derive(Debug, Clone)]
pub struct ReduceContext {
    n: usize,
    cfg: ReduceConfig,
    /// Candidates with `C != 0`, shortest words first; per-coordinate
    /// inversions and `J0` lead the list.
    cert: Vec<IntSpMatrix>,
}

impl ReduceContext {
    pub fn new(n: usize, cfg: ReduceConfig) -> Self {
        let cert = build_candidates(n, &cfg);
        ReduceContext { n, cfg, cert }
    }

    pub fn with_defaults(n: usize) -> Self {
        ReduceContext::new(n, ReduceConfig::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cfg(&self) -> &ReduceConfig {
        &self.cfg
    }

    pub fn candidate_count(&self) -> usize {
        self.cert.len()
    }

    /// The certification candidates, shortest words first.
    pub fn candidates(&self) -> &[IntSpMatrix] {
        &self.cert
    }

    /// `|det(C (X + iY) + D)|` for one candidate.
    fn candidate_det(&self, gamma: &IntSpMatrix, z: &CMat) -> f64 {
        let n = self.n;
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(gamma.d().get(i, j) as f64, 0.0);
                for k in 0..n {
                    s += z.get(k, j).scale(gamma.c().get(i, k) as f64);
                }
                m.set(i, j, s);
            }
        }
        m.det().norm()
    }

    fn z_of(coords: &IwasawaCoords) -> CMat {
        CMat::from_parts(coords.x.mat(), coords.y.mat())
    }

    /// Best inversion candidate with `|det| < 1 - move_margin`, if any.
    /// Returns early on a decisively small determinant.
    fn best_move(&self, coords: &IwasawaCoords) -> Option<&IntSpMatrix> {
        let z = Self::z_of(coords);
        let mut best: Option<(&IntSpMatrix, f64)> = None;
        for gamma in &self.cert {
            let d = self.candidate_det(gamma, &z);
            if d < 0.9 {
                return Some(gamma);
            }
            if d < 1.0 - self.cfg.move_margin {
                match best {
                    Some((_, bd)) if bd <= d => {}
                    _ => best = Some((gamma, d)),
                }
            }
        }
        best.map(|(g, _)| g)
    }

    /// Reduce `g` into the fundamental domain, returning the integral
    /// element realizing it, the reduced coordinates, and `det V`.
    pub fn siegel_reduce(&self, g0: &SpMatrix) -> Result<ReductionResult, Error> {
        self.siegel_reduce_traced(g0, None)
    }

    /// [`ReduceContext::siegel_reduce`] recording `det V` after every
    /// iteration, for monotonicity checks.
    pub fn siegel_reduce_with_trace(
        &self,
        g0: &SpMatrix,
    ) -> Result<(ReductionResult, Vec<f64>), Error> {
        let mut trace = Vec::new();
        let res = self.siegel_reduce_traced(g0, Some(&mut trace))?;
        Ok((res, trace))
    }

    fn siegel_reduce_traced(
        &self,
        g0: &SpMatrix,
        mut trace: Option<&mut Vec<f64>>,
    ) -> Result<ReductionResult, Error> {
        let n = g0.n();
        if n != self.n {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = IntSpMatrix::identity(n);
        let mut g = g0.clone();
        let mut iterations = 0usize;
        let mut finished = false;
        while iterations < self.cfg.max_outer {
            iterations += 1;
            let coords = iwasawa(&g)?;
            if let Some(t) = trace.as_deref_mut() {
                t.push(coords.det_v());
            }
            // (a) reduce Y by unimodular congruence
            let gl = grenier_reduce(&coords.y, &self.cfg)?;
            if !gl.a.is_identity() {
                let gamma = IntSpMatrix::gl_embed(&gl.a)?;
                g = gamma.to_sp().mul(&g);
                acc = gamma.mul(&acc)?;
                continue;
            }
            // (b) translate X into the half-unit box
            let mut p = IMat::zeros(n, n);
            let mut any = false;
            for i in 0..n {
                for j in i..n {
                    let v = coords.x.get(i, j);
                    if fx::abs(v) > 0.5 + self.cfg.round_slack {
                        let s = -fx::round(v) as i64;
                        p.set(i, j, s);
                        p.set(j, i, s);
                        any = true;
                    }
                }
            }
            if any {
                let gamma = IntSpMatrix::translation(&p)?;
                g = gamma.to_sp().mul(&g);
                acc = gamma.mul(&acc)?;
                continue;
            }
            // (c) determinant-increasing inversion move
            match self.best_move(&coords) {
                Some(gamma) => {
                    g = gamma.to_sp().mul(&g);
                    acc = gamma.mul(&acc)?;
                    continue;
                }
                None => {
                    finished = true;
                    break;
                }
            }
        }
        if !finished {
            return Err(Error::IterationLimit("det V did not stabilize"));
        }
        // coordinates come from the incrementally maintained element: a
        // single product of the accumulated word with g0 would cancel the
        // small reduced entries out of huge factors
        let reduced = iwasawa(&g)?;
        let det_v = reduced.det_v();
        Ok(ReductionResult { gamma0: acc, reduced, det_v, iterations })
    }

    /// The height `D(Gamma g) = det V(gamma_0 g)`.
    pub fn height(&self, g: &SpMatrix) -> Result<f64, Error> {
        Ok(self.siegel_reduce(g)?.det_v)
    }

    /// Membership check with a per-condition violation report.
    pub fn in_domain(&self, coords: &IwasawaCoords, tol: f64) -> DomainReport {
        let n = self.n;
        let mut violations = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = coords.x.get(i, j);
                if fx::abs(v) > 0.5 + tol {
                    violations.push(format!("|x_{i}{j}| = {v:.6} > 1/2"));
                }
            }
        }
        violations.extend(grenier_violations(&coords.y, tol, &self.cfg));
        let v = coords.v();
        let vn = v[n - 1];
        if vn < fx::sqrt(3.0) / 2.0 - tol {
            violations.push(format!("v_n = {vn:.6} < sqrt(3)/2"));
        }
        for j in 0..n - 1 {
            if v[j] < 0.75 * v[j + 1] - tol {
                violations.push(format!("v_{j} < 3/4 v_{}", j + 1));
            }
        }
        let z = Self::z_of(coords);
        for gamma in &self.cert {
            let d = self.candidate_det(gamma, &z);
            if d < 1.0 - tol {
                violations.push(format!("|det(C Z + D)| = {d:.9} < 1 for a candidate"));
                break;
            }
        }
        DomainReport { ok: violations.is_empty(), violations }
    }
}

fn build_candidates(n: usize, cfg: &ReduceConfig) -> Vec<IntSpMatrix> {
    let gens = integral_generators(n);
    let mut picked: Vec<IntSpMatrix> = Vec::new();
    let mut seen_cd: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut push = |g: &IntSpMatrix, picked: &mut Vec<IntSpMatrix>| {
        if g.c().max_abs() == 0 {
            return; // |det(C Z + D)| = 1 identically; never a move
        }
        let mut cd = IMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                cd.set(i, j, g.c().get(i, j));
                cd.set(i, n + j, g.d().get(i, j));
            }
        }
        let key = cd.hnf_row().data().to_vec();
        if seen_cd.insert(key) {
            picked.push(g.clone());
        }
    };
    // per-coordinate inversions and J0 lead the list
    for j in 0..n {
        push(&IntSpMatrix::embedded_inversion(n, j), &mut picked);
    }
    push(&IntSpMatrix::j0(n), &mut picked);
    // BFS ball of generator words
    let mut visited: BTreeSet<Vec<i64>> = BTreeSet::new();
    let key_of = |g: &IntSpMatrix| -> Vec<i64> {
        let mut k = Vec::with_capacity(4 * n * n);
        for m in [g.a(), g.b(), g.c(), g.d()] {
            k.extend_from_slice(m.data());
        }
        k
    };
    let identity = IntSpMatrix::identity(n);
    visited.insert(key_of(&identity));
    let mut frontier = vec![identity];
    'outer: for _depth in 0..cfg.word_len {
        let mut next = Vec::new();
        for g in &frontier {
            for gen in &gens {
                let h = match g.mul(gen) {
                    Ok(h) => h,
                    Err(_) => continue,
                };
                if visited.insert(key_of(&h)) {
                    push(&h, &mut picked);
                    next.push(h);
                    if visited.len() >= cfg.max_ball || picked.len() >= cfg.max_cert {
                        break 'outer;
                    }
                }
            }
        }
        frontier = next;
    }
    picked.truncate(cfg.max_cert);
    picked
}

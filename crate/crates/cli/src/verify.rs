//! Machine-checkable invariant suites, one per library module. Each check
//! reports a margin (how far inside the tolerance the worst case landed);
//! the report is a pure function of `(suite, seed, config)` and contains no
//! timing, so reruns are byte-identical.

use serde::Serialize;

use siegel_theta::cmat::CMat;
use siegel_theta::cutoff;
use siegel_theta::fx;
use siegel_theta::jacobi::{
    gamma_tilde_apply, h_act, h_gamma, h_mul, HeisenbergElem, JacobiElem,
};
use siegel_theta::mat::{
    inv_sqrt_upper, sqrt_upper, PosDefMat, RMat, SymMat,
};
use siegel_theta::reduction::ReduceContext;
use siegel_theta::rng::SeqRng;
use siegel_theta::seeded;
use siegel_theta::symplectic::{assemble, embed_unitary, iwasawa, langlands_coords, SpMatrix};
use siegel_theta::theta::{
    jacobi_of_query, theta_auto, theta_direct_box, theta_direct_schwartz, BoxSpec, ThetaQuery,
};
use siegel_theta::weil::{
    cocycle_modulus_check, schrodinger_apply, unitary_split, weil_apply, weil_quadrature_oracle,
    GaussianPacket,
};
use siegel_theta::Complex64;

use crate::config::HarnessConfig;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Worst observed value of the checked quantity.
    pub observed: f64,
    /// The tolerance it was held against.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, observed: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass: observed.is_finite() && observed <= tolerance,
        observed,
        tolerance,
    }
}

/// A check that passes when the observed value is at least the floor.
fn check_at_least(name: &str, observed: f64, floor: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass: observed.is_finite() && observed >= floor,
        observed,
        tolerance: floor,
    }
}

fn seeded_spd(n: usize, rng: &mut SeqRng) -> PosDefMat {
    let g = RMat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 1.0));
    let mut s = g.transpose().mul(&g);
    for i in 0..n {
        s.set(i, i, s.get(i, i) + rng.uniform_in(0.2, 1.0));
    }
    PosDefMat::new(SymMat::symmetrized(&s)).expect("constructed SPD")
}

pub fn linalg_suite(seed: u64) -> Vec<CheckResult> {
    let mut rng = SeqRng::new(seed, 100);
    let mut worst_rec = 0.0f64;
    let mut worst_sqrt = 0.0f64;
    let mut worst_inv = 0.0f64;
    for _ in 0..1000 {
        let n = 1 + (rng.below(4)) as usize;
        let y = seeded_spd(n, &mut rng);
        let scale = y.mat().max_abs().max(1.0);
        worst_rec = worst_rec.max(y.uv().reconstruct().mat().max_abs_diff(y.mat()) / scale);
        let r = sqrt_upper(&y);
        worst_sqrt = worst_sqrt.max(r.mul(&r.transpose()).max_abs_diff(y.mat()) / scale);
        let ri = inv_sqrt_upper(&y);
        worst_inv = worst_inv
            .max(r.mul(&ri).max_abs_diff(&RMat::identity(n)))
            .max(ri.mul(&r).max_abs_diff(&RMat::identity(n)));
    }
    vec![
        check("uv_reconstruction", worst_rec, 1e-10),
        check("sqrt_upper_roundtrip", worst_sqrt, 1e-10),
        check("inv_sqrt_two_sided", worst_inv, 1e-10),
    ]
}

pub fn symplectic_suite(seed: u64) -> Vec<CheckResult> {
    let mut rng = SeqRng::new(seed, 200);
    let mut worst_formulas = 0.0f64;
    let mut worst_roundtrip = 0.0f64;
    let mut worst_detv = 0.0f64;
    for case in 0..1000 {
        let n = 1 + rng.below(3) as usize;
        // alternate coordinate-assembled elements with integral words
        let g = if case % 2 == 0 {
            seeded::random_symplectic(n, &mut rng, 1.5)
        } else {
            let word = seeded::random_integral_symplectic(n, &mut rng, 30);
            word.to_sp().mul(&seeded::random_symplectic(n, &mut rng, 0.8))
        };
        let c = iwasawa(&g).expect("iwasawa");
        let scale = g.max_abs().max(1.0);
        // the three coordinate formulas recomputed from blocks
        let w = g.c().mul(&g.c().transpose()).add(&g.d().mul(&g.d().transpose()));
        let yw = c.y.mat().mul(&w);
        worst_formulas = worst_formulas.max(yw.max_abs_diff(&RMat::identity(n)) / scale);
        let x2 = g
            .a()
            .mul(&g.c().transpose())
            .add(&g.b().mul(&g.d().transpose()))
            .mul(c.y.mat());
        worst_formulas = worst_formulas.max(x2.max_abs_diff(c.x.mat()) / scale);
        let q2 = CMat::from_parts(g.d(), g.c()).real_mul_left(&sqrt_upper(&c.y).transpose());
        worst_formulas = worst_formulas.max(q2.max_abs_diff(&c.q) / scale);
        let back = assemble(&c);
        worst_roundtrip = worst_roundtrip.max(back.to_full().max_abs_diff(&g.to_full()) / scale);
        worst_detv = worst_detv
            .max((c.det_v() - c.y.mat().det()).abs() / c.det_v().abs().max(1e-300));
    }
    let mut worst_k = 0.0f64;
    for _ in 0..500 {
        let n = 1 + rng.below(3) as usize;
        let q1 = seeded::random_unitary(n, &mut rng);
        let q2 = seeded::random_unitary(n, &mut rng);
        let k1 = embed_unitary(&q1).expect("unitary");
        let k2 = embed_unitary(&q2).expect("unitary");
        let k12 = embed_unitary(&q1.mul(&q2)).expect("unitary");
        worst_k = worst_k.max(k1.mul(&k2).to_full().max_abs_diff(&k12.to_full()));
        let full = k1.to_full();
        worst_k = worst_k.max(full.mul(&full.transpose()).max_abs_diff(&RMat::identity(2 * n)));
        worst_k = worst_k.max(k1.symplectic_defect());
    }
    let mut worst_langlands = 0.0f64;
    for _ in 0..200 {
        let n = 1 + rng.below(3) as usize;
        let g = seeded::random_symplectic(n, &mut rng, 1.2);
        for l in 1..=n {
            let lg = langlands_coords(&g, l).expect("langlands");
            let back = lg.assemble(n);
            let scale = g.max_abs().max(1.0);
            worst_langlands =
                worst_langlands.max(back.to_full().max_abs_diff(&g.to_full()) / scale);
        }
    }
    vec![
        check("iwasawa_block_formulas", worst_formulas, 1e-8),
        check("assemble_roundtrip", worst_roundtrip, 1e-8),
        check("unitary_embedding", worst_k, 1e-9),
        check("langlands_reassembly", worst_langlands, 1e-8),
        check("det_v_consistency", worst_detv, 1e-9),
    ]
}

pub fn jacobi_suite(seed: u64) -> Vec<CheckResult> {
    let mut rng = SeqRng::new(seed, 300);
    let mut worst_inv = 0.0f64;
    for _ in 0..1000 {
        let n = 1 + rng.below(3) as usize;
        let h = seeded::random_heisenberg(n, &mut rng, 2.0);
        let p = h_mul(&h, &h.inverse()).expect("dims");
        let e = p
            .x
            .iter()
            .chain(p.y.iter())
            .fold(p.t.abs(), |m, v| m.max(v.abs()));
        worst_inv = worst_inv.max(e);
    }
    let mut worst_auto = 0.0f64;
    for _ in 0..1000 {
        let n = 1 + rng.below(3) as usize;
        let g = seeded::random_symplectic(n, &mut rng, 1.0);
        let h1 = seeded::random_heisenberg(n, &mut rng, 1.5);
        let h2 = seeded::random_heisenberg(n, &mut rng, 1.5);
        let lhs = h_act(&g, &h_mul(&h1, &h2).expect("dims")).expect("dims");
        let rhs = h_mul(&h_act(&g, &h1).expect("dims"), &h_act(&g, &h2).expect("dims"))
            .expect("dims");
        let e = lhs
            .x
            .iter()
            .zip(&rhs.x)
            .chain(lhs.y.iter().zip(&rhs.y))
            .fold((lhs.t - rhs.t).abs(), |m, (a, b)| m.max((a - b).abs()));
        worst_auto = worst_auto.max(e);
    }
    let mut worst_parity = 0.0f64;
    for _ in 0..500 {
        let n = 1 + rng.below(3) as usize;
        let g1 = seeded::random_integral_symplectic(n, &mut rng, 6);
        let g2 = seeded::random_integral_symplectic(n, &mut rng, 6);
        let lhs = h_gamma(&g1.mul(&g2).expect("word"));
        let rhs = h_mul(
            &h_gamma(&g1),
            &h_act(&g1.to_sp().inverse(), &h_gamma(&g2)).expect("dims"),
        )
        .expect("dims");
        for i in 0..n {
            for (l, r) in [(lhs.x[i], rhs.x[i]), (lhs.y[i], rhs.y[i])] {
                let diff = (2.0 * l - 2.0 * r).rem_euclid(2.0);
                worst_parity = worst_parity.max(diff.min(2.0 - diff));
            }
        }
    }
    vec![
        check("heisenberg_inverse", worst_inv, 1e-14),
        check("action_automorphism", worst_auto, 1e-10),
        check("parity_cocycle_mod_two", worst_parity, 1e-9),
    ]
}

pub fn reduction_suite(seed: u64, cfg: &HarnessConfig) -> Vec<CheckResult> {
    let mut rng = SeqRng::new(seed, 400);
    let contexts: Vec<ReduceContext> = (1..=3)
        .map(|n| ReduceContext::new(n, cfg.reduce_config()))
        .collect();
    let mut worst_pivot_chain = 0.0f64;
    let mut worst_box = 0.0f64;
    let mut worst_monotone = 0.0f64;
    let mut worst_idem = 0.0f64;
    for _ in 0..600 {
        let n = 1 + rng.below(3) as usize;
        let ctx = &contexts[n - 1];
        let g = seeded::random_symplectic(n, &mut rng, 1.5);
        let (res, det_trace) = ctx.siegel_reduce_with_trace(&g).expect("reduce");
        let v = res.reduced.v();
        worst_pivot_chain = worst_pivot_chain.max(fx::sqrt(3.0) / 2.0 - v[n - 1]);
        for j in 0..n - 1 {
            worst_pivot_chain = worst_pivot_chain.max(0.75 * v[j + 1] - v[j]);
        }
        worst_box = worst_box.max(res.reduced.x.max_abs() - 0.5);
        // det V never decreases across the accepted moves
        for w in det_trace.windows(2) {
            worst_monotone = worst_monotone.max((w[0] - w[1]) / w[0]);
        }
        if let Some(&last) = det_trace.last() {
            worst_monotone = worst_monotone.max((last - res.det_v) / last);
        }
        let res2 = ctx
            .siegel_reduce(&res.gamma0.to_sp().mul(&g))
            .expect("reduce reduced");
        worst_idem = worst_idem
            .max(res2.reduced.x.mat().max_abs_diff(res.reduced.x.mat()))
            .max(res2.reduced.y.mat().max_abs_diff(res.reduced.y.mat()));
    }
    let mut worst_height = 0.0f64;
    for _ in 0..300 {
        let n = 1 + rng.below(3) as usize;
        let ctx = &contexts[n - 1];
        let g = seeded::random_symplectic(n, &mut rng, 1.3);
        let gamma = seeded::random_integral_symplectic(n, &mut rng, 8);
        let h1 = ctx.height(&g).expect("height");
        let h2 = ctx.height(&gamma.to_sp().mul(&g)).expect("height");
        worst_height = worst_height.max((h1 - h2).abs() / h1.max(1e-300));
    }
    // quadratic form comparability on reduced representatives
    let ctx2 = &contexts[1];
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0f64;
    for _ in 0..100 {
        let g = seeded::random_symplectic(2, &mut rng, 1.4);
        let res = ctx2.siegel_reduce(&g).expect("reduce");
        let y = &res.reduced.y;
        let v1 = y.uv().v()[0];
        let y1 = PosDefMat::new(SymMat::symmetrized(&y.mat().block(1, 2, 1, 2))).expect("block");
        for _ in 0..5 {
            let x = [rng.uniform_in(-2.0, 2.0), rng.uniform_in(-2.0, 2.0)];
            let den = v1 * x[0] * x[0] + y1.quad_form(&x[1..]);
            if den > 1e-9 {
                let r = y.quad_form(&x) / den;
                ratio_lo = ratio_lo.min(r);
                ratio_hi = ratio_hi.max(r);
            }
        }
    }
    vec![
        check("pivot_chain_conditions", worst_pivot_chain, 1e-9),
        check("shift_box", worst_box, 1e-9),
        check("det_v_monotone", worst_monotone, 1e-9),
        check("idempotent", worst_idem, 1e-9),
        check("height_invariance", worst_height, 1e-7),
        check_at_least("quad_form_comparability_lower", ratio_lo, 0.02),
        check("quad_form_comparability_upper", ratio_hi, 50.0),
    ]
}

pub fn weil_suite(seed: u64) -> Vec<CheckResult> {
    let mut rng = SeqRng::new(seed, 500);
    let mut closure_failures = 0.0f64;
    let mut worst_l2 = 0.0f64;
    for _ in 0..2000 {
        let n = 1 + rng.below(3) as usize;
        let f = seeded::random_packet(n, &mut rng);
        let g = seeded::random_symplectic(n, &mut rng, 1.0);
        match weil_apply(&g, &f) {
            Err(_) => closure_failures += 1.0,
            Ok(out) => {
                worst_l2 = worst_l2.max((out.l2_norm() - f.l2_norm()).abs() / f.l2_norm());
            }
        }
    }
    let mut worst_split = 0.0f64;
    for _ in 0..200 {
        let n = 1 + rng.below(3) as usize;
        let q0 = seeded::random_unitary(n, &mut rng);
        let (q1, qd, q2) = unitary_split(&q0).expect("split");
        let prod = CMat::from_real(&q1)
            .mul(&CMat::diag(&qd))
            .mul(&CMat::from_real(&q2));
        worst_split = worst_split.max(prod.max_abs_diff(&q0));
    }
    let mut worst_intertwine = 0.0f64;
    for _ in 0..200 {
        let n = 1 + rng.below(2) as usize;
        let f = seeded::random_packet(n, &mut rng);
        let g = seeded::random_symplectic(n, &mut rng, 1.0);
        let h = seeded::random_heisenberg(n, &mut rng, 1.0);
        let hg = h_act(&g, &h).expect("dims");
        let lhs = weil_apply(&g, &schrodinger_apply(&hg, &f).expect("dims")).expect("apply");
        let rhs = schrodinger_apply(&h, &weil_apply(&g, &f).expect("apply")).expect("dims");
        for _ in 0..5 {
            let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.2, 1.2)).collect();
            let a = lhs.eval(&x).norm();
            let b = rhs.eval(&x).norm();
            worst_intertwine = worst_intertwine.max((a - b).abs() / a.max(1.0));
        }
    }
    let mut worst_cocycle = 0.0f64;
    let mut worst_tri_cocycle = 0.0f64;
    for _ in 0..60 {
        let n = 1 + rng.below(2) as usize;
        let f = seeded::random_packet(n, &mut rng);
        let g1 = seeded::random_symplectic(n, &mut rng, 0.8);
        let g2 = seeded::random_symplectic(n, &mut rng, 0.8);
        worst_cocycle = worst_cocycle.max(cocycle_modulus_check(&g1, &g2, &f).expect("check"));
        let x1 = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 1.0)));
        let x2 = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-1.0, 1.0)));
        worst_tri_cocycle = worst_tri_cocycle.max(
            cocycle_modulus_check(
                &SpMatrix::translation(&x1),
                &SpMatrix::translation(&x2),
                &f,
            )
            .expect("check"),
        );
    }
    let mut worst_oracle = 0.0f64;
    let mut oracle_cases = 0usize;
    for _ in 0..400 {
        if oracle_cases >= 200 {
            break;
        }
        let n = 1 + rng.below(2) as usize;
        let f = seeded::random_packet(n, &mut rng);
        let g = seeded::random_symplectic(n, &mut rng, 0.9);
        let chart_ok = g.c().det().abs() > 0.05
            && g.c().inverse().map(|ci| ci.max_abs() < 20.0).unwrap_or(false);
        if !chart_ok {
            continue;
        }
        oracle_cases += 1;
        let out = weil_apply(&g, &f).expect("apply");
        let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        match weil_quadrature_oracle(&g, &f, &x) {
            Ok(oracle) => {
                worst_oracle = worst_oracle
                    .max((out.eval(&x).norm() - oracle.norm()).abs() / oracle.norm().max(1e-3));
            }
            Err(_) => closure_failures += 1.0,
        }
    }
    vec![
        check("packet_closure_failures", closure_failures, 0.0),
        check("l2_norm_preserved", worst_l2, 1e-8),
        check("unitary_split_reassembly", worst_split, 1e-8),
        check("intertwining_modulus", worst_intertwine, 1e-8),
        check("cocycle_modulus", worst_cocycle, 1e-8),
        check("cocycle_triangular_exact", worst_tri_cocycle, 1e-10),
        check("quadrature_oracle_modulus", worst_oracle, 1e-7),
    ]
}

pub fn theta_suite(seed: u64, cfg: &HarnessConfig) -> Vec<CheckResult> {
    let mut rng = SeqRng::new(seed, 600);
    let mut worst_automorphy = 0.0f64;
    for _ in 0..200 {
        let n = 1 + rng.below(3) as usize;
        let h = seeded::random_heisenberg(n, &mut rng, 0.5);
        let g = seeded::random_symplectic(n, &mut rng, 1.0);
        let f = seeded::random_packet(n, &mut rng);
        let base = theta_auto(&h, &g, &f, cfg.tail_tol).expect("theta").value.norm();
        let e = seeded::random_gamma_tilde(n, &mut rng, 12);
        let j = JacobiElem::new(h, g).expect("dims");
        let moved = gamma_tilde_apply(&e, &j).expect("apply");
        let v = theta_auto(&moved.h, &moved.g, &f, cfg.tail_tol)
            .expect("theta")
            .value
            .norm();
        worst_automorphy = worst_automorphy.max((v - base).abs() / base.max(1e-9));
    }
    let mut worst_transport = 0.0f64;
    for _ in 0..100 {
        let n = 1 + rng.below(2) as usize;
        let x_mat = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.5, 0.5)));
        let m = fx::powf(2.0, rng.uniform_in(0.0, 8.0));
        let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.5, 0.5)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.5, 0.5)).collect();
        let q = ThetaQuery::new(m, x_mat, x, y).expect("query");
        let f = seeded::random_packet(n, &mut rng);
        let dv = theta_direct_schwartz(&q, &f, cfg.tail_tol).expect("direct");
        let (h, g) = jacobi_of_query(&q);
        let auto = theta_auto(&h, &g, &f, cfg.tail_tol).expect("auto").value;
        let scaled = auto * Complex64::new(fx::powf(m, 0.5 * n as f64), 0.0);
        let floor = 1e-11 * dv.terms as f64;
        worst_transport = worst_transport
            .max(((dv.value - scaled).norm() - floor).max(0.0) / dv.value.norm().max(1e-4));
    }
    // envelope constant: fit C with |Theta| <= C (det V)^{1/4} on one
    // reduced corpus, then demand a fresh 10^4-point corpus never exceeds
    // it. Domain points come from the restricted Haar sampler (already
    // reduced), with the shift part drawn in the half-unit box.
    let ctx = ReduceContext::new(2, cfg.reduce_config());
    let f = GaussianPacket::standard(2);
    let envelope_at = |coords: &siegel_theta::symplectic::IwasawaCoords,
                       rng: &mut SeqRng|
     -> f64 {
        let g = assemble(coords);
        let h = HeisenbergElem::new(
            vec![rng.uniform_in(-0.5, 0.5), rng.uniform_in(-0.5, 0.5)],
            vec![rng.uniform_in(-0.5, 0.5), rng.uniform_in(-0.5, 0.5)],
            0.0,
        );
        let v = theta_auto(&h, &g, &f, cfg.tail_tol).expect("theta").value.norm();
        v / fx::powf(coords.det_v(), 0.25)
    };
    let mut fitted = 0.0f64;
    let mut fit_count = 0usize;
    let mut draw = 0u64;
    while fit_count < 1500 {
        let s = crate::sample::haar_sample_one(2, seed ^ 0xE47, draw, &ctx, cfg.domain_tol);
        draw += 1;
        if !s.in_domain {
            continue;
        }
        fit_count += 1;
        fitted = fitted.max(envelope_at(&s.coords, &mut rng));
    }
    let c_f = 1.15 * fitted;
    let mut excess = 0.0f64;
    let mut verify_count = 0usize;
    while verify_count < 10_000 {
        let s = crate::sample::haar_sample_one(2, seed ^ 0xF58, draw, &ctx, cfg.domain_tol);
        draw += 1;
        if !s.in_domain {
            continue;
        }
        verify_count += 1;
        excess = excess.max(envelope_at(&s.coords, &mut rng) - c_f);
    }
    let mut worst_periodic = 0.0f64;
    for _ in 0..40 {
        let q = ThetaQuery::new(
            7.0,
            SymMat::symmetrized(&RMat::from_fn(1, 1, |_, _| rng.uniform_in(-0.5, 0.5))),
            vec![rng.uniform_in(-0.3, 0.3)],
            vec![rng.uniform_in(-0.5, 0.5)],
        )
        .expect("query");
        let spec = BoxSpec::unit(1);
        let base = theta_direct_box(&q, &spec).expect("box").value;
        let mut q2 = q.clone();
        q2.y[0] += 2.0;
        let v2 = theta_direct_box(&q2, &spec).expect("box").value;
        let mut q3 = q.clone();
        q3.x_mat.set_sym(0, 0, q3.x_mat.get(0, 0) + 2.0);
        let v3 = theta_direct_box(&q3, &spec).expect("box").value;
        worst_periodic = worst_periodic
            .max((base - v2).norm())
            .max((base - v3).norm());
    }
    // Gauss sum cross-check at rational points
    let mut worst_gauss = 0.0f64;
    for (a, qden) in [(1i64, 3i64), (2, 5), (3, 7), (5, 11), (4, 9), (7, 13), (6, 17)] {
        let q = ThetaQuery::new(
            qden as f64,
            SymMat::symmetrized(&RMat::from_fn(1, 1, |_, _| 2.0 * a as f64 / qden as f64)),
            vec![0.0],
            vec![0.0],
        )
        .expect("query");
        let theta = theta_direct_box(&q, &BoxSpec::unit(1)).expect("box").value;
        let full = theta + Complex64::new(1.0, 0.0);
        worst_gauss = worst_gauss.max((full.norm() - fx::sqrt(qden as f64)).abs());
    }
    vec![
        check("automorphy_modulus", worst_automorphy, 1e-8),
        check("transport_identity", worst_transport, 1e-7),
        check("envelope_never_exceeded", excess, 0.0),
        check_at_least("envelope_constant_finite", 1.0 / c_f.max(1e-300), 1e-6),
        check("box_periodicity", worst_periodic, 1e-9),
        check("gauss_sum_modulus", worst_gauss, 1e-9),
    ]
}

pub fn cutoff_suite(_seed: u64, cfg: &HarnessConfig) -> Vec<CheckResult> {
    let mut worst_sym = 0.0f64;
    for k in 0..10_000 {
        let x = k as f64 / 9_999.0;
        worst_sym = worst_sym.max((cutoff::f0(x) + cutoff::f0(1.0 - x) - 1.0).abs());
    }
    let j = cfg.j_max;
    let delta = fx::powf(2.0, -(j as f64)) / 3.0;
    let mut worst_part = 0.0f64;
    for k in 1..10_000 {
        let x = delta + (1.0 - 2.0 * delta) * k as f64 / 10_000.0;
        worst_part = worst_part.max((cutoff::partition_eval(x, j) - 1.0).abs());
    }
    let mut outside = 0.0f64;
    for x in [-0.5, 0.0, 1.0, 1.5, 2.0] {
        outside = outside.max(cutoff::partition_eval(x, j).abs());
    }
    let mut worst_count = 0usize;
    for k in 1..=2000 {
        let x = k as f64 / 2000.0 / 3.0;
        worst_count = worst_count.max(cutoff::partition_term_count(x, 40));
    }
    let spec = BoxSpec { b: vec![1.0, 1.3] };
    let margin = fx::powf(2.0, -(j as f64)) * 1.3 / 3.0;
    let mut worst_box = 0.0f64;
    let mut rng = SeqRng::new(7, 700);
    for _ in 0..10_000 {
        let x = [
            rng.uniform_in(margin, spec.b[0] - margin),
            rng.uniform_in(margin, spec.b[1] - margin),
        ];
        worst_box = worst_box.max((cutoff::box_partition_sum(&x, &spec, j) - 1.0).abs());
    }
    vec![
        check("step_symmetry", worst_sym, 1e-15),
        check("partition_identity", worst_part, 1e-14),
        check("partition_outside_zero", outside, 0.0),
        check("at_most_two_terms", worst_count as f64, 2.0),
        check("box_decomposition", worst_box, 1e-12),
    ]
}

pub fn run_suite(name: &str, seed: u64, cfg: &HarnessConfig) -> Result<SuiteReport, String> {
    let checks = match name {
        "linalg" => linalg_suite(seed),
        "symplectic" => symplectic_suite(seed),
        "jacobi" => jacobi_suite(seed),
        "reduction" => reduction_suite(seed, cfg),
        "weil" => weil_suite(seed),
        "theta" => theta_suite(seed, cfg),
        "cutoff" => cutoff_suite(seed, cfg),
        "all" => {
            let mut all = Vec::new();
            for s in ["linalg", "symplectic", "jacobi", "reduction", "weil", "theta", "cutoff"] {
                let sub = run_suite(s, seed, cfg)?;
                for mut c in sub.checks {
                    c.name = format!("{s}.{}", c.name);
                    all.push(c);
                }
            }
            all
        }
        other => return Err(format!("unknown suite: {other}")),
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { suite: name.to_string(), seed, pass, checks })
}

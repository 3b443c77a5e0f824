//! Experiment drivers: volume tails of the height function, heights along
//! the diagonal flow, and growth-exponent sweeps of box-truncated theta
//! sums against the `M^{n/2} psi(log M)` envelope.

use std::time::Instant;

use serde::Serialize;

use siegel_theta::fx;
use siegel_theta::mat::{RMat, SymMat};
use siegel_theta::reduction::ReduceContext;
use siegel_theta::rng::Counter;
use siegel_theta::symplectic::SpMatrix;
use siegel_theta::theta::{
    dyadic_height_bound, g_scaling, jacobi_of_query, theta_direct_box, theta_fast_modulus,
    BoxSpec, ThetaQuery,
};
use siegel_theta::weil::GaussianPacket;
use siegel_theta::Error;

use crate::config::HarnessConfig;
use crate::sample::haar_sample_region;

/// Least-squares slope of `ys` against `xs`, with the standard error of the
/// slope estimate from the residuals.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let dof = (xs.len().max(3) - 2) as f64;
    let se = (ss_res / dof / sxx).sqrt();
    (slope, se)
}

#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub r: f64,
    pub mu: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeTail {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub in_domain: usize,
    pub rows: Vec<TailRow>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub bootstrap_stderr: f64,
}

/// Monte Carlo estimate of the measure of `{D >= R}` over the in-domain
/// samples, with the log-log slope over the given grid.
pub fn volume_tail(
    n: usize,
    count: usize,
    r_grid: &[f64],
    seed: u64,
    ctx: &ReduceContext,
    cfg: &HarnessConfig,
) -> Result<VolumeTail, Error> {
    let samples = haar_sample_region(n, count, seed, ctx, cfg.domain_tol);
    let dets: Vec<f64> = samples
        .iter()
        .filter(|s| s.in_domain)
        .map(|s| s.det_v)
        .collect();
    let in_domain = dets.len();
    let r_max = r_grid.iter().cloned().fold(0.0f64, f64::max);
    let top = dets.iter().filter(|&&d| d >= r_max).count();
    if top < 100 {
        return Err(Error::InsufficientSamples);
    }
    let rows: Vec<TailRow> = r_grid
        .iter()
        .map(|&r| {
            let c = dets.iter().filter(|&&d| d >= r).count();
            TailRow { r, mu: c as f64 / count as f64, count: c }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|row| fx::ln(row.r)).collect();
    let ys: Vec<f64> = rows.iter().map(|row| fx::ln(row.mu.max(1e-300))).collect();
    let (slope, slope_stderr) = regression_slope(&xs, &ys);
    // index bootstrap over the in-domain det values
    let boots = 32;
    let ctr = Counter::new(seed ^ 0xB007, 0);
    let mut slopes = Vec::with_capacity(boots);
    for b in 0..boots {
        let ys_b: Vec<f64> = r_grid
            .iter()
            .map(|&r| {
                let mut c = 0usize;
                for k in 0..in_domain {
                    let pick = ctr.below((b * in_domain + k) as u64, in_domain as u64) as usize;
                    if dets[pick] >= r {
                        c += 1;
                    }
                }
                fx::ln((c as f64 / count as f64).max(1e-300))
            })
            .collect();
        let (s, _) = regression_slope(&xs, &ys_b);
        slopes.push(s);
    }
    let mean = slopes.iter().sum::<f64>() / boots as f64;
    let var = slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (boots - 1) as f64;
    Ok(VolumeTail {
        n,
        seed,
        samples: count,
        in_domain,
        rows,
        slope,
        slope_stderr,
        bootstrap_stderr: var.sqrt(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowRow {
    pub s: f64,
    pub height: f64,
    /// max over |delta| <= 1 of `D(g a_{s+delta}) / D(g a_s)`
    pub window_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowExcursion {
    pub rows: Vec<FlowRow>,
    pub max_window_ratio: f64,
    pub min_window_ratio: f64,
}

/// Heights along the diagonal flow `a_s = diag(e^{-s} I, e^{s} I)`, with the
/// bounded-window ratio column.
pub fn flow_excursion(
    g: &SpMatrix,
    s_max: f64,
    ds: f64,
    ctx: &ReduceContext,
) -> Result<FlowExcursion, Error> {
    if !(s_max <= 12.0 && ds >= 0.05) {
        return Err(Error::TooLarge((s_max / ds) as u64));
    }
    let n = g.n();
    let pad = (1.0 / ds).ceil() as i64;
    let steps = (s_max / ds).ceil() as i64;
    let mut heights = Vec::new();
    for k in -pad..=steps + pad {
        let s = k as f64 * ds;
        let gs = g.mul(&SpMatrix::diag_flow(n, s));
        heights.push(ctx.height(&gs)?);
    }
    let mut rows = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for k in 0..=steps {
        let idx = (k + pad) as usize;
        let base = heights[idx];
        let mut window = 0.0f64;
        for d in -pad..=pad {
            let r = heights[(idx as i64 + d) as usize] / base;
            window = window.max(r);
        }
        max_ratio = max_ratio.max(window);
        min_ratio = min_ratio.min(window);
        rows.push(FlowRow { s: k as f64 * ds, height: base, window_ratio: window });
    }
    Ok(FlowExcursion { rows, max_window_ratio: max_ratio, min_window_ratio: min_ratio })
}

/// One row of the growth-exponent sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub seed: u64,
    pub x_index: usize,
    pub control: bool,
    pub m: f64,
    pub b_index: usize,
    pub b_edges: Vec<f64>,
    pub sup_theta_box: f64,
    pub sup_theta_smooth: f64,
    pub bound: f64,
    pub ratio: f64,
    pub d_height: f64,
    pub dyadic_bound: f64,
    pub wallclock: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub x_index: usize,
    pub control: bool,
    pub slope_box: f64,
    pub slope_smooth: f64,
    pub max_ratio: f64,
    pub dyadic_violations: usize,
}

#[derive(Debug, Clone)]
pub struct SweepParams {
    pub n: usize,
    pub x_count: usize,
    pub m_pow_min: u32,
    pub m_pow_max: u32,
    /// Scale-grid resolution: points per octave between the power bounds.
    pub m_steps_per_octave: u32,
    pub xy_samples: usize,
    pub box_count: usize,
    pub seed: u64,
}

impl SweepParams {
    /// The scale grid `M = 2^{min + k/steps}` over the configured range.
    pub fn m_grid(&self) -> Vec<f64> {
        let steps = self.m_steps_per_octave.max(1);
        let count = (self.m_pow_max - self.m_pow_min) * steps;
        (0..=count)
            .map(|k| fx::powf(2.0, self.m_pow_min as f64 + k as f64 / steps as f64))
            .collect()
    }
}

#[derive(Debug, Serialize)]
pub struct Sweep {
    pub records: Vec<SweepRecord>,
    pub summaries: Vec<SweepSummary>,
}

/// The `X` matrix of ensemble slot `idx`: slot 0 is the rational control
/// point `X = 0`; the rest have entries uniform in `[-1/2, 1/2]`.
pub fn sweep_x_matrix(n: usize, seed: u64, idx: usize) -> (SymMat, bool) {
    if idx == 0 {
        return (SymMat::zeros(n), true);
    }
    let ctr = Counter::new(seed ^ 0x5EED_00, idx as u64);
    let mut x = RMat::zeros(n, n);
    let mut k = 0u64;
    for i in 0..n {
        for j in i..n {
            let v = ctr.uniform_in(k, -0.5, 0.5);
            k += 1;
            x.set(i, j, v);
            x.set(j, i, v);
        }
    }
    (SymMat::symmetrized(&x), false)
}

/// Growth-exponent sweep: for each ensemble `X` and each dyadic `M`,
/// the sup of `|theta|` over seeded `(x, y, b)`, the psi envelope, the
/// reduced height of the scaling orbit and the dyadic height bound.
pub fn bound_sweep(
    params: &SweepParams,
    ctx: &ReduceContext,
    cfg: &HarnessConfig,
) -> Result<Sweep, Error> {
    let n = params.n;
    if n > 2 || params.m_pow_max > 12 {
        return Err(Error::TooLarge(params.m_pow_max as u64));
    }
    let packet = GaussianPacket::standard(n);
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for x_idx in 0..params.x_count {
        let (x_mat, control) = sweep_x_matrix(n, params.seed, x_idx);
        // common random numbers: the same (x, y, b) family across M
        let ctr = Counter::new(params.seed ^ 0xAB1E, x_idx as u64);
        let boxes: Vec<Vec<f64>> = (0..params.box_count)
            .map(|bi| {
                (0..n)
                    .map(|ax| ctr.uniform_in((1000 + bi * 8 + ax) as u64, 0.7, 1.4))
                    .collect()
            })
            .collect();
        // sample 0 is the zero shift: the rational control rows realize
        // their divergent scale exactly there
        let shifts: Vec<(Vec<f64>, Vec<f64>)> = (0..params.xy_samples)
            .map(|si| {
                if si == 0 {
                    return (vec![0.0; n], vec![0.0; n]);
                }
                let base = (4000 + si * 16) as u64;
                let x: Vec<f64> = (0..n).map(|ax| ctr.uniform_in(base + ax as u64, -0.5, 0.5)).collect();
                let y: Vec<f64> =
                    (0..n).map(|ax| ctr.uniform_in(base + 8 + ax as u64, -0.5, 0.5)).collect();
                (x, y)
            })
            .collect();
        let mut log_m = Vec::new();
        let mut log_sup_box = Vec::new();
        let mut log_sup_smooth = Vec::new();
        let mut max_ratio = 0.0f64;
        let mut dyadic_violations = 0usize;
        for m in params.m_grid() {
            let started = Instant::now();
            let d_height = ctx.height(&g_scaling(m, &x_mat))?;
            let bound = fx::powf(m, 0.5 * n as f64) * cfg.psi(fx::ln(m), n);
            // the smooth column runs through the reduced evaluation, which
            // is the only affordable path at the largest scales
            let mut sup_smooth = 0.0f64;
            for (xs, ys) in &shifts {
                let q = ThetaQuery::new(m, x_mat.clone(), xs.clone(), ys.clone())
                    .expect("valid query");
                let (h, g) = jacobi_of_query(&q);
                let v = theta_fast_modulus(ctx, &h, &g, &packet, cfg.tail_tol)?;
                sup_smooth = sup_smooth.max(v.modulus * fx::powf(m, 0.5 * n as f64));
            }
            // the dyadic height bound is a statement about dyadic scales;
            // intermediate grid points only feed the regression
            let on_dyadic_scale = fx::abs(m - fx::round(m)) < 1e-9
                && (fx::round(m) as u64).is_power_of_two();
            let mut m_sup_box = 0.0f64;
            for (b_idx, edges) in boxes.iter().enumerate() {
                let spec = BoxSpec { b: edges.clone() };
                let mut sup_box = 0.0f64;
                for (xs, ys) in &shifts {
                    let q = ThetaQuery::new(m, x_mat.clone(), xs.clone(), ys.clone())
                        .expect("valid query");
                    let v = theta_direct_box(&q, &spec)?;
                    sup_box = sup_box.max(v.value.norm());
                }
                let dyadic = if on_dyadic_scale {
                    let q0 = ThetaQuery::new(m, x_mat.clone(), vec![0.0; n], vec![0.0; n])
                        .expect("valid query");
                    let bound = dyadic_height_bound(ctx, &q0, &spec, cfg.dyadic_scale)?;
                    if bound.value < sup_box {
                        dyadic_violations += 1;
                    }
                    bound.value
                } else {
                    f64::NAN
                };
                m_sup_box = m_sup_box.max(sup_box);
                records.push(SweepRecord {
                    n,
                    seed: params.seed,
                    x_index: x_idx,
                    control,
                    m,
                    b_index: b_idx,
                    b_edges: edges.clone(),
                    sup_theta_box: sup_box,
                    sup_theta_smooth: sup_smooth,
                    bound,
                    ratio: sup_box / bound,
                    d_height,
                    dyadic_bound: dyadic,
                    wallclock: started.elapsed().as_secs_f64(),
                });
            }
            max_ratio = max_ratio.max(m_sup_box / bound);
            log_m.push(fx::ln(m));
            log_sup_box.push(fx::ln(m_sup_box.max(1e-300)));
            log_sup_smooth.push(fx::ln(sup_smooth.max(1e-300)));
        }
        let (slope_box, _) = regression_slope(&log_m, &log_sup_box);
        let (slope_smooth, _) = regression_slope(&log_m, &log_sup_smooth);
        summaries.push(SweepSummary {
            x_index: x_idx,
            control,
            slope_box,
            slope_smooth,
            max_ratio,
            dyadic_violations,
        });
    }
    Ok(Sweep { records, summaries })
}

/// Frozen CSV schema lines (version comments) for the harness outputs.
pub const TAIL_CSV_SCHEMA: &str = "# volume-tail v1: r,mu,count";
pub const FLOW_CSV_SCHEMA: &str = "# flow v1: s,height,window_ratio";
pub const SWEEP_CSV_SCHEMA: &str = "# sweep v1: n,seed,x_index,control,m,b_index,sup_theta_box,sup_theta_smooth,bound,ratio,d_height,dyadic_bound,wallclock";
pub const HAAR_CSV_SCHEMA: &str = "# haar-sample v1: index,det_v,weight,in_domain";

pub fn sweep_to_csv(sweep: &Sweep) -> String {
    let mut out = String::from(SWEEP_CSV_SCHEMA);
    out.push('\n');
    for r in &sweep.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3}\n",
            r.n,
            r.seed,
            r.x_index,
            r.control as u8,
            r.m,
            r.b_index,
            r.sup_theta_box,
            r.sup_theta_smooth,
            r.bound,
            r.ratio,
            r.d_height,
            r.dyadic_bound,
            r.wallclock
        ));
    }
    out
}

pub fn tail_to_csv(tail: &VolumeTail) -> String {
    let mut out = String::from(TAIL_CSV_SCHEMA);
    out.push('\n');
    for r in &tail.rows {
        out.push_str(&format!("{:.17e},{:.17e},{}\n", r.r, r.mu, r.count));
    }
    out.push_str(&format!(
        "# slope = {:.6} stderr = {:.6} bootstrap_stderr = {:.6}\n",
        tail.slope, tail.slope_stderr, tail.bootstrap_stderr
    ));
    out
}

pub fn flow_to_csv(flow: &FlowExcursion) -> String {
    let mut out = String::from(FLOW_CSV_SCHEMA);
    out.push('\n');
    for r in &flow.rows {
        out.push_str(&format!("{:.6},{:.17e},{:.6}\n", r.s, r.height, r.window_ratio));
    }
    out
}

/// Log-spaced grid of `points` values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && hi > lo && lo > 0.0);
    (0..points)
        .map(|k| lo * fx::powf(hi / lo, k as f64 / (points - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let xs: Vec<f64> = (1..20).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 1.5 * x).collect();
        let (slope, se) = regression_slope(&xs, &ys);
        assert!((slope + 1.5).abs() < 1e-12);
        assert!(se < 1e-12);
    }

    #[test]
    fn flow_at_identity_rank_one() {
        let ctx = ReduceContext::with_defaults(1);
        let flow = flow_excursion(&SpMatrix::identity(1), 3.0, 0.25, &ctx).unwrap();
        // D(a_s) = e^{2s} for s >= 0 at rank one (already reduced there)
        assert!((flow.rows[0].height - 1.0).abs() < 1e-9);
        for r in &flow.rows {
            if r.s >= 0.5 {
                let expected = fx::exp(2.0 * r.s);
                assert!(
                    (r.height - expected).abs() < 1e-6 * expected,
                    "s={} h={} expected={}",
                    r.s,
                    r.height,
                    expected
                );
            }
        }
        // window ratios exist and are finite
        assert!(flow.max_window_ratio.is_finite());
        assert!(flow.max_window_ratio >= 1.0);
    }

    #[test]
    fn grids_are_monotone() {
        let g = log_grid(10.0, 1000.0, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 10.0).abs() < 1e-12);
        assert!((g[6] - 1000.0).abs() < 1e-9);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn mini_volume_tail_runs() {
        let ctx = ReduceContext::with_defaults(1);
        let cfg = HarnessConfig::default();
        let grid = log_grid(5.0, 50.0, 6);
        let tail = volume_tail(1, 12_000, &grid, 9, &ctx, &cfg).unwrap();
        assert!(tail.in_domain > 0);
        assert!(tail.slope < -0.6 && tail.slope > -1.4, "slope {}", tail.slope);
    }

    #[test]
    fn mini_sweep_runs() {
        let ctx = ReduceContext::with_defaults(1);
        let cfg = HarnessConfig::default();
        let params = SweepParams {
            n: 1,
            x_count: 3,
            m_pow_min: 3,
            m_pow_max: 7,
            m_steps_per_octave: 1,
            xy_samples: 4,
            box_count: 1,
            seed: 5,
        };
        let sweep = bound_sweep(&params, &ctx, &cfg).unwrap();
        assert_eq!(sweep.summaries.len(), 3);
        assert!(sweep.summaries[0].control);
        // the control point X = 0 has theta ~ M - 1: slope ~ 1
        assert!(
            (sweep.summaries[0].slope_box - 1.0).abs() < 0.15,
            "control slope {}",
            sweep.summaries[0].slope_box
        );
        for s in &sweep.summaries {
            assert_eq!(s.dyadic_violations, 0);
        }
        let csv = sweep_to_csv(&sweep);
        assert!(csv.starts_with("# sweep v1"));
    }
}

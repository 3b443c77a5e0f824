use siegel_theta::reduction::ReduceContext;
use siegel_theta_cli::config::HarnessConfig;
use siegel_theta_cli::experiments::{bound_sweep, SweepParams};
fn main() {
    let cfg = HarnessConfig::default();
    let n = 2usize;
    let ctx = ReduceContext::with_defaults(n);
    for seed in [505u64, 1, 2, 7] {
        let params = SweepParams { n, x_count: 51, m_pow_min: 4, m_pow_max: 12,
            m_steps_per_octave: 2, xy_samples: 24, box_count: 2, seed };
        let sweep = bound_sweep(&params, &ctx, &cfg).unwrap();
        let mut inside = 0; let mut total = 0; let mut viol = 0;
        let mut slopes = Vec::new();
        for s in &sweep.summaries {
            viol += s.dyadic_violations;
            if s.control { continue; }
            total += 1;
            slopes.push(s.slope_box);
            if (s.slope_box - 1.0).abs() <= 0.05 { inside += 1; }
        }
        slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!("seed {seed}: {inside}/{total} inside, dyadic violations {viol}, extremes {:?} .. {:?}",
                 &slopes[..3], &slopes[slopes.len()-3..]);
    }
}

//! Harness configuration: tolerances, search bounds and guards, loadable
//! from a `key = value` file.

use std::fs;
use std::path::Path;

use siegel_theta::reduction::ReduceConfig;

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    /// Generator word length for the candidate/certification ball.
    pub word_len: usize,
    /// BFS ball cap before coset deduplication.
    pub max_ball: usize,
    /// Certification list cap.
    pub max_cert: usize,
    /// Outer iteration cap for symplectic reduction.
    pub max_outer: usize,
    /// Envelope truncation for packet lattice sums.
    pub tail_tol: f64,
    /// Membership tolerance for domain reports.
    pub domain_tol: f64,
    /// Exponent bump above the critical psi decay.
    pub psi_eps: f64,
    /// Multiplier of the psi weight.
    pub psi_mult: f64,
    /// Remainder decay exponent for cusp asymptotics.
    pub a_exp: f64,
    /// Envelope constant multiplying the dyadic height bound.
    pub dyadic_scale: f64,
    /// Dyadic depth cap per axis for cutoff partitions.
    pub j_max: u32,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            word_len: 8,
            max_ball: 20_000,
            max_cert: 1_200,
            max_outer: 1_000,
            tail_tol: 1e-14,
            domain_tol: 1e-9,
            psi_eps: 0.01,
            psi_mult: 1.0,
            a_exp: 4.0,
            dyadic_scale: 1.0,
            j_max: 14,
        }
    }
}

impl HarnessConfig {
    pub fn reduce_config(&self) -> ReduceConfig {
        ReduceConfig {
            word_len: self.word_len,
            max_ball: self.max_ball,
            max_cert: self.max_cert,
            max_outer: self.max_outer,
            ..ReduceConfig::default()
        }
    }

    /// Parse `key = value` lines; `#` starts a comment. Unknown keys are an
    /// error so typos cannot silently fall back to defaults.
    pub fn from_str(text: &str) -> Result<Self, String> {
        let mut cfg = HarnessConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            let parse_f = || -> Result<f64, String> {
                value
                    .parse::<f64>()
                    .map_err(|e| format!("line {}: {key}: {e}", lineno + 1))
            };
            let parse_u = || -> Result<usize, String> {
                value
                    .parse::<usize>()
                    .map_err(|e| format!("line {}: {key}: {e}", lineno + 1))
            };
            match key {
                "word_len" => cfg.word_len = parse_u()?,
                "max_ball" => cfg.max_ball = parse_u()?,
                "max_cert" => cfg.max_cert = parse_u()?,
                "max_outer" => cfg.max_outer = parse_u()?,
                "tail_tol" => cfg.tail_tol = parse_f()?,
                "domain_tol" => cfg.domain_tol = parse_f()?,
                "psi_eps" => cfg.psi_eps = parse_f()?,
                "psi_mult" => cfg.psi_mult = parse_f()?,
                "a_exp" => cfg.a_exp = parse_f()?,
                "dyadic_scale" => cfg.dyadic_scale = parse_f()?,
                "j_max" => cfg.j_max = parse_u()? as u32,
                other => return Err(format!("line {}: unknown key {other}", lineno + 1)),
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_str(&text)
    }

    /// The increasing weight `psi(t) = mult * max(1, t)^{1/(2n+2) + eps}`;
    /// the exact critical exponent makes the defining series diverge, hence
    /// the epsilon bump.
    pub fn psi(&self, t: f64, n: usize) -> f64 {
        let expo = 1.0 / (2.0 * n as f64 + 2.0) + self.psi_eps;
        self.psi_mult * t.max(1.0).powf(expo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let cfg = HarnessConfig::from_str("word_len = 10\n# comment\n tail_tol = 1e-12 \n").unwrap();
        assert_eq!(cfg.word_len, 10);
        assert_eq!(cfg.tail_tol, 1e-12);
        assert!(HarnessConfig::from_str("nope = 3").is_err());
        assert!(HarnessConfig::from_str("word_len").is_err());
    }

    #[test]
    fn psi_is_increasing_and_at_least_mult() {
        let cfg = HarnessConfig::default();
        let mut last = 0.0;
        for k in 0..50 {
            let v = cfg.psi(k as f64, 2);
            assert!(v >= 1.0 - 1e-15);
            assert!(v >= last);
            last = v;
        }
        // the bumped exponent makes the defining series converge
        let n = 1usize;
        let sum: f64 = (1..200_000)
            .map(|k| cfg.psi(k as f64, n).powi(-(2 * n as i32 + 2)))
            .sum();
        assert!(sum.is_finite());
    }
}

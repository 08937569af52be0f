//! Model configuration and its flat `key=value` file format.
//!
//! Every field is addressable by the symbol used for it in the model
//! description (`K`, `ell`, `alpha`, `lambda_B`, ...). Defaults are sized
//! for a 22-topic fit with a 62-day window.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STAGES: [&str; 7] = ["topics", "pi", "rho", "events", "psi", "theta", "blocks"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// `K`
    pub topics: usize,
    /// `ell`: sliding-window length in days.
    pub ell: u32,
    pub alpha: f64,
    pub beta: f64,
    /// `P`: Dirichlet weight on a block's topics of interest.
    pub interest_concentration: f64,
    /// `lambda_D`: mean tokens per post (simulation only).
    pub tokens_per_post: f64,
    /// `eta`: one value shared by all topics, or one per topic.
    pub event_prob: Vec<f64>,
    /// `E_pi`: Bernoulli prior on each event indicator.
    pub event_prior: f64,
    /// `lambda_B`: prior mean number of non-empty blocks.
    pub block_prior_mean: f64,
    /// `alpha_B`
    pub block_concentration: f64,
    pub psi_shape: f64,
    pub psi_rate: f64,
    pub rho_shape: f64,
    pub rho_rate: f64,
    pub rho_prior_mean: f64,
    pub rho_prior_sd: f64,
    pub psi_prior_mean: f64,
    pub psi_prior_sd: f64,
    pub theta_prior_mean: f64,
    pub theta_prior_sd: f64,
    pub rho_step: f64,
    pub psi_step: f64,
    pub theta_step: [f64; 5],
    /// Tune random-walk step sizes during burn-in.
    pub adapt: bool,
    pub iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub sweeps: usize,
    pub network_updates: usize,
    pub block_sweeps: usize,
    pub seed: u64,
    /// Names of the sampler stages run each iteration, in order.
    pub stages: Vec<String>,
    /// Block membership probabilities used by the simulator.
    pub block_scheme: String,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            topics: 22,
            ell: 62,
            alpha: 0.1,
            beta: 0.1,
            interest_concentration: 50.0,
            tokens_per_post: 20.0,
            event_prob: vec![0.01],
            event_prior: 0.2,
            block_prior_mean: 25.0,
            block_concentration: 1.0,
            psi_shape: 2.0,
            psi_rate: 4.0,
            rho_shape: 4.0,
            rho_rate: 1.0,
            rho_prior_mean: 4.0,
            rho_prior_sd: 1000.0,
            psi_prior_mean: 0.0,
            psi_prior_sd: 1000.0,
            theta_prior_mean: 0.0,
            theta_prior_sd: 1000.0,
            rho_step: 0.5,
            psi_step: 0.5,
            theta_step: [1.0, 0.25, 0.25, 0.25, 0.25],
            adapt: false,
            iters: 1000,
            burn_in: 100,
            thin: 10,
            sweeps: 10,
            network_updates: 10,
            block_sweeps: 10,
            seed: 1,
            stages: DEFAULT_STAGES.iter().map(|s| s.to_string()).collect(),
            block_scheme: "uniform".into(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

fn parse_list(key: &str, value: &str) -> std::result::Result<Vec<f64>, String> {
    value.split(',').map(|v| parse_num(key, v)).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ModelConfig {
    /// Number of snapshots a run with this schedule retains.
    pub fn retained(&self) -> usize {
        if self.burn_in >= self.iters || self.thin == 0 {
            0
        } else {
            (self.iters - self.burn_in) / self.thin
        }
    }

    /// True when iteration `it` (0-based) is stored.
    pub fn keeps(&self, it: usize) -> bool {
        it >= self.burn_in && self.thin > 0 && (it - self.burn_in + 1) % self.thin == 0
    }

    pub fn eta(&self, k: usize) -> f64 {
        if self.event_prob.len() == 1 {
            self.event_prob[0]
        } else {
            self.event_prob[k]
        }
    }

    /// Sets one field by its symbol name.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "K" => self.topics = parse_num(key, v)?,
            "ell" => self.ell = parse_num(key, v)?,
            "alpha" => self.alpha = parse_num(key, v)?,
            "beta" => self.beta = parse_num(key, v)?,
            "P" => self.interest_concentration = parse_num(key, v)?,
            "lambda_D" => self.tokens_per_post = parse_num(key, v)?,
            "eta" => self.event_prob = parse_list(key, v)?,
            "E_pi" => self.event_prior = parse_num(key, v)?,
            "lambda_B" => self.block_prior_mean = parse_num(key, v)?,
            "alpha_B" => self.block_concentration = parse_num(key, v)?,
            "a_psi" => self.psi_shape = parse_num(key, v)?,
            "b_psi" => self.psi_rate = parse_num(key, v)?,
            "a_rho" => self.rho_shape = parse_num(key, v)?,
            "b_rho" => self.rho_rate = parse_num(key, v)?,
            "mu_rho" => self.rho_prior_mean = parse_num(key, v)?,
            "sd_rho" => self.rho_prior_sd = parse_num(key, v)?,
            "mu_psi" => self.psi_prior_mean = parse_num(key, v)?,
            "sd_psi" => self.psi_prior_sd = parse_num(key, v)?,
            "mu_theta" => self.theta_prior_mean = parse_num(key, v)?,
            "sigma_theta" => self.theta_prior_sd = parse_num(key, v)?,
            "sigma_rho" => self.rho_step = parse_num(key, v)?,
            "sigma_psi" => self.psi_step = parse_num(key, v)?,
            "sigma_theta_prop" => {
                let xs = parse_list(key, v)?;
                self.theta_step = match xs.len() {
                    1 => [xs[0]; 5],
                    5 => [xs[0], xs[1], xs[2], xs[3], xs[4]],
                    n => return Err(format!("{key}: expected 1 or 5 values, got {n}")),
                };
            }
            "adapt" => self.adapt = parse_num(key, v)?,
            "iters" => self.iters = parse_num(key, v)?,
            "burn_in" => self.burn_in = parse_num(key, v)?,
            "thin" => self.thin = parse_num(key, v)?,
            "sweeps" => self.sweeps = parse_num(key, v)?,
            "network_updates" => self.network_updates = parse_num(key, v)?,
            "block_sweeps" => self.block_sweeps = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "stages" => {
                self.stages = v
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            "p_B" => self.block_scheme = v.to_string(),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Applies a `key=value` text, one assignment per line. `#` starts a
    /// comment. All bad lines are reported together.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut errors = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    if let Err(e) = self.set(k, v) {
                        errors.push(format!("line {}: {e}", n + 1));
                    }
                }
                None => errors.push(format!("line {}: expected key=value", n + 1)),
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Serializes to the `key=value` format; `from_text(to_text())` is the
    /// identity.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("K", self.topics.to_string());
        kv("ell", self.ell.to_string());
        kv("alpha", self.alpha.to_string());
        kv("beta", self.beta.to_string());
        kv("P", self.interest_concentration.to_string());
        kv("lambda_D", self.tokens_per_post.to_string());
        kv("eta", join(&self.event_prob));
        kv("E_pi", self.event_prior.to_string());
        kv("lambda_B", self.block_prior_mean.to_string());
        kv("alpha_B", self.block_concentration.to_string());
        kv("a_psi", self.psi_shape.to_string());
        kv("b_psi", self.psi_rate.to_string());
        kv("a_rho", self.rho_shape.to_string());
        kv("b_rho", self.rho_rate.to_string());
        kv("mu_rho", self.rho_prior_mean.to_string());
        kv("sd_rho", self.rho_prior_sd.to_string());
        kv("mu_psi", self.psi_prior_mean.to_string());
        kv("sd_psi", self.psi_prior_sd.to_string());
        kv("mu_theta", self.theta_prior_mean.to_string());
        kv("sigma_theta", self.theta_prior_sd.to_string());
        kv("sigma_rho", self.rho_step.to_string());
        kv("sigma_psi", self.psi_step.to_string());
        kv("sigma_theta_prop", join(&self.theta_step));
        kv("adapt", self.adapt.to_string());
        kv("iters", self.iters.to_string());
        kv("burn_in", self.burn_in.to_string());
        kv("thin", self.thin.to_string());
        kv("sweeps", self.sweeps.to_string());
        kv("network_updates", self.network_updates.to_string());
        kv("block_sweeps", self.block_sweeps.to_string());
        kv("seed", self.seed.to_string());
        kv("stages", self.stages.join(","));
        kv("p_B", self.block_scheme.clone());
        s
    }

    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("{name} must be positive"));
            }
        };
        positive("alpha", self.alpha);
        positive("beta", self.beta);
        positive("P", self.interest_concentration);
        positive("lambda_D", self.tokens_per_post);
        positive("lambda_B", self.block_prior_mean);
        positive("alpha_B", self.block_concentration);
        positive("a_psi", self.psi_shape);
        positive("b_psi", self.psi_rate);
        positive("a_rho", self.rho_shape);
        positive("b_rho", self.rho_rate);
        positive("sd_rho", self.rho_prior_sd);
        positive("sd_psi", self.psi_prior_sd);
        positive("sigma_theta", self.theta_prior_sd);
        positive("sigma_rho", self.rho_step);
        positive("sigma_psi", self.psi_step);
        for (c, &s) in self.theta_step.iter().enumerate() {
            positive(&format!("sigma_theta_prop[{c}]"), s);
        }
        if self.topics < 1 {
            errs.push("K must be at least 1".into());
        }
        if self.ell < 1 {
            errs.push("ell must be at least 1".into());
        }
        if self.event_prob.len() != 1 && self.event_prob.len() != self.topics {
            errs.push(format!(
                "eta must have 1 or K={} values, got {}",
                self.topics,
                self.event_prob.len()
            ));
        }
        if self.event_prob.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
            errs.push("eta must lie in [0, 1]".into());
        }
        if !(self.event_prior > 0.0 && self.event_prior < 1.0) {
            errs.push("E_pi must lie in (0, 1)".into());
        }
        if !self.rho_prior_mean.is_finite() || !self.psi_prior_mean.is_finite() {
            errs.push("prior means must be finite".into());
        }
        if self.thin < 1 {
            errs.push("thin must be at least 1".into());
        }
        if self.burn_in > self.iters {
            errs.push(format!(
                "burn_in ({}) exceeds iters ({})",
                self.burn_in, self.iters
            ));
        }
        if self.stages.is_empty() {
            errs.push("stages must name at least one stage".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = ModelConfig::default();
        assert_eq!(cfg.validate(), Ok(()));
        assert_eq!(cfg.ell, 62);
        assert_eq!(cfg.topics, 22);
        assert_eq!(cfg.retained(), 90);
    }

    #[test]
    fn zero_alpha_is_reported() {
        let cfg = ModelConfig {
            alpha: 0.0,
            ..Default::default()
        };
        let errs = cfg.validate().unwrap_err();
        assert!(errs.iter().any(|e| e == "alpha must be positive"));
    }

    #[test]
    fn all_violations_are_returned() {
        let cfg = ModelConfig {
            alpha: 0.0,
            beta: -1.0,
            burn_in: 6,
            iters: 5,
            ..Default::default()
        };
        let errs = cfg.validate().unwrap_err();
        assert_eq!(errs.len(), 3);
        assert!(errs.iter().any(|e| e.contains("exceeds iters")));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ModelConfig::default();
        cfg.apply_text("K=4\nell = 7 # window\n\nsigma_theta_prop=0.1\neta=0.1,0.2,0.3,0.4")
            .unwrap();
        assert_eq!(cfg.topics, 4);
        assert_eq!(cfg.theta_step, [0.1; 5]);
        assert_eq!(ModelConfig::from_text(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn bad_lines_are_collected() {
        let err = ModelConfig::from_text("nope=1\nK=x\nfoo").unwrap_err();
        match err {
            Error::Config(v) => assert_eq!(v.len(), 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn retention_schedule() {
        let cfg = ModelConfig {
            iters: 20,
            burn_in: 5,
            thin: 5,
            ..Default::default()
        };
        let kept: Vec<usize> = (0..cfg.iters).filter(|&i| cfg.keeps(i)).collect();
        assert_eq!(kept, vec![9, 14, 19]);
        assert_eq!(kept.len(), cfg.retained());
    }
}

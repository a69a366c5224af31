//! Experiment files.
//!
//! An experiment is a TOML document with three sections:
//!
//! ```toml
//! [auction]
//! rival = { kind = "uniform", lo = 0.0, hi = 0.5 }
//! value = { kind = "uniform", lo = 0.4, hi = 1.0 }
//! lambda = 0.9
//! budget = { rule = "proportional", beta = 0.5 }
//!
//! [[policies]]
//! kind = "full_feedback"
//!
//! [sweep]
//! horizons = [512, 1024, 2048]
//! replications = 50
//! seed = 42
//! ```
//!
//! Unknown keys anywhere are rejected. See `configs/README.md` for the full
//! schema.

use std::path::{Path, PathBuf};

use fpa_core::auction::{AuctionConfig, FeedbackMode};
use fpa_core::distributions::DistributionSpec;
use fpa_core::policies::PolicySpec;
use fpa_core::Error;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetRule {
    Fixed {
        amount: f64,
    },
    /// `B = beta T`.
    Proportional {
        beta: f64,
    },
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::Proportional { beta: 0.5 }
    }
}

impl BudgetRule {
    pub fn budget(&self, horizon: u64) -> f64 {
        match *self {
            BudgetRule::Fixed { amount } => amount,
            BudgetRule::Proportional { beta } => beta * horizon as f64,
        }
    }
}

fn default_lambda() -> f64 {
    0.9
}

fn default_c1() -> f64 {
    1.0
}

fn default_grid_step() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuctionSection {
    pub rival: DistributionSpec,
    pub value: DistributionSpec,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default = "default_grid_step")]
    pub bid_grid_step: f64,
    #[serde(default)]
    pub budget: BudgetRule,
    /// Forces one feedback mode for every policy; by default the censored
    /// learner sees censored feedback and everyone else full feedback.
    #[serde(default)]
    pub feedback: Option<FeedbackMode>,
    /// Horizon of single runs; sweeps use `sweep.horizons`.
    #[serde(default)]
    pub horizon: Option<u64>,
}

impl AuctionSection {
    pub fn feedback_for(&self, policy: &PolicySpec) -> FeedbackMode {
        self.feedback.unwrap_or(match policy {
            PolicySpec::Censored { .. } => FeedbackMode::Censored,
            _ => FeedbackMode::Full,
        })
    }

    /// The engine configuration of `policy` at horizon `horizon`.
    pub fn auction_config(&self, policy: &PolicySpec, horizon: u64, seed: u64) -> AuctionConfig {
        AuctionConfig {
            horizon,
            budget: self.budget.budget(horizon),
            rival: self.rival.clone(),
            value: self.value.clone(),
            mode: self.feedback_for(policy),
            lambda: self.lambda,
            seed,
            bid_grid_step: self.bid_grid_step,
        }
    }
}

fn default_replications() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub horizons: Vec<u64>,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub auction: AuctionSection,
    pub policies: Vec<PolicySpec>,
    pub sweep: SweepSection,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(LabError::Core(Error::Config(msg)));
        let s = &self.sweep;
        if s.replications == 0 {
            return fail("replications must be at least 1".into());
        }
        if s.horizons.is_empty() {
            return fail("at least one horizon is required".into());
        }
        if s.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return fail("horizons must be strictly increasing".into());
        }
        if self.policies.is_empty() {
            return fail("at least one policy is required".into());
        }
        for (i, p) in self.policies.iter().enumerate() {
            if self.policies[..i].iter().any(|q| q.label() == p.label()) {
                return fail(format!("policy {} listed twice", p.label()));
            }
        }
        match self.auction.budget {
            BudgetRule::Fixed { amount } if !(amount > 0.0 && amount.is_finite()) => {
                return fail(format!("fixed budget {amount} must be positive"));
            }
            BudgetRule::Proportional { beta } if !(beta > 0.0 && beta.is_finite()) => {
                return fail(format!("budget ratio {beta} must be positive"));
            }
            _ => {}
        }
        let horizons = s.horizons.iter().chain(self.auction.horizon.as_ref());
        for &t in horizons {
            for p in &self.policies {
                let cfg = self.auction.auction_config(p, t, s.seed);
                cfg.validate()?;
                p.validate(&cfg)?;
            }
        }
        fpa_core::dp::DpConfig::new(
            self.auction.lambda,
            self.auction.c1,
            self.auction.bid_grid_step,
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[auction]
rival = { kind = "uniform", lo = 0.0, hi = 0.5 }
value = { kind = "uniform", lo = 0.4, hi = 1.0 }

[[policies]]
kind = "full_feedback"

[[policies]]
kind = "censored"
kernel = { kind = "gaussian", bandwidth_constant = 1.0 }

[sweep]
horizons = [16, 32, 64]
replications = 3
seed = 7
"#;

    #[test]
    fn parses_with_defaults() {
        let spec = ExperimentSpec::from_toml(EXAMPLE).unwrap();
        assert_eq!(spec.auction.lambda, 0.9);
        assert_eq!(spec.auction.budget.budget(64), 32.0);
        assert_eq!(spec.policies.len(), 2);
        let cfg = spec.auction.auction_config(&spec.policies[1], 16, 1);
        assert_eq!(cfg.mode, FeedbackMode::Censored);
        assert_eq!(
            spec.auction.feedback_for(&spec.policies[0]),
            FeedbackMode::Full
        );
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = EXAMPLE.replace("seed = 7", "seed = 7\ncolour = 1");
        assert_eq!(ExperimentSpec::from_toml(&bad).unwrap_err().exit_code(), 2);
        let bad = EXAMPLE.replace("lo = 0.4,", "lo = 0.4, mid = 0.5,");
        assert!(ExperimentSpec::from_toml(&bad).is_err());
    }

    #[test]
    fn rejects_bad_sweeps() {
        for (from, to) in [
            ("horizons = [16, 32, 64]", "horizons = [16, 16, 64]"),
            ("replications = 3", "replications = 0"),
            ("kind = \"censored\"", "kind = \"full_feedback\""),
        ] {
            let err = ExperimentSpec::from_toml(&EXAMPLE.replace(from, to)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{from} -> {to}: {err}");
        }
        let forced = EXAMPLE.replace("value = { kind", "feedback = \"censored\"\nvalue = { kind");
        assert!(ExperimentSpec::from_toml(&forced).is_err());
    }
}

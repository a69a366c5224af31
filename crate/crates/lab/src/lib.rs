//! Experiment harness for `fpa-core`: experiment files, replicated regret
//! sweeps, slope fits and CSV output. The `fpa-lab` binary wraps it in a CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod slope;
pub mod sweep;

pub use config::{AuctionSection, BudgetRule, ExperimentSpec, SweepSection};
pub use error::{LabError, Result};
pub use slope::{fit_slope, SlopeFit};
pub use sweep::{measure_regret, run_sweep, HorizonSummary, RegretReport, RegretRow, SweepOutput};

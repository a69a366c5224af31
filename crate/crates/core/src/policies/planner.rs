//! Truncated-horizon planning shared by the DP bidders.

use crate::distributions::Cdf;
use crate::dp::{
    argmax_bid, horizon_t0, solve_value_table_with, BaseRow, DpConfig, ValueMeasure, ValueTable,
};
use crate::error::Result;

/// Picks `argmax_b Q_v(B, t, b)` and caches the value table between rounds.
///
/// The rows of a table depend only on the distance to the truncation round,
/// so a table solved at one round serves every later round as long as the
/// estimates behind it are unchanged and it reaches deep and wide enough.
#[derive(Debug, Clone)]
pub(crate) struct Planner {
    cfg: DpConfig,
    table: Option<ValueTable>,
    table_version: u64,
    built_at: u64,
    solves: u64,
}

impl Planner {
    pub(crate) fn new(cfg: DpConfig) -> Self {
        Self {
            cfg,
            table: None,
            table_version: 0,
            built_at: 0,
            solves: 0,
        }
    }

    pub(crate) fn config(&self) -> &DpConfig {
        &self.cfg
    }

    /// Number of value tables solved so far.
    pub(crate) fn solves(&self) -> u64 {
        self.solves
    }

    /// `version` identifies the estimates; a cached table built from another
    /// version is replaced once `refresh_after` rounds have passed since it
    /// was solved, or right away if it does not cover the query.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn bid(
        &mut self,
        t: u64,
        v: f64,
        budget: f64,
        f_hat: &impl Cdf,
        version: u64,
        refresh_after: u64,
        g_hat: impl FnOnce() -> ValueMeasure,
    ) -> Result<f64> {
        if v <= 0.0 || budget <= 0.0 {
            return Ok(0.0);
        }
        let cfg = self.cfg;
        let n = cfg.grid_steps();
        let idx = cfg.budget_index(budget);
        let t0 = horizon_t0(t, cfg.lambda, cfg.c1);
        let k = (t0 - t) as usize;
        // row W(., t + 1) is flat from index (k - 1) n on, so with this much
        // budget every affordable bid sees the same continuation value
        if k == 0 || idx >= k.saturating_mul(n) {
            return Ok(cfg.grid_value(argmax_bid(v, idx, f_hat, &[0.0], &cfg)));
        }

        let covers = self
            .table
            .as_ref()
            .is_some_and(|tab| tab.depth() + 1 >= k && tab.budget_max_index() >= idx);
        let stale =
            self.table_version != version && t.saturating_sub(self.built_at) >= refresh_after;
        if !covers || stale {
            // the look-ahead grows with t; solving deep enough for round 2t
            // keeps the table usable while the estimates stay put
            let ahead = horizon_t0(2 * t, cfg.lambda, cfg.c1) - 2 * t;
            let depth = (k as u64).max(ahead);
            let table = solve_value_table_with(
                f_hat,
                &g_hat(),
                t,
                t + depth,
                budget,
                &cfg,
                &BaseRow::Zero,
            )?;
            self.table = Some(table);
            self.table_version = version;
            self.built_at = t;
            self.solves += 1;
        }
        let table = self.table.as_ref().expect("table solved above");
        Ok(cfg.grid_value(argmax_bid(v, idx, f_hat, table.row_at_depth(k - 1), &cfg)))
    }
}

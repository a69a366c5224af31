use alloc::vec;
use alloc::vec::Vec;

use super::{horizon_t0, q_from_parts, DpConfig, ValueMeasure, TIE_TOLERANCE};
use crate::distributions::Cdf;
use crate::error::{Error, Result};

/// Values assigned at the truncation round `t0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum BaseRow {
    /// `W(., t0) = 0`.
    #[default]
    Zero,
    Constant(f64),
    /// One value per budget index `0..=budget_max_index`.
    PerBudget(Vec<f64>),
}

/// Solution of the recursion for rounds `t..=t0` on a budget grid.
///
/// Row `j` holds `W(., t0 - j)`. A row stops at the first budget index past
/// which it is constant (with `j` rounds left at most `j` units can be spent),
/// and lookups beyond the stored length read its last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    t: u64,
    t0: u64,
    lambda: f64,
    steps: usize,
    budget_max_index: usize,
    rows: Vec<Vec<f64>>,
    // argmax bid index at the mean value of the value measure, per cell
    mean_value_bids: Vec<Vec<u16>>,
}

impl ValueTable {
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn t0(&self) -> u64 {
        self.t0
    }

    /// Number of recursion steps, `t0 - t`.
    pub fn depth(&self) -> usize {
        (self.t0 - self.t) as usize
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn budget_max_index(&self) -> usize {
        self.budget_max_index
    }

    /// `W(., t0 - j)`, truncated where it becomes constant.
    pub fn row_at_depth(&self, j: usize) -> &[f64] {
        &self.rows[j]
    }

    /// `W(., tau)` for `tau` in `t..=t0`; rounds past `t0` read the base row.
    pub fn row(&self, tau: u64) -> &[f64] {
        let j = self.t0.saturating_sub(tau) as usize;
        &self.rows[j.min(self.rows.len() - 1)]
    }

    pub fn value_at_index(&self, budget_index: usize, tau: u64) -> f64 {
        lookup(self.row(tau), budget_index)
    }

    pub fn value(&self, budget: f64, tau: u64) -> f64 {
        let idx = budget_index(budget, self.steps);
        self.value_at_index(idx, tau)
    }

    /// Maximizing grid bid at `(budget, tau)` for the mean of the value
    /// measure the table was solved with. `None` on the base row.
    pub fn mean_value_bid(&self, budget_index: usize, tau: u64) -> Option<f64> {
        if tau >= self.t0 || tau < self.t {
            return None;
        }
        let row = &self.mean_value_bids[(self.t0 - tau) as usize];
        let k = row[budget_index.min(row.len() - 1)];
        Some(k as f64 / self.steps as f64)
    }

    /// The row read when bidding in round `t`: `W(., t + 1)`.
    pub fn next_row(&self, t: u64) -> &[f64] {
        self.row(t + 1)
    }
}

fn budget_index(budget: f64, steps: usize) -> usize {
    let x = libm::floor(budget * steps as f64 + 1e-9);
    if x > 0.0 {
        x as usize
    } else {
        0
    }
}

#[inline]
fn lookup(row: &[f64], idx: usize) -> f64 {
    row[idx.min(row.len() - 1)]
}

/// Solves the table for rounds `t..=t0(t)` with a zero base row.
pub fn solve_value_table(
    f_hat: &impl Cdf,
    g_hat: &ValueMeasure,
    t: u64,
    budget_max: f64,
    cfg: &DpConfig,
) -> Result<ValueTable> {
    let t0 = horizon_t0(t, cfg.lambda, cfg.c1);
    solve_value_table_with(f_hat, g_hat, t, t0, budget_max, cfg, &BaseRow::Zero)
}

/// Solves the table for rounds `t..=t0` from an explicit base row.
pub fn solve_value_table_with(
    f_hat: &impl Cdf,
    g_hat: &ValueMeasure,
    t: u64,
    t0: u64,
    budget_max: f64,
    cfg: &DpConfig,
    base: &BaseRow,
) -> Result<ValueTable> {
    cfg.validate()?;
    if t0 < t {
        return Err(Error::Domain(alloc::format!(
            "truncation round {t0} precedes start round {t}"
        )));
    }
    if !(budget_max >= 0.0) {
        return Err(Error::Domain("budget must be nonnegative".into()));
    }
    let n = cfg.grid_steps();
    let lambda = cfg.lambda;
    let max_idx = budget_index(budget_max, n);
    let base_row = match base {
        BaseRow::Zero => vec![0.0],
        BaseRow::Constant(c) => vec![*c],
        BaseRow::PerBudget(values) => {
            if values.len() != max_idx + 1 {
                return Err(Error::Domain(alloc::format!(
                    "base row has {} entries, budget grid has {}",
                    values.len(),
                    max_idx + 1
                )));
            }
            values.clone()
        }
    };

    let f_at: Vec<f64> = (0..=n).map(|k| f_hat.cdf(k as f64 / n as f64)).collect();
    let mut slope_order: Vec<usize> = (0..=n).collect();
    slope_order.sort_by(|&a, &b| f_at[a].total_cmp(&f_at[b]).then(a.cmp(&b)));
    let mean_v = g_hat.mean();

    let depth = (t0 - t) as usize;
    let mut rows = Vec::with_capacity(depth + 1);
    let mut mean_value_bids = Vec::with_capacity(depth + 1);
    rows.push(base_row);
    mean_value_bids.push(Vec::new());
    let mut hull = Vec::with_capacity(n + 1);
    let mut intercepts = vec![0.0; n + 1];
    for j in 1..=depth {
        let prev = &rows[j - 1];
        let len = (prev.len() + n).min(max_idx + 1);
        let mut row = Vec::with_capacity(len);
        let mut bids = Vec::with_capacity(len);
        for i in 0..len {
            let w_keep = lookup(prev, i);
            let kmax = i.min(n);
            for (k, c) in intercepts[..=kmax].iter_mut().enumerate() {
                let b = k as f64 / n as f64;
                let s = f_at[k];
                *c = -b * s + lambda * (lookup(prev, i - k) * s + w_keep * (1.0 - s));
            }
            row.push(expected_max(
                g_hat,
                &f_at,
                &slope_order,
                kmax,
                &intercepts,
                &mut hull,
            ));
            bids.push(argmax_over(mean_v, kmax, &f_at, &intercepts) as u16);
        }
        rows.push(row);
        mean_value_bids.push(bids);
    }

    Ok(ValueTable {
        t,
        t0,
        lambda,
        steps: n,
        budget_max_index: max_idx,
        rows,
        mean_value_bids,
    })
}

/// Line `v -> slope * v + intercept` of one bid.
#[derive(Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
}

/// `E_v[max_{k <= kmax} (v F(b_k) + c_k)]` through the upper envelope of the
/// bid lines, integrated against the atoms of `g` with prefix sums.
fn expected_max(
    g: &ValueMeasure,
    f_at: &[f64],
    slope_order: &[usize],
    kmax: usize,
    intercepts: &[f64],
    hull: &mut Vec<Line>,
) -> f64 {
    hull.clear();
    for &k in slope_order {
        if k > kmax {
            continue;
        }
        let line = Line {
            slope: f_at[k],
            intercept: intercepts[k],
        };
        if let Some(last) = hull.last() {
            if last.slope == line.slope {
                if line.intercept <= last.intercept {
                    continue;
                }
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let l1 = hull[hull.len() - 2];
            let l2 = hull[hull.len() - 1];
            // l2 never strictly on top once l3 = line is present
            if (l1.intercept - line.intercept) * (l2.slope - l1.slope)
                <= (l1.intercept - l2.intercept) * (line.slope - l1.slope)
            {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }

    let mut total = 0.0;
    let mut lo = 0;
    for r in 0..hull.len() {
        let hi = if r + 1 < hull.len() {
            let (a, b) = (hull[r], hull[r + 1]);
            let x = (a.intercept - b.intercept) / (b.slope - a.slope);
            g.count_below(x).max(lo)
        } else {
            g.len()
        };
        if hi > lo {
            let (mass, moment) = g.slice_sums(lo, hi);
            total += hull[r].slope * moment + hull[r].intercept * mass;
        }
        lo = hi;
    }
    total
}

fn argmax_over(v: f64, kmax: usize, f_at: &[f64], intercepts: &[f64]) -> usize {
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=kmax {
        let q = v * f_at[k] + intercepts[k];
        if q > best + TIE_TOLERANCE {
            best = q;
            best_k = k;
        }
    }
    best_k
}

/// Grid index of the bid maximizing `Q_v` at budget index `budget_index`,
/// with `next` the row `W(., tau + 1)`. Ties go to the smallest bid.
pub fn argmax_bid(
    v: f64,
    budget_index: usize,
    f_hat: &impl Cdf,
    next: &[f64],
    cfg: &DpConfig,
) -> usize {
    let n = cfg.grid_steps();
    let kmax = budget_index.min(n);
    let keep = lookup(next, budget_index);
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=kmax {
        let b = k as f64 / n as f64;
        let q = q_from_parts(
            v,
            b,
            f_hat.cdf(b),
            lookup(next, budget_index - k),
            keep,
            cfg.lambda,
        );
        if q > best + TIE_TOLERANCE {
            best = q;
            best_k = k;
        }
    }
    best_k
}

/// Bid maximizing `Q_v(budget, t, .)` over grid bids not above
/// `min(budget, 1)`, reading `W(., t + 1)` from `table`.
pub fn optimal_bid(
    table: &ValueTable,
    v: f64,
    budget: f64,
    t: u64,
    f_hat: &impl Cdf,
    cfg: &DpConfig,
) -> f64 {
    if v <= 0.0 || budget <= 0.0 {
        return 0.0;
    }
    let idx = cfg.budget_index(budget);
    cfg.grid_value(argmax_bid(v, idx, f_hat, table.next_row(t), cfg))
}

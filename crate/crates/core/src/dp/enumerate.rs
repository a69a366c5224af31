//! Exhaustive search over non-anticipating policies on tiny instances.
//!
//! The search walks the full history tree (value, bid, rival bid per round)
//! without merging histories that reach the same budget, so it does not rely
//! on budget being a sufficient statistic. Choosing the best bid independently
//! at every (history, value) node is the same as maximizing over all maps
//! from histories to bids.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest number of decision nodes the search accepts.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TinyInstance {
    /// `(m, probability)` atoms of the highest rival bid.
    pub rival_atoms: Vec<(f64, f64)>,
    /// `(v, probability)` atoms of the own value.
    pub value_atoms: Vec<(f64, f64)>,
    /// Admissible bids.
    pub bids: Vec<f64>,
    pub horizon: usize,
    pub budget: f64,
    pub lambda: f64,
}

/// `sum_{h < horizon} |V| (|V| |bids| |M|)^h`, the number of points where a
/// policy picks a bid.
pub fn decision_nodes(inst: &TinyInstance) -> u64 {
    let per_round = (inst.value_atoms.len() * inst.bids.len() * inst.rival_atoms.len()) as u64;
    let mut total: u64 = 0;
    let mut layer = inst.value_atoms.len() as u64;
    for _ in 0..inst.horizon {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(per_round);
    }
    total
}

/// Expected discounted utility `sum_t lambda^(t-1) r_t` of the best
/// non-anticipating policy.
pub fn enumerate_policy_value(inst: &TinyInstance) -> Result<f64> {
    let nodes = decision_nodes(inst);
    if nodes > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            nodes,
            limit: ENUMERATION_LIMIT,
        });
    }
    if inst.value_atoms.is_empty() || inst.rival_atoms.is_empty() || inst.bids.is_empty() {
        return Err(Error::InvalidSpec(
            "tiny instance needs values, rival bids and bids".into(),
        ));
    }
    Ok(search(inst, inst.horizon, inst.budget, 1.0))
}

fn search(inst: &TinyInstance, rounds_left: usize, budget: f64, discount: f64) -> f64 {
    if rounds_left == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for &(v, pv) in &inst.value_atoms {
        let mut best = f64::NEG_INFINITY;
        for &b in &inst.bids {
            if b > budget + 1e-12 {
                continue;
            }
            let mut outcome = 0.0;
            for &(m, pm) in &inst.rival_atoms {
                outcome += pm
                    * if b >= m {
                        discount * (v - b)
                            + search(inst, rounds_left - 1, budget - b, discount * inst.lambda)
                    } else {
                        search(inst, rounds_left - 1, budget, discount * inst.lambda)
                    };
            }
            best = best.max(outcome);
        }
        total += pv * best;
    }
    total
}

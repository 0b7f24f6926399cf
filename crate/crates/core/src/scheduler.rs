//! Frequency-selective proportional-fair scheduling, one instance per cell.

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq)]
pub struct PfState {
    /// Exponentially averaged throughput per attached UE, bit/s.
    pub avg_bps: Vec<f64>,
    pub beta: f64,
    pub epsilon_bps: f64,
}

impl PfState {
    pub fn new(n_ues: usize, beta: f64, epsilon_bps: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "PF forgetting factor must be in (0, 1], got {beta}"
            )));
        }
        if !(epsilon_bps > 0.0) {
            return Err(SimError::InvalidConfig("PF epsilon must be > 0".into()));
        }
        Ok(Self {
            avg_bps: vec![epsilon_bps; n_ues],
            beta,
            epsilon_bps,
        })
    }

    /// `T <- (1 - beta) T + beta * achieved`, floored at epsilon.
    pub fn update(&mut self, achieved_bps: &[f64]) {
        for (t, &r) in self.avg_bps.iter_mut().zip(achieved_bps) {
            *t = ((1.0 - self.beta) * *t + self.beta * r).max(self.epsilon_bps);
        }
    }
}

/// One TTI of one cell's allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleGrid {
    /// Local UE index per RB, `None` only when the cell has no UEs.
    pub rb_owner: Vec<Option<usize>>,
    /// Sum of the achievable rates of the RBs each UE won, bit/s.
    pub achieved_bps: Vec<f64>,
}

/// Assigns every RB to `argmax_u achievable[u][rb] / avg[u]`, ties to the
/// lowest UE index. `achievable` is indexed `[ue][rb]`.
pub fn pf_schedule(achievable: &[Vec<f64>], state: &PfState) -> ScheduleGrid {
    let n_rb = achievable.first().map_or(0, Vec::len);
    let mut rb_owner = vec![None; n_rb];
    let mut achieved_bps = vec![0.0; achievable.len()];
    if achievable.is_empty() {
        return ScheduleGrid { rb_owner, achieved_bps };
    }
    for (rb, owner) in rb_owner.iter_mut().enumerate() {
        let mut best = 0;
        let mut best_metric = f64::NEG_INFINITY;
        for (u, rates) in achievable.iter().enumerate() {
            let metric = rates[rb] / state.avg_bps[u];
            if metric > best_metric {
                best = u;
                best_metric = metric;
            }
        }
        *owner = Some(best);
        achieved_bps[best] += achievable[best][rb];
    }
    ScheduleGrid { rb_owner, achieved_bps }
}

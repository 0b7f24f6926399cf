//! Handover bookkeeping for a moving train: per-UE handover bursts at
//! conventional cell borders, moving-cell rerouting, and a capacity
//! threshold model of control-channel blocking.

use std::fmt;

use crate::error::{Result, SimError};
use crate::geometry::{RadioUnit, TrackLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobilityMode {
    /// Every UE aboard is handed over individually at each cell border.
    PerUe,
    /// A central unit reroutes the stream; no per-UE signaling.
    MovingCell,
}

impl MobilityMode {
    pub fn name(self) -> &'static str {
        match self {
            MobilityMode::PerUe => "per_ue",
            MobilityMode::MovingCell => "moving_cell",
        }
    }
}

impl fmt::Display for MobilityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellPlan {
    pub cell_length_m: f64,
    pub boundaries_m: Vec<f64>,
    /// Cell index of every RU, indexed by RU id.
    pub ru_to_cell: Vec<usize>,
}

impl CellPlan {
    /// Cells of `cell_length_m` starting at `origin_m` and covering at
    /// least `extent_m` of track.
    pub fn uniform(
        origin_m: f64,
        cell_length_m: f64,
        extent_m: f64,
        rus: &[RadioUnit],
        layout: &TrackLayout,
    ) -> Result<Self> {
        if !(cell_length_m > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "cell length must be > 0, got {cell_length_m}"
            )));
        }
        if !(extent_m >= 0.0) {
            return Err(SimError::InvalidConfig("plan extent must be >= 0".into()));
        }
        let n_cells = (extent_m / cell_length_m).ceil().max(1.0) as usize;
        let boundaries_m = (0..=n_cells).map(|k| origin_m + k as f64 * cell_length_m).collect();
        let ru_to_cell = rus
            .iter()
            .map(|ru| {
                let x = layout.site_position(ru) - origin_m;
                (x / cell_length_m).floor().max(0.0) as usize
            })
            .collect();
        Ok(Self {
            cell_length_m,
            boundaries_m,
            ru_to_cell,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandoverKind {
    PerUeBurst,
    MovingCellReroute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoverEvent {
    pub time_s: f64,
    pub boundary_m: f64,
    pub ue_count: usize,
    pub kind: HandoverKind,
}

/// Train front starts at `start_m` and moves forward at constant speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub start_m: f64,
    pub speed_mps: f64,
    pub duration_s: f64,
}

impl Trajectory {
    pub fn end_m(&self) -> f64 {
        self.start_m + self.speed_mps * self.duration_s
    }

    /// Whether the front strictly passes `boundary_m`. The end point is
    /// inclusive up to rounding of `speed * duration`.
    pub fn passes(&self, boundary_m: f64) -> bool {
        let end = self.end_m();
        boundary_m > self.start_m && boundary_m <= end + 1e-9 * end.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalingModel {
    /// Handovers the control channel completes per second.
    pub capacity_per_s: f64,
}

impl SignalingModel {
    pub fn new(capacity_per_s: f64) -> Result<Self> {
        if !(capacity_per_s > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "signaling capacity must be > 0, got {capacity_per_s}"
            )));
        }
        Ok(Self { capacity_per_s })
    }
}

/// Time between consecutive border crossings; infinite for a stopped train.
pub fn handover_period(cell_length_m: f64, speed_mps: f64) -> f64 {
    if speed_mps > 0.0 {
        cell_length_m / speed_mps
    } else {
        f64::INFINITY
    }
}

/// One event per plan boundary strictly passed by the train front.
pub fn handover_trace(
    trajectory: &Trajectory,
    plan: &CellPlan,
    n_ues: usize,
    mode: MobilityMode,
) -> Vec<HandoverEvent> {
    if !(trajectory.speed_mps > 0.0) || !(trajectory.duration_s > 0.0) {
        return Vec::new();
    }
    let (kind, ue_count) = match mode {
        MobilityMode::PerUe => (HandoverKind::PerUeBurst, n_ues),
        MobilityMode::MovingCell => (HandoverKind::MovingCellReroute, 0),
    };
    plan.boundaries_m
        .iter()
        .filter(|&&b| trajectory.passes(b))
        .map(|&b| HandoverEvent {
            time_s: (b - trajectory.start_m) / trajectory.speed_mps,
            boundary_m: b,
            ue_count,
            kind,
        })
        .collect()
}

pub fn total_per_ue_handovers(events: &[HandoverEvent]) -> usize {
    events.iter().map(|e| e.ue_count).sum()
}

/// RU that carries the moving cell: the inward-facing RU of the site
/// whose Voronoi span along the track contains the train center. Ties go
/// to the lower RU id.
pub fn moving_cell_active_ru(train_center_m: f64, rus: &[RadioUnit], layout: &TrackLayout) -> Result<usize> {
    let sites = &layout.site_positions_m;
    let margin = |a: usize, b: usize| (sites[a] - sites[b]).abs() / 2.0;
    let (lo, hi) = if sites.len() > 1 {
        (
            sites[0] - margin(0, 1),
            layout.last_site_m() + margin(sites.len() - 1, sites.len() - 2),
        )
    } else {
        (sites[0], sites[0])
    };
    if !(train_center_m >= lo && train_center_m <= hi) {
        return Err(SimError::OutsideCoverage {
            center_m: train_center_m,
            min_m: lo,
            max_m: hi,
        });
    }
    // nearest site; strict comparison keeps the lower site on ties
    let site = (1..sites.len()).fold(0, |best, s| {
        if (train_center_m - sites[s]).abs() < (train_center_m - sites[best]).abs() {
            s
        } else {
            best
        }
    });
    let delta = train_center_m - sites[site];
    rus.iter()
        .filter(|ru| ru.site_index == site)
        .filter(|ru| delta == 0.0 || delta * ru.boresight.sign() > 0.0)
        .map(|ru| ru.id)
        .min()
        .ok_or(SimError::NoCoverage {
            position_m: train_center_m,
        })
}

/// UEs whose handover cannot complete within `window_s` of its event.
/// Completed handovers per event are `floor(capacity * window)`.
pub fn signaling_blocking(events: &[HandoverEvent], model: &SignalingModel, window_s: f64) -> usize {
    let budget = (model.capacity_per_s * window_s.max(0.0)).floor();
    events
        .iter()
        .map(|e| {
            let completed = if budget >= e.ue_count as f64 {
                e.ue_count
            } else {
                budget as usize
            };
            e.ue_count - completed
        })
        .sum()
}

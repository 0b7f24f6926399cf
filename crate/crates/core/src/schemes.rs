//! UE association under the RU collaboration schemes.
//!
//! Association works on wideband receive power (no fading). Every UE ends
//! up with a serving set, an interferer set and a muted set that together
//! partition the radio units it can see, plus the scheduling cell it
//! belongs to.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::channel::{macro_gain_at_height, LinkBudget};
use crate::error::{Result, SimError};
use crate::geometry::{is_visible, RadioUnit, TrackLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// Every site is an independent cell.
    Baseline,
    /// The second of the two dominant RUs is silenced towards the UE.
    Coordination,
    /// The two dominant RUs jointly serve the UE as one merged cell.
    Cooperation,
    /// One roof-mounted relay stands in for the whole train.
    Relay,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Baseline,
        SchemeKind::Coordination,
        SchemeKind::Cooperation,
        SchemeKind::Relay,
    ];

    /// The three direct-link schemes.
    pub const DIRECT: [SchemeKind; 3] = [SchemeKind::Baseline, SchemeKind::Coordination, SchemeKind::Cooperation];

    /// Stable index used for seed derivation.
    pub fn index(self) -> u64 {
        match self {
            SchemeKind::Baseline => 0,
            SchemeKind::Coordination => 1,
            SchemeKind::Cooperation => 2,
            SchemeKind::Relay => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Baseline => "baseline",
            SchemeKind::Coordination => "coordination",
            SchemeKind::Cooperation => "cooperation",
            SchemeKind::Relay => "relay",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

/// RUs that face the UE (off-boresight angle at most 90 degrees).
pub fn visible_rus<'a>(ue_pos_m: f64, rus: &'a [RadioUnit], layout: &TrackLayout) -> Result<Vec<&'a RadioUnit>> {
    let visible: Vec<_> = rus.iter().filter(|ru| is_visible(ue_pos_m, ru, layout)).collect();
    if visible.is_empty() {
        return Err(SimError::NoCoverage { position_m: ue_pos_m });
    }
    Ok(visible)
}

pub fn wideband_rx_power_dbm(
    ue_pos_m: f64,
    ue_height_m: f64,
    ru: &RadioUnit,
    layout: &TrackLayout,
    budget: &LinkBudget,
) -> f64 {
    ru.tx_power_dbm()
        + macro_gain_at_height(
            ue_pos_m,
            ue_height_m,
            ru,
            layout,
            &budget.pathloss,
            &budget.pattern,
            budget.penetration_db,
        )
}

/// Wideband power from one visible RU to one UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibleLink {
    pub ru: usize,
    pub rx_dbm: f64,
}

/// Visible links for every UE at the given track positions.
pub fn visible_links(
    positions_m: &[f64],
    ue_height_m: f64,
    rus: &[RadioUnit],
    layout: &TrackLayout,
    budget: &LinkBudget,
) -> Result<Vec<Vec<VisibleLink>>> {
    positions_m
        .iter()
        .map(|&x| {
            Ok(visible_rus(x, rus, layout)?
                .into_iter()
                .map(|ru| VisibleLink {
                    ru: ru.id,
                    rx_dbm: wideband_rx_power_dbm(x, ue_height_m, ru, layout, budget),
                })
                .collect())
        })
        .collect()
}

/// A scheduling cell: the RUs that share one resource grid and the UEs
/// it serves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub rus: Vec<usize>,
    pub ues: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMap {
    pub scheme: SchemeKind,
    pub serving: Vec<Vec<usize>>,
    pub interferers: Vec<Vec<usize>>,
    pub muted: Vec<Vec<usize>>,
    pub cells: Vec<Cell>,
    pub cell_of_ue: Vec<usize>,
}

impl AssociationMap {
    pub fn n_ues(&self) -> usize {
        self.serving.len()
    }

    /// UE count per scheduling cell, keyed by the cell's RU ids. For the
    /// baseline and coordination schemes every cell is a single RU.
    pub fn per_ru_load(&self) -> Vec<(Vec<usize>, usize)> {
        self.cells.iter().map(|c| (c.rus.clone(), c.ues.len())).collect()
    }

    pub fn attached_ues(&self, ru: usize) -> Vec<usize> {
        self.cells
            .iter()
            .filter(|c| c.rus.contains(&ru))
            .flat_map(|c| c.ues.iter().copied())
            .collect()
    }

    pub fn muted_rus(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.muted.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

fn ranked(links: &[VisibleLink]) -> Vec<VisibleLink> {
    let mut sorted = links.to_vec();
    sorted.sort_by(|a, b| b.rx_dbm.total_cmp(&a.rx_dbm).then(a.ru.cmp(&b.ru)));
    sorted
}

/// Builds serving, interferer and muted sets and scheduling cells.
///
/// `Relay` is associated like `Baseline`; replacing the passengers with
/// the single roof antenna happens before association.
pub fn associate(links: &[Vec<VisibleLink>], scheme: SchemeKind) -> Result<AssociationMap> {
    let n = links.len();
    let mut serving = Vec::with_capacity(n);
    let mut interferers = Vec::with_capacity(n);
    let mut muted = Vec::with_capacity(n);
    let mut cell_keys: Vec<Vec<usize>> = Vec::with_capacity(n);

    for (ue, ue_links) in links.iter().enumerate() {
        if ue_links.is_empty() {
            return Err(SimError::Unassociated { ue });
        }
        let order = ranked(ue_links);
        let dominant = order.len().min(2);
        let rest = || order[dominant..].iter().map(|l| l.ru).collect::<Vec<_>>();

        let (s, i, m, key) = match scheme {
            SchemeKind::Baseline | SchemeKind::Relay => {
                let others = order[1..].iter().map(|l| l.ru).collect();
                (vec![order[0].ru], others, vec![], vec![order[0].ru])
            }
            SchemeKind::Coordination => {
                let m = order[1..dominant].iter().map(|l| l.ru).collect();
                (vec![order[0].ru], rest(), m, vec![order[0].ru])
            }
            SchemeKind::Cooperation => {
                let pair: Vec<usize> = order[..dominant].iter().map(|l| l.ru).collect();
                let mut key = pair.clone();
                key.sort_unstable();
                (pair, rest(), vec![], key)
            }
        };
        serving.push(s);
        interferers.push(i);
        muted.push(m);
        cell_keys.push(key);
    }

    let mut grouped: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ue, key) in cell_keys.iter().enumerate() {
        grouped.entry(key.clone()).or_default().push(ue);
    }
    let mut cell_of_ue = vec![0; n];
    let cells = grouped
        .into_iter()
        .enumerate()
        .map(|(idx, (rus, ues))| {
            for &u in &ues {
                cell_of_ue[u] = idx;
            }
            Cell { rus, ues }
        })
        .collect();

    Ok(AssociationMap {
        scheme,
        serving,
        interferers,
        muted,
        cells,
        cell_of_ue,
    })
}

/// Track coordinate in `[lo_m, hi_m]` where the strongest visible RU
/// changes, found by bisection. Assumes a single switch in the interval.
pub fn serving_switch_point(
    lo_m: f64,
    hi_m: f64,
    ue_height_m: f64,
    rus: &[RadioUnit],
    layout: &TrackLayout,
    budget: &LinkBudget,
) -> Result<f64> {
    let best = |x: f64| -> Result<usize> {
        let links = visible_links(&[x], ue_height_m, rus, layout, budget)?;
        Ok(ranked(&links[0])[0].ru)
    };
    let start = best(lo_m)?;
    if best(hi_m)? == start {
        return Err(SimError::InvalidConfig(format!(
            "serving RU does not change between {lo_m} m and {hi_m} m"
        )));
    }
    let (mut lo, mut hi) = (lo_m, hi_m);
    while hi - lo > f64::EPSILON * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if best(mid)? == start {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Expected share of uniformly placed UEs that lie beyond `switch_m`.
pub fn expected_next_site_fraction(center_m: f64, train_length_m: f64, switch_m: f64) -> f64 {
    ((center_m + train_length_m / 2.0 - switch_m) / train_length_m).clamp(0.0, 1.0)
}

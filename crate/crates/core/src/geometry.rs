//! Track layout, radio units, train and on-board UE placement.
//!
//! Everything lives on a straight 1-D track. Sites sit at a fixed lateral
//! offset from the rails and carry two radio units pointing in opposite
//! directions along the track.

use rand::Rng;

use crate::error::{Result, SimError};

/// Direction a radio unit points along the track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boresight {
    Forward,
    Backward,
}

impl Boresight {
    pub fn sign(self) -> f64 {
        match self {
            Boresight::Forward => 1.0,
            Boresight::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackLayout {
    pub site_positions_m: Vec<f64>,
    pub site_lateral_offset_m: f64,
    pub ru_height_m: f64,
    pub ue_height_m: f64,
}

impl TrackLayout {
    /// `n_sites` equidistant sites starting at track coordinate 0.
    pub fn equidistant(
        n_sites: usize,
        spacing_m: f64,
        lateral_offset_m: f64,
        ru_height_m: f64,
        ue_height_m: f64,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(SimError::InvalidConfig("at least one site is required".into()));
        }
        if !(spacing_m > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "inter-RU distance must be positive, got {spacing_m}"
            )));
        }
        let layout = Self {
            site_positions_m: (0..n_sites).map(|i| i as f64 * spacing_m).collect(),
            site_lateral_offset_m: lateral_offset_m,
            ru_height_m,
            ue_height_m,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.site_positions_m.is_empty() {
            return Err(SimError::InvalidConfig("layout has no sites".into()));
        }
        if self.site_positions_m.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimError::InvalidConfig(
                "site positions must be strictly increasing".into(),
            ));
        }
        if !(self.site_lateral_offset_m >= 0.0) {
            return Err(SimError::InvalidConfig("lateral offset must be >= 0".into()));
        }
        if !(self.ru_height_m > 0.0) || !(self.ue_height_m > 0.0) {
            return Err(SimError::InvalidConfig("antenna heights must be > 0".into()));
        }
        Ok(())
    }

    /// Two radio units per site. Ids are `2 * site` (backward) and
    /// `2 * site + 1` (forward), so ids increase along the track.
    pub fn radio_units(&self, tx_power_w: f64, n_tx_antennas: usize) -> Vec<RadioUnit> {
        (0..self.site_positions_m.len())
            .flat_map(|site| {
                [Boresight::Backward, Boresight::Forward]
                    .into_iter()
                    .enumerate()
                    .map(move |(k, boresight)| RadioUnit {
                        id: 2 * site + k,
                        site_index: site,
                        boresight,
                        tx_power_w,
                        n_tx_antennas,
                    })
            })
            .collect()
    }

    pub fn site_position(&self, ru: &RadioUnit) -> f64 {
        self.site_positions_m[ru.site_index]
    }

    pub fn first_site_m(&self) -> f64 {
        self.site_positions_m[0]
    }

    pub fn last_site_m(&self) -> f64 {
        *self.site_positions_m.last().expect("validated layout has sites")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioUnit {
    pub id: usize,
    pub site_index: usize,
    pub boresight: Boresight,
    pub tx_power_w: f64,
    pub n_tx_antennas: usize,
}

impl RadioUnit {
    pub fn tx_power_dbm(&self) -> f64 {
        10.0 * (self.tx_power_w * 1e3).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainState {
    pub length_m: f64,
    pub speed_mps: f64,
    pub center_m: f64,
}

impl TrainState {
    pub fn new(length_m: f64, speed_mps: f64, center_m: f64) -> Result<Self> {
        if !(length_m > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "train length must be > 0, got {length_m}"
            )));
        }
        if !(speed_mps >= 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "train speed must be >= 0, got {speed_mps}"
            )));
        }
        Ok(Self {
            length_m,
            speed_mps,
            center_m,
        })
    }

    pub fn rear_m(&self) -> f64 {
        self.center_m - self.length_m / 2.0
    }

    pub fn front_m(&self) -> f64 {
        self.center_m + self.length_m / 2.0
    }
}

/// Positions of the active UEs measured from the rear of the train.
#[derive(Debug, Clone, PartialEq)]
pub struct UeSet {
    pub offsets_m: Vec<f64>,
}

impl UeSet {
    pub fn count(&self) -> usize {
        self.offsets_m.len()
    }
}

/// Draws `count` i.i.d. uniform offsets on `[0, train_length_m]`.
pub fn place_ues<R: Rng + ?Sized>(count: usize, train_length_m: f64, rng: &mut R) -> Result<UeSet> {
    if count == 0 {
        return Err(SimError::InvalidConfig("UE count must be at least 1".into()));
    }
    if !(train_length_m > 0.0) {
        return Err(SimError::InvalidConfig(format!(
            "train length must be > 0, got {train_length_m}"
        )));
    }
    let offsets_m = (0..count).map(|_| rng.gen_range(0.0..=train_length_m)).collect();
    Ok(UeSet { offsets_m })
}

pub fn ue_track_positions(train: &TrainState, ues: &UeSet) -> Vec<f64> {
    let rear = train.rear_m();
    ues.offsets_m.iter().map(|o| rear + o).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance_3d_m: f64,
    pub boresight_angle_deg: f64,
}

/// 3-D distance and horizontal off-boresight angle between a UE on the
/// track and a radio unit.
pub fn link_geometry(ue_pos_m: f64, ru: &RadioUnit, layout: &TrackLayout) -> LinkGeometry {
    link_geometry_at_height(ue_pos_m, layout.ue_height_m, ru, layout)
}

pub fn link_geometry_at_height(ue_pos_m: f64, ue_height_m: f64, ru: &RadioUnit, layout: &TrackLayout) -> LinkGeometry {
    let along = (ue_pos_m - layout.site_position(ru)) * ru.boresight.sign();
    let lateral = layout.site_lateral_offset_m;
    let dh = layout.ru_height_m - ue_height_m;
    let distance_3d_m = (along * along + lateral * lateral + dh * dh).sqrt();
    let boresight_angle_deg = if along == 0.0 && lateral == 0.0 {
        90.0
    } else {
        lateral.atan2(along).to_degrees()
    };
    LinkGeometry {
        distance_3d_m,
        boresight_angle_deg,
    }
}

/// A radio unit sees a UE when the UE is not behind it (angle <= 90 deg).
pub fn is_visible(ue_pos_m: f64, ru: &RadioUnit, layout: &TrackLayout) -> bool {
    (ue_pos_m - layout.site_position(ru)) * ru.boresight.sign() >= 0.0
}

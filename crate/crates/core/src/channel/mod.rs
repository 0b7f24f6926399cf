//! Macroscopic link gain and small-scale fading.

mod fading;

pub use fading::{FadingProcess, RbRotations, TapProfile};

use log::warn;

use crate::error::{Result, SimError};
use crate::geometry::{link_geometry_at_height, RadioUnit, TrackLayout};

pub const SPEED_OF_LIGHT_MPS: f64 = 2.997_924_58e8;

/// Parameters of the rural macro-cell Hata path-loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossParams {
    pub carrier_mhz: f64,
    pub bs_height_m: f64,
    pub min_distance_m: f64,
}

impl Default for PathlossParams {
    fn default() -> Self {
        Self {
            carrier_mhz: 2140.0,
            bs_height_m: 30.0,
            min_distance_m: 35.0,
        }
    }
}

impl PathlossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_mhz > 0.0) {
            return Err(SimError::InvalidConfig("carrier frequency must be > 0".into()));
        }
        if !(30.0..=200.0).contains(&self.bs_height_m) {
            return Err(SimError::InvalidConfig(format!(
                "RU height {} m is outside the Hata range [30, 200] m",
                self.bs_height_m
            )));
        }
        if !(self.min_distance_m > 0.0) {
            return Err(SimError::InvalidConfig("minimum distance must be > 0".into()));
        }
        if !(150.0..=2000.0).contains(&self.carrier_mhz) {
            warn!(
                "carrier {} MHz is outside the classical Hata range 150-2000 MHz; extrapolating",
                self.carrier_mhz
            );
        }
        Ok(())
    }
}

/// Rural Hata path loss in dB, distance clamped to `min_distance_m`.
pub fn hata_rural_pl(distance_m: f64, p: &PathlossParams) -> f64 {
    let d_km = distance_m.max(p.min_distance_m) / 1e3;
    let lf = p.carrier_mhz.log10();
    let lh = p.bs_height_m.log10();
    69.55 + 26.16 * lf - 13.82 * lh + (44.9 - 6.55 * lh) * d_km.log10() - 4.78 * lf * lf + 18.33 * lf - 40.94
}

/// Horizontal sector pattern with a front-to-back floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    pub theta_3db_deg: f64,
    pub front_to_back_db: f64,
}

impl Default for AntennaPattern {
    fn default() -> Self {
        Self {
            theta_3db_deg: 65.0,
            front_to_back_db: 20.0,
        }
    }
}

pub fn antenna_gain(theta_deg: f64, pat: &AntennaPattern) -> f64 {
    let ratio = theta_deg / pat.theta_3db_deg;
    -(12.0 * ratio * ratio).min(pat.front_to_back_db)
}

pub fn doppler_hz(speed_mps: f64, carrier_hz: f64) -> f64 {
    speed_mps * carrier_hz / SPEED_OF_LIGHT_MPS
}

/// Everything needed to turn geometry into a macroscopic gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub pathloss: PathlossParams,
    pub pattern: AntennaPattern,
    pub penetration_db: f64,
}

/// `-pathloss + antenna gain - penetration` in dB (negative means attenuation).
pub fn macro_gain(
    ue_pos_m: f64,
    ru: &RadioUnit,
    layout: &TrackLayout,
    p: &PathlossParams,
    pat: &AntennaPattern,
    penetration_db: f64,
) -> f64 {
    macro_gain_at_height(ue_pos_m, layout.ue_height_m, ru, layout, p, pat, penetration_db)
}

pub fn macro_gain_at_height(
    ue_pos_m: f64,
    ue_height_m: f64,
    ru: &RadioUnit,
    layout: &TrackLayout,
    p: &PathlossParams,
    pat: &AntennaPattern,
    penetration_db: f64,
) -> f64 {
    let g = link_geometry_at_height(ue_pos_m, ue_height_m, ru, layout);
    -hata_rural_pl(g.distance_3d_m, p) + antenna_gain(g.boresight_angle_deg, pat) - penetration_db
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

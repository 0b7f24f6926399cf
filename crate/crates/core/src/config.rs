//! Scenario parameters and their flat `key=value` text form.
//!
//! Every key is optional; missing keys keep their defaults. Lines starting
//! with `#` and text after a `#` are comments. Keys carry their unit in
//! the name.

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{AntennaPattern, LinkBudget, PathlossParams, TapProfile};
use crate::error::{ConfigError, Result, SimError};
use crate::geometry::TrackLayout;
use crate::phy::{InterferenceMode, LinkAbstraction};
use crate::schemes::SchemeKind;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub bandwidth_mhz: f64,
    pub n_rb: usize,
    pub rb_bandwidth_khz: f64,
    pub carrier_mhz: f64,
    pub tti_ms: f64,

    pub n_sites: usize,
    pub inter_ru_distance_m: f64,
    pub site_lateral_offset_m: f64,
    pub ru_height_m: f64,
    pub ue_height_m: f64,
    pub relay_height_m: f64,

    pub tx_power_w: f64,
    pub n_tx_antennas: usize,
    pub min_distance_m: f64,
    pub theta_3db_deg: f64,
    pub front_to_back_db: f64,
    pub penetration_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub tap_delays_ns: Vec<f64>,
    pub tap_powers_db: Vec<f64>,
    pub interference_mode: InterferenceMode,

    pub alpha: f64,
    pub se_max: f64,

    pub train_length_m: f64,
    pub train_speed_kmh: f64,
    pub passengers: usize,
    pub active_fraction: f64,

    pub pf_beta: f64,
    pub pf_epsilon_bps: f64,

    pub drops_per_point: usize,
    pub ttis_per_drop: usize,
    /// Train-center positions relative to the sweep anchor site.
    pub positions_m: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    pub master_seed: u64,

    pub mobility_speed_kmh: f64,
    pub trajectory_length_m: f64,
    pub cell_length_m: f64,
    pub moving_cell_length_m: f64,
    pub signaling_capacity_per_s: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            bandwidth_mhz: 20.0,
            n_rb: 100,
            rb_bandwidth_khz: 180.0,
            carrier_mhz: 2140.0,
            tti_ms: 1.0,

            n_sites: 4,
            inter_ru_distance_m: 1000.0,
            site_lateral_offset_m: 5.0,
            ru_height_m: 30.0,
            ue_height_m: 1.5,
            relay_height_m: 4.0,

            tx_power_w: 40.0,
            n_tx_antennas: 2,
            min_distance_m: 35.0,
            theta_3db_deg: 65.0,
            front_to_back_db: 20.0,
            penetration_db: 30.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            tap_delays_ns: vec![0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0],
            tap_powers_db: vec![0.0, -1.0, -9.0, -10.0, -15.0, -20.0],
            interference_mode: InterferenceMode::Expected,

            alpha: 0.6,
            se_max: 4.4,

            train_length_m: 200.84,
            train_speed_kmh: 200.0,
            passengers: 460,
            active_fraction: 0.1,

            pf_beta: 1e-3,
            pf_epsilon_bps: 1.0,

            drops_per_point: 20,
            ttis_per_drop: 200,
            positions_m: (0..=10).map(|i| i as f64 * 100.0).collect(),
            schemes: SchemeKind::DIRECT.to_vec(),
            master_seed: 1,

            mobility_speed_kmh: 350.0,
            trajectory_length_m: 10_000.0,
            cell_length_m: 1000.0,
            moving_cell_length_m: 50_000.0,
            signaling_capacity_per_s: 100.0,
        }
    }
}

/// Parses `START:STEP:STOP` (inclusive of STOP when it lands on the grid)
/// or a comma-separated list.
pub fn parse_positions(text: &str) -> std::result::Result<Vec<f64>, String> {
    let text = text.trim();
    if let [start, step, stop] = text.split(':').collect::<Vec<_>>()[..] {
        let (start, step, stop) = (parse_f64(start)?, parse_f64(step)?, parse_f64(stop)?);
        if !(step > 0.0) {
            return Err(format!("step must be > 0, got {step}"));
        }
        if stop < start {
            return Err(format!("stop {stop} is below start {start}"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    let list = parse_f64_list(text)?;
    if list.is_empty() {
        return Err("at least one position is required".into());
    }
    Ok(list)
}

/// `all` selects the three direct-link schemes; otherwise a comma list.
pub fn parse_schemes(text: &str) -> std::result::Result<Vec<SchemeKind>, String> {
    let text = text.trim();
    if text == "all" {
        return Ok(SchemeKind::DIRECT.to_vec());
    }
    let mut out: Vec<SchemeKind> = Vec::new();
    for part in text.split(',') {
        let kind: SchemeKind = part.trim().parse()?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    Ok(out)
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a non-negative integer", s.trim()))
}

fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_f64).collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

enum SetError {
    Unknown,
    Malformed(String),
    Range(String),
}

fn positive(v: f64) -> std::result::Result<f64, SetError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(SetError::Range(format!("must be > 0, got {v}")))
    }
}

fn non_negative(v: f64) -> std::result::Result<f64, SetError> {
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(SetError::Range(format!("must be >= 0, got {v}")))
    }
}

fn at_least_one(v: usize) -> std::result::Result<usize, SetError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(SetError::Range("must be >= 1".into()))
    }
}

impl ScenarioConfig {
    /// Sets one key from its textual value.
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), SetError> {
        let f = |v: &str| parse_f64(v).map_err(SetError::Malformed);
        let u = |v: &str| parse_usize(v).map_err(SetError::Malformed);
        match key {
            "bandwidth_mhz" => self.bandwidth_mhz = positive(f(value)?)?,
            "n_rb" => self.n_rb = at_least_one(u(value)?)?,
            "rb_bandwidth_khz" => self.rb_bandwidth_khz = positive(f(value)?)?,
            "carrier_mhz" => self.carrier_mhz = positive(f(value)?)?,
            "tti_ms" => self.tti_ms = positive(f(value)?)?,
            "n_sites" => self.n_sites = at_least_one(u(value)?)?,
            "inter_ru_distance_m" => self.inter_ru_distance_m = positive(f(value)?)?,
            "site_lateral_offset_m" => self.site_lateral_offset_m = non_negative(f(value)?)?,
            "ru_height_m" => {
                let v = f(value)?;
                if !(30.0..=200.0).contains(&v) {
                    return Err(SetError::Range(format!("must be within [30, 200] m, got {v}")));
                }
                self.ru_height_m = v;
            }
            "ue_height_m" => self.ue_height_m = positive(f(value)?)?,
            "relay_height_m" => self.relay_height_m = positive(f(value)?)?,
            "tx_power_w" => self.tx_power_w = positive(f(value)?)?,
            "n_tx_antennas" => {
                let v = u(value)?;
                if v != 2 {
                    return Err(SetError::Range(format!(
                        "the codebook supports exactly 2 antennas, got {v}"
                    )));
                }
                self.n_tx_antennas = v;
            }
            "min_distance_m" => self.min_distance_m = positive(f(value)?)?,
            "theta_3db_deg" => self.theta_3db_deg = positive(f(value)?)?,
            "front_to_back_db" => self.front_to_back_db = positive(f(value)?)?,
            "penetration_db" => self.penetration_db = non_negative(f(value)?)?,
            "noise_psd_dbm_hz" => self.noise_psd_dbm_hz = f(value)?,
            "noise_figure_db" => self.noise_figure_db = non_negative(f(value)?)?,
            "tap_delays_ns" => {
                let v = parse_f64_list(value).map_err(SetError::Malformed)?;
                if v.is_empty() || v.iter().any(|d| *d < 0.0) {
                    return Err(SetError::Range("need at least one delay, all >= 0".into()));
                }
                self.tap_delays_ns = v;
            }
            "tap_powers_db" => {
                let v = parse_f64_list(value).map_err(SetError::Malformed)?;
                if v.is_empty() {
                    return Err(SetError::Range("need at least one tap power".into()));
                }
                self.tap_powers_db = v;
            }
            "interference_mode" => {
                self.interference_mode = match value.trim() {
                    "expected" => InterferenceMode::Expected,
                    "sampled" => InterferenceMode::Sampled,
                    other => {
                        return Err(SetError::Malformed(format!(
                            "expected `expected` or `sampled`, got `{other}`"
                        )))
                    }
                }
            }
            "alpha" => {
                let v = f(value)?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(SetError::Range(format!("must be within (0, 1], got {v}")));
                }
                self.alpha = v;
            }
            "se_max" => self.se_max = positive(f(value)?)?,
            "train_length_m" => self.train_length_m = positive(f(value)?)?,
            "train_speed_kmh" => self.train_speed_kmh = non_negative(f(value)?)?,
            "passengers" => self.passengers = at_least_one(u(value)?)?,
            "active_fraction" => {
                let v = f(value)?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(SetError::Range(format!("must be within (0, 1], got {v}")));
                }
                self.active_fraction = v;
            }
            "pf_beta" => {
                let v = f(value)?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(SetError::Range(format!("must be within (0, 1], got {v}")));
                }
                self.pf_beta = v;
            }
            "pf_epsilon_bps" => self.pf_epsilon_bps = positive(f(value)?)?,
            "drops_per_point" => {
                let v = u(value)?;
                if v < 2 {
                    return Err(SetError::Range(format!(
                        "confidence intervals need >= 2 drops, got {v}"
                    )));
                }
                self.drops_per_point = v;
            }
            "ttis_per_drop" => self.ttis_per_drop = at_least_one(u(value)?)?,
            "positions_m" => self.positions_m = parse_positions(value).map_err(SetError::Malformed)?,
            "scheme" => self.schemes = parse_schemes(value).map_err(SetError::Malformed)?,
            "master_seed" => {
                self.master_seed = value
                    .trim()
                    .parse()
                    .map_err(|_| SetError::Malformed(format!("`{}` is not an unsigned 64-bit integer", value.trim())))?
            }
            "mobility_speed_kmh" => self.mobility_speed_kmh = non_negative(f(value)?)?,
            "trajectory_length_m" => self.trajectory_length_m = non_negative(f(value)?)?,
            "cell_length_m" => self.cell_length_m = positive(f(value)?)?,
            "moving_cell_length_m" => self.moving_cell_length_m = positive(f(value)?)?,
            "signaling_capacity_per_s" => self.signaling_capacity_per_s = positive(f(value)?)?,
            _ => return Err(SetError::Unknown),
        }
        Ok(())
    }

    /// Applies one `key=value` override, as if it were line `line` of a file.
    pub fn apply(&mut self, key: &str, value: &str, line: usize) -> std::result::Result<(), ConfigError> {
        self.set(key, value).map_err(|e| match e {
            SetError::Unknown => ConfigError::UnknownKey {
                key: key.to_string(),
                line,
            },
            SetError::Malformed(reason) => ConfigError::Malformed {
                key: key.to_string(),
                line,
                reason,
            },
            SetError::Range(reason) => ConfigError::OutOfRange {
                key: key.to_string(),
                line,
                reason,
            },
        })
    }

    /// Every key with its current value, in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let schemes = self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(",");
        let mode = match self.interference_mode {
            InterferenceMode::Expected => "expected",
            InterferenceMode::Sampled => "sampled",
        };
        vec![
            ("bandwidth_mhz", self.bandwidth_mhz.to_string()),
            ("n_rb", self.n_rb.to_string()),
            ("rb_bandwidth_khz", self.rb_bandwidth_khz.to_string()),
            ("carrier_mhz", self.carrier_mhz.to_string()),
            ("tti_ms", self.tti_ms.to_string()),
            ("n_sites", self.n_sites.to_string()),
            ("inter_ru_distance_m", self.inter_ru_distance_m.to_string()),
            ("site_lateral_offset_m", self.site_lateral_offset_m.to_string()),
            ("ru_height_m", self.ru_height_m.to_string()),
            ("ue_height_m", self.ue_height_m.to_string()),
            ("relay_height_m", self.relay_height_m.to_string()),
            ("tx_power_w", self.tx_power_w.to_string()),
            ("n_tx_antennas", self.n_tx_antennas.to_string()),
            ("min_distance_m", self.min_distance_m.to_string()),
            ("theta_3db_deg", self.theta_3db_deg.to_string()),
            ("front_to_back_db", self.front_to_back_db.to_string()),
            ("penetration_db", self.penetration_db.to_string()),
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz.to_string()),
            ("noise_figure_db", self.noise_figure_db.to_string()),
            ("tap_delays_ns", join(&self.tap_delays_ns)),
            ("tap_powers_db", join(&self.tap_powers_db)),
            ("interference_mode", mode.to_string()),
            ("alpha", self.alpha.to_string()),
            ("se_max", self.se_max.to_string()),
            ("train_length_m", self.train_length_m.to_string()),
            ("train_speed_kmh", self.train_speed_kmh.to_string()),
            ("passengers", self.passengers.to_string()),
            ("active_fraction", self.active_fraction.to_string()),
            ("pf_beta", self.pf_beta.to_string()),
            ("pf_epsilon_bps", self.pf_epsilon_bps.to_string()),
            ("drops_per_point", self.drops_per_point.to_string()),
            ("ttis_per_drop", self.ttis_per_drop.to_string()),
            ("positions_m", join(&self.positions_m)),
            ("scheme", schemes),
            ("master_seed", self.master_seed.to_string()),
            ("mobility_speed_kmh", self.mobility_speed_kmh.to_string()),
            ("trajectory_length_m", self.trajectory_length_m.to_string()),
            ("cell_length_m", self.cell_length_m.to_string()),
            ("moving_cell_length_m", self.moving_cell_length_m.to_string()),
            ("signaling_capacity_per_s", self.signaling_capacity_per_s.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse_str(text: &str) -> std::result::Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: body.to_string(),
                });
            };
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::Malformed {
                    key: key.to_string(),
                    line,
                    reason: "key given more than once".into(),
                });
            }
            cfg.apply(key, value.trim(), line)?;
            seen.push(key.to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_ues(&self) -> usize {
        (self.passengers as f64 * self.active_fraction + 1e-9).floor() as usize
    }

    pub fn train_speed_mps(&self) -> f64 {
        self.train_speed_kmh / 3.6
    }

    pub fn tti_s(&self) -> f64 {
        self.tti_ms * 1e-3
    }

    pub fn layout(&self) -> Result<TrackLayout> {
        TrackLayout::equidistant(
            self.n_sites,
            self.inter_ru_distance_m,
            self.site_lateral_offset_m,
            self.ru_height_m,
            self.ue_height_m,
        )
    }

    /// Site the relative sweep positions are measured from: the second
    /// site when there are at least three, so it has neighbors on both sides.
    pub fn anchor_site_m(&self) -> f64 {
        let idx = if self.n_sites >= 3 { 1 } else { 0 };
        idx as f64 * self.inter_ru_distance_m
    }

    pub fn absolute_center_m(&self, relative_m: f64) -> f64 {
        self.anchor_site_m() + relative_m
    }

    pub fn pathloss(&self) -> PathlossParams {
        PathlossParams {
            carrier_mhz: self.carrier_mhz,
            bs_height_m: self.ru_height_m,
            min_distance_m: self.min_distance_m,
        }
    }

    pub fn link_budget(&self, penetration_db: f64) -> LinkBudget {
        LinkBudget {
            pathloss: self.pathloss(),
            pattern: AntennaPattern {
                theta_3db_deg: self.theta_3db_deg,
                front_to_back_db: self.front_to_back_db,
            },
            penetration_db,
        }
    }

    pub fn link_abstraction(&self) -> LinkAbstraction {
        LinkAbstraction {
            alpha: self.alpha,
            se_max: self.se_max,
            rb_bandwidth_hz: self.rb_bandwidth_khz * 1e3,
            n_rb: self.n_rb,
        }
    }

    pub fn tap_profile(&self) -> Result<TapProfile> {
        TapProfile::new(&self.tap_delays_ns, &self.tap_powers_db)
    }

    /// Cross-field checks that single keys cannot express.
    pub fn validate(&self) -> Result<()> {
        self.pathloss().validate()?;
        self.link_abstraction().validate(self.bandwidth_mhz * 1e6)?;
        self.tap_profile()?;
        let layout = self.layout()?;
        if self.n_ues() == 0 {
            return Err(SimError::InvalidConfig(format!(
                "{} passengers x {} active fraction leaves no active UE",
                self.passengers, self.active_fraction
            )));
        }
        if self.drops_per_point < 2 {
            return Err(SimError::InvalidConfig("confidence intervals need >= 2 drops".into()));
        }
        if self.schemes.is_empty() {
            return Err(SimError::InvalidConfig("no scheme selected".into()));
        }
        if self.positions_m.is_empty() {
            return Err(SimError::InvalidConfig("no sweep position given".into()));
        }
        if self.positions_m.len() >= 1 << 24 {
            return Err(SimError::InvalidConfig("too many sweep positions".into()));
        }
        for &p in &self.positions_m {
            self.check_coverage(&layout, p)?;
        }
        Ok(())
    }

    /// The whole train must stay between the outermost sites.
    pub fn check_coverage(&self, layout: &TrackLayout, relative_m: f64) -> Result<()> {
        let center = self.absolute_center_m(relative_m);
        let half = self.train_length_m / 2.0;
        let (min_m, max_m) = (layout.first_site_m() + half, layout.last_site_m() - half);
        if center < min_m || center > max_m || !center.is_finite() {
            return Err(SimError::OutsideCoverage {
                center_m: center,
                min_m,
                max_m,
            });
        }
        Ok(())
    }
}

pub fn parse_config(path: &Path) -> std::result::Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    ScenarioConfig::parse_str(&text)
}

//! Drop-based Monte Carlo engine.
//!
//! A drop freezes the train at one position, places the UEs, associates
//! them, then runs a number of TTIs in which fading evolves, SINRs are
//! computed per RB and every cell schedules its UEs proportionally fair.
//! A sweep repeats drops over positions and schemes and reports mean
//! train throughput with a normal-approximation 95 % confidence interval.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use crate::config::ScenarioConfig;

use crate::channel::{db_to_linear, doppler_hz, FadingProcess, RbRotations, TapProfile};
use crate::error::{Result, SimError};
use crate::geometry::{place_ues, ue_track_positions, RadioUnit, TrackLayout, TrainState};
use crate::mobility::{
    handover_period, handover_trace, signaling_blocking, total_per_ue_handovers, CellPlan, MobilityMode,
    SignalingModel, Trajectory,
};
use crate::phy::{
    noise_power_dbm, rb_rate, sinr, spectral_efficiency, Codebook, InterferenceMode, LinkAbstraction, RbLink,
};
use crate::scheduler::{pf_schedule, PfState};
use crate::schemes::{associate, visible_links, AssociationMap, SchemeKind};

#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    /// Sum over UEs of the drop-average throughput, Mbit/s.
    pub aggregate_mbps: f64,
    pub per_ue_mbps: Vec<f64>,
    /// Mean throughput per active passenger. For the relay this is the
    /// relay throughput shared by all active passengers.
    pub per_ue_mean_mbps: f64,
    /// Resource blocks per TTI available to the cells serving the train.
    pub serving_rbs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub scheme: SchemeKind,
    pub position_m: f64,
    pub mean_mbps: f64,
    pub ci95_mbps: f64,
    pub n_drops: usize,
    pub per_ue_mean_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn get(&self, scheme: SchemeKind, position_m: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.scheme == scheme && (p.position_m - position_m).abs() < 1e-9)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one drop: `splitmix64(master ^ splitmix64(packed))` with the
/// indices packed as `scheme:8 | position:24 | drop:32`. Both mixing
/// steps are bijections, so distinct index triples never collide.
pub fn derive_seed(master_seed: u64, scheme_index: u64, position_index: u64, drop_index: u64) -> u64 {
    debug_assert!(scheme_index < 1 << 8 && position_index < 1 << 24 && drop_index < 1 << 32);
    let packed = (scheme_index << 56) | (position_index << 32) | drop_index;
    splitmix64(master_seed ^ splitmix64(packed))
}

/// Sample mean and `1.96 * s / sqrt(n)` with the unbiased sample deviation.
pub fn mean_ci95(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * var.sqrt() / (n as f64).sqrt())
}

/// Parameters of the TTI loop that do not depend on the channel.
#[derive(Debug, Clone, Copy)]
pub struct ScheduleParams {
    pub n_rb: usize,
    pub ttis: usize,
    pub tti_s: f64,
    pub pf_beta: f64,
    pub pf_epsilon_bps: f64,
}

/// Runs the scheduling loop and returns the average throughput of every
/// UE in bit/s.
///
/// `fill_rates(tti, rates)` writes the achievable rate of every UE on
/// every RB (`rates[ue][rb]`, bit/s). Each cell owns `n_rb` RBs per member
/// RU, and one PF scheduler allocates them among the cell's UEs.
pub fn simulate_schedule<F>(map: &AssociationMap, params: &ScheduleParams, mut fill_rates: F) -> Result<Vec<f64>>
where
    F: FnMut(u64, &mut [Vec<f64>]) -> Result<()>,
{
    let n_ues = map.n_ues();
    let n_rb = params.n_rb;
    let mut rates = vec![vec![0.0; n_rb]; n_ues];
    let mut states = map
        .cells
        .iter()
        .map(|c| PfState::new(c.ues.len(), params.pf_beta, params.pf_epsilon_bps))
        .collect::<Result<Vec<_>>>()?;
    let mut achievable: Vec<Vec<Vec<f64>>> = map
        .cells
        .iter()
        .map(|c| vec![vec![0.0; n_rb * c.rus.len().max(1)]; c.ues.len()])
        .collect();
    let mut bits = vec![0.0; n_ues];

    for tti in 0..params.ttis as u64 {
        fill_rates(tti, &mut rates)?;
        for ((cell, state), grid) in map.cells.iter().zip(states.iter_mut()).zip(achievable.iter_mut()) {
            for (local, &ue) in cell.ues.iter().enumerate() {
                for (slot, r) in grid[local].iter_mut().enumerate() {
                    *r = rates[ue][slot % n_rb];
                }
            }
            let schedule = pf_schedule(grid, state);
            for (local, &ue) in cell.ues.iter().enumerate() {
                bits[ue] += schedule.achieved_bps[local] * params.tti_s;
            }
            state.update(&schedule.achieved_bps);
        }
    }
    let duration = params.ttis as f64 * params.tti_s;
    Ok(bits.into_iter().map(|b| b / duration).collect())
}

struct ActiveLink {
    rx_mw_per_rb: f64,
    fading: FadingProcess,
}

struct UeRadio {
    serving: Vec<ActiveLink>,
    interferers: Vec<ActiveLink>,
}

/// A validated scenario with everything that does not change between drops.
pub struct Scenario {
    cfg: ScenarioConfig,
    layout: TrackLayout,
    rus: Vec<RadioUnit>,
    la: LinkAbstraction,
    codebook: Codebook,
    profile: TapProfile,
    rotations: RbRotations,
    noise_mw_per_rb: f64,
    doppler_hz: f64,
}

impl Scenario {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let layout = cfg.layout()?;
        let rus = layout.radio_units(cfg.tx_power_w, cfg.n_tx_antennas);
        let la = cfg.link_abstraction();
        let profile = cfg.tap_profile()?;
        let rotations = RbRotations::new(&profile, la.n_rb, la.rb_bandwidth_hz);
        let noise_dbm = noise_power_dbm(cfg.noise_psd_dbm_hz, la.rb_bandwidth_hz, cfg.noise_figure_db);
        Ok(Self {
            cfg: cfg.clone(),
            layout,
            rus,
            la,
            codebook: Codebook::default(),
            profile,
            rotations,
            noise_mw_per_rb: db_to_linear(noise_dbm),
            doppler_hz: doppler_hz(cfg.train_speed_mps(), cfg.carrier_mhz * 1e6),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &TrackLayout {
        &self.layout
    }

    pub fn radio_units(&self) -> &[RadioUnit] {
        &self.rus
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    /// Track positions, antenna height and penetration loss of the
    /// receivers of one drop.
    fn receivers(&self, train: &TrainState, scheme: SchemeKind, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, f64, f64)> {
        if scheme == SchemeKind::Relay {
            return Ok((vec![train.center_m], self.cfg.relay_height_m, 0.0));
        }
        let ues = place_ues(self.cfg.n_ues(), train.length_m, rng)?;
        Ok((
            ue_track_positions(train, &ues),
            self.cfg.ue_height_m,
            self.cfg.penetration_db,
        ))
    }

    /// Association of one drop without running any TTI.
    pub fn associate_drop(&self, position_m: f64, scheme: SchemeKind, seed: u64) -> Result<AssociationMap> {
        let train = self.train_at(position_m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (positions, height, penetration) = self.receivers(&train, scheme, &mut rng)?;
        let links = visible_links(
            &positions,
            height,
            &self.rus,
            &self.layout,
            &self.cfg.link_budget(penetration),
        )?;
        associate(&links, scheme)
    }

    fn train_at(&self, position_m: f64) -> Result<TrainState> {
        self.cfg.check_coverage(&self.layout, position_m)?;
        TrainState::new(
            self.cfg.train_length_m,
            self.cfg.train_speed_mps(),
            self.cfg.absolute_center_m(position_m),
        )
    }

    pub fn run_drop(&self, position_m: f64, scheme: SchemeKind, seed: u64) -> Result<DropResult> {
        let train = self.train_at(position_m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (positions, height, penetration) = self.receivers(&train, scheme, &mut rng)?;
        let budget = self.cfg.link_budget(penetration);
        let links = visible_links(&positions, height, &self.rus, &self.layout, &budget)?;
        let map = associate(&links, scheme)?;

        // One fading process per visible link, drawn in RU order so the
        // channel realization does not depend on the scheme.
        let n_taps = self.profile.n_taps();
        let mut radios = Vec::with_capacity(links.len());
        for (ue, ue_links) in links.iter().enumerate() {
            let mut radio = UeRadio {
                serving: Vec::new(),
                interferers: Vec::new(),
            };
            let mut sorted = ue_links.clone();
            sorted.sort_by_key(|l| l.ru);
            for l in sorted {
                let ru = &self.rus[l.ru];
                let fading = FadingProcess::new(ru.n_tx_antennas, n_taps, self.doppler_hz, &mut rng);
                let rx_mw_per_rb = db_to_linear(l.rx_dbm) / self.la.n_rb as f64;
                let active = ActiveLink { rx_mw_per_rb, fading };
                if map.serving[ue].contains(&l.ru) {
                    radio.serving.push(active);
                } else if map.interferers[ue].contains(&l.ru) {
                    radio.interferers.push(active);
                }
            }
            radios.push(radio);
        }
        let mut codeword_rng = ChaCha8Rng::seed_from_u64(rng.gen());

        let params = ScheduleParams {
            n_rb: self.la.n_rb,
            ttis: self.cfg.ttis_per_drop,
            tti_s: self.cfg.tti_s(),
            pf_beta: self.cfg.pf_beta,
            pf_epsilon_bps: self.cfg.pf_epsilon_bps,
        };
        let sampled = self.cfg.interference_mode == InterferenceMode::Sampled;
        let mut serving_gains: Vec<Vec<Complex64>> = Vec::new();
        let mut interferer_gains: Vec<Vec<Complex64>> = Vec::new();
        let mut serving_buf: Vec<RbLink> = Vec::new();
        let mut interferer_buf: Vec<RbLink> = Vec::new();
        let mut codewords: Vec<usize> = Vec::new();

        let fill = |tti: u64, rates: &mut [Vec<f64>]| -> Result<()> {
            let t = tti as f64 * params.tti_s;
            for (ue, radio) in radios.iter().enumerate() {
                tap_gains_into(&radio.serving, t, &mut serving_gains);
                tap_gains_into(&radio.interferers, t, &mut interferer_gains);
                for (rb, rate) in rates[ue].iter_mut().enumerate() {
                    fold_into(&radio.serving, &serving_gains, rb, &self.rotations, &mut serving_buf);
                    fold_into(
                        &radio.interferers,
                        &interferer_gains,
                        rb,
                        &self.rotations,
                        &mut interferer_buf,
                    );
                    let drawn = if sampled {
                        codewords.clear();
                        codewords.extend(
                            (0..interferer_buf.len()).map(|_| codeword_rng.gen_range(0..self.codebook.vectors.len())),
                        );
                        Some(codewords.as_slice())
                    } else {
                        None
                    };
                    let s = sinr(
                        &serving_buf,
                        &interferer_buf,
                        self.noise_mw_per_rb,
                        &self.codebook,
                        drawn,
                        ue,
                    )?;
                    *rate = rb_rate(spectral_efficiency(s, &self.la), &self.la);
                }
            }
            Ok(())
        };
        let per_ue_bps = simulate_schedule(&map, &params, fill)?;

        let per_ue_mbps: Vec<f64> = per_ue_bps.iter().map(|b| b / 1e6).collect();
        let aggregate_mbps: f64 = per_ue_mbps.iter().sum();
        let per_ue_mean_mbps = if scheme == SchemeKind::Relay {
            aggregate_mbps / self.cfg.n_ues() as f64
        } else {
            aggregate_mbps / per_ue_mbps.len() as f64
        };
        let serving_rbs = map.cells.iter().map(|c| c.rus.len() * self.la.n_rb).sum();
        Ok(DropResult {
            aggregate_mbps,
            per_ue_mbps,
            per_ue_mean_mbps,
            serving_rbs,
            seed,
        })
    }

    pub fn sweep(&self) -> Result<SweepResult> {
        let cfg = &self.cfg;
        let jobs: Vec<(usize, usize, usize)> = (0..cfg.schemes.len())
            .flat_map(|s| {
                (0..cfg.positions_m.len()).flat_map(move |p| (0..cfg.drops_per_point).map(move |d| (s, p, d)))
            })
            .collect();
        let drops: Vec<DropResult> = jobs
            .par_iter()
            .map(|&(s, p, d)| {
                let scheme = cfg.schemes[s];
                let seed = derive_seed(cfg.master_seed, scheme.index(), p as u64, d as u64);
                self.run_drop(cfg.positions_m[p], scheme, seed)
            })
            .collect::<Result<_>>()?;

        let points = drops
            .chunks(cfg.drops_per_point)
            .zip(&jobs[..].chunks(cfg.drops_per_point).map(|c| c[0]).collect::<Vec<_>>())
            .map(|(chunk, &(s, p, _))| {
                let totals: Vec<f64> = chunk.iter().map(|d| d.aggregate_mbps).collect();
                let (mean_mbps, ci95_mbps) = mean_ci95(&totals);
                let per_ue_mean_mbps = chunk.iter().map(|d| d.per_ue_mean_mbps).sum::<f64>() / chunk.len() as f64;
                SweepPoint {
                    scheme: cfg.schemes[s],
                    position_m: cfg.positions_m[p],
                    mean_mbps,
                    ci95_mbps,
                    n_drops: chunk.len(),
                    per_ue_mean_mbps,
                }
            })
            .collect();
        Ok(SweepResult { points })
    }
}

fn tap_gains_into(links: &[ActiveLink], t_s: f64, out: &mut Vec<Vec<Complex64>>) {
    out.resize_with(links.len(), Vec::new);
    for (link, buf) in links.iter().zip(out.iter_mut()) {
        link.fading.tap_gains(t_s, buf);
    }
}

fn fold_into(links: &[ActiveLink], gains: &[Vec<Complex64>], rb: usize, rot: &RbRotations, out: &mut Vec<RbLink>) {
    out.clear();
    out.extend(links.iter().zip(gains).map(|(link, g)| RbLink {
        rx_power_mw: link.rx_mw_per_rb,
        h: [link.fading.fold(g, 0, rb, rot), link.fading.fold(g, 1, rb, rot)],
    }));
}

pub fn run_drop(cfg: &ScenarioConfig, position_m: f64, scheme: SchemeKind, drop_seed: u64) -> Result<DropResult> {
    Scenario::new(cfg)?.run_drop(position_m, scheme, drop_seed)
}

pub fn sweep(cfg: &ScenarioConfig) -> Result<SweepResult> {
    Scenario::new(cfg)?.sweep()
}

/// Rejects configurations whose drops cannot produce a confidence interval.
pub fn check_sweep(cfg: &ScenarioConfig) -> Result<()> {
    if cfg.positions_m.is_empty() || cfg.drops_per_point < 2 {
        return Err(SimError::InvalidConfig(
            "a sweep needs >= 1 position and >= 2 drops".into(),
        ));
    }
    Ok(())
}

/// Handover load of one mobility mode over the configured trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityRow {
    pub mode: MobilityMode,
    pub cell_length_m: f64,
    pub speed_kmh: f64,
    pub handover_period_s: f64,
    pub total_per_ue_handovers: usize,
    pub blocked_ues: usize,
}

/// Per-UE handover versus moving cell for every passenger aboard. The
/// blocking window of an event is one handover period.
pub fn mobility_summary(cfg: &ScenarioConfig) -> Result<Vec<MobilityRow>> {
    let layout = cfg.layout()?;
    let rus = layout.radio_units(cfg.tx_power_w, cfg.n_tx_antennas);
    let speed_mps = cfg.mobility_speed_kmh / 3.6;
    if !(speed_mps >= 0.0) || !(cfg.trajectory_length_m >= 0.0) {
        return Err(SimError::InvalidConfig(
            "mobility speed and trajectory length must be >= 0".into(),
        ));
    }
    let duration_s = if speed_mps > 0.0 {
        cfg.trajectory_length_m / speed_mps
    } else {
        0.0
    };
    let trajectory = Trajectory {
        start_m: 0.0,
        speed_mps,
        duration_s,
    };
    let model = SignalingModel::new(cfg.signaling_capacity_per_s)?;
    [
        (MobilityMode::PerUe, cfg.cell_length_m),
        (MobilityMode::MovingCell, cfg.moving_cell_length_m),
    ]
    .into_iter()
    .map(|(mode, cell_length_m)| {
        let plan = CellPlan::uniform(0.0, cell_length_m, cfg.trajectory_length_m, &rus, &layout)?;
        let events = handover_trace(&trajectory, &plan, cfg.passengers, mode);
        let period = handover_period(cell_length_m, speed_mps);
        Ok(MobilityRow {
            mode,
            cell_length_m,
            speed_kmh: cfg.mobility_speed_kmh,
            handover_period_s: period,
            total_per_ue_handovers: total_per_ue_handovers(&events),
            blocked_ues: signaling_blocking(&events, &model, period),
        })
    })
    .collect()
}

//! Per-RB SINR under rank-1 closed-loop precoding, and the truncated
//! Shannon mapping from SINR to rate.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Two-antenna rank-1 codebook: `(1, c) / sqrt(2)` with `c` in `{1, -1, j, -j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub vectors: [[Complex64; 2]; 4],
}

impl Default for Codebook {
    fn default() -> Self {
        let s = FRAC_1_SQRT_2;
        let one = Complex64::new(s, 0.0);
        Self {
            vectors: [
                [one, Complex64::new(s, 0.0)],
                [one, Complex64::new(-s, 0.0)],
                [one, Complex64::new(0.0, s)],
                [one, Complex64::new(0.0, -s)],
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecoderChoice {
    pub index: usize,
    pub gain: f64,
}

/// Codeword maximizing `|h^T w|^2`; ties resolve to the lowest index.
pub fn select_pmi(h: &[Complex64; 2], cb: &Codebook) -> PrecoderChoice {
    let mut best = PrecoderChoice {
        index: 0,
        gain: f64::NEG_INFINITY,
    };
    for (index, w) in cb.vectors.iter().enumerate() {
        let gain = (h[0] * w[0] + h[1] * w[1]).norm_sqr();
        if gain > best.gain {
            best = PrecoderChoice { index, gain };
        }
    }
    best
}

/// Expected `|h^T w|^2` for a precoder chosen without knowledge of `h`.
pub fn uninformed_gain(h: &[Complex64; 2]) -> f64 {
    (h[0].norm_sqr() + h[1].norm_sqr()) / 2.0
}

pub fn noise_power_dbm(psd_dbm_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    psd_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkAbstraction {
    pub alpha: f64,
    pub se_max: f64,
    pub rb_bandwidth_hz: f64,
    pub n_rb: usize,
}

impl Default for LinkAbstraction {
    fn default() -> Self {
        Self {
            alpha: 0.6,
            se_max: 4.4,
            rb_bandwidth_hz: 180e3,
            n_rb: 100,
        }
    }
}

impl LinkAbstraction {
    pub fn validate(&self, system_bandwidth_hz: f64) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.se_max > 0.0) {
            return Err(SimError::InvalidConfig("spectral-efficiency cap must be > 0".into()));
        }
        if self.n_rb == 0 || !(self.rb_bandwidth_hz > 0.0) {
            return Err(SimError::InvalidConfig(
                "need at least one RB of positive bandwidth".into(),
            ));
        }
        if self.n_rb as f64 * self.rb_bandwidth_hz > system_bandwidth_hz + 1e-6 {
            return Err(SimError::InvalidConfig(format!(
                "{} RBs x {} Hz exceed the system bandwidth of {} Hz",
                self.n_rb, self.rb_bandwidth_hz, system_bandwidth_hz
            )));
        }
        Ok(())
    }
}

pub fn spectral_efficiency(sinr_linear: f64, la: &LinkAbstraction) -> f64 {
    (la.alpha * (1.0 + sinr_linear).log2()).min(la.se_max)
}

pub fn rb_rate(se: f64, la: &LinkAbstraction) -> f64 {
    se * la.rb_bandwidth_hz
}

/// Received contribution of one RU on one RB: per-RB transmit power
/// times linear macroscopic gain, plus that link's channel vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbLink {
    pub rx_power_mw: f64,
    pub h: [Complex64; 2],
}

/// How interference from non-serving RUs is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceMode {
    /// Average over an uninformed precoder, `|h|^2 / 2`.
    Expected,
    /// One codeword drawn uniformly per interferer, RB and TTI.
    Sampled,
}

/// Linear SINR of a single-antenna UE on one RB.
///
/// Serving RUs each apply their own best codeword and their powers add at
/// the receiver. Interferers contribute either the expected mismatch gain
/// or, when `sampled_codewords` is given, the gain of the drawn codeword.
pub fn sinr(
    serving: &[RbLink],
    interferers: &[RbLink],
    noise_mw: f64,
    cb: &Codebook,
    sampled_codewords: Option<&[usize]>,
    ue: usize,
) -> Result<f64> {
    if serving.is_empty() {
        return Err(SimError::Unassociated { ue });
    }
    let signal: f64 = serving.iter().map(|l| l.rx_power_mw * select_pmi(&l.h, cb).gain).sum();
    let interference: f64 = match sampled_codewords {
        None => interferers.iter().map(|l| l.rx_power_mw * uninformed_gain(&l.h)).sum(),
        Some(idx) => interferers
            .iter()
            .zip(idx)
            .map(|(l, &i)| {
                let w = &cb.vectors[i];
                l.rx_power_mw * (l.h[0] * w[0] + l.h[1] * w[1]).norm_sqr()
            })
            .sum(),
    };
    Ok(signal / (noise_mw + interference))
}

//! Time-correlated Rayleigh fading over a tapped-delay-line profile.
//!
//! Each tap of each transmit antenna is an independent sum-of-sinusoids
//! process (Zheng-Xiao construction) whose autocorrelation follows the
//! classical Doppler spectrum, J0(2 pi f_d tau). Per resource block the
//! taps are folded into one flat coefficient by rotating each tap with
//! the phase its delay produces at the RB center frequency.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError};

const OSCILLATORS: usize = 16;

/// Power-normalized tap profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TapProfile {
    pub delays_s: Vec<f64>,
    /// Linear amplitudes, `sum(amplitude^2) == 1`.
    pub amplitudes: Vec<f64>,
}

impl TapProfile {
    pub fn new(delays_ns: &[f64], powers_db: &[f64]) -> Result<Self> {
        if delays_ns.is_empty() || delays_ns.len() != powers_db.len() {
            return Err(SimError::InvalidConfig(format!(
                "tap profile needs matching non-empty delay and power lists ({} vs {})",
                delays_ns.len(),
                powers_db.len()
            )));
        }
        if delays_ns.iter().chain(powers_db).any(|v| !v.is_finite()) || delays_ns.iter().any(|&d| d < 0.0) {
            return Err(SimError::InvalidConfig("tap delays must be finite and >= 0".into()));
        }
        let linear: Vec<f64> = powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect();
        let total: f64 = linear.iter().sum();
        Ok(Self {
            delays_s: delays_ns.iter().map(|d| d * 1e-9).collect(),
            amplitudes: linear.iter().map(|p| (p / total).sqrt()).collect(),
        })
    }

    /// ITU-R Vehicular A.
    pub fn vehicular_a() -> Self {
        Self::new(
            &[0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0],
            &[0.0, -1.0, -9.0, -10.0, -15.0, -20.0],
        )
        .expect("static profile is valid")
    }

    pub fn n_taps(&self) -> usize {
        self.delays_s.len()
    }
}

/// Per-RB tap weights `a_k * exp(-j 2 pi f_rb tau_k)`, shared by every link.
#[derive(Debug, Clone)]
pub struct RbRotations {
    n_taps: usize,
    table: Vec<Complex64>,
}

impl RbRotations {
    /// RB centers are spaced `rb_bandwidth_hz` apart and centered on the carrier.
    pub fn new(profile: &TapProfile, n_rb: usize, rb_bandwidth_hz: f64) -> Self {
        let n_taps = profile.n_taps();
        let mid = (n_rb as f64 - 1.0) / 2.0;
        let mut table = Vec::with_capacity(n_rb * n_taps);
        for rb in 0..n_rb {
            let f = (rb as f64 - mid) * rb_bandwidth_hz;
            for (tau, amp) in profile.delays_s.iter().zip(&profile.amplitudes) {
                table.push(Complex64::from_polar(*amp, -2.0 * PI * f * tau));
            }
        }
        Self { n_taps, table }
    }

    pub fn n_rb(&self) -> usize {
        self.table.len() / self.n_taps
    }

    pub fn n_taps(&self) -> usize {
        self.n_taps
    }

    fn row(&self, rb: usize) -> &[Complex64] {
        &self.table[rb * self.n_taps..(rb + 1) * self.n_taps]
    }
}

#[derive(Debug, Clone)]
struct SumOfSinusoids {
    in_phase_freq: [f64; OSCILLATORS],
    quadrature_freq: [f64; OSCILLATORS],
    cos_psi: [f64; OSCILLATORS],
    sin_psi: [f64; OSCILLATORS],
    phi: f64,
}

impl SumOfSinusoids {
    fn new<R: Rng + ?Sized>(doppler_hz: f64, rng: &mut R) -> Self {
        let theta = rng.gen_range(-PI..PI);
        let phi = rng.gen_range(-PI..PI);
        let mut s = Self {
            in_phase_freq: [0.0; OSCILLATORS],
            quadrature_freq: [0.0; OSCILLATORS],
            cos_psi: [0.0; OSCILLATORS],
            sin_psi: [0.0; OSCILLATORS],
            phi,
        };
        let wd = 2.0 * PI * doppler_hz;
        for n in 0..OSCILLATORS {
            let alpha = (2.0 * PI * (n + 1) as f64 - PI + theta) / (4.0 * OSCILLATORS as f64);
            let psi = rng.gen_range(-PI..PI);
            s.in_phase_freq[n] = wd * alpha.cos();
            s.quadrature_freq[n] = wd * alpha.sin();
            s.cos_psi[n] = psi.cos();
            s.sin_psi[n] = psi.sin();
        }
        s
    }

    fn at(&self, t_s: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for n in 0..OSCILLATORS {
            re += self.cos_psi[n] * (self.in_phase_freq[n] * t_s + self.phi).cos();
            im += self.sin_psi[n] * (self.quadrature_freq[n] * t_s + self.phi).cos();
        }
        let scale = (2.0 / OSCILLATORS as f64).sqrt();
        Complex64::new(re * scale, im * scale)
    }
}

/// Fading state of one (UE, RU) link: one process per antenna and tap.
#[derive(Debug, Clone)]
pub struct FadingProcess {
    doppler_hz: f64,
    n_antennas: usize,
    n_taps: usize,
    taps: Vec<SumOfSinusoids>,
}

impl FadingProcess {
    pub fn new<R: Rng + ?Sized>(n_antennas: usize, n_taps: usize, doppler_hz: f64, rng: &mut R) -> Self {
        let taps = (0..n_antennas * n_taps)
            .map(|_| SumOfSinusoids::new(doppler_hz, rng))
            .collect();
        Self {
            doppler_hz,
            n_antennas,
            n_taps,
            taps,
        }
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    /// Tap gains at time `t_s`, antenna-major, written into `out`.
    pub fn tap_gains(&self, t_s: f64, out: &mut Vec<Complex64>) {
        out.clear();
        out.extend(self.taps.iter().map(|tap| tap.at(t_s)));
    }

    /// Folds tap gains produced by [`tap_gains`](Self::tap_gains) into the
    /// flat coefficient of antenna `antenna` on resource block `rb`.
    pub fn fold(&self, gains: &[Complex64], antenna: usize, rb: usize, rot: &RbRotations) -> Complex64 {
        debug_assert_eq!(rot.n_taps(), self.n_taps);
        let taps = &gains[antenna * self.n_taps..(antenna + 1) * self.n_taps];
        taps.iter().zip(rot.row(rb)).map(|(g, w)| g * w).sum()
    }

    /// Per-antenna coefficient on `rb` at TTI `tti_index`.
    pub fn sample(&self, tti_index: u64, tti_s: f64, rb: usize, rot: &RbRotations) -> Vec<Complex64> {
        let mut gains = Vec::with_capacity(self.taps.len());
        self.tap_gains(tti_index as f64 * tti_s, &mut gains);
        (0..self.n_antennas).map(|a| self.fold(&gains, a, rb, rot)).collect()
    }
}

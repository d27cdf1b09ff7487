//! Signal model: modulation, analog beamforming gains, additive noise, and
//! maximum-likelihood symbol detection.
//!
//! The received sample after the analog combiner is
//! `y = sqrt(P) G_t G_r f_r^H H_eff f_t s + f_r^H n` with `n ~ CN(0, s2 I)`.
//! Array gains are given in dB; by default they scale the signal as
//! amplitude factors `10^(dB/20)` (see [`GainConvention`]).

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{ura_response, AnglePair, SteeringVector, UraGeometry};
use crate::{Error, Result};

/// Convert a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Convert a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// An M-ary constellation with unit average symbol energy and per-symbol bit
/// labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    points: Vec<Complex64>,
    bit_labels: Vec<u32>,
    bits_per_symbol: u32,
}

impl Constellation {
    /// BPSK: points {+1, -1}, one bit per symbol.
    pub fn bpsk() -> Self {
        Self::gray_psk(2).expect("BPSK is always supported")
    }

    /// Gray-coded M-PSK for M in {2, 4, 8, 16}: point k at phase
    /// `2 pi k / M`, bit label `k ^ (k >> 1)`.
    pub fn gray_psk(order: usize) -> Result<Self> {
        if !matches!(order, 2 | 4 | 8 | 16) {
            return Err(Error::InvalidInput(format!(
                "unsupported constellation order {order}; expected 2, 4, 8 or 16"
            )));
        }
        let points = (0..order)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / order as f64))
            .collect();
        let bit_labels = (0..order as u32).map(|k| k ^ (k >> 1)).collect();
        Ok(Self {
            order,
            points,
            bit_labels,
            bits_per_symbol: order.trailing_zeros(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bit_labels(&self) -> &[u32] {
        &self.bit_labels
    }

    /// Bits per symbol, log2 of the order.
    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }
}

/// How a dB array gain maps onto the signal term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainConvention {
    /// `10^(dB/20)`: the gain multiplies the field amplitude.
    #[default]
    Amplitude,
    /// `10^(dB/10)`: the printed linear gain multiplies the field directly.
    Power,
}

impl GainConvention {
    /// Linear factor applied to the signal amplitude for a gain in dB.
    pub fn to_amplitude(self, db: f64) -> f64 {
        match self {
            GainConvention::Amplitude => 10f64.powf(db / 20.0),
            GainConvention::Power => 10f64.powf(db / 10.0),
        }
    }
}

/// Transmit power, noise variance and array gains for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Transmit power P in watts.
    pub tx_power_w: f64,
    /// Noise variance s2 in watts.
    pub noise_variance_w: f64,
    /// Per-element gain in dBi.
    pub g_element_dbi: f64,
    /// Transmit array gain G_t in dB.
    pub array_gain_tx_db: f64,
    /// Receive array gain G_r in dB.
    pub array_gain_rx_db: f64,
    pub gain_convention: GainConvention,
}

impl LinkBudget {
    /// Combined deterministic amplitude on the signal term:
    /// `sqrt(P) * lin(G_t) * lin(G_r)`.
    pub fn signal_amplitude(&self) -> f64 {
        self.tx_power_w.sqrt()
            * self.gain_convention.to_amplitude(self.array_gain_tx_db)
            * self.gain_convention.to_amplitude(self.array_gain_rx_db)
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_variance_w.sqrt()
    }
}

/// Array gain in dB: `g_e + 10 log10(n)`.
pub fn array_gain_db(g_e_dbi: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    g_e_dbi + 10.0 * (n as f64).log10()
}

/// Matched analog beamformer/combiner pair: `f_t = a_t(aod)`,
/// `f_r = a_r(aoa)`.
#[derive(Debug, Clone)]
pub struct BeamformerPair {
    pub f_t: SteeringVector,
    pub f_r: SteeringVector,
}

impl BeamformerPair {
    pub fn matched(
        tx_geom: &UraGeometry,
        rx_geom: &UraGeometry,
        aod: AnglePair,
        aoa: AnglePair,
    ) -> Result<Self> {
        Ok(Self {
            f_t: ura_response(tx_geom, aod)?,
            f_r: ura_response(rx_geom, aoa)?,
        })
    }
}

/// Scalar equivalent channel `f_r^H H_eff f_t`.
pub fn equivalent_gain(h_eff: &Array2<Complex64>, bf: &BeamformerPair) -> Result<Complex64> {
    let (n_r, n_t) = h_eff.dim();
    if n_r != bf.f_r.len() || n_t != bf.f_t.len() {
        return Err(Error::DimensionMismatch(format!(
            "H_eff is {n_r}x{n_t}, f_r has {} entries, f_t has {}",
            bf.f_r.len(),
            bf.f_t.len()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, &fr) in bf.f_r.entries().iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (t, &ft) in bf.f_t.entries().iter().enumerate() {
            row += h_eff[(r, t)] * ft;
        }
        acc += fr.conj() * row;
    }
    Ok(acc)
}

/// Noise after the combiner: `f_r^H n` with `n` drawn per receive element
/// from `CN(0, s2)`. For a unit-norm combiner the result is `CN(0, s2)`.
pub fn combined_noise<R: Rng + ?Sized>(
    f_r: &SteeringVector,
    noise_variance_w: f64,
    rng: &mut R,
) -> Complex64 {
    let sigma = (0.5 * noise_variance_w).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for fr in f_r.entries() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        acc += fr.conj() * Complex64::new(sigma * re, sigma * im);
    }
    acc
}

/// Received sample for a known scalar equivalent channel: the signal term
/// plus antenna-domain noise combined through `f_r`.
pub fn transmit_scalar<R: Rng + ?Sized>(
    heq: Complex64,
    f_r: &SteeringVector,
    s: Complex64,
    budget: &LinkBudget,
    rng: &mut R,
) -> Complex64 {
    budget.signal_amplitude() * heq * s + combined_noise(f_r, budget.noise_variance_w, rng)
}

/// Received sample `y` for symbol `s` over `h_eff` with beamformers `bf`.
pub fn received_symbol<R: Rng + ?Sized>(
    h_eff: &Array2<Complex64>,
    bf: &BeamformerPair,
    s: Complex64,
    budget: &LinkBudget,
    rng: &mut R,
) -> Result<Complex64> {
    let heq = equivalent_gain(h_eff, bf)?;
    Ok(transmit_scalar(heq, &bf.f_r, s, budget, rng))
}

/// ML detection over a scaled scalar channel: index minimizing
/// `|y - scaled_heq * s|^2`, ties resolved to the lowest index.
pub fn detect_scalar(y: Complex64, scaled_heq: Complex64, cons: &Constellation) -> usize {
    let mut best = 0;
    let mut best_metric = f64::INFINITY;
    for (idx, &point) in cons.points().iter().enumerate() {
        let metric = (y - scaled_heq * point).norm_sqr();
        if metric < best_metric {
            best_metric = metric;
            best = idx;
        }
    }
    best
}

/// ML detector: `argmin_s |y - sqrt(P) G_t G_r f_r^H H_eff f_t s|^2`.
pub fn ml_detect(
    y: Complex64,
    h_eff: &Array2<Complex64>,
    bf: &BeamformerPair,
    budget: &LinkBudget,
    cons: &Constellation,
) -> Result<usize> {
    let heq = equivalent_gain(h_eff, bf)?;
    Ok(detect_scalar(y, budget.signal_amplitude() * heq, cons))
}

/// Hamming distance between the bit labels of two symbols.
pub fn bit_errors(i: usize, j: usize, cons: &Constellation) -> u32 {
    (cons.bit_labels()[i] ^ cons.bit_labels()[j]).count_ones()
}

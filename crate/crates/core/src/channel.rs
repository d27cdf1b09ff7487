//! LOS channel synthesis and sub-RIS phase-shift profiles.
//!
//! Channels follow the single-path Saleh-Valenzuela form: a rank-1 outer
//! product of receive/transmit steering vectors scaled by
//! `sqrt(N_tx N_rx)` and a complex gain drawn from `CN(0, 10^(-0.1 PL(d)))`.
//! Phase profiles are returned as per-element phases in radians; applied as
//! the diagonal matrix `diag(exp(j psi_1), ..., exp(j psi_M))`, every entry
//! has unit magnitude.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{ura_response, wave_vector, AnglePair, UraGeometry};
use crate::{Error, Result};

/// Path-loss model `PL(d) = a + 10 b log10(d) + 20 log10(f_c)`, with the
/// carrier frequency in GHz (3GPP TR 38.901 form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Constant offset in dB.
    pub a: f64,
    /// Path-loss exponent coefficient.
    pub b: f64,
    /// Carrier frequency in GHz.
    pub f_c_ghz: f64,
}

impl PathLossParams {
    pub fn new(a: f64, b: f64, f_c_ghz: f64) -> Result<Self> {
        if !(b > 0.0 && f_c_ghz > 0.0) {
            return Err(Error::InvalidInput(
                "path-loss exponent and carrier frequency must be positive".into(),
            ));
        }
        Ok(Self { a, b, f_c_ghz })
    }
}

/// Path loss in dB at distance `d` metres.
pub fn pathloss_db(d: f64, params: &PathLossParams) -> f64 {
    debug_assert!(d > 0.0);
    params.a + 10.0 * params.b * d.log10() + 20.0 * params.f_c_ghz.log10()
}

/// Draw a circularly-symmetric complex Gaussian gain with variance
/// `10^(-0.1 pl_db)`, i.e. `E[|gain|^2] = 10^(-0.1 pl_db)`.
pub fn sample_gain<R: Rng + ?Sized>(pl_db: f64, rng: &mut R) -> Complex64 {
    let sigma = (0.5 * 10f64.powf(-0.1 * pl_db)).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

/// One LOS channel matrix together with the quantities it was built from.
#[derive(Debug, Clone)]
pub struct LosChannel {
    /// `sqrt(N_tx N_rx) * gain * a_rx(aoa) a_tx^H(aod)`, dimension rx x tx.
    pub matrix: Array2<Complex64>,
    pub gain: Complex64,
    pub aod: AnglePair,
    pub aoa: AnglePair,
}

/// Build the rank-1 LOS channel between a transmit and a receive URA.
pub fn los_channel(
    tx_geom: &UraGeometry,
    rx_geom: &UraGeometry,
    gain: Complex64,
    aod: AnglePair,
    aoa: AnglePair,
) -> Result<LosChannel> {
    let a_tx = ura_response(tx_geom, aod)?;
    let a_rx = ura_response(rx_geom, aoa)?;
    let scale = ((tx_geom.len() * rx_geom.len()) as f64).sqrt();
    let mut matrix = Array2::zeros((rx_geom.len(), tx_geom.len()));
    for (r, &rx) in a_rx.entries().iter().enumerate() {
        let row_factor = gain * scale * rx;
        for (t, &tx) in a_tx.entries().iter().enumerate() {
            matrix[(r, t)] = row_factor * tx.conj();
        }
    }
    Ok(LosChannel {
        matrix,
        gain,
        aod,
        aoa,
    })
}

/// Per-element reflection phases of one sub-RIS, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    phases: Vec<f64>,
}

impl PhaseProfile {
    pub fn from_phases(phases: Vec<f64>) -> Self {
        Self { phases }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Diagonal of the phase-shift matrix: `exp(j psi_i)` per element.
    pub fn diagonal(&self) -> Vec<Complex64> {
        self.phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect()
    }
}

/// Phase profile that reflects a signal arriving from `incident` into a
/// fixed beam toward `beam`: element `m` gets phase
/// `k(beam)^T p_m - k(incident)^T p_m`.
///
/// This is `sqrt(M) diag(f_b o a_rx^*(incident))` with `f_b` the unscaled
/// beam phasor vector; the two `sqrt(M)` factors cancel so every diagonal
/// entry has unit magnitude.
pub fn fixed_beam_profile(
    sub_ris_geom: &UraGeometry,
    incident: AnglePair,
    beam: AnglePair,
) -> PhaseProfile {
    let k_beam = wave_vector(beam, sub_ris_geom.wavelength);
    let k_inc = wave_vector(incident, sub_ris_geom.wavelength);
    let dx = (k_beam[0] - k_inc[0]) * sub_ris_geom.spacing_x;
    let dy = (k_beam[1] - k_inc[1]) * sub_ris_geom.spacing_y;
    let mut phases = Vec::with_capacity(sub_ris_geom.len());
    for ny in 0..sub_ris_geom.n_y {
        let py = dy * ny as f64;
        for nx in 0..sub_ris_geom.n_x {
            phases.push(dx * nx as f64 + py);
        }
    }
    PhaseProfile { phases }
}

/// Matched (phase-conjugate) profile: the fixed-beam construction pointed at
/// the actual per-realization departure direction. This is the per-period
/// configuration a semi-passive surface computes from estimated channels.
pub fn optimal_profile(
    sub_ris_geom: &UraGeometry,
    incident: AnglePair,
    departure: AnglePair,
) -> PhaseProfile {
    fixed_beam_profile(sub_ris_geom, incident, departure)
}

/// Uninformed profile: every phase drawn independently uniform on [0, 2pi).
pub fn random_profile<R: Rng + ?Sized>(m: usize, rng: &mut R) -> PhaseProfile {
    debug_assert!(m >= 1);
    let phases = (0..m)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    PhaseProfile { phases }
}

/// Effective end-to-end channel `R Psi G` through one sub-RIS.
pub fn effective_channel(
    r: &LosChannel,
    psi: &PhaseProfile,
    g: &LosChannel,
) -> Result<Array2<Complex64>> {
    let (n_r, m_r) = r.matrix.dim();
    let (m_g, n_t) = g.matrix.dim();
    if m_r != psi.len() || m_g != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "R is {n_r}x{m_r}, Psi is {}x{}, G is {m_g}x{n_t}",
            psi.len(),
            psi.len()
        )));
    }
    let diag = psi.diagonal();
    // R * diag(Psi), scaling column j of R by psi_j, then times G.
    let mut r_psi = r.matrix.clone();
    for (j, &p) in diag.iter().enumerate() {
        for i in 0..n_r {
            r_psi[(i, j)] *= p;
        }
    }
    Ok(r_psi.dot(&g.matrix))
}

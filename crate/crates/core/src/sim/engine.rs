//! Per-trial transmission pipeline and SNR sweeps.
//!
//! Every trial draws a fresh channel realization (angles and complex gains),
//! configures the scheme's phase profile, transmits one symbol through the
//! matched analog beamformers, and detects it. Sweeps distribute trials over
//! a rayon pool; every stochastic draw comes from a stream keyed by
//! `(seed, point, trial, lane)`, so results are bit-identical for any worker
//! count and channel/noise draws are shared across schemes.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{
    self, achievable_rate, power_ris_passive, power_ris_semi, power_rx, power_tx, snr_scalar,
    union_bound_estimate,
};
use crate::channel::{
    fixed_beam_profile, optimal_profile, pathloss_db, random_profile, sample_gain, PhaseProfile,
};
use crate::geometry::{ura_response, wave_vector, AnglePair, UraGeometry};
use crate::link::{bit_errors, dbm_to_watts, detect_scalar, transmit_scalar};
use crate::sim::rng::{StreamKey, TrialStreams};
use crate::sim::{assign_sub_ris, Scenario, Scheme};

/// Branch labels under a grid-point key.
const BRANCH_TRIALS: u64 = 0;
const BRANCH_BOUND: u64 = 1;

/// One draw of every random quantity a channel realization needs.
#[derive(Debug, Clone, Copy)]
pub struct ChannelDraw {
    /// Departure at the BS.
    pub tx_aod: AnglePair,
    /// Arrival at the UE.
    pub ue_aoa: AnglePair,
    /// Arrival at the RIS (from the BS).
    pub ris_aoa: AnglePair,
    /// Departure at the RIS (toward the UE).
    pub ris_aod: AnglePair,
    /// BS-to-RIS complex gain.
    pub alpha: Complex64,
    /// RIS-to-UE complex gain.
    pub beta: Complex64,
}

/// Draw angles from the scenario's distributions and gains from the
/// path-loss model. The draw order is fixed; callers must not rely on
/// partial consumption of the stream.
pub fn draw_channel<R: rand::Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> ChannelDraw {
    let tx_aod = scenario.angles.tx_aod.sample(rng);
    let ue_aoa = scenario.angles.ue_aoa.sample(rng);
    let ris_aoa = scenario.angles.ris_aoa.sample(rng);
    let ris_aod = scenario.angles.ris_aod.sample(rng);
    let alpha = sample_gain(pathloss_db(scenario.d_br, &scenario.path_loss), rng);
    let beta = sample_gain(pathloss_db(scenario.d_ru, &scenario.path_loss), rng);
    ChannelDraw {
        tx_aod,
        ue_aoa,
        ris_aoa,
        ris_aod,
        alpha,
        beta,
    }
}

/// Build the scheme's phase profile for one realization. Returns the profile
/// and the index of the serving sub-RIS (0 for the single-surface schemes).
pub fn scheme_profile<R: rand::Rng + ?Sized>(
    scenario: &Scenario,
    draw: &ChannelDraw,
    profile_rng: &mut R,
) -> (PhaseProfile, usize) {
    let geom = ris_geometry(scenario);
    match &scenario.scheme {
        Scheme::PlugIn { beams } => {
            let idx = assign_sub_ris(draw.ris_aod, beams);
            (fixed_beam_profile(&geom, draw.ris_aoa, beams[idx]), idx)
        }
        Scheme::SemiPassive { .. } => {
            (optimal_profile(&geom, draw.ris_aoa, draw.ris_aod), 0)
        }
        Scheme::Blind { .. } => (random_profile(geom.len(), profile_rng), 0),
    }
}

fn ris_geometry(scenario: &Scenario) -> UraGeometry {
    scenario
        .scheme
        .ris_geometry(scenario)
        .expect("scheme RIS dimensions must be valid")
}

/// Scalar equivalent channel `f_r^H R Psi G f_t` with matched beamformers,
/// contracted through the rank-1 channel factors:
/// `M sqrt(N_t N_r) alpha beta * (1/M) sum_m exp(j(psi_m + (k_in - k_out) p_m))`.
fn equivalent_gain_scalar(
    scenario: &Scenario,
    ris_geom: &UraGeometry,
    draw: &ChannelDraw,
    profile: &PhaseProfile,
) -> Complex64 {
    let k_inc = wave_vector(draw.ris_aoa, ris_geom.wavelength);
    let k_dep = wave_vector(draw.ris_aod, ris_geom.wavelength);
    let dx = (k_inc[0] - k_dep[0]) * ris_geom.spacing_x;
    let dy = (k_inc[1] - k_dep[1]) * ris_geom.spacing_y;
    let phases = profile.phases();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut idx = 0;
    for ny in 0..ris_geom.n_y {
        let py = dy * ny as f64;
        for nx in 0..ris_geom.n_x {
            let phase = phases[idx] + dx * nx as f64 + py;
            sum += Complex64::from_polar(1.0, phase);
            idx += 1;
        }
    }
    let m = ris_geom.len() as f64;
    let scale = ((scenario.bs.len() * scenario.ue.len()) as f64).sqrt();
    scale * draw.alpha * draw.beta * (sum / m) * m
}

/// Draw one realization and return the scalar equivalent channel seen
/// through the scheme's profile and matched beamformers.
pub fn draw_equivalent_gain(scenario: &Scenario, streams: &mut TrialStreams) -> Complex64 {
    let draw = draw_channel(scenario, &mut streams.channel);
    let (profile, _) = scheme_profile(scenario, &draw, &mut streams.profile);
    let geom = ris_geometry(scenario);
    equivalent_gain_scalar(scenario, &geom, &draw, &profile)
}

/// Outcome of one transmission trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub detected: usize,
    pub bit_errors: u32,
}

/// Run one trial: draw the channel, configure the scheme's profile, transmit
/// `symbol`, detect, and count bit errors.
pub fn run_trial(
    scenario: &Scenario,
    tx_power_w: f64,
    symbol: usize,
    streams: &mut TrialStreams,
) -> TrialOutcome {
    let budget = scenario.budget(tx_power_w);
    let draw = draw_channel(scenario, &mut streams.channel);
    let (profile, _) = scheme_profile(scenario, &draw, &mut streams.profile);
    let geom = ris_geometry(scenario);
    let heq = equivalent_gain_scalar(scenario, &geom, &draw, &profile);
    let f_r = ura_response(&scenario.ue, draw.ue_aoa).expect("drawn angles are finite");
    let cons = &scenario.constellation;
    let y = transmit_scalar(heq, &f_r, cons.points()[symbol], &budget, &mut streams.noise);
    let detected = detect_scalar(y, budget.signal_amplitude() * heq, cons);
    TrialOutcome {
        detected,
        bit_errors: bit_errors(symbol, detected, cons),
    }
}

/// One grid point of a sweep. Fields not produced by the sweep kind stay
/// `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub power_dbm: f64,
    /// Trials (ABER) or channel realizations (rate/EE) behind this point.
    pub trials: u64,
    pub aber: Option<f64>,
    pub aber_stderr: Option<f64>,
    pub union_bound: Option<f64>,
    pub union_bound_stderr: Option<f64>,
    pub rate: Option<f64>,
    pub rate_stderr: Option<f64>,
    pub power_consumed_w: Option<f64>,
    pub ee: Option<f64>,
}

impl SweepPoint {
    fn new(power_dbm: f64, trials: u64) -> Self {
        Self {
            power_dbm,
            trials,
            aber: None,
            aber_stderr: None,
            union_bound: None,
            union_bound_stderr: None,
            rate: None,
            rate_stderr: None,
            power_consumed_w: None,
            ee: None,
        }
    }
}

/// Sweep output for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub scheme: String,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

/// Budgets for one sweep: trial count per ABER point, realization count per
/// rate/EE point, and the population size behind each union-bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub trials_per_point: u64,
    pub realizations: u64,
    pub bound_realizations: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trials_per_point: 100_000,
            realizations: 10_000,
            bound_realizations: 10_000,
        }
    }
}

/// Monte Carlo ABER over a transmit-power grid, with the union bound
/// evaluated on an independent realization population per point.
pub fn run_aber_sweep(
    scenario: &Scenario,
    power_grid_dbm: &[f64],
    config: &SweepConfig,
    seed: u64,
) -> SimResult {
    let root = StreamKey::root(seed);
    let cons = &scenario.constellation;
    let order = cons.order();
    let eta = u64::from(cons.bits_per_symbol());
    let points = power_grid_dbm
        .iter()
        .enumerate()
        .map(|(point_idx, &power_dbm)| {
            let p_w = dbm_to_watts(power_dbm);
            let point_key = root.child(point_idx as u64);
            let trials_key = point_key.child(BRANCH_TRIALS);
            let trials = config.trials_per_point;
            // Integer error counts sum exactly in any order, so a parallel
            // reduction stays deterministic.
            let errors: u64 = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut streams = TrialStreams::from_key(trials_key.child(t));
                    let symbol = streams.symbol.random_range(0..order);
                    u64::from(run_trial(scenario, p_w, symbol, &mut streams).bit_errors)
                })
                .sum();
            let n_bits = (trials * eta) as f64;
            let aber = errors as f64 / n_bits;
            let stderr = (aber * (1.0 - aber) / n_bits).sqrt();

            let budget = scenario.budget(p_w);
            let bound = union_bound_estimate(
                cons,
                scenario,
                &budget,
                config.bound_realizations as usize,
                point_key.child(BRANCH_BOUND),
            );

            let mut point = SweepPoint::new(power_dbm, trials);
            point.aber = Some(aber);
            point.aber_stderr = Some(stderr);
            point.union_bound = Some(bound.mean);
            point.union_bound_stderr = Some(bound.std_error);
            point
        })
        .collect();
    SimResult {
        scheme: scenario.scheme.label(),
        seed,
        points,
    }
}

/// Ergodic achievable rate over a transmit-power grid.
pub fn run_rate_sweep(
    scenario: &Scenario,
    power_grid_dbm: &[f64],
    config: &SweepConfig,
    seed: u64,
) -> SimResult {
    let root = StreamKey::root(seed);
    let points = power_grid_dbm
        .iter()
        .enumerate()
        .map(|(point_idx, &power_dbm)| {
            let budget = scenario.budget(dbm_to_watts(power_dbm));
            let key = root.child(point_idx as u64).child(BRANCH_TRIALS);
            let est = achievable_rate(scenario, &budget, config.realizations as usize, key);
            let mut point = SweepPoint::new(power_dbm, config.realizations);
            point.rate = Some(est.mean);
            point.rate_stderr = Some(est.std_error);
            point
        })
        .collect();
    SimResult {
        scheme: scenario.scheme.label(),
        seed,
        points,
    }
}

/// Consumed power of the configured RIS scheme. Plug-in counts only the
/// serving panel unless the scenario asks for deployment-wide accounting.
pub fn scheme_ris_power(scenario: &Scenario) -> f64 {
    let model = &scenario.power_model;
    match &scenario.scheme {
        Scheme::PlugIn { beams } => {
            let per_panel = power_ris_passive(model, scenario.sub_ris.len());
            if scenario.count_idle_panels {
                per_panel * beams.len() as f64
            } else {
                per_panel
            }
        }
        Scheme::SemiPassive { n_x, n_y } => power_ris_semi(model, n_x * n_y),
        Scheme::Blind { n_x, n_y } => power_ris_passive(model, n_x * n_y),
    }
}

/// Energy efficiency over a transmit-power grid, pairing each point's rate
/// estimate with the scheme-specific consumed power.
pub fn run_ee_sweep(
    scenario: &Scenario,
    power_grid_dbm: &[f64],
    config: &SweepConfig,
    seed: u64,
) -> SimResult {
    let mut result = run_rate_sweep(scenario, power_grid_dbm, config, seed);
    let model = &scenario.power_model;
    let p_ris = scheme_ris_power(scenario);
    for point in &mut result.points {
        let p_w = dbm_to_watts(point.power_dbm);
        let p_c = power_tx(model, scenario.bs.len(), p_w)
            + power_rx(model, scenario.ue.len())
            + p_ris;
        point.power_consumed_w = Some(p_c);
        point.ee = Some(analysis::energy_efficiency(
            point.rate.unwrap(),
            scenario.bandwidth_hz,
            p_c,
        ));
    }
    result
}

/// SNR for one realization drawn from the scenario; exposed for tests and
/// small studies.
pub fn draw_snr(scenario: &Scenario, tx_power_w: f64, streams: &mut TrialStreams) -> f64 {
    let budget = scenario.budget(tx_power_w);
    snr_scalar(draw_equivalent_gain(scenario, streams), &budget)
}

//! Closed-form performance mathematics: pairwise error probabilities, the
//! union-bound ABER, SNR and achievable rate, the transceiver/RIS power
//! model, and detector-complexity counts.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::link::{equivalent_gain, BeamformerPair, Constellation, LinkBudget};
use crate::sim::{draw_equivalent_gain, Scenario, StreamKey, TrialStreams};
use crate::Result;

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// A Monte Carlo estimate together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl MonteCarloEstimate {
    /// Mean and standard error of a sample, summed in index order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        MonteCarloEstimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

/// Conditional pairwise error probability of deciding `s_hat` when `s_star`
/// was sent, for a known channel:
/// `Q( sqrt(P) G_t G_r |f_r^H H f_t (s*-s)|^2 / (sqrt(2) sigma ||f_r f_r^H H f_t (s*-s)||) )`.
///
/// A zero equivalent channel makes the decision a coin flip, so 1/2 is
/// returned for that degenerate case.
pub fn cpep(
    s_star: Complex64,
    s_hat: Complex64,
    h_eff: &Array2<Complex64>,
    bf: &BeamformerPair,
    budget: &LinkBudget,
) -> Result<f64> {
    let heq = equivalent_gain(h_eff, bf)?;
    let x = heq * (s_star - s_hat);
    if x.norm() == 0.0 {
        return Ok(0.5);
    }
    let numerator = budget.signal_amplitude() * x.norm_sqr();
    // || f_r (f_r^H H f_t ds) || evaluated literally.
    let vec_norm = bf
        .f_r
        .entries()
        .iter()
        .map(|fr| (fr * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let denominator = std::f64::consts::SQRT_2 * budget.noise_sigma() * vec_norm;
    Ok(q_function(numerator / denominator))
}

/// CPEP for a scalar equivalent channel; equals [`cpep`] whenever the
/// combiner has unit norm.
pub fn cpep_scalar(heq: Complex64, symbol_diff: Complex64, budget: &LinkBudget) -> f64 {
    let x = (heq * symbol_diff).norm();
    if x == 0.0 {
        return 0.5;
    }
    q_function(budget.signal_amplitude() * x / (std::f64::consts::SQRT_2 * budget.noise_sigma()))
}

/// Unconditional PEP: sample mean of the CPEP over independent channel
/// realizations of `scenario`, with deterministic per-realization streams
/// derived from `key`.
pub fn upep(
    s_star: Complex64,
    s_hat: Complex64,
    scenario: &Scenario,
    budget: &LinkBudget,
    n_realizations: usize,
    key: StreamKey,
) -> MonteCarloEstimate {
    let samples: Vec<f64> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut streams = TrialStreams::from_key(key.child(i));
            let heq = draw_equivalent_gain(scenario, &mut streams);
            cpep_scalar(heq, s_star - s_hat, budget)
        })
        .collect();
    MonteCarloEstimate::from_samples(&samples)
}

/// UPEP for every ordered symbol pair, estimated on one shared population of
/// channel realizations. Entry `(i, j)` is `UPEP(s_i -> s_j)`; the diagonal
/// is zero.
pub fn upep_pair_table(
    cons: &Constellation,
    scenario: &Scenario,
    budget: &LinkBudget,
    n_realizations: usize,
    key: StreamKey,
) -> Array2<f64> {
    let heqs: Vec<Complex64> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut streams = TrialStreams::from_key(key.child(i));
            draw_equivalent_gain(scenario, &mut streams)
        })
        .collect();
    let m = cons.order();
    let mut table = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let ds = cons.points()[i] - cons.points()[j];
            let sum: f64 = heqs.iter().map(|&h| cpep_scalar(h, ds, budget)).sum();
            table[(i, j)] = sum / n_realizations as f64;
        }
    }
    table
}

/// Union bound estimated together with its standard error: the bound is the
/// population mean of the per-realization statistic
/// `(1 / (eta M)) sum sum E_b CPEP(h_i)`, so the spread of that statistic
/// gives the bound's own Monte Carlo uncertainty.
pub fn union_bound_estimate(
    cons: &Constellation,
    scenario: &Scenario,
    budget: &LinkBudget,
    n_realizations: usize,
    key: StreamKey,
) -> MonteCarloEstimate {
    let m = cons.order();
    let norm = f64::from(cons.bits_per_symbol()) * m as f64;
    let samples: Vec<f64> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut streams = TrialStreams::from_key(key.child(i));
            let heq = draw_equivalent_gain(scenario, &mut streams);
            let mut acc = 0.0;
            for a in 0..m {
                for b in 0..m {
                    if a != b {
                        let ds = cons.points()[a] - cons.points()[b];
                        acc += f64::from(crate::link::bit_errors(a, b, cons))
                            * cpep_scalar(heq, ds, budget);
                    }
                }
            }
            acc / norm
        })
        .collect();
    MonteCarloEstimate::from_samples(&samples)
}

/// Union bound on the average bit error rate:
/// `(1 / (eta M)) sum_{s*} sum_{s != s*} E_b(s* -> s) UPEP(s* -> s)`.
pub fn aber_union_bound(cons: &Constellation, upep_table: &Array2<f64>) -> f64 {
    let m = cons.order();
    assert_eq!(upep_table.dim(), (m, m), "UPEP table must cover all pairs");
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                acc += f64::from(crate::link::bit_errors(i, j, cons)) * upep_table[(i, j)];
            }
        }
    }
    acc / (f64::from(cons.bits_per_symbol()) * m as f64)
}

/// Instantaneous SNR `|sqrt(P) G_t G_r f_r^H H f_t|^2 / sigma^2`.
pub fn snr(h_eff: &Array2<Complex64>, bf: &BeamformerPair, budget: &LinkBudget) -> Result<f64> {
    Ok(snr_scalar(equivalent_gain(h_eff, bf)?, budget))
}

/// SNR for a scalar equivalent channel.
pub fn snr_scalar(heq: Complex64, budget: &LinkBudget) -> f64 {
    let amp = budget.signal_amplitude();
    amp * amp * heq.norm_sqr() / budget.noise_variance_w
}

/// Ergodic achievable rate `E[log2(1 + SNR)]` in bits/s/Hz over channel
/// realizations of `scenario`.
pub fn achievable_rate(
    scenario: &Scenario,
    budget: &LinkBudget,
    n_realizations: usize,
    key: StreamKey,
) -> MonteCarloEstimate {
    let snrs: Vec<f64> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut streams = TrialStreams::from_key(key.child(i));
            snr_scalar(draw_equivalent_gain(scenario, &mut streams), budget)
        })
        .collect();
    let rates: Vec<f64> = snrs.iter().map(|s| (1.0 + s).log2()).collect();
    let estimate = MonteCarloEstimate::from_samples(&rates);
    // Jensen sanity: E[log2(1+SNR)] <= log2(1 + E[SNR]).
    debug_assert!({
        let mean_snr = snrs.iter().sum::<f64>() / snrs.len() as f64;
        estimate.mean <= (1.0 + mean_snr).log2() * (1.0 + 1e-12)
    });
    estimate
}

/// Spectral efficiency times bandwidth per consumed watt, in bits/joule.
pub fn energy_efficiency(rate_bps_hz: f64, bandwidth_hz: f64, p_consumed_w: f64) -> f64 {
    debug_assert!(p_consumed_w > 0.0);
    rate_bps_hz * bandwidth_hz / p_consumed_w
}

/// Component powers of the transceiver/RIS power model. All powers in
/// watts, `fom_w` in joules per conversion step, `f_s` in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    /// Power amplifier, per transmit antenna.
    pub p_pa: f64,
    /// Phase shifter, per antenna per RF chain.
    pub p_ps: f64,
    /// One RF chain.
    pub p_rf_chain: f64,
    /// Baseband processor.
    pub p_bb: f64,
    /// Low-noise amplifier, per receive antenna.
    pub p_lna: f64,
    /// One passive reflecting element.
    pub p_pa_ris: f64,
    /// Walden figure of merit for data converters.
    pub fom_w: f64,
    /// Converter sampling frequency.
    pub f_s: f64,
    /// Converter resolution at the transceivers.
    pub bits_transceiver: u32,
    /// Converter resolution at the semi-passive RIS.
    pub bits_ris: u32,
    /// RF chains per terminal.
    pub n_rf: usize,
    /// Fraction of semi-passive RIS elements wired to baseband.
    pub active_fraction_ris: f64,
}

impl PowerModel {
    /// Component values used throughout the evaluation campaign: 20 mW PA,
    /// 30 mW phase shifter, 40 mW RF chain, 200 mW baseband, 20 mW LNA,
    /// 10 mW per reflecting element, 46.1 fJ/step converters sampling at
    /// Nyquist rate for a 100 MHz bandwidth (2B), 4-bit transceiver and
    /// 1-bit RIS converters, one RF chain, 8% active RIS elements.
    pub fn mmwave_defaults() -> Self {
        Self {
            p_pa: 20e-3,
            p_ps: 30e-3,
            p_rf_chain: 40e-3,
            p_bb: 200e-3,
            p_lna: 20e-3,
            p_pa_ris: 10e-3,
            fom_w: 46.1e-15,
            f_s: 2e8,
            bits_transceiver: 4,
            bits_ris: 1,
            n_rf: 1,
            active_fraction_ris: 0.08,
        }
    }

    /// Number of semi-passive elements wired to baseband: nearest integer of
    /// `active_fraction_ris * m`, at least 1 whenever the fraction is
    /// positive and the surface is nonempty.
    pub fn active_elements(&self, m: usize) -> usize {
        if m == 0 || self.active_fraction_ris <= 0.0 {
            return 0;
        }
        ((self.active_fraction_ris * m as f64).round() as usize).max(1)
    }
}

/// Data-converter power `FOM_W * f_s * 2^bits`.
pub fn adc_power(model: &PowerModel, bits: u32) -> f64 {
    debug_assert!(bits >= 1);
    model.fom_w * model.f_s * f64::from(1u32 << bits)
}

/// Transmitter consumption:
/// `P + N_t P_PA + N_rf (N_t P_PS + P_RF + 2 P_DAC) + P_BB`.
pub fn power_tx(model: &PowerModel, n_t: usize, p_transmit_w: f64) -> f64 {
    let p_dac = adc_power(model, model.bits_transceiver);
    p_transmit_w
        + n_t as f64 * model.p_pa
        + model.n_rf as f64 * (n_t as f64 * model.p_ps + model.p_rf_chain + 2.0 * p_dac)
        + model.p_bb
}

/// Receiver consumption:
/// `N_r P_LNA + N_rf (N_r P_PS + P_RF + 2 P_ADC) + P_BB`.
pub fn power_rx(model: &PowerModel, n_r: usize) -> f64 {
    let p_adc = adc_power(model, model.bits_transceiver);
    n_r as f64 * model.p_lna
        + model.n_rf as f64 * (n_r as f64 * model.p_ps + model.p_rf_chain + 2.0 * p_adc)
        + model.p_bb
}

/// Fully passive surface consumption: `M P_PA_RIS`.
pub fn power_ris_passive(model: &PowerModel, m: usize) -> f64 {
    m as f64 * model.p_pa_ris
}

/// Semi-passive surface consumption:
/// `M P_PA_RIS + M_active (P_LNA + P_RF + 2 P_ADC) + P_BB`.
pub fn power_ris_semi(model: &PowerModel, m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let p_adc = adc_power(model, model.bits_ris);
    power_ris_passive(model, m)
        + model.active_elements(m) as f64 * (model.p_lna + model.p_rf_chain + 2.0 * p_adc)
        + model.p_bb
}

/// Dimensions entering the detector-complexity expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityParams {
    /// Engaged RIS elements M.
    pub m_ris: u64,
    pub n_t: u64,
    pub n_r: u64,
    /// Constellation order.
    pub m_ary: u64,
}

/// Which detector the complexity count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorScheme {
    /// Effective channel assembled from separately known G, R, Psi:
    /// `M_ary * M * N_t * (M + N_r)` operations.
    SemiPassive,
    /// Effective channel known directly: `M_ary * N_r * N_t` operations.
    PlugIn,
}

/// Closed-form ML detector operation count.
pub fn detector_complexity(params: &ComplexityParams, scheme: DetectorScheme) -> u64 {
    match scheme {
        DetectorScheme::SemiPassive => {
            params.m_ary * params.m_ris * params.n_t * (params.m_ris + params.n_r)
        }
        DetectorScheme::PlugIn => params.m_ary * params.n_r * params.n_t,
    }
}

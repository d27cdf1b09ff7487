//! Scenario assembly and the Monte Carlo engine.
//!
//! A [`Scenario`] bundles everything one experiment needs: geometry for the
//! BS/UE/sub-RIS arrays, path-loss and power models, angle distributions,
//! and the RIS [`Scheme`] under test. The engine in [`engine`] runs
//! per-trial transmissions and whole SNR sweeps with deterministic,
//! thread-count-independent results.

mod engine;
mod rng;

pub use engine::{
    draw_channel, draw_equivalent_gain, draw_snr, run_aber_sweep, run_ee_sweep, run_rate_sweep,
    run_trial, scheme_profile, scheme_ris_power, ChannelDraw, SimResult, SweepConfig, SweepPoint,
    TrialOutcome,
};
pub use rng::{StreamKey, TrialStreams};

use rand::Rng;

use crate::analysis::PowerModel;
use crate::channel::PathLossParams;
use crate::geometry::{wavelength_m, AnglePair, UraGeometry};
use crate::link::{array_gain_db, dbm_to_watts, Constellation, GainConvention, LinkBudget};
use crate::{Error, Result};

/// RIS operating scheme under test.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// Fixed-beam sub-RIS panels; the panel whose beam is closest to the
    /// user's direction serves the trial. Panel size comes from the
    /// scenario's `sub_ris` geometry.
    PlugIn { beams: Vec<AnglePair> },
    /// Benchmark surface of `n_x` x `n_y` elements re-configured to the
    /// matched profile on every realization.
    SemiPassive { n_x: usize, n_y: usize },
    /// Benchmark surface of `n_x` x `n_y` elements with random phases,
    /// redrawn every trial.
    Blind { n_x: usize, n_y: usize },
}

impl Scheme {
    /// Short label used in result rows.
    pub fn label(&self) -> String {
        match self {
            Scheme::PlugIn { beams } => format!("plug_in_k{}", beams.len()),
            Scheme::SemiPassive { n_x, n_y } => format!("semi_passive_{n_x}x{n_y}"),
            Scheme::Blind { n_x, n_y } => format!("blind_{n_x}x{n_y}"),
        }
    }

    /// Geometry of the reflecting surface engaged in one transmission.
    pub fn ris_geometry(&self, scenario: &Scenario) -> Result<UraGeometry> {
        match self {
            Scheme::PlugIn { .. } => Ok(scenario.sub_ris),
            Scheme::SemiPassive { n_x, n_y } | Scheme::Blind { n_x, n_y } => UraGeometry::new(
                *n_x,
                *n_y,
                scenario.sub_ris.spacing_x,
                scenario.sub_ris.spacing_y,
                scenario.sub_ris.wavelength,
            ),
        }
    }

    /// Number of reflecting elements engaged per transmission period.
    pub fn engaged_elements(&self, scenario: &Scenario) -> usize {
        match self {
            Scheme::PlugIn { .. } => scenario.sub_ris.len(),
            Scheme::SemiPassive { n_x, n_y } | Scheme::Blind { n_x, n_y } => n_x * n_y,
        }
    }
}

/// Uniform sampling bounds for one azimuth/elevation pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAngleRange {
    pub azimuth: (f64, f64),
    pub elevation: (f64, f64),
}

impl UniformAngleRange {
    pub fn new(azimuth: (f64, f64), elevation: (f64, f64)) -> Self {
        Self { azimuth, elevation }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> AnglePair {
        let az = if self.azimuth.0 == self.azimuth.1 {
            self.azimuth.0
        } else {
            rng.random_range(self.azimuth.0..self.azimuth.1)
        };
        let el = if self.elevation.0 == self.elevation.1 {
            self.elevation.0
        } else {
            rng.random_range(self.elevation.0..self.elevation.1)
        };
        AnglePair::new(az, el)
    }
}

/// Uniform angle distributions for every drawn direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleModel {
    /// Departure at the BS (azimuth/elevation of the beam toward the RIS).
    pub tx_aod: UniformAngleRange,
    /// Arrival at the UE.
    pub ue_aoa: UniformAngleRange,
    /// Arrival at the sub-RIS (from the BS).
    pub ris_aoa: UniformAngleRange,
    /// Departure at the sub-RIS (toward the UE); this is the user direction
    /// the plug-in scheme must serve with a fixed beam.
    pub ris_aod: UniformAngleRange,
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub path_loss: PathLossParams,
    /// BS to RIS distance in metres.
    pub d_br: f64,
    /// RIS to UE distance in metres.
    pub d_ru: f64,
    pub bs: UraGeometry,
    pub ue: UraGeometry,
    /// Per-panel geometry of one sub-RIS.
    pub sub_ris: UraGeometry,
    pub angles: AngleModel,
    pub scheme: Scheme,
    pub g_element_dbi: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub power_model: PowerModel,
    pub constellation: Constellation,
    pub gain_convention: GainConvention,
    /// When true, idle sub-RIS panels of a plug-in deployment also count in
    /// the consumed RIS power.
    pub count_idle_panels: bool,
}

impl Scenario {
    /// Noise power in dBm from the configured PSD and bandwidth.
    pub fn noise_variance_dbm(&self) -> f64 {
        self.noise_psd_dbm_hz + 10.0 * self.bandwidth_hz.log10()
    }

    /// Noise power in watts.
    pub fn noise_variance_w(&self) -> f64 {
        dbm_to_watts(self.noise_variance_dbm())
    }

    /// Link budget for a transmit power in watts, with array gains derived
    /// from the BS/UE geometries.
    pub fn budget(&self, tx_power_w: f64) -> LinkBudget {
        LinkBudget {
            tx_power_w,
            noise_variance_w: self.noise_variance_w(),
            g_element_dbi: self.g_element_dbi,
            array_gain_tx_db: array_gain_db(self.g_element_dbi, self.bs.len()),
            array_gain_rx_db: array_gain_db(self.g_element_dbi, self.ue.len()),
            gain_convention: self.gain_convention,
        }
    }

    /// Same scenario with a different scheme.
    pub fn with_scheme(&self, scheme: Scheme) -> Scenario {
        Scenario {
            scheme,
            ..self.clone()
        }
    }
}

/// Table-driven presets for the two evaluation environments.
pub fn preset_scenario(name: &str) -> Result<Scenario> {
    let (path_loss, d_br, d_ru) = match name {
        "indoor_office" => (PathLossParams::new(32.4, 1.73, 28.0)?, 2.5, 10.0),
        "street_canyon" => (PathLossParams::new(32.4, 2.1, 28.0)?, 20.0, 10.0),
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown scenario preset '{other}'; expected 'indoor_office' or 'street_canyon'"
            )))
        }
    };
    let lambda = wavelength_m(path_loss.f_c_ghz);
    let pi = std::f64::consts::PI;
    Ok(Scenario {
        name: name.to_string(),
        path_loss,
        d_br,
        d_ru,
        bs: UraGeometry::half_wavelength(10, 10, lambda)?,
        ue: UraGeometry::half_wavelength(1, 1, lambda)?,
        sub_ris: UraGeometry::half_wavelength(10, 10, lambda)?,
        angles: AngleModel {
            tx_aod: UniformAngleRange::new((-pi, pi), (-pi / 3.0, pi / 3.0)),
            ue_aoa: UniformAngleRange::new((-pi, pi), (-pi / 3.0, pi / 3.0)),
            ris_aoa: UniformAngleRange::new((-pi, pi), (-pi / 3.0, pi / 3.0)),
            // The fixed beams sit at elevation pi/32, the centre of this
            // interval; a symmetric interval around zero would leave every
            // beam half a range off target.
            ris_aod: UniformAngleRange::new((-pi, pi), (0.0, pi / 16.0)),
        },
        scheme: Scheme::PlugIn {
            beams: segment_beams(2)?,
        },
        g_element_dbi: 0.0,
        bandwidth_hz: 1e8,
        noise_psd_dbm_hz: -174.0,
        power_model: PowerModel::mmwave_defaults(),
        constellation: Constellation::bpsk(),
        gain_convention: GainConvention::Amplitude,
        count_idle_panels: false,
    })
}

/// Fixed-beam directions for `k` spatial segments of the dead zone.
///
/// The azimuth interval [-pi, pi] is split into `k` equal segments with one
/// beam at each segment centre, all at elevation pi/32. Beams are listed
/// positive azimuths first (ascending), then negative (descending), which
/// for k = 2 gives {(pi/2, pi/32), (-pi/2, pi/32)} and for k = 4 gives
/// {(pi/4, pi/32), (3pi/4, pi/32), (-pi/4, pi/32), (-3pi/4, pi/32)}.
pub fn segment_beams(k: usize) -> Result<Vec<AnglePair>> {
    if k < 1 {
        return Err(Error::InvalidInput("segment count must be >= 1".into()));
    }
    let pi = std::f64::consts::PI;
    let elevation = pi / 32.0;
    let mut centers: Vec<f64> = (0..k)
        .map(|i| -pi + (2 * i + 1) as f64 * pi / k as f64)
        .collect();
    centers.sort_by(|a, b| {
        let key = |x: f64| (if x >= 0.0 { 0.0 } else { 1.0 }, x.abs());
        key(*a).partial_cmp(&key(*b)).unwrap()
    });
    Ok(centers
        .into_iter()
        .map(|az| AnglePair::new(az, elevation))
        .collect())
}

/// Index of the fixed beam closest in angle to the user's departure
/// direction; ties resolve to the lowest index.
pub fn assign_sub_ris(ue_departure: AnglePair, beams: &[AnglePair]) -> usize {
    assert!(!beams.is_empty(), "beam list must be nonempty");
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (idx, beam) in beams.iter().enumerate() {
        let dist = ue_departure.angular_distance(beam);
        if dist < best_dist {
            best_dist = dist;
            best = idx;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn presets_match_table_values() {
        let indoor = preset_scenario("indoor_office").unwrap();
        assert_eq!(indoor.noise_variance_dbm(), -94.0);
        assert_eq!(indoor.d_br, 2.5);
        assert_eq!(indoor.d_ru, 10.0);
        assert_eq!(indoor.path_loss.b, 1.73);
        assert_eq!(indoor.bs.len(), 100);
        assert_eq!(indoor.ue.len(), 1);

        let outdoor = preset_scenario("street_canyon").unwrap();
        assert_eq!(outdoor.d_br, 20.0);
        assert_eq!(outdoor.path_loss.b, 2.1);

        assert!(preset_scenario("moon_base").is_err());
    }

    #[test]
    fn segment_beams_match_configured_sets() {
        let two = segment_beams(2).unwrap();
        assert_eq!(two.len(), 2);
        assert!((two[0].azimuth - PI / 2.0).abs() < 1e-12);
        assert!((two[1].azimuth + PI / 2.0).abs() < 1e-12);
        for b in &two {
            assert!((b.elevation - PI / 32.0).abs() < 1e-12);
        }

        let four = segment_beams(4).unwrap();
        let azimuths: Vec<f64> = four.iter().map(|b| b.azimuth).collect();
        let want = [PI / 4.0, 3.0 * PI / 4.0, -PI / 4.0, -3.0 * PI / 4.0];
        for (got, want) in azimuths.iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-12);
        }

        let one = segment_beams(1).unwrap();
        assert!((one[0].azimuth).abs() < 1e-12);
        assert!((one[0].elevation - PI / 32.0).abs() < 1e-12);

        assert!(segment_beams(0).is_err());
    }

    #[test]
    fn sub_ris_assignment_and_tie_breaks() {
        let beams = segment_beams(2).unwrap();
        assert_eq!(assign_sub_ris(AnglePair::new(PI / 2.0, PI / 32.0), &beams), 0);
        // Azimuth 0.1 is closer to +pi/2 than to -pi/2.
        assert_eq!(assign_sub_ris(AnglePair::new(0.1, 0.0), &beams), 0);
        assert_eq!(assign_sub_ris(AnglePair::new(-0.1, 0.0), &beams), 1);
        // Equidistant: lowest index wins.
        assert_eq!(assign_sub_ris(AnglePair::new(0.0, 0.0), &beams), 0);
    }

    #[test]
    fn scheme_labels_and_element_counts() {
        let scenario = preset_scenario("indoor_office").unwrap();
        let plug = Scheme::PlugIn {
            beams: segment_beams(4).unwrap(),
        };
        assert_eq!(plug.label(), "plug_in_k4");
        assert_eq!(plug.engaged_elements(&scenario), 100);
        let semi = Scheme::SemiPassive { n_x: 10, n_y: 10 };
        assert_eq!(semi.label(), "semi_passive_10x10");
        assert_eq!(semi.engaged_elements(&scenario), 100);
        let blind = Scheme::Blind { n_x: 20, n_y: 20 };
        assert_eq!(blind.label(), "blind_20x20");
        assert_eq!(blind.engaged_elements(&scenario), 400);
        assert_eq!(blind.ris_geometry(&scenario).unwrap().len(), 400);
    }
}

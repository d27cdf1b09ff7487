//! Run configuration: JSON in, fully resolved experiment out.
//!
//! Unknown keys anywhere in the file are a hard error. Angles in config
//! files are degrees and are converted at this boundary. Every run needs an
//! explicit seed, from the file or the command line.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use ris_sim::geometry::{wavelength_m, UraGeometry};
use ris_sim::link::{Constellation, GainConvention};
use ris_sim::sim::{preset_scenario, segment_beams, Scenario, Scheme};

/// Sweep grid: either explicit points or an inclusive range.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GridSpec {
    Explicit(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Explicit(points) => {
                if points.is_empty() {
                    bail!("power grid must not be empty");
                }
                Ok(points.clone())
            }
            GridSpec::Range { start, stop, step } => {
                if *step <= 0.0 || stop < start {
                    bail!("invalid grid range: start {start}, stop {stop}, step {step}");
                }
                let mut points = Vec::new();
                let mut i = 0u64;
                loop {
                    let p = start + *step * i as f64;
                    if p > *stop + 1e-9 {
                        break;
                    }
                    points.push(p);
                    i += 1;
                }
                Ok(points)
            }
        }
    }
}

fn default_grid() -> GridSpec {
    GridSpec::Range {
        start: -30.0,
        stop: 30.0,
        step: 2.0,
    }
}

/// Overrides for any scenario parameter. Field names are the config surface;
/// unknown names are rejected by serde.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioOverrides {
    pub f_c_ghz: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub noise_psd_dbm_hz: Option<f64>,
    pub g_element_dbi: Option<f64>,
    pub path_loss_a: Option<f64>,
    pub path_loss_b: Option<f64>,
    pub d_br_m: Option<f64>,
    pub d_ru_m: Option<f64>,
    pub bs_size: Option<[usize; 2]>,
    pub ue_size: Option<[usize; 2]>,
    pub sub_ris_size: Option<[usize; 2]>,
    /// Element spacing as a fraction of the wavelength (0.5 = half-wave).
    pub element_spacing_wavelengths: Option<f64>,
    pub tx_aod_azimuth_deg: Option<[f64; 2]>,
    pub tx_aod_elevation_deg: Option<[f64; 2]>,
    pub ue_aoa_azimuth_deg: Option<[f64; 2]>,
    pub ue_aoa_elevation_deg: Option<[f64; 2]>,
    pub ris_aoa_azimuth_deg: Option<[f64; 2]>,
    pub ris_aoa_elevation_deg: Option<[f64; 2]>,
    pub ris_aod_azimuth_deg: Option<[f64; 2]>,
    pub ris_aod_elevation_deg: Option<[f64; 2]>,
    /// "bpsk", "psk4", "psk8" or "psk16".
    pub constellation: Option<String>,
    /// "amplitude" (10^(dB/20)) or "power" (10^(dB/10)).
    pub gain_convention: Option<String>,
    pub count_idle_panels: Option<bool>,
    pub p_pa_w: Option<f64>,
    pub p_ps_w: Option<f64>,
    pub p_rf_chain_w: Option<f64>,
    pub p_bb_w: Option<f64>,
    pub p_lna_w: Option<f64>,
    pub p_pa_ris_w: Option<f64>,
    pub fom_w_j: Option<f64>,
    pub f_s_hz: Option<f64>,
    pub bits_transceiver: Option<u32>,
    pub bits_ris: Option<u32>,
    pub n_rf: Option<usize>,
    pub active_fraction_ris: Option<f64>,
}

fn deg_range(bounds: [f64; 2]) -> Result<(f64, f64)> {
    if bounds[1] < bounds[0] {
        bail!("angle bounds must be ordered: {bounds:?}");
    }
    Ok((bounds[0].to_radians(), bounds[1].to_radians()))
}

impl ScenarioOverrides {
    pub fn apply(&self, scenario: &mut Scenario) -> Result<()> {
        if let Some(f_c) = self.f_c_ghz {
            if f_c <= 0.0 {
                bail!("f_c_ghz must be positive");
            }
            scenario.path_loss.f_c_ghz = f_c;
        }
        if let Some(a) = self.path_loss_a {
            scenario.path_loss.a = a;
        }
        if let Some(b) = self.path_loss_b {
            scenario.path_loss.b = b;
        }
        if let Some(d) = self.d_br_m {
            scenario.d_br = d;
        }
        if let Some(d) = self.d_ru_m {
            scenario.d_ru = d;
        }
        if let Some(b) = self.bandwidth_hz {
            scenario.bandwidth_hz = b;
        }
        if let Some(p) = self.noise_psd_dbm_hz {
            scenario.noise_psd_dbm_hz = p;
        }
        if let Some(g) = self.g_element_dbi {
            scenario.g_element_dbi = g;
        }

        // Geometries are rebuilt from sizes, spacing fraction and carrier.
        let lambda = wavelength_m(scenario.path_loss.f_c_ghz);
        let spacing_wl = self.element_spacing_wavelengths.unwrap_or(0.5);
        let spacing = spacing_wl * lambda;
        let rebuild = |size: Option<[usize; 2]>, current: &UraGeometry| -> Result<UraGeometry> {
            let (n_x, n_y) = match size {
                Some([x, y]) => (x, y),
                None => (current.n_x, current.n_y),
            };
            UraGeometry::new(n_x, n_y, spacing, spacing, lambda)
                .map_err(|e| anyhow!("invalid array geometry: {e}"))
        };
        scenario.bs = rebuild(self.bs_size, &scenario.bs)?;
        scenario.ue = rebuild(self.ue_size, &scenario.ue)?;
        scenario.sub_ris = rebuild(self.sub_ris_size, &scenario.sub_ris)?;

        if let Some(b) = self.tx_aod_azimuth_deg {
            scenario.angles.tx_aod.azimuth = deg_range(b)?;
        }
        if let Some(b) = self.tx_aod_elevation_deg {
            scenario.angles.tx_aod.elevation = deg_range(b)?;
        }
        if let Some(b) = self.ue_aoa_azimuth_deg {
            scenario.angles.ue_aoa.azimuth = deg_range(b)?;
        }
        if let Some(b) = self.ue_aoa_elevation_deg {
            scenario.angles.ue_aoa.elevation = deg_range(b)?;
        }
        if let Some(b) = self.ris_aoa_azimuth_deg {
            scenario.angles.ris_aoa.azimuth = deg_range(b)?;
        }
        if let Some(b) = self.ris_aoa_elevation_deg {
            scenario.angles.ris_aoa.elevation = deg_range(b)?;
        }
        if let Some(b) = self.ris_aod_azimuth_deg {
            scenario.angles.ris_aod.azimuth = deg_range(b)?;
        }
        if let Some(b) = self.ris_aod_elevation_deg {
            scenario.angles.ris_aod.elevation = deg_range(b)?;
        }

        if let Some(name) = &self.constellation {
            scenario.constellation = match name.as_str() {
                "bpsk" | "psk2" => Constellation::bpsk(),
                "psk4" => Constellation::gray_psk(4).unwrap(),
                "psk8" => Constellation::gray_psk(8).unwrap(),
                "psk16" => Constellation::gray_psk(16).unwrap(),
                other => bail!("unknown constellation '{other}'"),
            };
        }
        if let Some(conv) = &self.gain_convention {
            scenario.gain_convention = match conv.as_str() {
                "amplitude" => GainConvention::Amplitude,
                "power" => GainConvention::Power,
                other => bail!("unknown gain convention '{other}'"),
            };
        }
        if let Some(flag) = self.count_idle_panels {
            scenario.count_idle_panels = flag;
        }

        let pm = &mut scenario.power_model;
        if let Some(v) = self.p_pa_w {
            pm.p_pa = v;
        }
        if let Some(v) = self.p_ps_w {
            pm.p_ps = v;
        }
        if let Some(v) = self.p_rf_chain_w {
            pm.p_rf_chain = v;
        }
        if let Some(v) = self.p_bb_w {
            pm.p_bb = v;
        }
        if let Some(v) = self.p_lna_w {
            pm.p_lna = v;
        }
        if let Some(v) = self.p_pa_ris_w {
            pm.p_pa_ris = v;
        }
        if let Some(v) = self.fom_w_j {
            pm.fom_w = v;
        }
        if let Some(v) = self.f_s_hz {
            pm.f_s = v;
        }
        if let Some(v) = self.bits_transceiver {
            pm.bits_transceiver = v;
        }
        if let Some(v) = self.bits_ris {
            pm.bits_ris = v;
        }
        if let Some(v) = self.n_rf {
            pm.n_rf = v;
        }
        if let Some(v) = self.active_fraction_ris {
            if !(0.0..=1.0).contains(&v) {
                bail!("active_fraction_ris must be in [0, 1]");
            }
            pm.active_fraction_ris = v;
        }
        Ok(())
    }
}

/// Grids for the `geometry` command.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    /// Per-axis BS element counts (square arrays: N_t = n^2).
    pub bs_axis_counts: Vec<usize>,
    pub distances_m: Vec<f64>,
    /// Per-axis sub-RIS element counts (M = m^2).
    pub sub_ris_axis_counts: Vec<usize>,
    /// Incidence angle at the surface, degrees.
    pub theta0_deg: f64,
    /// Use the exact footprint form instead of the small-beam approximation.
    pub force_exact_efd: bool,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            bs_axis_counts: vec![6, 8, 10, 12, 14, 16, 18, 20],
            distances_m: vec![2.5, 5.0, 10.0, 20.0],
            sub_ris_axis_counts: vec![10, 20],
            theta0_deg: 0.0,
            force_exact_efd: false,
        }
    }
}

/// Grids for the `complexity` command.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ComplexityConfig {
    pub m_values: Vec<u64>,
    pub n_t_values: Vec<u64>,
    pub n_r_values: Vec<u64>,
    pub m_ary_values: Vec<u64>,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        Self {
            m_values: vec![100, 200, 300, 400],
            n_t_values: vec![25, 50, 100, 200, 400],
            n_r_values: vec![1],
            m_ary_values: vec![2, 4, 8, 16],
        }
    }
}

/// One run's configuration as read from JSON; optional fields fall back to
/// the documented defaults during [`RunConfig::resolve`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Scenario preset: "indoor_office" or "street_canyon".
    pub scenario: String,
    pub schemes: Option<Vec<String>>,
    pub power_grid_dbm: Option<GridSpec>,
    pub trials_per_point: Option<u64>,
    pub realizations: Option<u64>,
    pub bound_realizations: Option<u64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub overrides: Option<ScenarioOverrides>,
    pub geometry: Option<GeometryConfig>,
    pub complexity: Option<ComplexityConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "indoor_office".to_string(),
            schemes: None,
            power_grid_dbm: None,
            trials_per_point: None,
            realizations: None,
            bound_realizations: None,
            seed: None,
            out_dir: None,
            threads: None,
            overrides: None,
            geometry: None,
            complexity: None,
        }
    }
}

/// Parse a scheme label: `plug_in_k<K>`, `semi_passive_<X>x<Y>` or
/// `blind_<X>x<Y>`.
pub fn parse_scheme(label: &str) -> Result<Scheme> {
    if let Some(k) = label.strip_prefix("plug_in_k") {
        let k: usize = k
            .parse()
            .with_context(|| format!("bad segment count in scheme '{label}'"))?;
        let beams = segment_beams(k).map_err(|e| anyhow!("{e}"))?;
        return Ok(Scheme::PlugIn { beams });
    }
    let dims = |spec: &str| -> Result<(usize, usize)> {
        let (x, y) = spec
            .split_once('x')
            .ok_or_else(|| anyhow!("expected <X>x<Y> dimensions in scheme '{label}'"))?;
        Ok((
            x.parse().with_context(|| format!("bad dimensions in '{label}'"))?,
            y.parse().with_context(|| format!("bad dimensions in '{label}'"))?,
        ))
    };
    if let Some(spec) = label.strip_prefix("semi_passive_") {
        let (n_x, n_y) = dims(spec)?;
        return Ok(Scheme::SemiPassive { n_x, n_y });
    }
    if let Some(spec) = label.strip_prefix("blind_") {
        let (n_x, n_y) = dims(spec)?;
        return Ok(Scheme::Blind { n_x, n_y });
    }
    bail!(
        "unknown scheme '{label}'; expected plug_in_k<K>, semi_passive_<X>x<Y> or blind_<X>x<Y>"
    )
}

/// A fully resolved run: every default filled in, ready to execute and to
/// echo into the manifest.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub schemes: Vec<(String, Scheme)>,
    pub power_grid_dbm: Vec<f64>,
    pub trials_per_point: u64,
    pub realizations: u64,
    pub bound_realizations: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub geometry: GeometryConfig,
    pub complexity: ComplexityConfig,
    /// The resolved configuration, reproducing this run byte-for-byte.
    pub echo: RunConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("config error")
    }

    /// Fill defaults, apply overrides, and validate. `seed` must come from
    /// the file or the CLI; there is no wall-clock fallback.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        let seed = self
            .seed
            .ok_or_else(|| anyhow!("config error: no seed given (set \"seed\" or pass --seed)"))?;
        let mut scenario =
            preset_scenario(&self.scenario).map_err(|e| anyhow!("config error: {e}"))?;
        let overrides = self.overrides.clone().unwrap_or_default();
        overrides.apply(&mut scenario)?;

        let scheme_labels = self.schemes.clone().unwrap_or_else(|| {
            vec![
                "plug_in_k2".to_string(),
                "plug_in_k4".to_string(),
                "semi_passive_10x10".to_string(),
            ]
        });
        let mut schemes = Vec::with_capacity(scheme_labels.len());
        for label in &scheme_labels {
            schemes.push((label.clone(), parse_scheme(label)?));
        }

        let grid_spec = self.power_grid_dbm.clone().unwrap_or_else(default_grid);
        let power_grid_dbm = grid_spec.points()?;
        let trials_per_point = self.trials_per_point.unwrap_or(100_000);
        let realizations = self.realizations.unwrap_or(10_000);
        let bound_realizations = self.bound_realizations.unwrap_or(10_000);
        if trials_per_point == 0 || realizations == 0 || bound_realizations == 0 {
            bail!("config error: trial and realization counts must be positive");
        }
        let out_dir = self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        let threads = self.threads.unwrap_or(0);
        let geometry = self.geometry.clone().unwrap_or_default();
        let complexity = self.complexity.clone().unwrap_or_default();

        let echo = RunConfig {
            scenario: self.scenario.clone(),
            schemes: Some(scheme_labels),
            power_grid_dbm: Some(grid_spec),
            trials_per_point: Some(trials_per_point),
            realizations: Some(realizations),
            bound_realizations: Some(bound_realizations),
            seed: Some(seed),
            out_dir: Some(out_dir.clone()),
            threads: Some(threads),
            overrides: Some(overrides),
            geometry: Some(geometry.clone()),
            complexity: Some(complexity.clone()),
        };

        Ok(ResolvedRun {
            scenario,
            schemes,
            power_grid_dbm,
            trials_per_point,
            realizations,
            bound_realizations,
            seed,
            out_dir,
            threads,
            geometry,
            complexity,
            echo,
        })
    }
}

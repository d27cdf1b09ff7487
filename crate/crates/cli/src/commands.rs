//! The five experiment commands. Each renders its CSV outputs in memory and
//! hands them to the output layer together with the resolved config echo.

use std::fmt::Write as _;

use anyhow::{anyhow, Result};

use crate::config::ResolvedRun;
use crate::output::{aber_csv, ee_csv, rate_csv, OutputFile, CSV_SCHEMA_LINE};
use ris_sim::analysis::{detector_complexity, ComplexityParams, DetectorScheme};
use ris_sim::geometry::{efd_approx, efd_exact, hpbw, sub_ris_side_length, sub_ris_spacing};
use ris_sim::sim::{run_aber_sweep, run_ee_sweep, run_rate_sweep, SimResult, SweepConfig};

fn sweep_config(run: &ResolvedRun) -> SweepConfig {
    SweepConfig {
        trials_per_point: run.trials_per_point,
        realizations: run.realizations,
        bound_realizations: run.bound_realizations,
    }
}

fn per_scheme<F>(run: &ResolvedRun, sweep: F) -> Vec<SimResult>
where
    F: Fn(&ris_sim::sim::Scenario) -> SimResult,
{
    run.schemes
        .iter()
        .map(|(_, scheme)| sweep(&run.scenario.with_scheme(scheme.clone())))
        .collect()
}

pub fn cmd_aber(run: &ResolvedRun) -> Result<Vec<OutputFile>> {
    let config = sweep_config(run);
    let results = per_scheme(run, |scenario| {
        run_aber_sweep(scenario, &run.power_grid_dbm, &config, run.seed)
    });
    Ok(vec![OutputFile {
        name: "aber.csv".to_string(),
        contents: aber_csv(&results),
    }])
}

pub fn cmd_rate(run: &ResolvedRun) -> Result<Vec<OutputFile>> {
    let config = sweep_config(run);
    let results = per_scheme(run, |scenario| {
        run_rate_sweep(scenario, &run.power_grid_dbm, &config, run.seed)
    });
    Ok(vec![OutputFile {
        name: "rate.csv".to_string(),
        contents: rate_csv(&results),
    }])
}

pub fn cmd_ee(run: &ResolvedRun) -> Result<Vec<OutputFile>> {
    let config = sweep_config(run);
    let results = per_scheme(run, |scenario| {
        run_ee_sweep(scenario, &run.power_grid_dbm, &config, run.seed)
    });
    Ok(vec![OutputFile {
        name: "ee.csv".to_string(),
        contents: ee_csv(&results),
    }])
}

/// Footprint-and-spacing table over the configured grids:
/// `n_t,d_m,m,hpbw_rad,efd_m,delta_m,delta_deployable_m`.
///
/// The footprint uses the small-beam approximation inside |theta0| <= pi/3,
/// where the footprint is effectively constant over incidence; beyond that,
/// or when forced, the exact oblique form is used.
pub fn cmd_geometry(run: &ResolvedRun) -> Result<Vec<OutputFile>> {
    let geom = &run.geometry;
    let array = &run.scenario.bs;
    let spacing = array.spacing_x;
    let lambda = array.wavelength;
    let theta0 = geom.theta0_deg.to_radians();
    let use_exact = geom.force_exact_efd || theta0.abs() > std::f64::consts::FRAC_PI_3;
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_LINE);
    out.push('\n');
    out.push_str("n_t,d_m,m,hpbw_rad,efd_m,delta_m,delta_deployable_m\n");
    for &n_axis in &geom.bs_axis_counts {
        if n_axis == 0 {
            return Err(anyhow!("config error: BS axis count must be >= 1"));
        }
        let beamwidth = hpbw(n_axis, spacing, lambda);
        for &d in &geom.distances_m {
            if d <= 0.0 {
                return Err(anyhow!("config error: distances must be positive"));
            }
            let efd = if use_exact {
                efd_exact(d, beamwidth, theta0).map_err(|e| anyhow!("{e}"))?
            } else {
                efd_approx(d, beamwidth)
            };
            for &m_axis in &geom.sub_ris_axis_counts {
                if m_axis == 0 {
                    return Err(anyhow!("config error: sub-RIS axis count must be >= 1"));
                }
                let iota = sub_ris_side_length(m_axis, spacing);
                let delta = sub_ris_spacing(efd, iota);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    n_axis * n_axis,
                    d,
                    m_axis * m_axis,
                    beamwidth,
                    efd,
                    delta,
                    delta.max(0.0)
                );
            }
        }
    }
    Ok(vec![OutputFile {
        name: "geometry.csv".to_string(),
        contents: out,
    }])
}

/// Detector operation counts over the configured grids:
/// `scheme,m,n_t,n_r,m_ary,operations`.
pub fn cmd_complexity(run: &ResolvedRun) -> Result<Vec<OutputFile>> {
    let grids = &run.complexity;
    let mut out = String::new();
    out.push_str(CSV_SCHEMA_LINE);
    out.push('\n');
    out.push_str("scheme,m,n_t,n_r,m_ary,operations\n");
    for (label, scheme) in [
        ("semi_passive", DetectorScheme::SemiPassive),
        ("plug_in", DetectorScheme::PlugIn),
    ] {
        for &m in &grids.m_values {
            for &n_t in &grids.n_t_values {
                for &n_r in &grids.n_r_values {
                    for &m_ary in &grids.m_ary_values {
                        if m == 0 || n_t == 0 || n_r == 0 || m_ary == 0 {
                            return Err(anyhow!("config error: complexity grids must be >= 1"));
                        }
                        let params = ComplexityParams {
                            m_ris: m,
                            n_t,
                            n_r,
                            m_ary,
                        };
                        let ops = detector_complexity(&params, scheme);
                        let _ = writeln!(out, "{label},{m},{n_t},{n_r},{m_ary},{ops}");
                    }
                }
            }
        }
    }
    Ok(vec![OutputFile {
        name: "complexity.csv".to_string(),
        contents: out,
    }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn tiny_run(extra: &str) -> ResolvedRun {
        let json = format!(
            r#"{{"seed": 3, "trials_per_point": 200, "realizations": 100,
                 "bound_realizations": 100,
                 "power_grid_dbm": [0.0, 10.0]{extra}}}"#
        );
        RunConfig::from_json(&json).unwrap().resolve().unwrap()
    }

    #[test]
    fn geometry_csv_contains_reference_row() {
        let run = tiny_run("");
        let files = cmd_geometry(&run).unwrap();
        let csv = &files[0].contents;
        let row = csv
            .lines()
            .find(|l| l.starts_with("100,2.5,100,"))
            .expect("default grid covers N_t=100, d=2.5, M=100");
        let delta: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!((delta - 0.195_982_816_25).abs() < 1e-9);
    }

    #[test]
    fn geometry_delta_decreases_down_an_nt_slice() {
        let run = tiny_run("");
        let csv = cmd_geometry(&run).unwrap().remove(0).contents;
        let mut deltas = Vec::new();
        for line in csv.lines().skip(2) {
            let f: Vec<&str> = line.split(',').collect();
            if f[1] == "2.5" && f[2] == "100" {
                deltas.push((f[0].parse::<u64>().unwrap(), f[5].parse::<f64>().unwrap()));
            }
        }
        deltas.sort_by_key(|d| d.0);
        assert!(deltas.len() >= 3);
        for pair in deltas.windows(2) {
            assert!(pair[1].1 < pair[0].1);
        }
    }

    #[test]
    fn geometry_empty_grid_gives_header_only() {
        let run = tiny_run(
            r#", "geometry": {"bs_axis_counts": [], "distances_m": [], "sub_ris_axis_counts": []}"#,
        );
        let csv = cmd_geometry(&run).unwrap().remove(0).contents;
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn complexity_reference_pair() {
        let run = tiny_run("");
        let csv = cmd_complexity(&run).unwrap().remove(0).contents;
        assert!(csv.contains("semi_passive,100,100,1,2,2020000"));
        assert!(csv.contains("plug_in,100,100,1,2,200"));
    }

    #[test]
    fn sweep_commands_are_deterministic() {
        let run = tiny_run("");
        for cmd in [cmd_aber, cmd_rate, cmd_ee] {
            let a = cmd(&run).unwrap();
            let b = cmd(&run).unwrap();
            assert_eq!(a[0].contents, b[0].contents);
        }
    }

    #[test]
    fn aber_csv_groups_all_schemes() {
        let run = tiny_run(r#", "schemes": ["plug_in_k2", "plug_in_k4", "semi_passive_10x10"]"#);
        let csv = cmd_aber(&run).unwrap().remove(0).contents;
        for label in ["plug_in_k2", "plug_in_k4", "semi_passive_10x10"] {
            assert_eq!(
                csv.lines().filter(|l| l.contains(label)).count(),
                2,
                "two grid points per scheme"
            );
        }
    }
}

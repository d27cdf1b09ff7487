//! Cross-module checks of the public API: the engine's contracted scalar
//! path against the explicit matrix pipeline, ABER behaviour over a power
//! sweep, and simulation-vs-bound consistency at desk scale.

use ris_sim::channel::{effective_channel, los_channel};
use ris_sim::link::{dbm_to_watts, ml_detect, received_symbol, BeamformerPair};
use ris_sim::sim::{
    draw_channel, preset_scenario, run_aber_sweep, run_trial, scheme_profile, segment_beams,
    Scheme, StreamKey, SweepConfig, TrialStreams,
};

/// The detector outcome of `run_trial` must match a transmission through
/// the explicitly assembled matrices `R Psi G` with the same noise stream.
#[test]
fn trial_outcomes_match_explicit_matrix_route() {
    for scheme in [
        Scheme::PlugIn {
            beams: segment_beams(4).unwrap(),
        },
        Scheme::SemiPassive { n_x: 10, n_y: 10 },
        Scheme::Blind { n_x: 12, n_y: 8 },
    ] {
        let scenario = preset_scenario("indoor_office")
            .unwrap()
            .with_scheme(scheme);
        let geom = scenario.scheme.ris_geometry(&scenario).unwrap();
        let budget = scenario.budget(dbm_to_watts(5.0));
        for trial in 0..40u64 {
            let symbol = (trial % 2) as usize;
            let fast =
                run_trial(&scenario, budget.tx_power_w, symbol, &mut TrialStreams::derive(31, 0, trial));

            let mut streams = TrialStreams::derive(31, 0, trial);
            let draw = draw_channel(&scenario, &mut streams.channel);
            let (profile, _) = scheme_profile(&scenario, &draw, &mut streams.profile);
            let g = los_channel(&scenario.bs, &geom, draw.alpha, draw.tx_aod, draw.ris_aoa)
                .unwrap();
            let r = los_channel(&geom, &scenario.ue, draw.beta, draw.ris_aod, draw.ue_aoa)
                .unwrap();
            let h = effective_channel(&r, &profile, &g).unwrap();
            let bf =
                BeamformerPair::matched(&scenario.bs, &scenario.ue, draw.tx_aod, draw.ue_aoa)
                    .unwrap();
            let s = scenario.constellation.points()[symbol];
            let y = received_symbol(&h, &bf, s, &budget, &mut streams.noise).unwrap();
            let detected = ml_detect(y, &h, &bf, &budget, &scenario.constellation).unwrap();
            assert_eq!(
                fast.detected,
                detected,
                "scheme {} trial {trial}",
                scenario.scheme.label()
            );
        }
    }
}

#[test]
fn aber_is_monotone_in_power_within_noise() {
    let scenario = preset_scenario("indoor_office")
        .unwrap()
        .with_scheme(Scheme::PlugIn {
            beams: segment_beams(2).unwrap(),
        });
    let grid: Vec<f64> = (-6..=5).map(|i| i as f64 * 5.0).collect();
    let config = SweepConfig {
        trials_per_point: 20_000,
        realizations: 100,
        bound_realizations: 100,
    };
    let result = run_aber_sweep(&scenario, &grid, &config, 13);
    for pair in result.points.windows(2) {
        let (a0, se0) = (pair[0].aber.unwrap(), pair[0].aber_stderr.unwrap());
        let (a1, se1) = (pair[1].aber.unwrap(), pair[1].aber_stderr.unwrap());
        assert!(
            a1 <= a0 + 2.0 * (se0 + se1),
            "ABER rose from {a0:.3e} to {a1:.3e} between {} and {} dBm",
            pair[0].power_dbm,
            pair[1].power_dbm
        );
        assert!((0.0..=1.0).contains(&a1));
    }
}

/// For BPSK the union bound coincides with the true ABER, so simulation and
/// bound must agree within combined Monte Carlo noise at every probed power.
#[test]
fn simulation_tracks_union_bound() {
    let scenario = preset_scenario("indoor_office")
        .unwrap()
        .with_scheme(Scheme::SemiPassive { n_x: 10, n_y: 10 });
    let config = SweepConfig {
        trials_per_point: 50_000,
        realizations: 100,
        bound_realizations: 50_000,
    };
    let result = run_aber_sweep(&scenario, &[-10.0, -4.0, 2.0], &config, 5);
    for p in &result.points {
        let aber = p.aber.unwrap();
        let bound = p.union_bound.unwrap();
        let noise = p.aber_stderr.unwrap() + p.union_bound_stderr.unwrap();
        assert!(
            (aber - bound).abs() <= 4.0 * noise,
            "at {} dBm: aber {aber:.3e} vs bound {bound:.3e} (noise {noise:.1e})",
            p.power_dbm
        );
        assert!(bound >= aber - 2.0 * noise);
    }
}

/// Union-bound population and trial population are driven by separate
/// stream branches: changing the trial count must not change the bound.
#[test]
fn bound_population_is_independent_of_trial_count() {
    let scenario = preset_scenario("street_canyon")
        .unwrap()
        .with_scheme(Scheme::Blind { n_x: 20, n_y: 10 });
    let less = SweepConfig {
        trials_per_point: 1_000,
        realizations: 100,
        bound_realizations: 2_000,
    };
    let more = SweepConfig {
        trials_per_point: 5_000,
        ..less
    };
    let a = run_aber_sweep(&scenario, &[0.0], &less, 9);
    let b = run_aber_sweep(&scenario, &[0.0], &more, 9);
    assert_eq!(a.points[0].union_bound, b.points[0].union_bound);
    let key = StreamKey::root(9);
    assert_eq!(key.child(0), StreamKey::root(9).child(0));
}

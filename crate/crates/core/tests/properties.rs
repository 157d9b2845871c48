use num_complex::Complex64;
use proptest::prelude::*;

use nuclear_teleport::bell_basis::{bell_projector, BellOutcome};
use nuclear_teleport::expsim::{
    asymmetry, causal_filter, coincidence_match, generate_event, is_causally_separated, proton_speed, EventRecord,
    ExperimentSetup, GeometryConfig, PolarizedTarget, Stamp,
};
use nuclear_teleport::rng::stream;
use nuclear_teleport::scattering::{bell_coefficients, bell_weights, build_f_bell, build_f_invariant, InvariantAmplitudes, ScatterFrame};
use nuclear_teleport::spin_core::{rotation, spatial_rotation, SpinState, UnitVector3};
use nuclear_teleport::teleport::{run_protocol_with, Trial, UnknownState};

fn outcome() -> impl Strategy<Value = BellOutcome> {
    prop::sample::select(BellOutcome::ALL.to_vec())
}

fn axis() -> impl Strategy<Value = UnitVector3> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(t, p)| UnitVector3::from_polar(t, p))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(r, i)| Complex64::new(r, i))
}

fn two_spin_state() -> impl Strategy<Value = SpinState> {
    prop::collection::vec(complex(), 4)
        .prop_filter("non-null", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| SpinState::normalized(2, v).unwrap())
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn teleport_is_exact_for_every_ancilla(n in axis(), ancilla in outcome(), seed in any::<u64>()) {
        let phi = UnknownState::from_bloch(&n);
        let mut rng = stream(seed, 0, 0);
        match run_protocol_with(&phi, ancilla, None, &mut rng).unwrap() {
            Trial::Completed(rec) => prop_assert!(rec.fidelity > 1.0 - 1e-12),
            Trial::Discarded => prop_assert!(false, "ideal measurement discarded"),
        }
    }

    #[test]
    fn filtered_teleport_is_exact_when_it_fires(n in axis(), ancilla in outcome(), filter in outcome(), seed in any::<u64>()) {
        let phi = UnknownState::from_bloch(&n);
        let f = bell_projector(filter);
        let mut rng = stream(seed, 0, 0);
        if let Trial::Completed(rec) = run_protocol_with(&phi, ancilla, Some(&f), &mut rng).unwrap() {
            prop_assert_eq!(rec.outcome, filter);
            prop_assert!(rec.fidelity > 1.0 - 1e-12);
        }
    }

    #[test]
    fn bell_weights_partition_unity(s in two_spin_state()) {
        let w = bell_weights(&s).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn rotation_moves_polarization(n in axis(), r_axis in axis(), angle in -10.0..10.0f64) {
        let u = rotation(&r_axis, angle).unwrap();
        prop_assert!(u.is_unitary(1e-12));
        let rotated = u.apply_normalized(&SpinState::polarized(&n)).unwrap();
        let want = n.rotated(&spatial_rotation(&r_axis, angle));
        let got = rotated.bloch_vector().unwrap();
        for (g, w) in got.iter().zip(want.to_array()) {
            prop_assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn scattering_forms_agree(v in prop::collection::vec(complex(), 6)) {
        let amps = InvariantAmplitudes::from_array([v[0], v[1], v[2], v[3], v[4], v[5]]);
        let inv = build_f_invariant(&amps, &ScatterFrame::CANONICAL).unwrap();
        prop_assert!(inv.max_abs_diff(&build_f_bell(&bell_coefficients(&amps))) < 1e-12 * 20.0);
    }

    #[test]
    fn asymmetry_is_bounded(l in 0u64..10_000, r in 0u64..10_000) {
        prop_assume!(l + r > 0);
        let a = asymmetry(l, r).unwrap();
        prop_assert!(a.epsilon.abs() <= 1.0 && a.sigma >= 0.0);
    }

    #[test]
    fn matching_respects_window_and_uniqueness(
        mut t1 in prop::collection::vec(0.0..100.0f64, 0..40),
        mut t2 in prop::collection::vec(0.0..100.0f64, 0..40),
        window in 0.01..3.0f64,
    ) {
        t1.sort_by(f64::total_cmp);
        t2.sort_by(f64::total_cmp);
        let s1: Vec<Stamp> = t1.iter().enumerate().map(|(i, &t)| Stamp { event_id: i as u64, time: t }).collect();
        let s2: Vec<Stamp> = t2.iter().enumerate().map(|(i, &t)| Stamp { event_id: i as u64, time: t }).collect();
        let m = coincidence_match(&s1, &s2, window).unwrap();
        let mut used1 = vec![false; s1.len()];
        let mut used2 = vec![false; s2.len()];
        for &(i, j) in &m.pairs {
            prop_assert!((t1[i] - t2[j]).abs() <= window);
            prop_assert!(!used1[i] && !used2[j]);
            used1[i] = true;
            used2[j] = true;
        }
        // maximality: no unmatched pair lies inside the window
        for (i, a) in t1.iter().enumerate() {
            for (j, b) in t2.iter().enumerate() {
                prop_assert!(used1[i] || used2[j] || (a - b).abs() > window);
            }
        }
        prop_assert_eq!(m, coincidence_match(&s1, &s2, window).unwrap());
    }

    #[test]
    fn causal_filter_is_set_arithmetic(dts in prop::collection::vec(-1e-7..1e-7f64, 1..60), sep in 0.5..30.0f64) {
        let geometry = GeometryConfig { f1: [0.0, 0.0, 0.0], f2: [sep, 0.0, 0.0], lh2_target: [0.0, 9.0, 0.0], ..GeometryConfig::default() };
        let events: Vec<EventRecord> = dts
            .iter()
            .enumerate()
            .map(|(i, &dt)| EventRecord {
                event_id: i as u64,
                t_start: 0.0,
                t_ph2: 0.0,
                t_k: 0.0,
                t_f1: Some(1e-6),
                t_f2: Some(1e-6 + dt),
                outcome: None,
                side: None,
                normal_index: 0,
                causal_separated: false,
                accepted: false,
            })
            .collect();
        let kept = causal_filter(&events, &geometry);
        prop_assert_eq!(causal_filter(&kept, &geometry), kept.clone());
        let mut reversed = events.clone();
        reversed.reverse();
        let mut kept_rev: Vec<u64> = causal_filter(&reversed, &geometry).iter().map(|e| e.event_id).collect();
        kept_rev.sort_unstable();
        prop_assert_eq!(kept.iter().map(|e| e.event_id).collect::<Vec<_>>(), kept_rev);
        for e in &events {
            let inside = kept.iter().any(|k| k.event_id == e.event_id);
            let dt = e.t_f1.unwrap() - e.t_f2.unwrap();
            prop_assert_eq!(inside, is_causally_separated(sep, dt));
        }
    }

    #[test]
    fn leg_times_match_path_lengths(
        ph2 in prop::array::uniform3(-20.0..-1.0f64),
        k in prop::array::uniform3(1.0..20.0f64),
        energy in 1.0..900.0f64,
        id in 0u64..1000,
    ) {
        let geometry = GeometryConfig {
            ph2_target: ph2,
            analyzer: k,
            f1: [ph2[0], ph2[1] + 2.0, ph2[2]],
            f2: [k[0], k[1] + 3.0, k[2]],
            beam_energy_mev: energy,
            ..GeometryConfig::default()
        };
        let setup = ExperimentSetup { geometry: geometry.clone(), ..ExperimentSetup::default() };
        let target = PolarizedTarget::from_bloch(&UnitVector3::Z);
        let mut rng = stream(id, 0, 0);
        let e = generate_event(&setup, &target, &bell_projector(BellOutcome::PsiMinus), id, &mut rng).unwrap();
        let v = proton_speed(energy);
        let path1 = dist(geometry.lh2_target, ph2) + 2.0;
        let path2 = dist(geometry.lh2_target, k) + 3.0;
        let (t1, t2) = (e.t_f1.unwrap() - e.t_start, e.t_f2.unwrap() - e.t_start);
        prop_assert!(e.t_ph2 >= e.t_start && e.t_k >= e.t_start);
        prop_assert!((t1 - path1 / v).abs() <= 1e-9 * path1 / v);
        prop_assert!((t2 - path2 / v).abs() <= 1e-9 * path2 / v);
    }
}

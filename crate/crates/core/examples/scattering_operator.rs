//! The two-nucleon scattering operator in invariant and Bell-projector form,
//! the registration condition and an identical-nucleon amplitude table.
//!
//! Run with `cargo run --example scattering_operator`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use nuclear_teleport::bell_basis::{bell_ket, BellOutcome};
use nuclear_teleport::rng::stream;
use nuclear_teleport::scattering::{
    bell_coefficients, build_f_bell, build_f_invariant, f_at_90_from_table, registration_condition, scatter_filter,
    AmplitudeTable, FilterResult, InvariantAmplitudes, ScatterFrame,
};
use nuclear_teleport::spin_core::SpinState;

fn main() -> nuclear_teleport::Result<()> {
    let mut rng = stream(1, 0, 0);
    let amps = InvariantAmplitudes::random(&mut rng);
    let coeffs = bell_coefficients(&amps);
    let f_inv = build_f_invariant(&amps, &ScatterFrame::CANONICAL)?;
    let f_bell = build_f_bell(&coeffs);
    println!("random amplitudes: invariant vs Bell form residual {:.1e}", f_inv.max_abs_diff(&f_bell));
    for o in BellOutcome::ALL {
        println!("  coefficient on {o:<9} {:.4}", coeffs.coefficient(o));
    }

    // only the singlet channel survives: the scattering acts as a Ψ− filter
    let singlet_only = InvariantAmplitudes {
        a: Complex64::new(0.25, 0.0),
        b: Complex64::new(-1.0, 0.0),
        c: Complex64::new(-1.0, 0.0),
        d: Complex64::new(-1.0, 0.0),
        ..InvariantAmplitudes::default()
    };
    let c = bell_coefficients(&singlet_only);
    println!("\nsinglet filter registers Ψ−: {}", registration_condition(&c, BellOutcome::PsiMinus, 1e-9));
    let filter = build_f_bell(&c);
    let input = SpinState::up().tensor(&SpinState::down())?;
    match scatter_filter(&input, &filter, &mut rng)? {
        FilterResult::Detected { outcome, probability, .. } => {
            println!("↑↓ through the filter: detected {outcome} with probability {probability:.3}")
        }
        FilterResult::NoEvent => println!("↑↓ through the filter: no event"),
    }
    let blocked = scatter_filter(&bell_ket(BellOutcome::PhiPlus), &filter, &mut rng)?;
    println!("Φ+ through the filter: {}", if matches!(blocked, FilterResult::NoEvent) { "no event" } else { "detected" });

    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/amplitudes/nn_symmetric.dat"))
        .expect("bundled amplitude table");
    let table = nuclear_teleport::cli::amplitude_file::parse(&text).expect("well-formed table");
    let report = table.check_identical_nucleons();
    println!(
        "\nidentical-nucleon table: {} rows, {} mirror pairs, max residual {:.1e}, passed {}",
        table.rows().len(),
        report.pairs_checked,
        report.max_residual,
        report.passed()
    );
    let reduced = f_at_90_from_table(&table)?;
    let full = build_f_invariant(&table.at(FRAC_PI_2), &ScatterFrame::CANONICAL)?;
    println!("reduced 90° form residual {:.1e}", reduced.max_abs_diff(&full));

    let mut bad = AmplitudeTable::rows(&table).to_vec();
    bad[3].1.f = Complex64::new(0.1, 0.0);
    let bad = AmplitudeTable::new(bad, true)?;
    for v in bad.check_identical_nucleons().violations {
        println!("  {v}");
    }
    Ok(())
}

//! One run of the teleportation protocol, step by step, then a batch.
//!
//! Run with `cargo run --example teleport_protocol`.

use nuclear_teleport::bell_basis::BellOutcome;
use nuclear_teleport::rng::stream;
use nuclear_teleport::spin_core::UnitVector3;
use nuclear_teleport::teleport::{
    bell_branches, bell_measure_13, compose_three, fidelity, make_epr, pre_message_density, run_batch, UnknownState,
};

fn main() -> nuclear_teleport::Result<()> {
    let mut rng = stream(2024, 0, 0);
    let phi = UnknownState::from_bloch(&UnitVector3::normalize(0.3, -0.5, 0.8)?);
    println!("input state φ = {}", phi.state());

    let register = compose_three(&phi, &make_epr(BellOutcome::PsiMinus))?;
    println!("\nBell branches of particles 1 and 3:");
    for (o, (p, state)) in BellOutcome::ALL.iter().zip(bell_branches(&register)?) {
        println!("  {o:<9} p = {p:.3}  particle 2 = {}", state.map(|s| s.to_string()).unwrap_or_default());
    }

    let rho = pre_message_density(&phi, BellOutcome::PsiMinus)?;
    println!("\nparticle 2 before the message: [[{:.3}, {:.3}], [{:.3}, {:.3}]]", rho[0][0], rho[0][1], rho[1][0], rho[1][1]);

    let measured = bell_measure_13(&register, &mut rng)?;
    println!("\nmeasured {} (p = {:.3}); message code {:02b}", measured.message.outcome, measured.probability, measured.message.outcome.code());
    let corrected = measured.receiver.correct(&measured.message);
    println!("after correction: {}", corrected.output);
    println!("fidelity with φ: {:.15}", fidelity(&phi.state(), &corrected.output));

    for ancilla in [BellOutcome::PsiMinus, BellOutcome::PhiPlus] {
        let batch = run_batch(&phi, ancilla, None, 20_000, 7)?;
        println!(
            "\nbatch with {ancilla} ancilla: histogram {:?}, min fidelity {:.15}",
            batch.histogram, batch.min_fidelity
        );
    }
    Ok(())
}

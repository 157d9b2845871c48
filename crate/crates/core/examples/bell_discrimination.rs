//! Identifying which Bell state a source emits from repeated spin
//! measurements on many copies.
//!
//! Run with `cargo run --example bell_discrimination`.

use nuclear_teleport::bell_basis::{bell_ket, discriminate_bell, BellOutcome};
use nuclear_teleport::rng::stream;

fn main() -> nuclear_teleport::Result<()> {
    for copies in [1, 2, 8, 64] {
        println!("{copies} copies:");
        for (k, truth) in BellOutcome::ALL.into_iter().enumerate() {
            let mut rng = stream(5, copies as u64, k as u64);
            let trials = 2000;
            let mut correct = 0;
            let mut confidence = 0.0;
            for _ in 0..trials {
                let d = discriminate_bell(std::iter::repeat(bell_ket(truth)), copies, &mut rng)?;
                correct += (d.estimate == truth) as u32;
                confidence = d.confidence;
            }
            println!("  {truth:<9} {correct:>4}/{trials} correct, reported confidence {confidence:.6}");
        }
    }
    Ok(())
}

//! Pairing F-1 and F-2 timestamps and keeping causally separated pairs.
//!
//! Run with `cargo run --example coincidence_causality`.

use nuclear_teleport::expsim::{coincidence_match, is_causally_separated, Stamp, SPEED_OF_LIGHT};

fn main() -> nuclear_teleport::Result<()> {
    let f1 = [
        Stamp { event_id: 0, time: 0.95e-6 },
        Stamp { event_id: 1, time: 1.01e-6 },
        Stamp { event_id: 2, time: 1.04e-6 },
        Stamp { event_id: 3, time: 5.00e-6 },
    ];
    let f2 = [Stamp { event_id: 1, time: 1.00e-6 }, Stamp { event_id: 3, time: 5.002e-6 }];
    let window = 0.1e-6;
    let m = coincidence_match(&f1, &f2, window)?;
    for (i, j) in &m.pairs {
        println!("F-1 #{} (event {}) <-> F-2 #{} (event {}), Δt = {:.1} ns", i, f1[*i].event_id, j, f2[*j].event_id, (f1[*i].time - f2[*j].time) * 1e9);
    }
    println!("unmatched: {} F-1, {} F-2", m.unmatched_f1, m.unmatched_f2);

    println!("\nseparation  Δt        light travel  causally separated");
    for (dx, dt) in [(10.0, 1e-9), (1.0, 1e-6), (20.0, 50e-9), (20.0, 80e-9)] {
        println!("{dx:>6.1} m   {:>7.1} ns  {:>7.1} ns    {}", dt * 1e9, dx / SPEED_OF_LIGHT * 1e9, is_causally_separated(dx, dt));
    }
    Ok(())
}

//! Anticorrelation probability of each Bell state as the common measurement
//! axis tilts away from ẑ, exact and sampled.
//!
//! Run with `cargo run --release --example correlation_scan`.

use nuclear_teleport::bell_basis::{bell_ket, correlation_probability, BellOutcome};
use nuclear_teleport::cli::commands::bellscan_rows;
use nuclear_teleport::cli::RunConfig;
use nuclear_teleport::spin_core::UnitVector3;

fn main() {
    println!("θ (deg)   Ψ−      Ψ+      Φ−      Φ+     (tilt toward x̂)");
    for step in 0..=6 {
        let theta = step as f64 * 15f64.to_radians();
        let n = UnitVector3::from_polar(theta, 0.0);
        let p: Vec<String> = BellOutcome::ALL
            .iter()
            .map(|&o| format!("{:.4}", correlation_probability(&bell_ket(o), &n, &n).unwrap()))
            .collect();
        println!("{:>7.1}   {}", theta.to_degrees(), p.join("  "));
    }

    let mut cfg = RunConfig::default();
    cfg.bellscan.grid_points = 7;
    cfg.bellscan.samples_per_point = 20_000;
    println!("\nΨ+ sampled:  θ      cos²θ     frequency  pull");
    for row in bellscan_rows(&cfg).unwrap() {
        let pull = if row.mc_sigma > 0.0 { (row.mc_frequency - row.analytic) / row.mc_sigma } else { 0.0 };
        println!("          {:.4}  {:.6}  {:.6}   {pull:+.2}", row.theta, row.analytic, row.mc_frequency);
    }
}

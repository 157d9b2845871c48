//! Bell kets, projectors and the collective spin operators in Bell form.
//!
//! Run with `cargo run --example bell_algebra`.

use nuclear_teleport::bell_basis::{
    bell_ket, bell_projector, collective_operator, projector_sum, rotation_permutation, triplet_relations,
    BellOutcome, CartesianAxis, Collective,
};
use nuclear_teleport::spin_core::{difference_spin_component, total_spin_component, SpinOperator, UnitVector3};

fn main() -> nuclear_teleport::Result<()> {
    for o in BellOutcome::ALL {
        println!("{:<9} code {:02b}  {}", o.label(), o.code(), bell_ket(o));
    }

    let unity = projector_sum().max_abs_diff(&SpinOperator::identity(4));
    println!("\nΣ P_k = 1 residual: {unity:.1e}");
    let p = bell_projector(BellOutcome::PhiPlus);
    println!("P_Φ+ idempotent residual: {:.1e}", (&p * &p).max_abs_diff(&p));

    let pairs = [
        ("S_x", Collective::Sx, total_spin_component(&UnitVector3::X)?),
        ("S_y", Collective::Sy, total_spin_component(&UnitVector3::Y)?),
        ("S_z", Collective::Sz, total_spin_component(&UnitVector3::Z)?),
        ("s_z", Collective::DiffZ, difference_spin_component(&UnitVector3::Z)?),
    ];
    println!();
    for (name, which, direct) in pairs {
        let residual = collective_operator(which).max_abs_diff(&direct);
        println!("{name} Bell form vs Pauli sum: {residual:.1e}");
    }

    let triplet = triplet_relations();
    println!("\ntriplet relations hold: {} (residual {:.1e})", triplet.holds(1e-12), triplet.max_residual);

    for axis in [CartesianAxis::X, CartesianAxis::Y, CartesianAxis::Z] {
        let report = rotation_permutation(axis)?;
        let images: Vec<String> =
            report.mapping.iter().map(|(from, to, _)| format!("{from} -> {to}")).collect();
        println!("quarter turn about {axis:?}: {}", images.join(", "));
    }
    Ok(())
}

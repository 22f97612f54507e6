//! Compiles the named gates and prints their truth tables from exact
//! integer contraction.
//!
//! Run with `cargo run --example boolean_gates`.

use mpskit::boolean::{compile_gate, GateKind};
use mpskit::mps::contract_boolean;

fn main() -> mpskit::Result<()> {
    let gates = [
        ("AND", GateKind::And2),
        ("OR", GateKind::Or2),
        ("NOT", GateKind::Not1),
        ("OR3", GateKind::UniversalOr(vec![true; 3])),
        ("X1 & !X2 & X3", GateKind::UniversalAnd(vec![true, false, true])),
        ("PARITY3", GateKind::Parity(3)),
        ("THRESHOLD(3,2)", GateKind::Threshold(3, 2)),
    ];
    for (name, kind) in gates {
        let g = compile_gate(&kind)?;
        let n = kind.arity();
        println!(
            "{name}: bond dims {:?}, {} parameters",
            g.mps.bond_dims(),
            g.mps.parameter_count()
        );
        for row in 0..1usize << n {
            let bits: Vec<bool> = (0..n).map(|i| row >> (n - 1 - i) & 1 == 1).collect();
            let out = contract_boolean(&g.mps, &g.feature_maps, &bits)?[0];
            let shown: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("  {shown} -> {out}");
        }
    }
    Ok(())
}

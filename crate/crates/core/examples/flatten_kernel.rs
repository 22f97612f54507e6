//! Contracts all bonds to expose the one-hidden-layer weights over the
//! product-feature kernel, with monomial names for polynomial and indicator maps.
//!
//! Run with `cargo run --example flatten_kernel`.

use mpskit::boolean::{compile_gate, GateKind};
use mpskit::flatten::{flatten, named_kernel};
use mpskit::mps::{contract, random_mps, FeatureMap, RandomMpsSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mpskit::Result<()> {
    let parity = compile_gate(&GateKind::Parity(3))?;
    let flat = flatten(&parity.mps, &parity.feature_maps)?;
    println!("parity over indicator features:");
    for (name, w) in named_kernel(&flat)?.iter().zip(flat.weights().row(0)) {
        println!("  {w} * {name}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mps = random_mps(&RandomMpsSpec::new(vec![2; 3], 2).label(2), &mut rng)?;
    let fms = vec![FeatureMap::AffineOne; 3];
    let flat = flatten(&mps, &fms)?;
    println!("random chain over [x, 1] features, two labels:");
    for (k, name) in named_kernel(&flat)?.iter().enumerate() {
        println!(
            "  {name:>10}: {:+.4} {:+.4}",
            flat.weights()[[0, k]],
            flat.weights()[[1, k]]
        );
    }
    let x = [0.3, -0.8, 1.2];
    println!(
        "at {x:?}: flat {:?}, chain {:?}",
        flat.pre_activation(&x)?,
        contract(&mps, &fms, &x)?
    );
    Ok(())
}

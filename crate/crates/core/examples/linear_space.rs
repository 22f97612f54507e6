//! Activated MPS form a vector space: sums are block direct sums and
//! scalar multiples can be absorbed by the sigmoid constant.
//!
//! Run with `cargo run --example linear_space`.

use mpskit::algebra::{add, add_shared_kernel, ActivatedMps, ScaleInvariantSigmoid};
use mpskit::mps::{random_mps, FeatureMap, RandomMpsSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(seed: u64, sigma: ScaleInvariantSigmoid) -> mpskit::Result<ActivatedMps> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mps = random_mps(&RandomMpsSpec::new(vec![2; 4], 2).label(3), &mut rng)?;
    ActivatedMps::new(mps, vec![FeatureMap::AffineOne; 4], vec![0.5, -1.0, 0.25], sigma)
}

fn main() -> mpskit::Result<()> {
    let sigma = ScaleInvariantSigmoid::reciprocal_shift(1.0)?;
    let (a, b) = (model(1, sigma)?, model(2, sigma)?);
    let x = [0.1, 0.7, -0.4, 0.9];

    let sum = add(&a, &b)?;
    let shared = add_shared_kernel(&a, &b)?;
    println!("a(x) + b(x)         = {:.12}", a.eval(&x)? + b.eval(&x)?);
    println!(
        "add(a, b)(x)        = {:.12}  bonds {:?}",
        sum.eval(&x)?,
        sum.core().bond_dims()
    );
    println!(
        "shared kernel (x)   = {:.12}  phys {:?}",
        shared.eval(&x)?,
        shared.core().phys_dims()
    );

    let k = 2.5;
    let by_weights = a.scale(k);
    let by_c = a.scale_via_c(k)?;
    println!("k a(x)              = {:.12}", k * a.eval(&x)?);
    println!("scale(a, k)(x)      = {:.12}", by_weights.eval(&x)?);
    println!("scale_via_c(a, k)(x)= {:.12}  C = {}", by_c.eval(&x)?, by_c.sigma().c());
    Ok(())
}

//! Fits sin(2 pi x) with activated MPS of growing label width; the sup
//! error falls as hidden units are added.
//!
//! Run with `cargo run --release --example universal_approximation`.

use mpskit::analysis::{fit_activated_mps, FitConfig, ModelShape, Target};

fn main() -> mpskit::Result<()> {
    let target = Target::from_name(&std::env::args().nth(1).unwrap_or_else(|| "sin".into()))?;
    for d in [2, 8, 32] {
        let cfg = FitConfig {
            target: target.clone(),
            seed: 1,
            model: ModelShape {
                label_dim: d,
                ..ModelShape::default()
            },
            ..FitConfig::default()
        };
        let r = fit_activated_mps(&cfg)?;
        let curve = &r.error_curve;
        println!(
            "D={d:>2}: grad check {:.1e}, loss {:.3e} -> {:.3e}, sup error {:.4}",
            r.grad_check,
            curve[0],
            curve[curve.len() - 1],
            r.sup_error
        );
    }
    Ok(())
}

//! Outputs of wide random MPS approach a Gaussian process: excess kurtosis
//! shrinks with the label width and normality tests start to pass.
//!
//! Run with `cargo run --release --example gp_limit`. Pass `--full` for the
//! default widths up to 2048.

use mpskit::analysis::{run_gp_experiment, variance_check, GpExperimentConfig};

fn main() -> mpskit::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let cfg = if full {
        GpExperimentConfig::default()
    } else {
        GpExperimentConfig {
            widths: vec![4, 32, 256],
            n_samples: 4000,
            bootstrap_resamples: 50,
            ..Default::default()
        }
    };
    let report = run_gp_experiment(&cfg)?;
    print!("{}", report.to_table());
    println!(
        "median |excess kurtosis| strictly decreasing: {}",
        report.median_kurtosis_strictly_decreasing()
    );
    if let Some(d) = report.covariance_drift() {
        println!("covariance drift between the two largest widths: {d:.2} standard errors");
    }
    let v = variance_check(&cfg, 8)?;
    println!(
        "variance at x = 1: {:.4}, predicted from single weights {:.4} ({:.1}% apart)",
        v.output_variance,
        v.predicted,
        100.0 * v.relative_deviation
    );
    Ok(())
}

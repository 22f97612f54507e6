use mpskit::analysis::{
    fit_activated_mps, grad_check, run_gp_experiment, uniform_grid, variance_check, FitConfig, GpExperimentConfig,
    ModelShape, OutputPath, Target,
};
use mpskit::flatten::flatten_activated;
use mpskit::mps::EntryDistribution;

fn gp_small() -> GpExperimentConfig {
    GpExperimentConfig {
        n_sites: 3,
        chi: 2,
        dataset: vec![vec![1.0, 0.5, -1.0], vec![0.0, 1.0, 1.0], vec![-0.5, -1.0, 0.5]],
        n_samples: 4000,
        bootstrap_resamples: 100,
        ..GpExperimentConfig::default()
    }
}

#[test]
fn single_random_site_gives_exact_normal() {
    let base = GpExperimentConfig {
        widths: vec![1],
        n_sites: 4,
        dataset: vec![vec![0.7, -1.0, 0.3, 1.0]],
        n_samples: 10_000,
        bootstrap_resamples: 0,
        ..GpExperimentConfig::default()
    };
    let frozen = GpExperimentConfig {
        frozen_sites: vec![0, 1, 3],
        ..base.clone()
    };
    let w = &run_gp_experiment(&frozen).unwrap().widths[0];
    // Kurtosis standard error at n = 10^4 is about 0.05.
    assert!(w.excess_kurtosis[0].abs() < 0.2, "kurtosis {}", w.excess_kurtosis[0]);
    assert!(w.normality_p[0] > 0.01, "p {}", w.normality_p[0]);
    let free = &run_gp_experiment(&base).unwrap().widths[0];
    assert!(
        free.excess_kurtosis[0] > 1.0,
        "free chain kurtosis {}",
        free.excess_kurtosis[0]
    );
}

#[test]
fn output_variance_is_sum_of_weight_variances() {
    let cfg = GpExperimentConfig {
        n_samples: 20_000,
        ..gp_small()
    };
    for width in [1, 16] {
        let v = variance_check(&cfg, width).unwrap();
        assert!(v.relative_deviation <= 0.05, "width {width}: {v:?}");
    }
}

#[test]
fn covariance_stabilizes_between_largest_widths() {
    let cfg = GpExperimentConfig {
        widths: vec![256, 1024],
        ..gp_small()
    };
    let report = run_gp_experiment(&cfg).unwrap();
    let drift = report.covariance_drift().unwrap();
    assert!(drift <= 3.0, "drift {drift} standard errors");
}

#[test]
fn uniform_entries_reach_the_same_limit() {
    let cfg = GpExperimentConfig {
        widths: vec![4, 64, 1024],
        distribution: EntryDistribution::Uniform,
        n_samples: 10_000,
        bootstrap_resamples: 0,
        ..gp_small()
    };
    let report = run_gp_experiment(&cfg).unwrap();
    assert!(report.median_kurtosis_strictly_decreasing(), "{}", report.to_table());
    assert!(report.widths.last().unwrap().all_normal(0.01), "{}", report.to_table());
}

#[test]
fn gp_report_is_deterministic() {
    let cfg = GpExperimentConfig {
        widths: vec![2, 8],
        n_samples: 600,
        ..gp_small()
    };
    let a = run_gp_experiment(&cfg).unwrap();
    let b = run_gp_experiment(&cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a, b);
}

/// Least-squares `(a, b)` for `y ~ a x + b` via the normal equations.
fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

#[test]
fn affine_fit_recovers_least_squares_weights() {
    let target = Target::Affine { a: vec![1.7], b: -0.4 };
    let grid = uniform_grid(1, 33);
    let xs: Vec<f64> = grid.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = grid.iter().map(|p| target.eval(p)).collect();
    let (a, b) = least_squares_line(&xs, &ys);
    let cfg = FitConfig {
        target,
        grid,
        path: OutputPath::Linear,
        learning_rate: 0.1,
        iterations: 5000,
        seed: 11,
        model: ModelShape {
            label_dim: 2,
            init_std: 0.5,
            out_init_std: 0.5,
            ..ModelShape::default()
        },
        ..FitConfig::default()
    };
    let rec = fit_activated_mps(&cfg).unwrap();
    assert!(rec.sup_error <= 1e-6, "sup error {}", rec.sup_error);
    // Output weights times the flat weight matrix give the coefficients of (x, 1).
    let flat = flatten_activated(&rec.model).unwrap();
    let w = flat.weights();
    let coef: Vec<f64> = (0..2)
        .map(|s| (0..w.nrows()).map(|l| rec.model.out_weights()[l] * w[[l, s]]).sum())
        .collect();
    assert!(
        (coef[0] - a).abs() <= 1e-6 && (coef[1] - b).abs() <= 1e-6,
        "{coef:?} vs ({a}, {b})"
    );
}

#[test]
fn zero_target_with_zero_model_starts_exact() {
    let cfg = FitConfig {
        target: Target::Zero,
        iterations: 5,
        model: ModelShape {
            init_std: 0.0,
            out_init_std: 0.0,
            ..ModelShape::default()
        },
        ..FitConfig::default()
    };
    let rec = fit_activated_mps(&cfg).unwrap();
    assert_eq!(rec.error_curve[0], 0.0);
    assert_eq!(rec.sup_error, 0.0);
}

#[test]
fn default_learning_rate_never_jumps() {
    for (seed, d) in [(0, 2), (1, 8), (2, 32)] {
        let cfg = FitConfig {
            seed,
            iterations: 3000,
            model: ModelShape {
                label_dim: d,
                ..ModelShape::default()
            },
            ..FitConfig::default()
        };
        let rec = fit_activated_mps(&cfg).unwrap();
        assert_eq!(rec.diverged_at, None);
        assert!(rec.error_curve.windows(2).all(|w| w[1] <= 10.0 * w[0]));
        assert!(rec.grad_check <= 1e-4, "grad check {}", rec.grad_check);
    }
}

#[test]
fn grad_check_bounds_and_determinism() {
    let shape = ModelShape {
        n_sites: 3,
        chi: 2,
        label_dim: 4,
        init_std: 0.7,
        out_init_std: 1.0,
        ..ModelShape::default()
    };
    let model = shape.init(5).unwrap();
    let x = [0.3, 0.8, 0.5];
    let linear = grad_check(&model, OutputPath::Linear, &x, 1e-5, 9).unwrap();
    assert!(linear <= 1e-8, "linear path deviation {linear}");
    let a = grad_check(&model, OutputPath::Activated, &x, 1e-5, 9).unwrap();
    let b = grad_check(&model, OutputPath::Activated, &x, 1e-5, 9).unwrap();
    assert!(a <= 1e-4, "activated deviation {a}");
    assert_eq!(a.to_bits(), b.to_bits());
    assert!(grad_check(&model, OutputPath::Linear, &x, 1e-2, 9).is_err());
}

#[test]
fn fit_is_deterministic() {
    let cfg = FitConfig {
        iterations: 200,
        seed: 3,
        ..FitConfig::default()
    };
    let a = fit_activated_mps(&cfg).unwrap();
    let b = fit_activated_mps(&cfg).unwrap();
    assert_eq!(a.error_curve, b.error_curve);
    assert_eq!(a.model, b.model);
}

#[test]
fn gp_report_does_not_depend_on_worker_count() {
    let cfg = GpExperimentConfig {
        widths: vec![3, 12],
        n_samples: 800,
        ..gp_small()
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = single.install(|| run_gp_experiment(&cfg)).unwrap();
    let b = many.install(|| run_gp_experiment(&cfg)).unwrap();
    assert_eq!(a, b);
}

//! Gradient-descent fitting of activated MPS to target functions on a grid.
//!
//! Gradients come from prefix/suffix environments: for a site `i` the
//! derivative of `trace(M_1 ... M_n)` with respect to `M_i[a, b]` is
//! `(M_{i+1} ... M_n M_1 ... M_{i-1})[b, a]`. Only the label site differs
//! between labels, so the environment of every other site is built once
//! from the label-weighted sum of the label-site matrices.

use ndarray::Array2;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{ActivatedMps, ScaleInvariantSigmoid};
use crate::error::{Error, Result};
use crate::mps::{random_mps, EntryDistribution, FeatureMap, RandomMpsSpec};

/// Built-in targets on `[0, 1]^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Target {
    /// `sin(2 pi x1)`.
    Sin,
    /// `exp(-|x - 1/2|^2 / 0.02)`.
    GaussianBump,
    /// `(1 + tanh((x1 - 1/2) / 0.05)) / 2`.
    SmoothStep,
    /// `20 x1 (x1 - 1/2)(x1 - 1)`.
    Polynomial,
    Zero,
    /// `a . x + b`.
    Affine {
        a: Vec<f64>,
        b: f64,
    },
}

impl Target {
    pub fn from_name(name: &str) -> Result<Target> {
        Ok(match name {
            "sin" => Target::Sin,
            "gaussian_bump" => Target::GaussianBump,
            "smooth_step" => Target::SmoothStep,
            "polynomial" => Target::Polynomial,
            "zero" => Target::Zero,
            other => {
                return Err(Error::Config(format!(
                    "unknown target {other:?} (sin, gaussian_bump, smooth_step, polynomial, zero)"
                )))
            }
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let x1 = x[0];
        match self {
            Target::Sin => (2.0 * std::f64::consts::PI * x1).sin(),
            Target::GaussianBump => {
                let r2: f64 = x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum();
                (-r2 / 0.02).exp()
            }
            Target::SmoothStep => 0.5 * (1.0 + ((x1 - 0.5) / 0.05).tanh()),
            Target::Polynomial => 20.0 * x1 * (x1 - 0.5) * (x1 - 1.0),
            Target::Zero => 0.0,
            Target::Affine { a, b } => a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + b,
        }
    }
}

/// How label pre-activations reach the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputPath {
    /// `sum_l w_l sigma(z_l)`.
    #[default]
    Activated,
    /// `sum_l w_l z_l`; the sigmoid is carried but not applied.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelShape {
    pub n_sites: usize,
    pub chi: usize,
    pub label_dim: usize,
    /// One per site; empty means `AffineOne` everywhere.
    pub feature_maps: Vec<FeatureMap>,
    pub sigma: ScaleInvariantSigmoid,
    /// Standard deviation of the initial core entries (0 gives a zero core).
    pub init_std: f64,
    /// Standard deviation of the initial output weights.
    pub out_init_std: f64,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            n_sites: 1,
            chi: 1,
            label_dim: 32,
            feature_maps: vec![],
            sigma: ScaleInvariantSigmoid::scaled_logistic(1.0).expect("valid"),
            init_std: 8.0,
            out_init_std: 0.1,
        }
    }
}

impl ModelShape {
    pub fn feature_maps(&self) -> Vec<FeatureMap> {
        if self.feature_maps.is_empty() {
            vec![FeatureMap::AffineOne; self.n_sites]
        } else {
            self.feature_maps.clone()
        }
    }

    pub fn init(&self, seed: u64) -> Result<ActivatedMps> {
        let fms = self.feature_maps();
        if fms.len() != self.n_sites {
            return Err(Error::Config(format!(
                "{} feature maps for {} sites",
                fms.len(),
                self.n_sites
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = RandomMpsSpec::new(fms.iter().map(FeatureMap::dim).collect(), self.chi)
            .label(self.label_dim)
            .std(self.init_std.max(f64::MIN_POSITIVE));
        let mut core = random_mps(&spec, &mut rng)?;
        if self.init_std == 0.0 {
            for t in core.sites_mut() {
                t.data_mut().fill(0.0);
            }
        }
        let w = (0..self.label_dim)
            .map(|_| EntryDistribution::Normal.sample(&mut rng, self.out_init_std))
            .collect();
        ActivatedMps::new(core, fms, w, self.sigma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub target: Target,
    pub grid: Vec<Vec<f64>>,
    pub model: ModelShape,
    pub path: OutputPath,
    pub learning_rate: f64,
    pub iterations: usize,
    pub seed: u64,
    pub grad_check_eps: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            target: Target::Sin,
            grid: uniform_grid(1, 64),
            model: ModelShape::default(),
            path: OutputPath::Activated,
            learning_rate: 0.05,
            iterations: 20_000,
            seed: 0,
            grad_check_eps: 1e-5,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("grid must be nonempty".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if let Some(p) = self.grid.iter().find(|p| p.len() != self.model.n_sites) {
            return Err(Error::Config(format!(
                "grid point {p:?} does not have {} coordinates",
                self.model.n_sites
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.model.label_dim == 0 || self.model.chi == 0 || self.model.n_sites == 0 {
            return Err(Error::Config("model dimensions must be positive".into()));
        }
        Ok(())
    }
}

/// `points_per_axis^n` points on `[0, 1]^n`, first coordinate slowest.
pub fn uniform_grid(n: usize, points_per_axis: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..points_per_axis)
        .map(|i| {
            if points_per_axis == 1 {
                0.5
            } else {
                i as f64 / (points_per_axis - 1) as f64
            }
        })
        .collect();
    let mut grid = vec![vec![]];
    for _ in 0..n {
        grid = grid
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    grid
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRecord {
    #[serde(skip)]
    pub model: ActivatedMps,
    pub sup_error: f64,
    /// Mean squared error before each update and after the last one.
    pub error_curve: Vec<f64>,
    /// Iteration at which the loss became non-finite or jumped more than 10x.
    pub diverged_at: Option<usize>,
    /// Gradient check result on the initial model.
    pub grad_check: f64,
}

/// Parameter vector: site tensors in chain order, then the output weights.
pub fn parameters(model: &ActivatedMps) -> Vec<f64> {
    let mut p: Vec<f64> = model
        .core()
        .sites()
        .iter()
        .flat_map(|t| t.data().iter().copied())
        .collect();
    p.extend_from_slice(model.out_weights());
    p
}

pub fn set_parameters(model: &mut ActivatedMps, p: &[f64]) -> Result<()> {
    let expected = parameters(model).len();
    if p.len() != expected {
        return Err(Error::shape(format!(
            "{} parameters for a model with {expected}",
            p.len()
        )));
    }
    let mut off = 0;
    for t in model.core_mut().sites_mut() {
        let data = t.data_mut();
        data.copy_from_slice(&p[off..off + data.len()]);
        off += data.len();
    }
    model.out_weights_mut().copy_from_slice(&p[off..]);
    Ok(())
}

fn bond_matrix(t: &crate::mps::SiteTensor, l: usize, phi: &[f64]) -> Array2<f64> {
    Array2::from_shape_fn((t.left_bond(), t.right_bond()), |(a, b)| {
        phi.iter().enumerate().map(|(s, p)| p * t.get(l, s, a, b)).sum()
    })
}

/// Model output at `x` and, if requested, its gradient in [`parameters`] order.
pub fn value_and_gradient(model: &ActivatedMps, path: OutputPath, x: &[f64], grad: Option<&mut [f64]>) -> Result<f64> {
    let core = model.core();
    let n = core.len();
    if x.len() != n {
        return Err(Error::shape(format!("input of length {} for {n} sites", x.len())));
    }
    let k = core.label_site().expect("activated cores are labelled");
    let phis: Vec<Vec<f64>> = model
        .feature_maps()
        .iter()
        .zip(x)
        .map(|(fm, &xi)| fm.eval(xi))
        .collect::<Result<_>>()?;
    let mut mats: Vec<Array2<f64>> = (0..n).map(|i| bond_matrix(core.site(i), 0, &phis[i])).collect();

    // Environment of the label site: E = (M_{k+1} ... M_n)(M_1 ... M_{k-1}).
    let chi0 = core.site(0).left_bond();
    let mut prefix = Array2::eye(chi0);
    for m in &mats[..k] {
        prefix = prefix.dot(m);
    }
    let mut suffix = Array2::eye(core.site(n - 1).right_bond());
    for m in mats[k + 1..].iter().rev() {
        suffix = m.dot(&suffix);
    }
    let env = suffix.dot(&prefix);

    let site_k = core.site(k);
    let d = model.label_dim();
    let w = model.out_weights();
    let sigma = model.sigma();
    let mut value = 0.0;
    let mut coeff = vec![0.0; d];
    let (chi_l, chi_r) = (site_k.left_bond(), site_k.right_bond());
    let block = chi_l * chi_r;
    let data_k = site_k.data();
    let env_t: Vec<f64> = env.t().iter().copied().collect();
    let mut act = vec![0.0; d];
    for l in 0..d {
        let mut z = 0.0;
        for (s, &p) in phis[k].iter().enumerate() {
            let start = site_k.index(l, s, 0, 0);
            z += p * data_k[start..start + block]
                .iter()
                .zip(&env_t)
                .map(|(a, e)| a * e)
                .sum::<f64>();
        }
        let (s, ds) = match path {
            OutputPath::Activated => (sigma.eval(z), sigma.derivative(z)),
            OutputPath::Linear => (z, 1.0),
        };
        value += w[l] * s;
        act[l] = s;
        coeff[l] = w[l] * ds;
    }
    let Some(grad) = grad else {
        return Ok(value);
    };

    let mut offsets = Vec::with_capacity(n);
    let mut off = 0;
    for t in core.sites() {
        offsets.push(off);
        off += t.data().len();
    }
    grad[off..off + d].copy_from_slice(&act);

    for l in 0..d {
        for s in 0..site_k.phys_dim() {
            let p = phis[k][s] * coeff[l];
            let start = offsets[k] + site_k.index(l, s, 0, 0);
            for (g, e) in grad[start..start + block].iter_mut().zip(&env_t) {
                *g = p * e;
            }
        }
    }

    if n > 1 {
        let mut weighted = Array2::zeros((chi_l, chi_r));
        for (l, &c) in coeff.iter().enumerate() {
            weighted = weighted + bond_matrix(site_k, l, &phis[k]) * c;
        }
        mats[k] = weighted;
        let mut prefixes = vec![Array2::eye(chi0)];
        for m in &mats {
            let next = prefixes.last().expect("nonempty").dot(m);
            prefixes.push(next);
        }
        let mut suffix = Array2::eye(core.site(n - 1).right_bond());
        for i in (0..n).rev() {
            if i != k {
                let g = suffix.dot(&prefixes[i]);
                let t = core.site(i);
                for s in 0..t.phys_dim() {
                    for a in 0..t.left_bond() {
                        for b in 0..t.right_bond() {
                            grad[offsets[i] + t.index(0, s, a, b)] = phis[i][s] * g[[b, a]];
                        }
                    }
                }
            }
            suffix = mats[i].dot(&suffix);
        }
    }
    Ok(value)
}

/// Largest relative deviation between analytic and central-difference
/// gradients of the output at `x`, over up to 64 parameters chosen by `seed`.
/// Deviations are relative to `max(|analytic|, |numeric|, 1e-6)`.
pub fn grad_check(model: &ActivatedMps, path: OutputPath, x: &[f64], eps: f64, seed: u64) -> Result<f64> {
    if !(1e-8..=1e-3).contains(&eps) {
        return Err(Error::Precondition(format!("eps must lie in [1e-8, 1e-3], got {eps}")));
    }
    let p0 = parameters(model);
    let mut analytic = vec![0.0; p0.len()];
    value_and_gradient(model, path, x, Some(&mut analytic))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, p0.len(), p0.len().min(64));
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for i in picks {
        let mut p = p0.clone();
        p[i] = p0[i] + eps;
        set_parameters(&mut probe, &p)?;
        let up = value_and_gradient(&probe, path, x, None)?;
        p[i] = p0[i] - eps;
        set_parameters(&mut probe, &p)?;
        let down = value_and_gradient(&probe, path, x, None)?;
        let numeric = (up - down) / (2.0 * eps);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

fn loss_and_gradient(
    model: &ActivatedMps,
    cfg: &FitConfig,
    targets: &[f64],
    grad: &mut [f64],
    scratch: &mut [f64],
) -> Result<f64> {
    grad.fill(0.0);
    let scale = 2.0 / cfg.grid.len() as f64;
    let mut loss = 0.0;
    for (x, &t) in cfg.grid.iter().zip(targets) {
        scratch.fill(0.0);
        let r = value_and_gradient(model, cfg.path, x, Some(scratch))? - t;
        loss += r * r;
        for (g, s) in grad.iter_mut().zip(scratch.iter()) {
            *g += scale * r * s;
        }
    }
    Ok(loss / cfg.grid.len() as f64)
}

pub fn sup_error(model: &ActivatedMps, path: OutputPath, target: &Target, grid: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in grid {
        let v = value_and_gradient(model, path, x, None)?;
        worst = worst.max((v - target.eval(x)).abs());
    }
    Ok(worst)
}

pub fn fit_activated_mps(cfg: &FitConfig) -> Result<FitRecord> {
    cfg.validate()?;
    let mut model = cfg.model.init(cfg.seed)?;
    let check = grad_check(
        &model,
        cfg.path,
        &cfg.grid[cfg.grid.len() / 2],
        cfg.grad_check_eps,
        cfg.seed,
    )?;
    let targets: Vec<f64> = cfg.grid.iter().map(|x| cfg.target.eval(x)).collect();
    let mut params = parameters(&model);
    let mut grad = vec![0.0; params.len()];
    let mut scratch = vec![0.0; params.len()];
    let mut curve = Vec::with_capacity(cfg.iterations + 1);
    let mut diverged_at = None;
    for it in 0..=cfg.iterations {
        let loss = loss_and_gradient(&model, cfg, &targets, &mut grad, &mut scratch)?;
        let jumped = curve.last().is_some_and(|&prev: &f64| loss > 10.0 * prev && prev > 0.0);
        if !loss.is_finite() || jumped {
            log::warn!("fit diverged at iteration {it} (loss {loss})");
            curve.push(loss);
            diverged_at = Some(it);
            break;
        }
        curve.push(loss);
        if it == cfg.iterations {
            break;
        }
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
        set_parameters(&mut model, &params)?;
    }
    let sup = if diverged_at.is_some() {
        f64::NAN
    } else {
        sup_error(&model, cfg.path, &cfg.target, &cfg.grid)?
    };
    Ok(FitRecord {
        model,
        sup_error: sup,
        error_curve: curve,
        diverged_at,
        grad_check: check,
    })
}

/// Output of a model on the chosen path.
pub fn eval_path(model: &ActivatedMps, path: OutputPath, x: &[f64]) -> Result<f64> {
    value_and_gradient(model, path, x, None)
}

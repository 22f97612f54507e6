//! Monte-Carlo check of the Gaussian-process limit of wide random MPS.
//!
//! A model of width `D` is `D` independent open chains with i.i.d. entries,
//! read out as `(1/sqrt D) * sum_l Psi_l(x)`. Each sample draws a fresh
//! model; the report tracks how far the output marginals are from normal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{covariance, median, moments, normal_test};
use crate::error::{Error, Result};
use crate::mps::{EntryDistribution, FeatureMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpExperimentConfig {
    pub widths: Vec<usize>,
    pub n_sites: usize,
    pub chi: usize,
    /// One per site; an empty list means `AffineOne` everywhere.
    pub feature_maps: Vec<FeatureMap>,
    pub dataset: Vec<Vec<f64>>,
    pub n_samples: usize,
    pub seed: u64,
    pub init_std: f64,
    pub distribution: EntryDistribution,
    /// Sites whose tensors are drawn once and shared by every chain and sample.
    pub frozen_sites: Vec<usize>,
    pub bootstrap_resamples: usize,
}

impl Default for GpExperimentConfig {
    fn default() -> Self {
        GpExperimentConfig {
            widths: vec![8, 64, 512, 2048],
            n_sites: 5,
            chi: 2,
            feature_maps: vec![],
            dataset: vec![
                vec![1.0, 1.0, 1.0, 1.0, 1.0],
                vec![-1.0, 0.5, 1.0, -0.5, 1.0],
                vec![0.0, 1.0, -1.0, 1.0, 0.0],
                vec![0.5, -1.0, 0.0, 1.0, -1.0],
            ],
            n_samples: 10_000,
            seed: 2024,
            init_std: 1.0,
            distribution: EntryDistribution::Normal,
            frozen_sites: vec![],
            bootstrap_resamples: 200,
        }
    }
}

impl GpExperimentConfig {
    pub fn feature_maps(&self) -> Vec<FeatureMap> {
        if self.feature_maps.is_empty() {
            vec![FeatureMap::AffineOne; self.n_sites]
        } else {
            self.feature_maps.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.widths.is_empty() || self.widths.contains(&0) {
            return bad("widths must be a nonempty list of positive integers".into());
        }
        if self.widths.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("widths must be strictly ascending, got {:?}", self.widths));
        }
        if self.n_sites == 0 || self.chi == 0 {
            return bad("n_sites and chi must be positive".into());
        }
        if self.n_samples < 500 {
            return bad(format!("n_samples must be at least 500, got {}", self.n_samples));
        }
        if self.dataset.is_empty() || self.dataset.len() > 16 {
            return bad(format!("dataset needs 1..=16 points, got {}", self.dataset.len()));
        }
        if let Some(p) = self.dataset.iter().find(|p| p.len() != self.n_sites) {
            return bad(format!(
                "dataset point {p:?} does not have {} coordinates",
                self.n_sites
            ));
        }
        if !(self.init_std > 0.0 && self.init_std.is_finite()) {
            return bad(format!("init_std must be positive, got {}", self.init_std));
        }
        let fms = self.feature_maps();
        if fms.len() != self.n_sites {
            return bad(format!("{} feature maps for {} sites", fms.len(), self.n_sites));
        }
        for fm in &fms {
            fm.validate()?;
        }
        if let Some(&s) = self.frozen_sites.iter().find(|&&s| s >= self.n_sites) {
            return bad(format!("frozen site {s} out of range"));
        }
        for (i, a) in self.dataset.iter().enumerate() {
            if self.dataset[..i].contains(a) {
                log::warn!("dataset point {i} duplicates an earlier point");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthReport {
    pub width: usize,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub skewness: Vec<f64>,
    pub excess_kurtosis: Vec<f64>,
    pub normality_p: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Bootstrap standard errors of `covariance`.
    pub covariance_se: Vec<Vec<f64>>,
}

impl WidthReport {
    pub fn median_abs_kurtosis(&self) -> f64 {
        let abs: Vec<f64> = self.excess_kurtosis.iter().map(|k| k.abs()).collect();
        median(&abs)
    }

    pub fn all_normal(&self, alpha: f64) -> bool {
        self.normality_p.iter().all(|&p| p >= alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpReport {
    pub widths: Vec<WidthReport>,
}

impl GpReport {
    pub fn median_kurtosis_strictly_decreasing(&self) -> bool {
        self.widths
            .windows(2)
            .all(|w| w[0].median_abs_kurtosis() > w[1].median_abs_kurtosis())
    }

    /// Largest `|cov_a - cov_b| / sqrt(se_a^2 + se_b^2)` over point pairs for
    /// the two widest models.
    pub fn covariance_drift(&self) -> Option<f64> {
        let [.., a, b] = self.widths.as_slice() else {
            return None;
        };
        let mut worst: f64 = 0.0;
        for i in 0..a.covariance.len() {
            for j in 0..a.covariance.len() {
                let se = (a.covariance_se[i][j].powi(2) + b.covariance_se[i][j].powi(2)).sqrt();
                worst = worst.max((a.covariance[i][j] - b.covariance[i][j]).abs() / se);
            }
        }
        Some(worst)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("width  point  mean        variance    skewness    ex_kurtosis  normality_p\n");
        for w in &self.widths {
            for p in 0..w.mean.len() {
                out.push_str(&format!(
                    "{:<6} {:<6} {:<11.5} {:<11.5} {:<11.5} {:<12.5} {:.4}\n",
                    w.width, p, w.mean[p], w.variance[p], w.skewness[p], w.excess_kurtosis[p], w.normality_p[p]
                ));
            }
        }
        out.push_str("\nwidth  median|ex_kurtosis|\n");
        for w in &self.widths {
            out.push_str(&format!("{:<6} {:.5}\n", w.width, w.median_abs_kurtosis()));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("width,point,mean,variance,skewness,excess_kurtosis,normality_p\n");
        for w in &self.widths {
            for p in 0..w.mean.len() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    w.width, p, w.mean[p], w.variance[p], w.skewness[p], w.excess_kurtosis[p], w.normality_p[p]
                ));
            }
        }
        out
    }
}

/// Tensor shapes of one open chain, stored `[s][a][b]` per site.
struct ChainLayout {
    /// `(offset, phys, left, right)` per site.
    sites: Vec<(usize, usize, usize, usize)>,
    len: usize,
}

impl ChainLayout {
    fn new(phys_dims: &[usize], chi: usize) -> Self {
        let n = phys_dims.len();
        let mut offset = 0;
        let sites = phys_dims
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let left = if i == 0 { 1 } else { chi };
                let right = if i + 1 == n { 1 } else { chi };
                let site = (offset, d, left, right);
                offset += d * left * right;
                site
            })
            .collect();
        ChainLayout { sites, len: offset }
    }

    /// Chain value for per-site feature vectors `phis`; `frozen` overrides sites.
    fn value(
        &self,
        entries: &[f64],
        frozen: &[Option<Vec<f64>>],
        phis: &[Vec<f64>],
        v: &mut Vec<f64>,
        next: &mut Vec<f64>,
    ) -> f64 {
        v.clear();
        v.push(1.0);
        for (i, &(off, d, left, right)) in self.sites.iter().enumerate() {
            let t = match &frozen[i] {
                Some(f) => &f[..],
                None => &entries[off..off + d * left * right],
            };
            next.clear();
            next.resize(right, 0.0);
            for (s, &p) in phis[i].iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let block = &t[s * left * right..(s + 1) * left * right];
                for (a, &va) in v.iter().enumerate() {
                    let w = va * p;
                    for (o, &x) in next.iter_mut().zip(&block[a * right..(a + 1) * right]) {
                        *o += w * x;
                    }
                }
            }
            std::mem::swap(v, next);
        }
        v[0]
    }
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const FROZEN_STREAM: u64 = u64::MAX;

/// Width-`width` samples at points given as per-site feature vectors.
/// Returns `out[point][sample]`.
fn sample_feature_points(
    cfg: &GpExperimentConfig,
    phys_dims: &[usize],
    points: &[Vec<Vec<f64>>],
    width: usize,
    width_index: u64,
) -> Vec<Vec<f64>> {
    let layout = ChainLayout::new(phys_dims, cfg.chi);
    let mut frozen_rng = sample_rng(cfg.seed, FROZEN_STREAM);
    let frozen: Vec<Option<Vec<f64>>> = layout
        .sites
        .iter()
        .enumerate()
        .map(|(i, &(_, d, l, r))| {
            cfg.frozen_sites.contains(&i).then(|| {
                (0..d * l * r)
                    .map(|_| cfg.distribution.sample(&mut frozen_rng, cfg.init_std))
                    .collect()
            })
        })
        .collect();
    let norm = 1.0 / (width as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map_init(
            || (vec![0.0; layout.len], Vec::new(), Vec::new()),
            |(entries, v, next), sample| {
                let mut rng = sample_rng(cfg.seed, (width_index << 40) | sample);
                let mut acc = vec![0.0; points.len()];
                for _ in 0..width {
                    for e in entries.iter_mut() {
                        *e = cfg.distribution.sample(&mut rng, cfg.init_std);
                    }
                    for (a, phis) in acc.iter_mut().zip(points) {
                        *a += layout.value(entries, &frozen, phis, v, next);
                    }
                }
                acc.iter().map(|a| a * norm).collect()
            },
        )
        .collect();
    (0..points.len()).map(|p| rows.iter().map(|r| r[p]).collect()).collect()
}

fn feature_points(cfg: &GpExperimentConfig) -> Result<(Vec<usize>, Vec<Vec<Vec<f64>>>)> {
    let fms = cfg.feature_maps();
    let dims = fms.iter().map(FeatureMap::dim).collect();
    let points = cfg
        .dataset
        .iter()
        .map(|x| {
            fms.iter()
                .zip(x)
                .map(|(fm, &xi)| fm.eval(xi))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((dims, points))
}

/// Raw output samples `out[point][sample]` for one width. The stream layout
/// matches [`run_gp_experiment`] when `width_index` is the width's position.
pub fn sample_outputs(cfg: &GpExperimentConfig, width: usize, width_index: usize) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let (dims, points) = feature_points(cfg)?;
    Ok(sample_feature_points(cfg, &dims, &points, width, width_index as u64))
}

fn bootstrap_covariance_se(samples: &[Vec<f64>], resamples: usize, seed: u64) -> Vec<Vec<f64>> {
    let k = samples.len();
    let n = samples[0].len();
    let mut rng = sample_rng(seed, FROZEN_STREAM - 1);
    let mut sums = vec![vec![0.0; k]; k];
    let mut sq = vec![vec![0.0; k]; k];
    let mut xs = vec![vec![0.0; n]; k];
    for _ in 0..resamples {
        for i in 0..n {
            let j = rng.random_range(0..n);
            for p in 0..k {
                xs[p][i] = samples[p][j];
            }
        }
        for a in 0..k {
            for b in a..k {
                let c = covariance(&xs[a], &xs[b]);
                sums[a][b] += c;
                sq[a][b] += c * c;
            }
        }
    }
    let r = resamples as f64;
    let mut se = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a..k {
            let m = sums[a][b] / r;
            let v = (sq[a][b] / r - m * m).max(0.0) * r / (r - 1.0);
            se[a][b] = v.sqrt();
            se[b][a] = se[a][b];
        }
    }
    se
}

pub fn summarize_width(
    width: usize,
    samples: &[Vec<f64>],
    bootstrap_resamples: usize,
    seed: u64,
) -> Result<WidthReport> {
    let mut r = WidthReport {
        width,
        mean: vec![],
        variance: vec![],
        skewness: vec![],
        excess_kurtosis: vec![],
        normality_p: vec![],
        covariance: vec![],
        covariance_se: vec![],
    };
    for s in samples {
        let m = moments(s)?;
        r.mean.push(m.mean);
        r.variance.push(m.variance);
        r.skewness.push(m.skewness);
        r.excess_kurtosis.push(m.excess_kurtosis);
        r.normality_p.push(normal_test(s)?.p_value);
    }
    r.covariance = samples
        .iter()
        .map(|a| samples.iter().map(|b| covariance(a, b)).collect())
        .collect();
    r.covariance_se = if bootstrap_resamples >= 2 {
        bootstrap_covariance_se(samples, bootstrap_resamples, seed ^ width as u64)
    } else {
        vec![vec![f64::NAN; samples.len()]; samples.len()]
    };
    Ok(r)
}

pub fn run_gp_experiment(cfg: &GpExperimentConfig) -> Result<GpReport> {
    cfg.validate()?;
    let (dims, points) = feature_points(cfg)?;
    let widths = cfg
        .widths
        .iter()
        .enumerate()
        .map(|(wi, &width)| {
            log::info!("gp: sampling width {width}");
            let samples = sample_feature_points(cfg, &dims, &points, width, wi as u64);
            summarize_width(width, &samples, cfg.bootstrap_resamples, cfg.seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GpReport { widths })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceCheck {
    /// Sample variance of the output at `x = (1, ..., 1)`.
    pub output_variance: f64,
    /// `|s|` times the mean sample variance of a single flat weight `W^s`.
    pub predicted: f64,
    pub relative_deviation: f64,
}

/// With `AffineOne` maps at `x = 1` every product feature is 1, so the
/// output is the plain sum of the flat weights `W^s`. Compares the output
/// variance with `|s|` times the variance of one weight.
pub fn variance_check(cfg: &GpExperimentConfig, width: usize) -> Result<VarianceCheck> {
    cfg.validate()?;
    let fms = cfg.feature_maps();
    if fms.iter().any(|f| *f != FeatureMap::AffineOne) {
        return Err(Error::Precondition(
            "variance check needs AffineOne feature maps".into(),
        ));
    }
    let n = cfg.n_sites;
    let dims = vec![2; n];
    let total = 1usize << n;
    // Point 0 is x = 1; the rest are one-hot selectors for each W^s.
    let mut points = vec![vec![vec![1.0, 1.0]; n]];
    for k in 0..total {
        points.push(
            (0..n)
                .map(|i| {
                    let s = (k >> (n - 1 - i)) & 1;
                    if s == 0 {
                        vec![1.0, 0.0]
                    } else {
                        vec![0.0, 1.0]
                    }
                })
                .collect(),
        );
    }
    let samples = sample_feature_points(cfg, &dims, &points, width, 0);
    let output_variance = moments(&samples[0])?.variance;
    let mut mean_var = 0.0;
    for s in &samples[1..] {
        mean_var += moments(s)?.variance;
    }
    mean_var /= total as f64;
    let predicted = total as f64 * mean_var;
    Ok(VarianceCheck {
        output_variance,
        predicted,
        relative_deviation: (output_variance - predicted).abs() / predicted,
    })
}

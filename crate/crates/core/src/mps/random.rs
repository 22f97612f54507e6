use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Boundary, Mps, SiteTensor};
use crate::error::{Error, Result};

/// Zero-mean entry distribution with a given standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryDistribution {
    #[default]
    Normal,
    /// Uniform on `[-sqrt(3) std, sqrt(3) std]`.
    Uniform,
}

impl EntryDistribution {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R, std: f64) -> f64 {
        match self {
            EntryDistribution::Normal => {
                let z: f64 = StandardNormal.sample(rng);
                z * std
            }
            EntryDistribution::Uniform => {
                let half_width = 3f64.sqrt() * std;
                rng.random_range(-half_width..=half_width)
            }
        }
    }
}

/// Shape of a random MPS; entries are i.i.d. from `distribution`.
#[derive(Debug, Clone)]
pub struct RandomMpsSpec {
    pub phys_dims: Vec<usize>,
    /// Interior bond dimension (and end bonds when periodic).
    pub bond_dim: usize,
    /// 0 for no label leg.
    pub label_dim: usize,
    /// Defaults to [`Mps::default_label_site`] when a label leg is requested.
    pub label_site: Option<usize>,
    pub boundary: Boundary,
    pub distribution: EntryDistribution,
    pub std: f64,
}

impl RandomMpsSpec {
    pub fn new(phys_dims: Vec<usize>, bond_dim: usize) -> Self {
        RandomMpsSpec {
            phys_dims,
            bond_dim,
            label_dim: 0,
            label_site: None,
            boundary: Boundary::Open,
            distribution: EntryDistribution::Normal,
            std: 1.0,
        }
    }

    pub fn label(mut self, label_dim: usize) -> Self {
        self.label_dim = label_dim;
        self
    }

    pub fn boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn std(mut self, std: f64) -> Self {
        self.std = std;
        self
    }
}

pub fn random_mps<R: Rng + ?Sized>(spec: &RandomMpsSpec, rng: &mut R) -> Result<Mps> {
    let n = spec.phys_dims.len();
    if n == 0 {
        return Err(Error::shape("random MPS needs at least one site"));
    }
    let label_site = (spec.label_dim > 0).then(|| spec.label_site.unwrap_or_else(|| Mps::default_label_site(n)));
    let end = match spec.boundary {
        Boundary::Open => 1,
        Boundary::Periodic => spec.bond_dim,
    };
    let sites = (0..n)
        .map(|i| {
            let left = if i == 0 { end } else { spec.bond_dim };
            let right = if i + 1 == n { end } else { spec.bond_dim };
            let label = if label_site == Some(i) { spec.label_dim } else { 0 };
            SiteTensor::from_fn(left, spec.phys_dims[i], right, label, |_, _, _, _| {
                spec.distribution.sample(rng, spec.std)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Mps::new(sites, spec.boundary)
}

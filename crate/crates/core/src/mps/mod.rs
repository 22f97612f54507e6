//! Dense matrix product states.
//!
//! A chain of order-3 site tensors `A^{s_i}_{a_i a_{i+1}}`, one of which may
//! carry an extra label leg `l`. Evaluating the chain on an input `x` means
//! contracting every physical leg with its feature vector `phi(x_i)` and
//! multiplying the resulting bond matrices; see [`contract`].

mod contract;
mod feature;
mod random;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use contract::{contract, contract_batch, contract_boolean, contract_features, Sweep};
pub use feature::{FeatureMap, BASIS};
pub use random::{random_mps, EntryDistribution, RandomMpsSpec};

/// One site of the chain.
///
/// Entries are stored row-major over `(label, phys, left, right)`; a tensor
/// without a label leg (`label_dim == 0`) stores a single label slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteTensor {
    left_bond: usize,
    phys_dim: usize,
    right_bond: usize,
    label_dim: usize,
    data: Vec<f64>,
}

impl SiteTensor {
    pub fn new(left_bond: usize, phys_dim: usize, right_bond: usize, label_dim: usize, data: Vec<f64>) -> Result<Self> {
        if left_bond == 0 || phys_dim == 0 || right_bond == 0 {
            return Err(Error::shape(format!(
                "site dimensions must be positive, got ({left_bond}, {phys_dim}, {right_bond})"
            )));
        }
        let expected = label_dim.max(1) * phys_dim * left_bond * right_bond;
        if data.len() != expected {
            return Err(Error::shape(format!(
                "site data has {} entries, expected {expected}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::numeric(format!("non-finite tensor entry {bad}")));
        }
        Ok(SiteTensor {
            left_bond,
            phys_dim,
            right_bond,
            label_dim,
            data,
        })
    }

    pub fn zeros(left_bond: usize, phys_dim: usize, right_bond: usize, label_dim: usize) -> Self {
        let len = label_dim.max(1) * phys_dim * left_bond * right_bond;
        SiteTensor::new(left_bond, phys_dim, right_bond, label_dim, vec![0.0; len])
            .expect("zero tensor with positive dimensions")
    }

    /// Builds a tensor from `f(label, phys, left, right)`.
    pub fn from_fn(
        left_bond: usize,
        phys_dim: usize,
        right_bond: usize,
        label_dim: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(label_dim.max(1) * phys_dim * left_bond * right_bond);
        for l in 0..label_dim.max(1) {
            for s in 0..phys_dim {
                for a in 0..left_bond {
                    for b in 0..right_bond {
                        data.push(f(l, s, a, b));
                    }
                }
            }
        }
        SiteTensor::new(left_bond, phys_dim, right_bond, label_dim, data)
    }

    /// Convenience constructor for a label-free tensor given as
    /// `slices[s][a][b]`.
    pub fn from_slices(slices: &[Vec<Vec<f64>>]) -> Result<Self> {
        let phys = slices.len();
        let left = slices.first().map_or(0, |m| m.len());
        let right = slices.first().and_then(|m| m.first()).map_or(0, |r| r.len());
        for m in slices {
            if m.len() != left || m.iter().any(|r| r.len() != right) {
                return Err(Error::shape("ragged site slices"));
            }
        }
        SiteTensor::from_fn(left, phys, right, 0, |_, s, a, b| slices[s][a][b])
    }

    pub fn left_bond(&self) -> usize {
        self.left_bond
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn right_bond(&self) -> usize {
        self.right_bond
    }

    /// Declared label dimension; 0 means no label leg.
    pub fn label_dim(&self) -> usize {
        self.label_dim
    }

    /// Number of stored label slices, `max(label_dim, 1)`.
    pub fn label_slices(&self) -> usize {
        self.label_dim.max(1)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn index(&self, l: usize, s: usize, a: usize, b: usize) -> usize {
        debug_assert!(l < self.label_slices() && s < self.phys_dim);
        debug_assert!(a < self.left_bond && b < self.right_bond);
        ((l * self.phys_dim + s) * self.left_bond + a) * self.right_bond + b
    }

    #[inline]
    pub fn get(&self, l: usize, s: usize, a: usize, b: usize) -> f64 {
        self.data[self.index(l, s, a, b)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, s: usize, a: usize, b: usize, v: f64) {
        let i = self.index(l, s, a, b);
        self.data[i] = v;
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.fract() == 0.0)
    }

    pub(crate) fn with_label_dim(mut self, label_dim: usize) -> Result<Self> {
        if self.label_slices() != label_dim.max(1) {
            return Err(Error::shape("label dimension change would resize the tensor"));
        }
        self.label_dim = label_dim;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// End bonds have dimension 1.
    Open,
    /// The chain closes with a trace over the first left bond.
    Periodic,
}

/// A validated chain of site tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Mps {
    sites: Vec<SiteTensor>,
    boundary: Boundary,
    label_site: Option<usize>,
}

impl Mps {
    pub fn new(sites: Vec<SiteTensor>, boundary: Boundary) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::shape("an MPS needs at least one site"));
        }
        for (i, pair) in sites.windows(2).enumerate() {
            if pair[0].right_bond != pair[1].left_bond {
                return Err(Error::shape(format!(
                    "bond mismatch between sites {i} and {}: {} vs {}",
                    i + 1,
                    pair[0].right_bond,
                    pair[1].left_bond
                )));
            }
        }
        let first = sites[0].left_bond;
        let last = sites[sites.len() - 1].right_bond;
        match boundary {
            Boundary::Open if first != 1 || last != 1 => {
                return Err(Error::shape(format!(
                    "open boundary needs unit end bonds, got {first} and {last}"
                )))
            }
            Boundary::Periodic if first != last => {
                return Err(Error::shape(format!(
                    "periodic boundary needs matching end bonds, got {first} and {last}"
                )))
            }
            _ => {}
        }
        let labelled: Vec<usize> = sites
            .iter()
            .enumerate()
            .filter(|(_, t)| t.label_dim > 0)
            .map(|(i, _)| i)
            .collect();
        if labelled.len() > 1 {
            return Err(Error::shape(format!(
                "at most one site may carry a label leg, found {labelled:?}"
            )));
        }
        Ok(Mps {
            sites,
            boundary,
            label_site: labelled.first().copied(),
        })
    }

    /// Site index (0-based) of `ceil(n / 2)`, where compilers put the label leg.
    pub fn default_label_site(n: usize) -> usize {
        n.div_ceil(2).saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &SiteTensor {
        &self.sites[i]
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn label_site(&self) -> Option<usize> {
        self.label_site
    }

    /// Length of the output vector: the label dimension, or 1 without a label leg.
    pub fn output_dim(&self) -> usize {
        self.label_site.map_or(1, |i| self.sites[i].label_dim)
    }

    pub fn phys_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|t| t.phys_dim).collect()
    }

    /// Bond dimensions `chi_0 .. chi_n` (left bond of every site plus the final right bond).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.sites.iter().map(|t| t.left_bond).collect();
        dims.push(self.sites[self.sites.len() - 1].right_bond);
        dims
    }

    /// Total number of stored tensor entries.
    pub fn parameter_count(&self) -> usize {
        self.sites.iter().map(|t| t.data.len()).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.sites.iter().all(SiteTensor::is_integral)
    }

    /// Gives a label-free chain a label leg of dimension 1 at `site`.
    pub fn with_unit_label(self, site: usize) -> Result<Self> {
        if let Some(existing) = self.label_site {
            if existing == site {
                return Ok(self);
            }
            return Err(Error::shape(format!("MPS already has a label leg on site {existing}")));
        }
        if site >= self.sites.len() {
            return Err(Error::shape(format!("label site {site} out of range")));
        }
        let mut sites = self.sites;
        let t = sites[site].clone().with_label_dim(1)?;
        sites[site] = t;
        Mps::new(sites, self.boundary)
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [SiteTensor] {
        &mut self.sites
    }

    pub fn into_sites(self) -> Vec<SiteTensor> {
        self.sites
    }

    pub(crate) fn check_feature_maps(&self, fms: &[FeatureMap]) -> Result<()> {
        if fms.len() != self.sites.len() {
            return Err(Error::shape(format!(
                "{} feature maps for {} sites",
                fms.len(),
                self.sites.len()
            )));
        }
        for (i, (fm, t)) in fms.iter().zip(&self.sites).enumerate() {
            fm.validate()?;
            if fm.dim() != t.phys_dim {
                return Err(Error::shape(format!(
                    "site {i}: feature map dim {} vs phys dim {}",
                    fm.dim(),
                    t.phys_dim
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(phys: usize) -> SiteTensor {
        SiteTensor::zeros(1, phys, 1, 0)
    }

    #[test]
    fn data_length_is_checked() {
        assert!(SiteTensor::new(2, 2, 3, 0, vec![0.0; 12]).is_ok());
        assert!(SiteTensor::new(2, 2, 3, 4, vec![0.0; 48]).is_ok());
        assert!(matches!(
            SiteTensor::new(2, 2, 3, 0, vec![0.0; 11]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            SiteTensor::new(1, 1, 1, 0, vec![f64::INFINITY]),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn row_major_layout() {
        let t = SiteTensor::from_fn(2, 3, 4, 2, |l, s, a, b| (l * 1000 + s * 100 + a * 10 + b) as f64).unwrap();
        assert_eq!(t.get(1, 2, 1, 3), 1213.0);
        assert_eq!(t.data()[t.index(1, 2, 1, 3)], 1213.0);
        assert_eq!(t.data()[1], 1.0);
        assert_eq!(t.data()[4], 10.0);
    }

    #[test]
    fn bond_and_boundary_checks() {
        let a = SiteTensor::zeros(1, 2, 3, 0);
        let b = SiteTensor::zeros(2, 2, 1, 0);
        assert!(matches!(
            Mps::new(vec![a.clone(), b], Boundary::Open),
            Err(Error::Shape(_))
        ));
        let b = SiteTensor::zeros(3, 2, 1, 0);
        assert!(Mps::new(vec![a, b], Boundary::Open).is_ok());

        let p = SiteTensor::zeros(2, 2, 2, 0);
        assert!(Mps::new(vec![p.clone(), p.clone()], Boundary::Periodic).is_ok());
        assert!(Mps::new(vec![p.clone(), p], Boundary::Open).is_err());
    }

    #[test]
    fn single_label_leg() {
        let l = SiteTensor::zeros(1, 2, 1, 3);
        let mps = Mps::new(vec![unit(2), l.clone(), unit(2)], Boundary::Open).unwrap();
        assert_eq!(mps.label_site(), Some(1));
        assert_eq!(mps.output_dim(), 3);
        assert!(Mps::new(vec![l.clone(), l], Boundary::Open).is_err());
    }

    #[test]
    fn default_label_site_is_ceil_half() {
        assert_eq!(Mps::default_label_site(1), 0);
        assert_eq!(Mps::default_label_site(2), 0);
        assert_eq!(Mps::default_label_site(3), 1);
        assert_eq!(Mps::default_label_site(4), 1);
        assert_eq!(Mps::default_label_site(5), 2);
    }

    #[test]
    fn unit_label_attachment() {
        let mps = Mps::new(vec![unit(2), unit(2), unit(2)], Boundary::Open).unwrap();
        let labelled = mps.with_unit_label(1).unwrap();
        assert_eq!(labelled.label_site(), Some(1));
        assert_eq!(labelled.output_dim(), 1);
        assert!(labelled.with_unit_label(2).is_err());
    }
}

//! Explicit one-hidden-layer form of an MPS.
//!
//! Contracting every bond index turns a chain into a weight matrix
//! `W[l, s]` over the product basis `Phi^s(x) = prod_i phi^{s_i}(x_i)`. Flat
//! indices enumerate multi-indices lexicographically with site 1 slowest.

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{ActivatedMps, ScaleInvariantSigmoid};
use crate::error::{Error, Result};
use crate::mps::{FeatureMap, Mps};

/// Largest product-basis size [`flatten`] will materialize.
pub const MAX_FLAT_SIZE: u128 = 1 << 20;
/// Largest number of weight entries (`D * S`) [`flatten`] will materialize.
pub const MAX_FLAT_ENTRIES: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatActivation {
    pub sigma: ScaleInvariantSigmoid,
    pub out_weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatNetwork {
    /// `D x S`.
    weights: Array2<f64>,
    phys_dims: Vec<usize>,
    feature_maps: Vec<FeatureMap>,
    activation: Option<FlatActivation>,
}

/// Product of the phys dims, checked against [`MAX_FLAT_SIZE`].
pub fn flat_size(phys_dims: &[usize]) -> Result<usize> {
    let mut s: u128 = 1;
    for &d in phys_dims {
        s = s.saturating_mul(d as u128);
    }
    if s > MAX_FLAT_SIZE {
        return Err(Error::Size {
            what: "flattened kernel size S",
            size: s,
            limit: MAX_FLAT_SIZE,
        });
    }
    Ok(s as usize)
}

/// Flat position of a multi-index (site 1 slowest).
pub fn flat_index(phys_dims: &[usize], multi: &[usize]) -> Result<usize> {
    if multi.len() != phys_dims.len() {
        return Err(Error::shape("multi-index length differs from site count"));
    }
    let mut idx = 0usize;
    for (i, (&s, &d)) in multi.iter().zip(phys_dims).enumerate() {
        if s >= d {
            return Err(Error::shape(format!(
                "component {s} out of range at site {i} (dim {d})"
            )));
        }
        idx = idx * d + s;
    }
    Ok(idx)
}

/// Inverse of [`flat_index`].
pub fn multi_index(phys_dims: &[usize], mut idx: usize) -> Result<Vec<usize>> {
    let total: usize = phys_dims.iter().product();
    if idx >= total {
        return Err(Error::shape(format!("flat index {idx} out of range {total}")));
    }
    let mut out = vec![0; phys_dims.len()];
    for (o, &d) in out.iter_mut().zip(phys_dims).rev() {
        *o = idx % d;
        idx /= d;
    }
    Ok(out)
}

/// Full bond contraction for every `(label, multi-index)`.
pub fn flatten(mps: &Mps, fms: &[FeatureMap]) -> Result<FlatNetwork> {
    mps.check_feature_maps(fms)?;
    let phys_dims = mps.phys_dims();
    let s_total = flat_size(&phys_dims)?;
    let d = mps.output_dim();
    let entries = d as u128 * s_total as u128;
    if entries > MAX_FLAT_ENTRIES {
        return Err(Error::Size {
            what: "flattened weight entries D*S",
            size: entries,
            limit: MAX_FLAT_ENTRIES,
        });
    }

    let n = mps.len();
    // Bond matrices A^{l s}_i for every site, label slice and component.
    let mats: Vec<Vec<Vec<Array2<f64>>>> = mps
        .sites()
        .iter()
        .map(|t| {
            (0..t.label_slices())
                .map(|l| {
                    (0..t.phys_dim())
                        .map(|s| Array2::from_shape_fn((t.left_bond(), t.right_bond()), |(a, b)| t.get(l, s, a, b)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let label_site = mps.label_site();
    let slice = |i: usize, l: usize| if Some(i) == label_site { l } else { 0 };
    let block = s_total / phys_dims[0];

    let rows: Vec<Vec<f64>> = (0..d * phys_dims[0])
        .into_par_iter()
        .map(|job| {
            let (l, s0) = (job / phys_dims[0], job % phys_dims[0]);
            let mut out = Vec::with_capacity(block);
            let mut stack = vec![mats[0][slice(0, l)][s0].clone()];
            let mut multi = vec![0usize; n];
            loop {
                let depth = stack.len();
                if depth == n {
                    out.push(stack[n - 1].diag().sum());
                    // Advance to the next multi-index in lexicographic order.
                    let mut i = n - 1;
                    loop {
                        if i == 0 {
                            return out;
                        }
                        stack.pop();
                        multi[i] += 1;
                        if multi[i] < phys_dims[i] {
                            break;
                        }
                        multi[i] = 0;
                        i -= 1;
                    }
                } else {
                    let next = stack[depth - 1].dot(&mats[depth][slice(depth, l)][multi[depth]]);
                    stack.push(next);
                }
            }
        })
        .collect();

    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let weights = Array2::from_shape_vec((d, s_total), flat).expect("row lengths");
    if weights.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("flattened weights are not finite"));
    }
    Ok(FlatNetwork {
        weights,
        phys_dims,
        feature_maps: fms.to_vec(),
        activation: None,
    })
}

pub fn flatten_activated(a: &ActivatedMps) -> Result<FlatNetwork> {
    let mut f = flatten(a.core(), a.feature_maps())?;
    f.activation = Some(FlatActivation {
        sigma: *a.sigma(),
        out_weights: a.out_weights().to_vec(),
    });
    Ok(f)
}

impl FlatNetwork {
    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn label_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn size(&self) -> usize {
        self.weights.ncols()
    }

    pub fn phys_dims(&self) -> &[usize] {
        &self.phys_dims
    }

    pub fn feature_maps(&self) -> &[FeatureMap] {
        &self.feature_maps
    }

    pub fn activation(&self) -> Option<&FlatActivation> {
        self.activation.as_ref()
    }

    /// Per-site component indices of every kernel slot, in flat order.
    pub fn kernel(&self) -> Vec<Vec<usize>> {
        (0..self.size())
            .map(|k| multi_index(&self.phys_dims, k).expect("in range"))
            .collect()
    }

    /// `Phi^s(x)` as a Kronecker product of per-site feature vectors.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.phys_dims.len() {
            return Err(Error::shape(format!(
                "input of length {} for {} sites",
                x.len(),
                self.phys_dims.len()
            )));
        }
        let mut phi = vec![1.0];
        for (fm, &xi) in self.feature_maps.iter().zip(x) {
            let v = fm.eval(xi)?;
            phi = phi.iter().flat_map(|&p| v.iter().map(move |&q| p * q)).collect();
        }
        Ok(phi)
    }

    /// `sum_s W[l, s] Phi^s(x)` for every label.
    pub fn pre_activation(&self, x: &[f64]) -> Result<Vec<f64>> {
        let phi = ndarray::Array1::from(self.features(x)?);
        Ok(self.weights.dot(&phi).to_vec())
    }

    /// Scalar output: activated and weighted if an activation is attached,
    /// otherwise the single pre-activation.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let pre = self.pre_activation(x)?;
        match &self.activation {
            Some(act) => Ok(act
                .out_weights
                .iter()
                .zip(&pre)
                .map(|(w, &z)| if *w == 0.0 { 0.0 } else { w * act.sigma.eval(z) })
                .sum()),
            None if pre.len() == 1 => Ok(pre[0]),
            None => Err(Error::shape(format!(
                "no activation attached and {} labels; use pre_activation",
                pre.len()
            ))),
        }
    }

    pub fn to_json(&self, with_names: bool) -> Result<String> {
        let doc = FlatDocument {
            kind: "flat_network".into(),
            label_dim: self.label_dim(),
            size: self.size(),
            phys_dims: self.phys_dims.clone(),
            weights: self.weights.iter().copied().collect(),
            kernel: self.kernel(),
            names: if with_names { Some(named_kernel(self)?) } else { None },
            feature_maps: self.feature_maps.clone(),
            activation: self.activation.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct FlatDocument {
    kind: String,
    #[serde(rename = "D")]
    label_dim: usize,
    #[serde(rename = "S")]
    size: usize,
    phys_dims: Vec<usize>,
    weights: Vec<f64>,
    kernel: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    feature_maps: Vec<FeatureMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    activation: Option<FlatActivation>,
}

pub fn evaluate_flat(f: &FlatNetwork, x: &[f64]) -> Result<f64> {
    f.eval(x)
}

/// Monomial name of every kernel slot, e.g. `x1*(1-x2)`.
pub fn named_kernel(f: &FlatNetwork) -> Result<Vec<String>> {
    let factors: Vec<[String; 2]> = f
        .feature_maps
        .iter()
        .enumerate()
        .map(|(i, fm)| {
            let x = format!("x{}", i + 1);
            match fm {
                FeatureMap::AffineOne => Ok([x, "1".into()]),
                FeatureMap::BinaryIndicator => Ok([x.clone(), format!("(1-{x})")]),
                other => Err(Error::UnsupportedNaming(format!(
                    "site {} uses {other:?}, which has no monomial names",
                    i + 1
                ))),
            }
        })
        .collect::<Result<_>>()?;
    Ok(f.kernel()
        .into_iter()
        .map(|multi| {
            let parts: Vec<&str> = multi
                .iter()
                .zip(&factors)
                .map(|(&s, names)| names[s].as_str())
                .filter(|p| *p != "1")
                .collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{Boundary, SiteTensor};

    #[test]
    fn index_round_trip() {
        let dims = [2, 3, 1, 4];
        for k in 0..24 {
            let m = multi_index(&dims, k).unwrap();
            assert_eq!(flat_index(&dims, &m).unwrap(), k);
        }
        assert_eq!(multi_index(&dims, 5).unwrap(), vec![0, 1, 0, 1]);
        assert!(multi_index(&dims, 24).is_err());
    }

    #[test]
    fn size_guard_names_s() {
        let err = flat_size(&[2; 21]).unwrap_err();
        assert!(matches!(err, Error::Size { size, .. } if size == 1 << 21));
        assert_eq!(flat_size(&[2; 20]).unwrap(), 1 << 20);
    }

    #[test]
    fn single_site_names() {
        let mps = Mps::new(
            vec![SiteTensor::new(1, 2, 1, 0, vec![3.0, 4.0]).unwrap()],
            Boundary::Open,
        )
        .unwrap();
        let f = flatten(&mps, &[FeatureMap::AffineOne]).unwrap();
        assert_eq!(named_kernel(&f).unwrap(), ["x1", "1"]);
        assert_eq!(f.weights().as_slice().unwrap(), &[3.0, 4.0]);
        assert_eq!(f.eval(&[2.0]).unwrap(), 10.0);
    }

    #[test]
    fn trig_maps_cannot_be_named() {
        let mps = Mps::new(vec![SiteTensor::zeros(1, 2, 1, 0)], Boundary::Open).unwrap();
        let f = flatten(&mps, &[FeatureMap::TrigPair]).unwrap();
        assert!(matches!(named_kernel(&f), Err(Error::UnsupportedNaming(_))));
        assert_eq!(f.eval(&[0.3]).unwrap(), 0.0);
    }

    #[test]
    fn json_export_fields() {
        let mps = Mps::new(
            vec![SiteTensor::new(1, 2, 1, 0, vec![1.0, -1.0]).unwrap()],
            Boundary::Open,
        )
        .unwrap();
        let f = flatten(&mps, &[FeatureMap::BinaryIndicator]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&f.to_json(true).unwrap()).unwrap();
        assert_eq!(v["D"], 1);
        assert_eq!(v["S"], 2);
        assert_eq!(v["names"][1], "(1-x1)");
        assert_eq!(v["kernel"][1][0], 1);
    }
}

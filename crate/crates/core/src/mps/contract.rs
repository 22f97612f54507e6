use ndarray::Array2;
use rayon::prelude::*;

use super::{FeatureMap, Mps, SiteTensor};
use crate::error::{Error, Result};

/// Direction in which the bond matrices are multiplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sweep {
    #[default]
    LeftToRight,
    RightToLeft,
}

/// `sum_s A^{l s} phi_s` for every label slice of `t`.
fn bond_matrices(t: &SiteTensor, phi: &[f64]) -> Vec<Array2<f64>> {
    let (chi_l, chi_r) = (t.left_bond(), t.right_bond());
    let block = chi_l * chi_r;
    (0..t.label_slices())
        .map(|l| {
            let mut m = Array2::<f64>::zeros((chi_l, chi_r));
            let flat = m.as_slice_mut().expect("standard layout");
            for (s, &p) in phi.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let start = t.index(l, s, 0, 0);
                for (o, &v) in flat.iter_mut().zip(&t.data()[start..start + block]) {
                    *o += v * p;
                }
            }
            m
        })
        .collect()
}

fn trace(m: &Array2<f64>) -> f64 {
    m.diag().sum()
}

/// Evaluates the chain on explicit per-site feature vectors.
///
/// Returns one value per label (a single value without a label leg). Open
/// chains are the `chi = 1` case of the periodic trace, so both boundaries
/// share one code path.
pub fn contract_features(mps: &Mps, features: &[Vec<f64>], sweep: Sweep) -> Result<Vec<f64>> {
    if features.len() != mps.len() {
        return Err(Error::shape(format!(
            "{} feature vectors for {} sites",
            features.len(),
            mps.len()
        )));
    }
    for (i, (phi, t)) in features.iter().zip(mps.sites()).enumerate() {
        if phi.len() != t.phys_dim() {
            return Err(Error::shape(format!(
                "site {i}: feature vector of length {} vs phys dim {}",
                phi.len(),
                t.phys_dim()
            )));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(format!("site {i}: non-finite feature value")));
        }
    }

    let mats: Vec<Vec<Array2<f64>>> = mps
        .sites()
        .iter()
        .zip(features)
        .map(|(t, phi)| bond_matrices(t, phi))
        .collect();

    let acc = match sweep {
        Sweep::LeftToRight => {
            let chi0 = mps.site(0).left_bond();
            let mut acc = vec![Array2::<f64>::eye(chi0)];
            for site in &mats {
                acc = multiply_stack(&acc, site, |p, m| p.dot(m));
            }
            acc
        }
        Sweep::RightToLeft => {
            let chi_end = mps.site(mps.len() - 1).right_bond();
            let mut acc = vec![Array2::<f64>::eye(chi_end)];
            for site in mats.iter().rev() {
                acc = multiply_stack(&acc, site, |p, m| m.dot(p));
            }
            acc
        }
    };
    Ok(acc.iter().map(trace).collect())
}

/// Combines the running products with one site's label slices. At most one
/// of the two lists has more than one element.
fn multiply_stack(
    acc: &[Array2<f64>],
    site: &[Array2<f64>],
    mul: impl Fn(&Array2<f64>, &Array2<f64>) -> Array2<f64>,
) -> Vec<Array2<f64>> {
    if site.len() == 1 {
        acc.iter().map(|p| mul(p, &site[0])).collect()
    } else {
        debug_assert_eq!(acc.len(), 1);
        site.iter().map(|m| mul(&acc[0], m)).collect()
    }
}

/// `Psi^l(x)` for every label `l`.
pub fn contract(mps: &Mps, fms: &[FeatureMap], x: &[f64]) -> Result<Vec<f64>> {
    mps.check_feature_maps(fms)?;
    if x.len() != mps.len() {
        return Err(Error::shape(format!(
            "input of length {} for {} sites",
            x.len(),
            mps.len()
        )));
    }
    let features = fms
        .iter()
        .zip(x)
        .map(|(fm, &xi)| fm.eval(xi))
        .collect::<Result<Vec<_>>>()?;
    contract_features(mps, &features, Sweep::LeftToRight)
}

/// Order-preserving [`contract`] over many inputs, evaluated in parallel.
pub fn contract_batch(mps: &Mps, fms: &[FeatureMap], xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    mps.check_feature_maps(fms)?;
    let results: Vec<Result<Vec<f64>>> = xs.par_iter().map(|x| contract(mps, fms, x)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::BatchItem {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Dense integer matrix used by the exact boolean path.
struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    fn eye(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { rows: n, cols: n, data }
    }

    fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        debug_assert_eq!(self.cols, other.rows);
        let mut data = vec![0i64; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[k * other.cols + j];
                    let cell = &mut data[i * other.cols + j];
                    *cell = a
                        .checked_mul(b)
                        .and_then(|p| cell.checked_add(p))
                        .ok_or_else(|| Error::numeric("integer overflow in exact contraction"))?;
                }
            }
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    fn trace(&self) -> Result<i64> {
        (0..self.rows.min(self.cols)).try_fold(0i64, |acc, i| {
            acc.checked_add(self.data[i * self.cols + i])
                .ok_or_else(|| Error::numeric("integer overflow in trace"))
        })
    }
}

fn to_exact(v: f64, what: &str) -> Result<i64> {
    if v.fract() != 0.0 || v.abs() > (1u64 << 53) as f64 {
        return Err(Error::numeric(format!("{what} {v} is not an exact integer")));
    }
    Ok(v as i64)
}

/// Exact evaluation on a boolean input.
///
/// Requires integer tensor entries and feature maps that are integer-valued
/// at 0 and 1 (true for the indicator and complement kernels). Arithmetic is
/// carried out in checked `i64`, so gate verification involves no tolerance.
pub fn contract_boolean(mps: &Mps, fms: &[FeatureMap], bits: &[bool]) -> Result<Vec<i64>> {
    mps.check_feature_maps(fms)?;
    if bits.len() != mps.len() {
        return Err(Error::shape(format!(
            "input of length {} for {} sites",
            bits.len(),
            mps.len()
        )));
    }
    let mut acc = vec![IntMatrix::eye(mps.site(0).left_bond())];
    for ((t, fm), &bit) in mps.sites().iter().zip(fms).zip(bits) {
        let phi = fm
            .eval(if bit { 1.0 } else { 0.0 })?
            .into_iter()
            .map(|v| to_exact(v, "feature value"))
            .collect::<Result<Vec<i64>>>()?;
        let mut slices = Vec::with_capacity(t.label_slices());
        for l in 0..t.label_slices() {
            let mut data = vec![0i64; t.left_bond() * t.right_bond()];
            for (s, &p) in phi.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                for a in 0..t.left_bond() {
                    for b in 0..t.right_bond() {
                        let v = to_exact(t.get(l, s, a, b), "tensor entry")?;
                        let cell = &mut data[a * t.right_bond() + b];
                        *cell = v
                            .checked_mul(p)
                            .and_then(|q| cell.checked_add(q))
                            .ok_or_else(|| Error::numeric("integer overflow in site matrix"))?;
                    }
                }
            }
            slices.push(IntMatrix {
                rows: t.left_bond(),
                cols: t.right_bond(),
                data,
            });
        }
        acc = if slices.len() == 1 {
            acc.iter().map(|p| p.mul(&slices[0])).collect::<Result<_>>()?
        } else {
            slices.iter().map(|m| acc[0].mul(m)).collect::<Result<_>>()?
        };
    }
    acc.iter().map(IntMatrix::trace).collect()
}

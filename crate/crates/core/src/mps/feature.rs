//! Per-site feature maps `phi(x_i)`.
//!
//! Every built-in map is a fixed combination of the function basis
//! [`BASIS`]; a [`FeatureMap::Custom`] map stores the coefficient rows
//! directly. Expressing everything over one basis is what lets two MPS with
//! different kernels be summed: the summed site simply stacks both maps'
//! rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names of the basis functions a custom coefficient row is written against.
pub const BASIS: [&str; 6] = ["1", "x", "x^2", "x^3", "sin(x)", "cos(x)"];

fn basis(x: f64) -> [f64; 6] {
    [1.0, x, x * x, x * x * x, x.sin(), x.cos()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMap {
    /// `[x, 1 - x]`, the boolean indicator kernel.
    BinaryIndicator,
    /// `[x, 1]`, which turns the flattened kernel into a polynomial one.
    AffineOne,
    /// `[sin x, cos x]`.
    TrigPair,
    /// Rows of coefficients over [`BASIS`]; component `s` is `rows[s] . basis(x)`.
    Custom { rows: Vec<Vec<f64>> },
}

impl FeatureMap {
    /// The single-component kernel `1 - x` used by the NOT gate.
    pub fn complement() -> Self {
        FeatureMap::Custom {
            rows: vec![vec![1.0, -1.0]],
        }
    }

    /// The single-component constant kernel `1`.
    pub fn constant_one() -> Self {
        FeatureMap::Custom { rows: vec![vec![1.0]] }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeatureMap::Custom { rows } => rows.len(),
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let FeatureMap::Custom { rows } = self {
            if rows.is_empty() {
                return Err(Error::InvalidFeatureMap("custom map with zero rows".into()));
            }
            for (s, row) in rows.iter().enumerate() {
                if row.len() > BASIS.len() {
                    return Err(Error::InvalidFeatureMap(format!(
                        "row {s} has {} coefficients, basis has {}",
                        row.len(),
                        BASIS.len()
                    )));
                }
                if row.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidFeatureMap(format!(
                        "row {s} has a non-finite coefficient"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Writes `phi(x)` into `out`, which must have length [`dim`](Self::dim).
    pub fn eval_into(&self, x: f64, out: &mut [f64]) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::numeric(format!("non-finite input {x}")));
        }
        if out.len() != self.dim() {
            return Err(Error::shape(format!(
                "feature buffer of length {} for a map of dim {}",
                out.len(),
                self.dim()
            )));
        }
        match self {
            FeatureMap::BinaryIndicator => {
                out[0] = x;
                out[1] = 1.0 - x;
            }
            FeatureMap::AffineOne => {
                out[0] = x;
                out[1] = 1.0;
            }
            FeatureMap::TrigPair => {
                out[0] = x.sin();
                out[1] = x.cos();
            }
            FeatureMap::Custom { rows } => {
                self.validate()?;
                let b = basis(x);
                for (o, row) in out.iter_mut().zip(rows) {
                    *o = row.iter().zip(b.iter()).map(|(c, v)| c * v).sum();
                }
            }
        }
        Ok(())
    }

    /// Coefficient rows over [`BASIS`] describing this map.
    pub fn coefficient_rows(&self) -> Vec<Vec<f64>> {
        match self {
            FeatureMap::BinaryIndicator => vec![vec![0.0, 1.0], vec![1.0, -1.0]],
            FeatureMap::AffineOne => vec![vec![0.0, 1.0], vec![1.0]],
            FeatureMap::TrigPair => vec![vec![0.0, 0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]],
            FeatureMap::Custom { rows } => rows.clone(),
        }
    }

    /// Stacks the components of `a` on top of those of `b`.
    pub fn concat(a: &FeatureMap, b: &FeatureMap) -> FeatureMap {
        let mut rows = a.coefficient_rows();
        rows.extend(b.coefficient_rows());
        FeatureMap::Custom { rows }
    }
}

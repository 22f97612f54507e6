use super::sum::{direct_sum, Legs};
use super::ScaleInvariantSigmoid;
use crate::error::{Error, Result};
use crate::mps::{contract, Boundary, FeatureMap, Mps, SiteTensor};

/// `Psi(x) = sum_l w_l sigma(Psi^l_core(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivatedMps {
    core: Mps,
    feature_maps: Vec<FeatureMap>,
    out_weights: Vec<f64>,
    sigma: ScaleInvariantSigmoid,
}

impl ActivatedMps {
    pub fn new(
        core: Mps,
        feature_maps: Vec<FeatureMap>,
        out_weights: Vec<f64>,
        sigma: ScaleInvariantSigmoid,
    ) -> Result<Self> {
        if core.label_site().is_none() {
            return Err(Error::shape("an activated MPS needs a label leg on its core"));
        }
        core.check_feature_maps(&feature_maps)?;
        if out_weights.len() != core.output_dim() {
            return Err(Error::shape(format!(
                "{} output weights for label dimension {}",
                out_weights.len(),
                core.output_dim()
            )));
        }
        if out_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::numeric("non-finite output weight"));
        }
        Ok(ActivatedMps {
            core,
            feature_maps,
            out_weights,
            sigma,
        })
    }

    /// Wraps a plain chain, attaching a unit label leg at the default site if
    /// it has none; all output weights are 1.
    pub fn from_mps(mps: Mps, feature_maps: Vec<FeatureMap>, sigma: ScaleInvariantSigmoid) -> Result<Self> {
        let core = match mps.label_site() {
            Some(_) => mps,
            None => {
                let site = Mps::default_label_site(mps.len());
                mps.with_unit_label(site)?
            }
        };
        let d = core.output_dim();
        ActivatedMps::new(core, feature_maps, vec![1.0; d], sigma)
    }

    /// The zero function on the given kernel.
    pub fn zero(feature_maps: Vec<FeatureMap>, sigma: ScaleInvariantSigmoid) -> Result<Self> {
        let n = feature_maps.len();
        let label = Mps::default_label_site(n);
        let sites = feature_maps
            .iter()
            .enumerate()
            .map(|(i, fm)| SiteTensor::zeros(1, fm.dim(), 1, usize::from(i == label)))
            .collect();
        ActivatedMps::new(Mps::new(sites, Boundary::Open)?, feature_maps, vec![0.0], sigma)
    }

    pub fn core(&self) -> &Mps {
        &self.core
    }

    pub fn feature_maps(&self) -> &[FeatureMap] {
        &self.feature_maps
    }

    pub fn out_weights(&self) -> &[f64] {
        &self.out_weights
    }

    pub fn sigma(&self) -> &ScaleInvariantSigmoid {
        &self.sigma
    }

    pub fn label_dim(&self) -> usize {
        self.out_weights.len()
    }

    pub(crate) fn core_mut(&mut self) -> &mut Mps {
        &mut self.core
    }

    pub(crate) fn out_weights_mut(&mut self) -> &mut [f64] {
        &mut self.out_weights
    }

    /// Label-wise values entering the activation.
    pub fn pre_activation(&self, x: &[f64]) -> Result<Vec<f64>> {
        contract(&self.core, &self.feature_maps, x)
    }

    /// Combines pre-activations with the activation and output weights.
    pub fn activate(&self, pre: &[f64]) -> f64 {
        self.out_weights
            .iter()
            .zip(pre)
            .map(|(w, &z)| if *w == 0.0 { 0.0 } else { w * self.sigma.eval(z) })
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let pre = self.pre_activation(x)?;
        let v = self.activate(&pre);
        if !v.is_finite() {
            return Err(Error::numeric(format!("activated output {v} is not finite")));
        }
        Ok(v)
    }

    /// `k * self`, carried by the output weights (any real `k`).
    pub fn scale(&self, k: f64) -> ActivatedMps {
        let mut out = self.clone();
        for w in &mut out.out_weights {
            *w *= k;
        }
        out
    }

    /// `k * self` for `k > 0` by reparameterizing the activation instead of
    /// the output weights.
    ///
    /// For `1/(C + e^z)` this uses `k/(C + e^z) = 1/(C/k + e^{z - ln k})`:
    /// `C` becomes `C/k` and every label's pre-activation is shifted by
    /// `-ln k` through a constant chain summed onto the core with a shared
    /// label leg (one extra constant kernel component per site). For
    /// `C/(1 + e^{-z})` only `C` changes.
    pub fn scale_via_c(&self, k: f64) -> Result<ActivatedMps> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::UnsupportedReparameterization(k));
        }
        match self.sigma.form() {
            super::SigmoidForm::ScaledLogistic => {
                let mut out = self.clone();
                out.sigma = self.sigma.with_c(self.sigma.c() * k)?;
                Ok(out)
            }
            super::SigmoidForm::ReciprocalShift => {
                let n = self.core.len();
                let label_site = self.core.label_site().expect("validated");
                let d = self.label_dim();
                let shift = -k.ln();
                let sites = (0..n)
                    .map(|i| {
                        if i == label_site {
                            SiteTensor::new(1, 1, 1, d, vec![shift; d])
                        } else {
                            SiteTensor::new(1, 1, 1, 0, vec![1.0])
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let constant = Mps::new(sites, Boundary::Open)?;
                let const_maps = vec![FeatureMap::constant_one(); n];
                let sum = direct_sum(
                    &self.core,
                    &self.feature_maps,
                    &constant,
                    &const_maps,
                    Legs::Stacked,
                    Legs::Shared,
                )?;
                ActivatedMps::new(
                    sum.mps,
                    sum.feature_maps,
                    self.out_weights.clone(),
                    self.sigma.with_c(self.sigma.c() / k)?,
                )
            }
        }
    }
}

pub fn eval_activated(a: &ActivatedMps, x: &[f64]) -> Result<f64> {
    a.eval(x)
}

fn check_compatible(a: &ActivatedMps, b: &ActivatedMps) -> Result<()> {
    if a.core.len() != b.core.len() {
        return Err(Error::shape(format!(
            "cannot add MPS on {} and {} inputs",
            a.core.len(),
            b.core.len()
        )));
    }
    if !a.sigma.same_as(&b.sigma) {
        return Err(Error::IncompatibleActivation(format!("{:?} vs {:?}", a.sigma, b.sigma)));
    }
    Ok(())
}

/// Function-level sum via block direct sums of bonds, kernels and labels.
pub fn add(a: &ActivatedMps, b: &ActivatedMps) -> Result<ActivatedMps> {
    check_compatible(a, b)?;
    let sum = direct_sum(
        &a.core,
        &a.feature_maps,
        &b.core,
        &b.feature_maps,
        Legs::Stacked,
        Legs::Stacked,
    )?;
    let mut w = a.out_weights.clone();
    w.extend_from_slice(&b.out_weights);
    ActivatedMps::new(sum.mps, sum.feature_maps, w, a.sigma)
}

/// [`add`] for operands with identical kernels: physical legs are kept and
/// only bonds and labels are stacked.
pub fn add_shared_kernel(a: &ActivatedMps, b: &ActivatedMps) -> Result<ActivatedMps> {
    check_compatible(a, b)?;
    let sum = direct_sum(
        &a.core,
        &a.feature_maps,
        &b.core,
        &b.feature_maps,
        Legs::Shared,
        Legs::Stacked,
    )?;
    let mut w = a.out_weights.clone();
    w.extend_from_slice(&b.out_weights);
    ActivatedMps::new(sum.mps, sum.feature_maps, w, a.sigma)
}

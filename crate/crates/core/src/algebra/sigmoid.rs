use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beyond this magnitude `exp(z)` is not evaluated and the limit value is returned.
pub const EXP_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmoidForm {
    /// `1 / (C + e^z)`, decreasing from `1/C` to 0.
    ReciprocalShift,
    /// `C / (1 + e^{-z})`, from 0 to `C`.
    ScaledLogistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// A sigmoid whose scalar multiples stay in the family by changing `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SigmoidRecord", into = "SigmoidRecord")]
pub struct ScaleInvariantSigmoid {
    form: SigmoidForm,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct SigmoidRecord {
    form: SigmoidForm,
    #[serde(rename = "C")]
    c: f64,
    orientation: Orientation,
}

impl TryFrom<SigmoidRecord> for ScaleInvariantSigmoid {
    type Error = Error;

    fn try_from(r: SigmoidRecord) -> Result<Self> {
        let s = ScaleInvariantSigmoid::new(r.form, r.c)?;
        if s.orientation() != r.orientation {
            return Err(Error::Format(format!(
                "orientation {:?} does not match {:?} with C = {}",
                r.orientation, r.form, r.c
            )));
        }
        Ok(s)
    }
}

impl From<ScaleInvariantSigmoid> for SigmoidRecord {
    fn from(s: ScaleInvariantSigmoid) -> Self {
        SigmoidRecord {
            form: s.form,
            c: s.c,
            orientation: s.orientation(),
        }
    }
}

impl ScaleInvariantSigmoid {
    pub fn new(form: SigmoidForm, c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(Error::Precondition(format!(
                "sigmoid constant must be finite and nonzero, got {c}"
            )));
        }
        if form == SigmoidForm::ReciprocalShift && c <= 0.0 {
            return Err(Error::Precondition(format!("1/(C + e^z) needs C > 0, got {c}")));
        }
        Ok(ScaleInvariantSigmoid { form, c })
    }

    pub fn reciprocal_shift(c: f64) -> Result<Self> {
        Self::new(SigmoidForm::ReciprocalShift, c)
    }

    pub fn scaled_logistic(c: f64) -> Result<Self> {
        Self::new(SigmoidForm::ScaledLogistic, c)
    }

    pub fn form(&self) -> SigmoidForm {
        self.form
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn orientation(&self) -> Orientation {
        match self.form {
            SigmoidForm::ReciprocalShift => Orientation::Decreasing,
            SigmoidForm::ScaledLogistic if self.c > 0.0 => Orientation::Increasing,
            SigmoidForm::ScaledLogistic => Orientation::Decreasing,
        }
    }

    /// Limit values as `z -> -inf` and `z -> +inf`.
    pub fn limits(&self) -> (f64, f64) {
        match self.form {
            SigmoidForm::ReciprocalShift => (1.0 / self.c, 0.0),
            SigmoidForm::ScaledLogistic => (0.0, self.c),
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let (lo, hi) = self.limits();
        if z.is_nan() {
            return f64::NAN;
        }
        if z > EXP_CLAMP {
            return hi;
        }
        if z < -EXP_CLAMP {
            return lo;
        }
        match self.form {
            SigmoidForm::ReciprocalShift => 1.0 / (self.c + z.exp()),
            SigmoidForm::ScaledLogistic => {
                if z >= 0.0 {
                    self.c / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    self.c * e / (1.0 + e)
                }
            }
        }
    }

    /// `d sigma / dz`.
    pub fn derivative(&self, z: f64) -> f64 {
        if !(-EXP_CLAMP..=EXP_CLAMP).contains(&z) {
            return 0.0;
        }
        match self.form {
            SigmoidForm::ReciprocalShift => {
                let e = z.exp();
                let d = self.c + e;
                -e / (d * d)
            }
            SigmoidForm::ScaledLogistic => {
                let e = (-z.abs()).exp();
                self.c * e / ((1.0 + e) * (1.0 + e))
            }
        }
    }

    /// Same function, compared exactly.
    pub fn same_as(&self, other: &Self) -> bool {
        self.form == other.form && self.c.to_bits() == other.c.to_bits()
    }

    pub(crate) fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.form, c)
    }
}

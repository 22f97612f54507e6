//! Activated MPS and the vector-space operations on them.

mod activated;
mod sigmoid;
pub(crate) mod sum;

pub use activated::{add, add_shared_kernel, eval_activated, ActivatedMps};
pub use sigmoid::{Orientation, ScaleInvariantSigmoid, SigmoidForm, EXP_CLAMP};

pub mod algebra;
pub mod analysis;
pub mod boolean;
pub mod cli;
pub mod error;
pub mod flatten;
pub mod io;
pub mod mps;

pub use error::{Error, Result};

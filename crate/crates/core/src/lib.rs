pub mod dunkl_core;
pub mod error;
pub mod functions;
pub mod numerics;
pub mod parallel;
pub mod poisson;
pub mod riesz;
pub mod spaces;
pub mod transform;

pub use error::{Error, Result};
pub use functions::{Parity, RealFunction};

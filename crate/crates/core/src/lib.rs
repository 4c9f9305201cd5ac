pub mod bounds;
pub mod constants;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod forest;
pub mod interp;
pub mod oracle;
pub mod lattice;
pub mod rng;
pub mod sampler;
pub mod site;
pub mod stats;
pub mod sweep;

pub use error::{Error, ErrorCategory, Result};

pub mod analysis;
pub mod env;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod population;
pub mod rng;
pub mod types;

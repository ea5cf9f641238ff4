pub mod asymptotics;
pub mod basis;
pub mod circuit;
pub mod cli;
pub mod disorder;
pub mod eigen;
pub mod error;
pub mod fluxonium;
pub mod hopfield;
pub mod manybody;
pub mod tridiag;
pub mod units;

pub use error::{Error, Result};

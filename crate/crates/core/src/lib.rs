//! Policy-gradient optimization of QAOA bang-bang quantum control
//! protocols, with Gaussian / quantum-measurement / Hamiltonian noise
//! channels, correlated Gaussian policies and derivative-free baseline
//! optimizers.

pub mod baselines;
pub mod config;
pub mod error;
pub mod models;
pub mod noise;
pub mod pgtrain;
pub mod policy;
pub mod qsim;
pub mod runner;

pub use error::{Error, Result};

pub mod config;
pub mod delay;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod localisation;
pub mod mourre;
pub mod quadrature;
pub mod run;
pub mod scattering;
pub mod time_operator;

pub use error::{Error, Result};

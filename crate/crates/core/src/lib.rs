pub mod cli;
pub mod correlation;
pub mod error;
pub mod hidden_vars;
pub mod io;
pub mod linalg;
pub mod pauli_hs;
pub mod schmidt;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};

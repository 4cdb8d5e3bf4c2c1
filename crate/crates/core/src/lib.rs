//! Sharp embeddings between α-modulation spaces `M^{s,α}_{p,q}`.
//!
//! * [`index_calculus`]: closed-form index functions and the embedding verdict.
//! * [`alpha_covering`]: α-coverings, their partitions of unity and index sets.
//! * [`grid_transforms`]: periodic FFT grids, decomposition norms, witnesses.
//! * [`asymptotic_lab`]: numerical operator-norm growth and cross-checks.
//! * [`cli_reports`]: configuration, runs and report rendering behind the CLI.

pub mod alpha_covering;
pub mod asymptotic_lab;
pub mod cli_reports;
pub mod error;
pub mod grid_transforms;
pub mod index_calculus;
pub mod scalar;

pub use error::{Error, Result};

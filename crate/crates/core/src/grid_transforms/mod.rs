//! Periodic grids, the Fourier transform on them, frequency localization,
//! quasi-norms, decomposition norms and witness functions.

pub mod fft;
mod grid;
pub mod io;
pub mod norms;
pub mod sequence;
pub mod witness;

pub use fft::{fourier_transform, Direction};
pub use grid::{Domain, FreqGrid, GridFunction};
pub use norms::{box_apply, coarse_norm, lp_quasinorm, reconstruct, space_norm, NormResult, Piece};
pub use sequence::{index_weight, sequence_norm, IndexedSeq};
pub use witness::{bump_function, bump_spectrum, witness_bump, witness_spread};

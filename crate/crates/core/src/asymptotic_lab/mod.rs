//! Numerical growth of localized operator norms and cross-checks of the
//! embedding verdict.

mod checks;
mod fit;
mod local;
mod seqopt;

pub use checks::*;
pub use fit::{exponent_fit, ExponentFit};
pub use local::{box_opnorm_lower, box_opnorm_montecarlo, LabConfig, Localization, OpNormSample, WitnessKind};
pub use seqopt::seq_multiplier_norm_bruteforce;

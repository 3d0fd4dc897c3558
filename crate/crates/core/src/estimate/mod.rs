//! Estimates as checkable cases: constants, empirical ratios, extremizers
//! and dyadic sweeps.

mod case;
mod evaluate;
mod extremizer;
mod sweep;

pub use case::{dyadic_ceil, theoretical_constant, EstimateCase, Theorem};
pub use evaluate::{
    cycled_signs, derive_seed, fields_on, radialize, trial_fields, Coefficients, Evaluation, Evaluator, NET_SEED,
};
pub use extremizer::{make_extremizer, Certificate, Extremizer, ExtremizerKind, ExtremizerSpec};
pub use sweep::{dyadic_sweep, fit_exponent, FitOn, Stamp, SweepPoint, SweepReport, SweepSpec};

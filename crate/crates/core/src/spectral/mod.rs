//! Symmetric probability measures on the circle via their Fourier
//! coefficients.

mod key;
mod measure;
mod realize;
mod riesz;
mod rules;
mod ternary;

pub use key::{
    fejer_quadratic_form, key_bound_check, under_recurrent_suite, KeyBoundReport, KeyBoundSummary, SplitSum,
    UNDER_RECURRENT_SUITE,
};
pub use measure::{
    FourierMeasure, NonnegCertificate, Tail, ToeplitzWitness, DENSITY_GRID, TOEPLITZ_MAX_SIZE,
    TOEPLITZ_TOLERANCE,
};
pub use realize::{realize_convex, realize_summable, ConvexSequence, DEFAULT_HORIZON};
pub use riesz::{riesz_coefficient, AmplitudeRule, RieszSpec, RIESZ_BASE};
pub use rules::SeqRule;
pub use ternary::{balanced_ternary, nonzero_positions};

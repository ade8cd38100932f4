//! Exact moments for functions built from an i.i.d. fair sign sequence
//! `T^k g`: the sign-controlled series `f = g + sum a_k T^k g` and the
//! multiple-correlation construction `f = (1 + g sum a_k T^k g) / 2`.

mod multiple;
mod pair;
mod parity;
mod rescale;
mod series;

pub use multiple::{
    affine_moment, derangement_sum, h_moment_expansion, multiple_f_correlation, multiple_h_correlation,
    MultipleReport, MAX_EXPANSION_TERMS, MAX_ORDER,
};
pub use pair::{
    certified_pair_sign, pair_correlation, pair_correlation_truncated, sign_control_lower_bound, PAIR_CUTOFF,
};
pub use parity::parity_moment;
pub use rescale::{rescale_to_unit, AffineRescale};
pub use series::{GeometricTail, Partition, SeriesKind, SignedSeries};

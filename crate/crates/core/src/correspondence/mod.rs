//! Correspondence between `[0, 1]`-valued functions and shift-invariant
//! measures on `{0, 1}^N`, with moment sources for every construction.

mod cylinder;
mod sample;
mod source;
mod spec;

pub use cylinder::{
    consistency_check, cylinder_measure, recurrence_transfer_check, symbolic_intersection, words,
    ConsistencyReport, CylinderMeasure, TransferReport, TransferRow, CYLINDER_HORIZON, UNIT_TOLERANCE,
};
pub use sample::{markov_sample, symbol_frequency, MarkovBias};
pub use source::{
    BernoulliSource, MomentSource, MultipleSource, Provenance, SeriesSource, SkewSource, MAX_SERIES_SUPPORT,
};
pub use spec::{SourceSpec, DEFAULT_SUPPORT};

//! Exact and validated computation of correlation sequences for under- and
//! over-recurrent sets and functions.

pub mod error;
pub mod bernoulli;
pub mod combinatorics;
pub mod correspondence;
pub mod numeric;
pub mod rademacher;
pub mod skew;
pub mod spectral;

pub use error::{Error, Result};
pub use numeric::{Enclosure, Interval, Q};
pub use bernoulli::BernoulliParams;
pub use rademacher::SignedSeries;
pub use skew::SkewSystem;
pub use spectral::{FourierMeasure, RieszSpec, SeqRule};

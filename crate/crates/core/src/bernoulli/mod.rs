//! Two explicit sets in a Bernoulli shift on `{0, 1, 2}`: one strictly
//! over-recurrent, one under-recurrent past a computable threshold, with an
//! exact automaton-based oracle for every correlation.

mod automaton;
mod correlation;
mod params;

pub use automaton::{
    event_probability_oracle, joint_probability, product_size, RegularSetSpec, ALPHABET, MAX_PRODUCT_STATES,
};
pub use correlation::{
    over_correlation, over_defect, under_correlation, under_defect, under_defect_factored, under_predicted_sign,
    under_threshold, BernoulliSet,
};
pub use params::{entropy, family_params, BernoulliParams};

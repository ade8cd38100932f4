use num_traits::{One, Zero};

use crate::numeric::Q;

/// `E[x(i_1) ... x(i_k)]` for i.i.d. fair signs: 1 when every index occurs
/// an even number of times, else 0.
pub fn parity_moment(indices: &[i64]) -> Q {
    if all_even(indices) {
        Q::one()
    } else {
        Q::zero()
    }
}

pub(crate) fn all_even(indices: &[i64]) -> bool {
    let mut v: Vec<i64> = indices.to_vec();
    v.sort_unstable();
    v.chunks(2).all(|pair| pair.len() == 2 && pair[0] == pair[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(parity_moment(&[3, 3]), Q::one());
        assert_eq!(parity_moment(&[1, 2]), Q::zero());
        assert_eq!(parity_moment(&[1, 1, 2, 2, 5, 5]), Q::one());
        assert_eq!(parity_moment(&[]), Q::one());
        assert_eq!(parity_moment(&[4, 4, 4]), Q::zero());
        assert_eq!(parity_moment(&[4, 4, 4, 4]), Q::one());
    }

    proptest! {
        #[test]
        fn matches_counting(v in prop::collection::vec(-4i64..4, 0..10)) {
            let mut counts = std::collections::HashMap::new();
            for x in &v {
                *counts.entry(*x).or_insert(0) += 1;
            }
            let even = counts.values().all(|c| c % 2 == 0);
            prop_assert_eq!(all_even(&v), even);
        }
    }
}

/// Balanced-ternary digits of `n >= 1`, least significant first.
///
/// The returned digits `e_j` lie in `{-1, 0, 1}`, satisfy
/// `sum e_j 3^j = n`, and the last digit is nonzero.
pub fn balanced_ternary(n: u64) -> Vec<i8> {
    assert!(n >= 1, "balanced_ternary is defined for positive integers");
    let mut digits = Vec::new();
    let mut m = n as u128;
    while m > 0 {
        match m % 3 {
            0 => digits.push(0),
            1 => {
                digits.push(1);
                m -= 1;
            }
            _ => {
                digits.push(-1);
                m += 1;
            }
        }
        m /= 3;
    }
    digits
}

/// Positions `j` with a nonzero balanced-ternary digit.
pub fn nonzero_positions(n: u64) -> impl Iterator<Item = usize> {
    balanced_ternary(n)
        .into_iter()
        .enumerate()
        .filter(|(_, d)| *d != 0)
        .map(|(j, _)| j)
}

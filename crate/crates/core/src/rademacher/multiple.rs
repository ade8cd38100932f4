//! Multiple correlations of `h = g sum_{k in Z} a_k T^k g` and of
//! `f = (1 + h) / 2`.
//!
//! A product `T^{n_1} h ... T^{n_d} h` expands into terms
//! `a_{k_1} ... a_{k_d} x(n_1) x(n_1 + k_1) ... x(n_d) x(n_d + k_d)`. With
//! distinct `n_i` and `a_0 = 0`, parity forces `n_i + k_i = n_{pi(i)}` for a
//! fixed-point-free permutation `pi`, so only `|k_i| <= max n - min n`
//! contribute. The expansion engine enumerates the full box of `k` anyway
//! and decides each term by parity alone; the permutation sum is computed
//! separately.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{qi, serde_q, Q};
use crate::rademacher::parity::all_even;
use crate::rademacher::series::{SeriesKind, SignedSeries};

/// Largest number of coefficient tuples the expansion engine visits.
pub const MAX_EXPANSION_TERMS: u128 = 10_000_000;
/// Largest order accepted by the multiple-correlation operations.
pub const MAX_ORDER: usize = 6;

fn check_distinct(shifts: &[i64]) -> Result<()> {
    let set: BTreeSet<_> = shifts.iter().collect();
    if set.len() != shifts.len() {
        return Err(Error::invalid("shifts must be pairwise distinct"));
    }
    Ok(())
}

fn check_order(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid("multiple correlations need at least two shifts"));
    }
    if d > MAX_ORDER {
        return Err(Error::capacity(format!("order {d} exceeds the supported maximum {MAX_ORDER}")));
    }
    Ok(())
}

/// `int prod_i T^{n_i} h` by full expansion and the parity rule.
pub fn h_moment_expansion(series: &SignedSeries, shifts: &[i64]) -> Result<Q> {
    check_distinct(shifts)?;
    let d = shifts.len();
    if d == 0 {
        return Ok(Q::one());
    }
    let span = shifts.iter().max().unwrap() - shifts.iter().min().unwrap();
    let window = match series.support_end() {
        Some(l) => l as i64,
        None => span,
    };
    let box_size = (2 * window as u128).pow(d as u32);
    if box_size > MAX_EXPANSION_TERMS {
        return Err(Error::capacity(format!(
            "expansion needs {box_size} terms, above the cap {MAX_EXPANSION_TERMS}"
        )));
    }
    let coeffs: Vec<(i64, Q)> = (-window..=window)
        .filter(|&k| k != 0)
        .map(|k| (k, series.value(k)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    if coeffs.is_empty() {
        return Ok(Q::zero());
    }
    let l = coeffs.len();
    let total = l.pow(d as u32 - 1);
    let sum = (0..l)
        .into_par_iter()
        .map(|first| {
            let mut acc = Q::zero();
            let mut idx = vec![0usize; d];
            idx[0] = first;
            let mut indices = vec![0i64; 2 * d];
            for mut code in 0..total {
                for slot in idx.iter_mut().skip(1) {
                    *slot = code % l;
                    code /= l;
                }
                for i in 0..d {
                    indices[2 * i] = shifts[i];
                    indices[2 * i + 1] = shifts[i] + coeffs[idx[i]].0;
                }
                if all_even(&indices) {
                    let mut prod = Q::one();
                    for &j in &idx {
                        prod *= &coeffs[j].1;
                    }
                    acc += prod;
                }
            }
            acc
        })
        .reduce(Q::zero, |a, b| a + b);
    Ok(sum)
}

/// `sum over fixed-point-free pi of prod_i a_{n_i - n_{pi(i)}}`.
pub fn derangement_sum(series: &SignedSeries, shifts: &[i64]) -> Q {
    let d = shifts.len();
    let mut acc = Q::zero();
    let mut perm: Vec<usize> = (0..d).collect();
    permutations(&mut perm, 0, &mut |p| {
        if p.iter().enumerate().any(|(i, &j)| i == j) {
            return;
        }
        let mut prod = Q::one();
        for (i, &j) in p.iter().enumerate() {
            prod *= series.value(shifts[i] - shifts[j]);
            if prod.is_zero() {
                return;
            }
        }
        acc += prod;
    });
    acc
}

fn permutations(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// `int prod_i T^{n_i} h` for `2 <= d <= 6` distinct shifts, via the
/// expansion engine.
pub fn multiple_h_correlation(series: &SignedSeries, shifts: &[i64]) -> Result<Q> {
    check_order(shifts.len())?;
    h_moment_expansion(series, shifts)
}

/// Permanent by dynamic programming over column subsets.
pub(crate) fn permanent(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    if n == 0 {
        return Q::one();
    }
    let mut dp = vec![Q::zero(); 1 << n];
    dp[0] = Q::one();
    for mask in 0..(1usize << n) {
        if dp[mask].is_zero() {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        let base = dp[mask].clone();
        for (j, entry) in m[row].iter().enumerate() {
            if mask & (1 << j) == 0 && !entry.is_zero() {
                let next = mask | (1 << j);
                dp[next] = &dp[next] + &base * entry;
            }
        }
    }
    dp[(1 << n) - 1].clone()
}

/// `int prod_i T^{s_i} f` for `f = (1 + h) / 2` and any distinct shifts:
/// `2^{-m} perm(I + B)` with `B_ij = a_{s_j - s_i}`, the permanent
/// collecting the fixed-point-free sums of every sub-product.
pub fn affine_moment(series: &SignedSeries, shifts: &[i64]) -> Result<Q> {
    check_distinct(shifts)?;
    let m = shifts.len();
    let matrix: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        Q::one()
                    } else {
                        series.value(shifts[j] - shifts[i])
                    }
                })
                .collect()
        })
        .collect();
    Ok(permanent(&matrix) / Q::from_integer(BigInt::one() << m))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultipleReport {
    pub shifts: Vec<i64>,
    pub kind: SeriesKind,
    /// `int prod T^{n_i} f`.
    #[serde(with = "serde_q")]
    pub value: Q,
    /// `2^{-d}`.
    #[serde(with = "serde_q")]
    pub product_of_means: Q,
    /// Sum of single `int T^{n_i} h`, zero for a valid series.
    #[serde(with = "serde_q")]
    pub linear_term: Q,
    /// Sum over pairs.
    #[serde(with = "serde_q")]
    pub a_term: Q,
    /// Sum over sub-products of order at least 3.
    #[serde(with = "serde_q")]
    pub b_term: Q,
    /// `max_{i != j} |a_{n_i - n_j}|`.
    #[serde(with = "serde_q")]
    pub alpha: Q,
    /// `2^d d! alpha^3`.
    #[serde(with = "serde_q")]
    pub b_bound: Q,
    /// `alpha^2 / 2 - 2^d d! alpha^3`.
    #[serde(with = "serde_q")]
    pub margin: Q,
    /// `|B| <= b_bound`, `|A| >= alpha^2` with the variant's sign, and a
    /// positive margin; together these force the strict inequality.
    pub certificate: bool,
    pub series_valid: bool,
}

impl MultipleReport {
    pub fn below_product(&self) -> bool {
        self.value < self.product_of_means
    }

    pub fn above_product(&self) -> bool {
        self.value > self.product_of_means
    }

    /// Strict inequality in the variant's direction.
    pub fn holds(&self) -> bool {
        match self.kind {
            SeriesKind::Antisymmetric => self.below_product(),
            SeriesKind::Symmetric => self.above_product(),
            SeriesKind::OneSided => false,
        }
    }
}

/// `2^d int prod T^{n_i} f = 1 + A + B` with every sub-product of `h`
/// evaluated by the expansion engine, plus the bound on `B`.
pub fn multiple_f_correlation(series: &SignedSeries, shifts: &[i64]) -> Result<MultipleReport> {
    let d = shifts.len();
    check_order(d)?;
    check_distinct(shifts)?;
    if series.kind == SeriesKind::OneSided {
        return Err(Error::invalid("multiple correlations use a two-sided series"));
    }
    let mut linear = Q::zero();
    let mut a_term = Q::zero();
    let mut b_term = Q::zero();
    for mask in 1usize..(1 << d) {
        let sub: Vec<i64> = (0..d).filter(|i| mask & (1 << i) != 0).map(|i| shifts[i]).collect();
        let v = h_moment_expansion(series, &sub)?;
        match sub.len() {
            1 => linear += v,
            2 => a_term += v,
            _ => b_term += v,
        }
    }
    let two_d = Q::from_integer(BigInt::one() << d);
    let value = (Q::one() + &linear + &a_term + &b_term) / &two_d;

    let mut alpha = Q::zero();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let v = series.value(shifts[i] - shifts[j]).abs();
                if v > alpha {
                    alpha = v;
                }
            }
        }
    }
    let fact: i64 = (1..=d as i64).product();
    let alpha2 = &alpha * &alpha;
    let b_bound = &two_d * qi(fact) * &alpha2 * &alpha;
    let margin = &alpha2 / qi(2) - &b_bound;
    let a_ok = match series.kind {
        SeriesKind::Antisymmetric => a_term <= -alpha2.clone(),
        _ => a_term >= alpha2,
    };
    let certificate = linear.is_zero() && b_term.abs() <= b_bound && a_ok && margin.is_positive();
    Ok(MultipleReport {
        shifts: shifts.to_vec(),
        kind: series.kind,
        value,
        product_of_means: Q::one() / two_d,
        linear_term: linear,
        a_term,
        b_term,
        alpha,
        b_bound,
        margin,
        certificate,
        series_valid: series.validate_multiple(d).is_ok(),
    })
}

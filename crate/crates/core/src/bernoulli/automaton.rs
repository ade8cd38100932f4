//! Event probabilities for absorbing automata driven by an i.i.d. word.
//!
//! An event is "the word reaches the accepting absorber". Joint events of
//! several automata, each reading the word from its own delay, are solved
//! exactly on the product automaton: `x_s = sum_i p_i x_{delta(s, i)}` with
//! `x = 1` on acceptance and `x = 0` on rejection, one strongly connected
//! component at a time in reverse topological order.

use std::collections::HashMap;

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::bernoulli::params::BernoulliParams;
use crate::error::{Error, Result};
use crate::numeric::Q;

pub const ALPHABET: usize = 3;
/// Largest product automaton the exact solver accepts.
pub const MAX_PRODUCT_STATES: usize = 100_000;

/// Deterministic automaton over `{0, 1, 2}` with two absorbing states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularSetSpec {
    transitions: Vec<[usize; ALPHABET]>,
    start: usize,
    accept: usize,
    reject: usize,
}

impl RegularSetSpec {
    pub fn new(transitions: Vec<[usize; ALPHABET]>, start: usize, accept: usize, reject: usize) -> Result<Self> {
        let spec = RegularSetSpec {
            transitions,
            start,
            accept,
            reject,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// First non-zero entry is 1.
    pub fn over() -> Self {
        // 0: scanning, 1: accept, 2: reject
        RegularSetSpec {
            transitions: vec![[0, 1, 2], [1, 1, 1], [2, 2, 2]],
            start: 0,
            accept: 1,
            reject: 2,
        }
    }

    /// First two non-zero entries are 1 then 2.
    pub fn under() -> Self {
        // 0: nothing seen, 1: seen a 1, 2: accept, 3: reject
        RegularSetSpec {
            transitions: vec![[0, 1, 3], [1, 3, 2], [2, 2, 2], [3, 3, 3]],
            start: 0,
            accept: 2,
            reject: 3,
        }
    }

    pub fn complement(&self) -> Self {
        RegularSetSpec {
            accept: self.reject,
            reject: self.accept,
            ..self.clone()
        }
    }

    pub fn states(&self) -> usize {
        self.transitions.len()
    }

    pub fn step(&self, state: usize, symbol: usize) -> usize {
        self.transitions[state][symbol]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> usize {
        self.accept
    }

    pub fn reject(&self) -> usize {
        self.reject
    }

    /// Runs a finite word; `Some(true)` on acceptance, `Some(false)` on
    /// rejection, `None` if still undecided.
    pub fn decide(&self, word: &[u8]) -> Option<bool> {
        let mut s = self.start;
        for &c in word {
            s = self.step(s, c as usize);
            if s == self.accept {
                return Some(true);
            }
            if s == self.reject {
                return Some(false);
            }
        }
        None
    }

    /// Both absorbers are absorbing and distinct, and every state reaches
    /// one of them. Since every symbol has positive probability, this makes
    /// absorption almost sure.
    pub fn validate(&self) -> Result<()> {
        let n = self.transitions.len();
        if [self.start, self.accept, self.reject].iter().any(|&s| s >= n) {
            return Err(Error::invalid("automaton state index out of range"));
        }
        if self.transitions.iter().flatten().any(|&t| t >= n) {
            return Err(Error::invalid("automaton transition target out of range"));
        }
        if self.accept == self.reject {
            return Err(Error::invalid("accepting and rejecting absorbers must differ"));
        }
        for a in [self.accept, self.reject] {
            if self.transitions[a].iter().any(|&t| t != a) {
                return Err(Error::invalid(format!("state {a} is not absorbing")));
            }
        }
        // backward reachability from the absorbers
        let mut reaches = vec![false; n];
        reaches[self.accept] = true;
        reaches[self.reject] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if !reaches[s] && self.transitions[s].iter().any(|&t| reaches[t]) {
                    reaches[s] = true;
                    changed = true;
                }
            }
        }
        if let Some(s) = reaches.iter().position(|r| !r) {
            return Err(Error::invalid(format!("state {s} never reaches an absorber")));
        }
        Ok(())
    }
}

const ACCEPT: usize = 0;
const REJECT: usize = 1;

/// Per-component state: symbols still to skip, then the automaton state.
type Local = (u32, usize);

struct Product<'a> {
    parts: &'a [(RegularSetSpec, u32)],
    cap: usize,
    index: HashMap<Vec<Local>, usize>,
    edges: Vec<[usize; ALPHABET]>,
}

impl<'a> Product<'a> {
    fn classify(&self, locals: &[Local]) -> Option<usize> {
        let mut all_accept = true;
        for ((spec, _), &(skip, s)) in self.parts.iter().zip(locals) {
            if skip == 0 && s == spec.reject {
                return Some(REJECT);
            }
            all_accept &= skip == 0 && s == spec.accept;
        }
        all_accept.then_some(ACCEPT)
    }

    fn intern(&mut self, locals: Vec<Local>, queue: &mut Vec<Vec<Local>>) -> Result<usize> {
        if let Some(a) = self.classify(&locals) {
            return Ok(a);
        }
        if let Some(&i) = self.index.get(&locals) {
            return Ok(i);
        }
        let i = self.edges.len();
        if i >= self.cap {
            return Err(Error::capacity(format!("product automaton exceeds {} states", self.cap)));
        }
        self.index.insert(locals.clone(), i);
        self.edges.push([usize::MAX; ALPHABET]);
        queue.push(locals);
        Ok(i)
    }

    fn build(parts: &'a [(RegularSetSpec, u32)], cap: usize) -> Result<(Self, usize)> {
        let mut product = Product {
            parts,
            cap,
            index: HashMap::new(),
            edges: vec![[ACCEPT; ALPHABET], [REJECT; ALPHABET]],
        };
        let mut queue = Vec::new();
        let init = parts.iter().map(|(spec, d)| (*d, spec.start)).collect();
        let start = product.intern(init, &mut queue)?;
        while let Some(locals) = queue.pop() {
            let from = product.index[&locals];
            for symbol in 0..ALPHABET {
                let next: Vec<Local> = parts
                    .iter()
                    .zip(&locals)
                    .map(|((spec, _), &(skip, s))| {
                        if skip > 0 {
                            (skip - 1, s)
                        } else {
                            (0, spec.step(s, symbol))
                        }
                    })
                    .collect();
                product.edges[from][symbol] = product.intern(next, &mut queue)?;
            }
        }
        Ok((product, start))
    }
}

/// Probability that every automaton accepts the word read from its delay:
/// `mu(T^{-d_1} A_1 cap ... cap T^{-d_k} A_k)`.
pub fn joint_probability(parts: &[(RegularSetSpec, u32)], p: &BernoulliParams) -> Result<Q> {
    joint_probability_capped(parts, p, MAX_PRODUCT_STATES)
}

pub(crate) fn joint_probability_capped(parts: &[(RegularSetSpec, u32)], p: &BernoulliParams, cap: usize) -> Result<Q> {
    for (spec, _) in parts {
        spec.validate()?;
    }
    if parts.is_empty() {
        return Ok(Q::one());
    }
    let (product, start) = Product::build(parts, cap)?;
    let values = solve_absorption(&product.edges, p);
    Ok(values[start].clone())
}

/// `mu(A cap T^{-n} B)`.
pub fn event_probability_oracle(a: &RegularSetSpec, b: &RegularSetSpec, p: &BernoulliParams, n: u32) -> Result<Q> {
    joint_probability(&[(a.clone(), 0), (b.clone(), n)], p)
}

/// Number of product states for the given delayed copies.
pub fn product_size(parts: &[(RegularSetSpec, u32)]) -> Result<usize> {
    Ok(Product::build(parts, MAX_PRODUCT_STATES)?.0.edges.len())
}

fn solve_absorption(edges: &[[usize; ALPHABET]], p: &BernoulliParams) -> Vec<Q> {
    let n = edges.len();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * ALPHABET);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for (s, targets) in edges.iter().enumerate().skip(2) {
        for &t in targets {
            graph.add_edge(nodes[s], nodes[t], ());
        }
    }
    let mut value: Vec<Option<Q>> = vec![None; n];
    value[ACCEPT] = Some(Q::one());
    value[REJECT] = Some(Q::zero());

    // Tarjan's algorithm emits components sinks first.
    for component in tarjan_scc(&graph) {
        let members: Vec<usize> = component.iter().map(|v| v.index()).filter(|&s| s >= 2).collect();
        if members.is_empty() {
            continue;
        }
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let k = members.len();
        // (I - P_cc) x = P_c,out x_out
        let mut a = vec![vec![Q::zero(); k + 1]; k];
        for (i, &s) in members.iter().enumerate() {
            a[i][i] += Q::one();
            for (symbol, &t) in edges[s].iter().enumerate() {
                let w = p.prob(symbol);
                match local.get(&t) {
                    Some(&j) => a[i][j] -= w,
                    None => {
                        let known = value[t].as_ref().expect("successor components are solved first");
                        a[i][k] += w * known;
                    }
                }
            }
        }
        for (i, x) in gauss_solve(a).into_iter().enumerate() {
            value[members[i]] = Some(x);
        }
    }
    value.into_iter().map(|v| v.expect("every state solved")).collect()
}

/// Solves an augmented nonsingular system `[A | b]` over the rationals.
fn gauss_solve(mut a: Vec<Vec<Q>>) -> Vec<Q> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .expect("absorbing system is nonsingular");
        a.swap(col, pivot);
        let inv = Q::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let (pivot_row, row) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
    }
    a.into_iter().map(|row| row[k].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::params::family_params;
    use crate::numeric::{pow, q};

    fn uniform() -> BernoulliParams {
        BernoulliParams::uniform()
    }

    /// Brute-force check: enumerate words of a fixed length and add up the
    /// probability of those already decided as accepted; the undecided mass
    /// bounds the error.
    fn enumerate(parts: &[(RegularSetSpec, u32)], p: &BernoulliParams, len: usize) -> (Q, Q) {
        let mut accepted = Q::zero();
        let mut undecided = Q::zero();
        let total = ALPHABET.pow(len as u32);
        for code in 0..total {
            let mut word = Vec::with_capacity(len);
            let mut c = code;
            let mut weight = Q::one();
            for _ in 0..len {
                word.push((c % ALPHABET) as u8);
                weight *= p.prob(c % ALPHABET);
                c /= ALPHABET;
            }
            let verdicts: Vec<Option<bool>> = parts
                .iter()
                .map(|(spec, d)| spec.decide(&word[(*d as usize).min(len)..]))
                .collect();
            if verdicts.contains(&Some(false)) {
                continue;
            }
            if verdicts.iter().all(|v| *v == Some(true)) {
                accepted += weight;
            } else {
                undecided += weight;
            }
        }
        (accepted, undecided)
    }

    #[test]
    fn single_event_measures() {
        let p = family_params(&q(1, 4)).unwrap();
        let over = joint_probability(&[(RegularSetSpec::over(), 0)], &p).unwrap();
        assert_eq!(over, p.over_mean());
        let under = joint_probability(&[(RegularSetSpec::under(), 0)], &p).unwrap();
        assert_eq!(under, q(4, 25));
        // a delay does not change a single marginal
        let delayed = joint_probability(&[(RegularSetSpec::under(), 5)], &p).unwrap();
        assert_eq!(delayed, q(4, 25));
    }

    #[test]
    fn over_at_one_and_complement() {
        let a = RegularSetSpec::over();
        assert_eq!(event_probability_oracle(&a, &a, &uniform(), 1).unwrap(), q(1, 3));
        assert_eq!(event_probability_oracle(&a, &a.complement(), &uniform(), 0).unwrap(), Q::zero());
        let both = event_probability_oracle(&a, &a.complement(), &uniform(), 2).unwrap();
        let same = event_probability_oracle(&a, &a, &uniform(), 2).unwrap();
        assert_eq!(both + same, q(1, 2));
    }

    #[test]
    fn oracle_agrees_with_enumeration_bounds() {
        let p = BernoulliParams::parse("1/2,1/4,1/4").unwrap();
        for spec in [RegularSetSpec::over(), RegularSetSpec::under()] {
            for n in 0..3u32 {
                let parts = [(spec.clone(), 0), (spec.clone(), n)];
                let exact = joint_probability(&parts, &p).unwrap();
                let (lo, slack) = enumerate(&parts, &p, 9);
                assert!(lo <= exact && exact <= &lo + &slack, "n = {n}");
            }
        }
    }

    #[test]
    fn triple_delays() {
        let p = uniform();
        let a = RegularSetSpec::over();
        // three copies: inclusion probabilities follow the prefix structure
        let v = joint_probability(&[(a.clone(), 0), (a.clone(), 1), (a.clone(), 2)], &p).unwrap();
        // x1 = 0 -> reduces to (0, 1) case; x1 = 1 -> needs T x in A and T^2 x in A
        let pair = event_probability_oracle(&a, &a, &p, 1).unwrap();
        assert_eq!(v, q(1, 3) * &pair + q(1, 3) * &pair);
    }

    #[test]
    fn rejects_bad_automata() {
        assert!(RegularSetSpec::new(vec![[0, 0, 0], [1, 1, 1], [2, 2, 2]], 0, 1, 2).is_err());
        assert!(RegularSetSpec::new(vec![[0, 1, 2], [1, 1, 0], [2, 2, 2]], 0, 1, 2).is_err());
        assert!(RegularSetSpec::new(vec![[0, 1, 2], [1, 1, 1], [2, 2, 2]], 0, 1, 1).is_err());
        assert!(RegularSetSpec::new(vec![[0, 1, 2], [1, 1, 1], [2, 2, 2]], 0, 1, 2).is_ok());
    }

    #[test]
    fn state_cap() {
        let a = RegularSetSpec::under();
        let parts: Vec<_> = (0..12).map(|d| (a.clone(), d)).collect();
        let size = product_size(&parts).unwrap();
        assert!(joint_probability_capped(&parts, &uniform(), size).is_ok());
        assert!(matches!(
            joint_probability_capped(&parts, &uniform(), size - 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn over_pair_formula_spot_check() {
        let p = uniform();
        let a = RegularSetSpec::over();
        let v = event_probability_oracle(&a, &a, &p, 7).unwrap();
        let m = p.over_mean();
        assert_eq!(v, &m * &m + pow(p.p0(), 7) * (Q::one() - &m) * &m);
    }
}

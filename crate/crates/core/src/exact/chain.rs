//! The embedded chain of `Δ_n = Γ_R[R_G(n)] - Γ_S[S_G(n)]` under greedy.
//!
//! States are integer multiples of `1 / D` (the pair's scale) and every
//! transition probability is an integer numerator over one common
//! denominator `Q`, so distributions after `k` steps are integer vectors
//! over `Q^k` and all expectations stay exact.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::engine::TieBreak;
use crate::error::{Error, Result};
use crate::model::SourcePair;
use crate::rational::{format_rational, from_f64, Rational};

pub const DEFAULT_STATE_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct DeltaChain {
    scale: u64,
    /// State values in units of `1 / scale`, in discovery order; state 0 is
    /// the initial `Δ = 0`.
    states: Vec<i64>,
    /// `arcs[i]` lists `(target, numerator)` with probabilities over `denominator`.
    arcs: Vec<Vec<(usize, u128)>>,
    denominator: u128,
    tie: TieBreak,
}

/// Tie at `Δ = 0` as an exact probability of reading R.
fn tie_probability(tie: TieBreak) -> Result<Rational> {
    match tie {
        TieBreak::PreferR => Ok(Rational::one()),
        TieBreak::PreferS => Ok(Rational::zero()),
        TieBreak::Random { p } => {
            tie.validate()?;
            from_f64(p)
        }
        TieBreak::AlternateFromR => Err(Error::PathDependentTie),
    }
}

impl DeltaChain {
    /// Enumerates the states reachable from `Δ = 0`.
    pub fn build(pair: &SourcePair, tie: TieBreak, state_cap: usize) -> Result<Self> {
        let p_tie = tie_probability(tie)?;
        let tie_den = p_tie
            .denom()
            .to_u128()
            .ok_or(Error::DenominatorTooLarge)?;
        let tie_num = p_tie.numer().to_u128().ok_or(Error::DenominatorTooLarge)?;
        let scale = pair.scale();
        let denominator = u128::from(scale)
            .checked_mul(tie_den)
            .ok_or(Error::DenominatorTooLarge)?;
        let (r_units, s_units) = (pair.r_units(), pair.s_units());

        // Successor distribution of a state as (delta, numerator over denominator).
        let moves = |x: i64| -> Vec<(i64, u128)> {
            let read_r = |w: u128| {
                r_units
                    .iter()
                    .zip(s_units)
                    .filter(|(&p, _)| p > 0)
                    .map(move |(&p, &gain)| (x + gain as i64, u128::from(p) * w))
            };
            let read_s = |w: u128| {
                s_units
                    .iter()
                    .zip(r_units)
                    .filter(|(&p, _)| p > 0)
                    .map(move |(&p, &gain)| (x - gain as i64, u128::from(p) * w))
            };
            match x.cmp(&0) {
                std::cmp::Ordering::Less => read_r(tie_den).collect(),
                std::cmp::Ordering::Greater => read_s(tie_den).collect(),
                std::cmp::Ordering::Equal => read_r(tie_num)
                    .chain(read_s(tie_den - tie_num))
                    .filter(|&(_, w)| w > 0)
                    .collect(),
            }
        };

        let mut index: HashMap<i64, usize> = HashMap::from([(0, 0)]);
        let mut states = vec![0i64];
        let mut arcs: Vec<Vec<(usize, u128)>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut row: Vec<(usize, u128)> = Vec::new();
            for (y, w) in moves(states[i]) {
                let j = match index.get(&y) {
                    Some(&j) => j,
                    None => {
                        if states.len() >= state_cap {
                            return Err(Error::StateExplosion { cap: state_cap });
                        }
                        let j = states.len();
                        index.insert(y, j);
                        states.push(y);
                        queue.push_back(j);
                        j
                    }
                };
                match row.iter_mut().find(|(t, _)| *t == j) {
                    Some(entry) => entry.1 += w,
                    None => row.push((j, w)),
                }
            }
            if arcs.len() <= i {
                arcs.resize(i + 1, Vec::new());
            }
            arcs[i] = row;
        }
        arcs.resize(states.len(), Vec::new());
        Ok(Self {
            scale,
            states,
            arcs,
            denominator,
            tie,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn tie(&self) -> TieBreak {
        self.tie
    }

    pub fn state_units(&self) -> &[i64] {
        &self.states
    }

    pub fn state(&self, i: usize) -> Rational {
        Rational::new(BigInt::from(self.states[i]), BigInt::from(self.scale))
    }

    pub fn states(&self) -> Vec<Rational> {
        (0..self.len()).map(|i| self.state(i)).collect()
    }

    /// Common denominator `Q` of the transition probabilities.
    pub fn denominator(&self) -> u128 {
        self.denominator
    }

    pub fn arcs(&self, i: usize) -> &[(usize, u128)] {
        &self.arcs[i]
    }

    pub fn transition(&self, i: usize, j: usize) -> Rational {
        let w = self.arcs[i]
            .iter()
            .find(|(t, _)| *t == j)
            .map_or(0, |&(_, w)| w);
        Rational::new(BigInt::from(w), BigInt::from(self.denominator))
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        let total: u128 = self.arcs[i].iter().map(|&(_, w)| w).sum();
        Rational::new(BigInt::from(total), BigInt::from(self.denominator))
    }

    /// One step of the exact distribution: numerators over `Q^k` become
    /// numerators over `Q^(k+1)`.
    pub fn step_exact(&self, weights: &[BigInt]) -> Vec<BigInt> {
        let mut next = vec![BigInt::zero(); self.len()];
        for (i, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for &(j, p) in &self.arcs[i] {
                next[j] += w * BigInt::from(p);
            }
        }
        next
    }

    pub fn step_f64(&self, dist: &[f64]) -> Vec<f64> {
        let q = self.denominator as f64;
        let mut next = vec![0.0; self.len()];
        for (i, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for &(j, p) in &self.arcs[i] {
                next[j] += w * (p as f64 / q);
            }
        }
        next
    }

    /// `E|Δ_k|` for `k = 0..=n` in floating point.
    pub fn abs_delta_f64(&self, n: usize) -> Vec<f64> {
        let abs: Vec<f64> = self
            .states
            .iter()
            .map(|&x| x.unsigned_abs() as f64 / self.scale as f64)
            .collect();
        let mut dist = vec![0.0; self.len()];
        dist[0] = 1.0;
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k > 0 {
                dist = self.step_f64(&dist);
            }
            out.push(dist.iter().zip(&abs).map(|(p, a)| p * a).sum());
        }
        out
    }

    /// Closed classes and periodicity of the chain.
    pub fn structure(&self) -> ChainStructure {
        let mut graph = DiGraph::<(), ()>::with_capacity(self.len(), 0);
        let nodes: Vec<_> = (0..self.len()).map(|_| graph.add_node(())).collect();
        for (i, row) in self.arcs.iter().enumerate() {
            for &(j, _) in row {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
        let components = tarjan_scc(&graph);
        let mut component_of = vec![0usize; self.len()];
        for (c, members) in components.iter().enumerate() {
            for node in members {
                component_of[node.index()] = c;
            }
        }
        let closed: Vec<Vec<usize>> = components
            .iter()
            .enumerate()
            .filter(|(c, members)| {
                members.iter().all(|node| {
                    self.arcs[node.index()]
                        .iter()
                        .all(|&(j, _)| component_of[j] == *c)
                })
            })
            .map(|(_, members)| {
                let mut v: Vec<usize> = members.iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        let period = if closed.len() == 1 {
            self.period(&closed[0])
        } else {
            0
        };
        ChainStructure {
            recurrent_classes: closed,
            period,
        }
    }

    /// Period of a closed class: gcd of `level(u) + 1 - level(v)` over its arcs.
    fn period(&self, class: &[usize]) -> u64 {
        let mut level = vec![None; self.len()];
        level[class[0]] = Some(0i64);
        let mut queue = VecDeque::from([class[0]]);
        let mut g = 0i64;
        while let Some(u) = queue.pop_front() {
            let lu = level[u].expect("visited");
            for &(v, _) in &self.arcs[u] {
                match level[v] {
                    None => {
                        level[v] = Some(lu + 1);
                        queue.push_back(v);
                    }
                    Some(lv) => g = g.gcd(&(lu + 1 - lv)),
                }
            }
        }
        g.unsigned_abs()
    }

    /// Exact stationary distribution on the unique closed class (zero
    /// elsewhere).
    pub fn stationary(&self) -> Result<Vec<Rational>> {
        let structure = self.structure();
        if structure.recurrent_classes.len() != 1 {
            return Err(Error::NotErgodic(format!(
                "{} closed classes",
                structure.recurrent_classes.len()
            )));
        }
        let class = &structure.recurrent_classes[0];
        let m = class.len();
        let pos: HashMap<usize, usize> = class.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        // Rows: (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
        let mut a = vec![vec![Rational::zero(); m + 1]; m];
        for (k, &i) in class.iter().enumerate() {
            for &(j, _) in &self.arcs[i] {
                let row = pos[&j];
                a[row][k] += self.transition(i, j);
            }
            a[k][k] -= Rational::one();
        }
        for cell in a[m - 1].iter_mut().take(m) {
            *cell = Rational::one();
        }
        a[m - 1][m] = Rational::one();
        let solution = solve_in_place(a)?;
        let mut pi = vec![Rational::zero(); self.len()];
        for (k, &i) in class.iter().enumerate() {
            pi[i] = solution[k].clone();
        }
        Ok(pi)
    }

    /// Adjacency-list dump with exact labels.
    pub fn dump(&self) -> ChainDump {
        ChainDump {
            tie: self.tie,
            scale: self.scale,
            initial: format_rational(&self.state(0)),
            states: self.states().iter().map(format_rational).collect(),
            edges: self
                .arcs
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().map(move |&(j, _)| (i, j))
                })
                .map(|(i, j)| ChainEdge {
                    from: format_rational(&self.state(i)),
                    to: format_rational(&self.state(j)),
                    probability: format_rational(&self.transition(i, j)),
                })
                .collect(),
        }
    }
}

/// Gauss-Jordan elimination on an augmented `m x (m + 1)` system.
fn solve_in_place(mut a: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::NotErgodic("singular stationary system".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for cell in a[col].iter_mut() {
            *cell *= &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (cell, p) in a[r].iter_mut().zip(&pivot_row) {
                    *cell -= &factor * p;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[m].clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStructure {
    pub recurrent_classes: Vec<Vec<usize>>,
    /// Period of the unique closed class; 0 when there is not exactly one.
    pub period: u64,
}

impl ChainStructure {
    pub fn is_ergodic(&self) -> bool {
        self.recurrent_classes.len() == 1 && self.period == 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainDump {
    pub tie: TieBreak,
    pub scale: u64,
    pub initial: String,
    pub states: Vec<String>,
    pub edges: Vec<ChainEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainEdge {
    pub from: String,
    pub to: String,
    pub probability: String,
}

/// Checks that every row of the chain sums to one.
pub fn is_row_stochastic(chain: &DeltaChain) -> bool {
    (0..chain.len()).all(|i| chain.row_sum(i).is_one())
}

/// Largest `|Δ|` over the states, in exact form.
pub fn max_abs_state(chain: &DeltaChain) -> Rational {
    chain
        .states()
        .into_iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn edge(from: &str, to: &str, p: &str) -> ChainEdge {
        ChainEdge {
            from: from.into(),
            to: to.into(),
            probability: p.into(),
        }
    }

    #[test]
    fn illustrative_chain_shape() {
        // Tails keeps Δ at 0, heads jumps to 1, then two forced S reads
        // return through 1/2.
        let chain =
            DeltaChain::build(&SourcePair::illustrative(), TieBreak::PreferR, DEFAULT_STATE_CAP)
                .unwrap();
        let mut edges = chain.dump().edges;
        edges.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        assert_eq!(
            edges,
            [
                edge("0", "0", "1/2"),
                edge("0", "1", "1/2"),
                edge("1", "1/2", "1"),
                edge("1/2", "0", "1"),
            ]
        );
        assert!(chain.structure().is_ergodic());
        let pi = chain.stationary().unwrap();
        let by_value: HashMap<String, Rational> = chain
            .states()
            .iter()
            .map(format_rational)
            .zip(pi)
            .collect();
        assert_eq!(by_value["0"], ratio(1, 2));
        assert_eq!(by_value["1"], ratio(1, 4));
        assert_eq!(by_value["1/2"], ratio(1, 4));
    }

    #[test]
    fn uniform_pair_is_periodic() {
        // From 0 read R: Δ = 1/2; from 1/2 read S: Δ = 0.
        let chain = DeltaChain::build(&SourcePair::uniform(2).unwrap(), TieBreak::PreferR, 100)
            .unwrap();
        assert_eq!(chain.states(), [ratio(0, 1), ratio(1, 2)]);
        let st = chain.structure();
        assert_eq!(st.recurrent_classes.len(), 1);
        assert_eq!(st.period, 2);
        assert!(!st.is_ergodic());
        let e = chain.abs_delta_f64(5);
        assert_eq!(e, [0.0, 0.5, 0.0, 0.5, 0.0, 0.5]);
    }

    #[test]
    fn path_dependent_tie_is_rejected() {
        let err = DeltaChain::build(&SourcePair::illustrative(), TieBreak::AlternateFromR, 100);
        assert_eq!(err.unwrap_err(), Error::PathDependentTie);
    }

    #[test]
    fn state_cap_is_enforced() {
        let pair = SourcePair::parse(&["1/7", "2/7", "4/7"], &["3/11", "3/11", "5/11"]).unwrap();
        assert_eq!(
            DeltaChain::build(&pair, TieBreak::PreferR, 3).unwrap_err(),
            Error::StateExplosion { cap: 3 }
        );
        let chain = DeltaChain::build(&pair, TieBreak::PreferR, DEFAULT_STATE_CAP).unwrap();
        assert!(is_row_stochastic(&chain));
        assert!(max_abs_state(&chain) <= pair.moments().gamma);
    }

    #[test]
    fn random_tie_mixes_both_reads_at_zero() {
        let pair = SourcePair::illustrative();
        let chain = DeltaChain::build(&pair, TieBreak::Random { p: 0.25 }, 100).unwrap();
        assert!(is_row_stochastic(&chain));
        // R at 0 w.p. 1/4: heads (1/8) to 1, tails (1/8) stays; S w.p. 3/4 reads
        // the two-headed coin and moves to -1/2.
        assert_eq!(chain.transition(0, 0), ratio(1, 8));
        let minus_half = chain
            .states()
            .iter()
            .position(|x| *x == ratio(-1, 2))
            .unwrap();
        assert_eq!(chain.transition(0, minus_half), ratio(3, 4));
    }

    #[test]
    fn exact_and_float_steps_agree() {
        let pair = SourcePair::parse(&["1/3", "1/6", "1/2"], &["1/4", "1/2", "1/4"]).unwrap();
        let chain = DeltaChain::build(&pair, TieBreak::PreferS, DEFAULT_STATE_CAP).unwrap();
        let q = chain.denominator() as f64;
        let mut exact = vec![BigInt::zero(); chain.len()];
        exact[0] = BigInt::one();
        let mut float = vec![0.0; chain.len()];
        float[0] = 1.0;
        for k in 1..=20 {
            exact = chain.step_exact(&exact);
            float = chain.step_f64(&float);
            let total: BigInt = exact.iter().sum();
            assert_eq!(total, num_traits::pow(BigInt::from(chain.denominator()), k));
            for (e, f) in exact.iter().zip(&float) {
                let as_f = e.to_f64().unwrap() / q.powi(k as i32);
                assert!((as_f - f).abs() < 1e-12);
            }
        }
    }
}

//! The relation `p ⊩ q` between primes `p` in `(x/2, x]` and primes `q` in
//! `(x/4, y]`: the progression `q, q + r!p, ..., q + (r-1) r!p` lies in the
//! second set. `p ⊩' q` additionally requires `q + r r!p` to fall outside it.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{sieve_range, SieveConfig};
use crate::statistics::factorial;

const STRICT: u32 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `p ⊩ q`
    Full,
    /// `p ⊩' q`
    Strict,
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "strict" => Ok(Self::Strict),
            other => Err(Error::InvalidParameter(format!("unknown relation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationGraph {
    r: u32,
    x: u64,
    y: u64,
    r_factorial: u64,
    p_primes: Vec<u64>,
    q_primes: Vec<u64>,
    // per p: indices into q_primes, STRICT flag in the top bit
    edges: Vec<Vec<u32>>,
    strict_q_degrees: Vec<Vec<u32>>,
    progressions_disjoint: bool,
}

/// Builds the relation for all `p` in `(x/2, x]` and `q` in `(x/4, y]`.
pub fn build_relation(r: u32, x: u64, y: u64, config: &SieveConfig) -> Result<RelationGraph> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let r_factorial = factorial(r)? as u64;
    let hi = (r as u64)
        .checked_mul(r_factorial)
        .and_then(|v| v.checked_mul(x))
        .and_then(|v| v.checked_add(y))
        .ok_or_else(|| Error::InvalidParameter(format!("y + r r! x overflows for r = {r}, x = {x}, y = {y}")))?;
    let table = sieve_range(0, hi.max(2), config)?;
    let q_primes: Vec<u64> = table
        .primes()
        .iter()
        .copied()
        .filter(|&q| 4 * q > x && q <= y)
        .collect();
    if q_primes.len() >= STRICT as usize {
        return Err(Error::InvalidParameter(format!(
            "{} primes in (x/4, y] exceed the index range",
            q_primes.len()
        )));
    }
    let p_primes: Vec<u64> = table
        .primes()
        .iter()
        .copied()
        .filter(|&p| 2 * p > x && p <= x)
        .collect();
    let in_q = |n: u64| n <= y && 4 * n > x && table.is_prime(n);

    let edges: Vec<Vec<u32>> = p_primes
        .par_iter()
        .map(|&p| {
            let step = r_factorial * p;
            let last = (r as u64 - 1) * step;
            let mut out = Vec::new();
            for (k, &q) in q_primes.iter().enumerate() {
                if q + last > y {
                    break;
                }
                if (1..r as u64).all(|j| in_q(q + j * step)) {
                    let strict = !in_q(q + r as u64 * step);
                    out.push(k as u32 | if strict { STRICT } else { 0 });
                }
            }
            out
        })
        .collect();
    let bytes: u64 = edges.iter().map(|e| e.len() as u64 * 4).sum();
    if bytes > config.mem_budget_bytes {
        return Err(Error::MemoryBudget {
            requested: bytes,
            budget: config.mem_budget_bytes,
        });
    }

    let mut graph = RelationGraph {
        r,
        x,
        y,
        r_factorial,
        p_primes,
        q_primes,
        edges,
        strict_q_degrees: Vec::new(),
        progressions_disjoint: true,
    };
    graph.strict_q_degrees = (0..r).map(|i| graph.q_degrees(Relation::Strict, i)).collect();
    graph.progressions_disjoint = graph.check_disjoint_progressions();
    Ok(graph)
}

impl RelationGraph {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn r_factorial(&self) -> u64 {
        self.r_factorial
    }

    /// Primes in `(x/2, x]`.
    pub fn p_primes(&self) -> &[u64] {
        &self.p_primes
    }

    /// Primes in `(x/4, y]`.
    pub fn q_primes(&self) -> &[u64] {
        &self.q_primes
    }

    pub fn q_index(&self, q: u64) -> Option<usize> {
        self.q_primes.binary_search(&q).ok()
    }

    /// Edges of the `k`-th element of [`Self::p_primes`] as `(q, strict)`.
    pub fn edges_of(&self, k: usize) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.edges[k]
            .iter()
            .map(|&e| (self.q_primes[(e & !STRICT) as usize], e & STRICT != 0))
    }

    /// `Some(strict)` when `p ⊩ q`.
    pub fn relation(&self, p: u64, q: u64) -> Option<bool> {
        let k = self.p_primes.binary_search(&p).ok()?;
        let j = self.q_index(q)? as u32;
        let e = &self.edges[k];
        let pos = e.partition_point(|&v| v & !STRICT < j);
        e.get(pos).filter(|&&v| v & !STRICT == j).map(|&v| v & STRICT != 0)
    }

    pub fn edge_count(&self, relation: Relation) -> u64 {
        self.edges
            .iter()
            .map(|e| match relation {
                Relation::Full => e.len() as u64,
                Relation::Strict => e.iter().filter(|&&v| v & STRICT != 0).count() as u64,
            })
            .sum()
    }

    /// `deg_i(p)`: the number of `q` with `p ⊩ q - i r!p` (or `⊩'`), which
    /// does not depend on `i`.
    pub fn p_degrees(&self, relation: Relation) -> Vec<u32> {
        self.edges
            .iter()
            .map(|e| match relation {
                Relation::Full => e.len() as u32,
                Relation::Strict => e.iter().filter(|&&v| v & STRICT != 0).count() as u32,
            })
            .collect()
    }

    /// `deg_i(q)`: the number of `p` with `p ⊩ q - i r!p` (or `⊩'`), indexed
    /// like [`Self::q_primes`].
    pub fn q_degrees(&self, relation: Relation, i: u32) -> Vec<u32> {
        if relation == Relation::Strict && (i as usize) < self.strict_q_degrees.len() {
            return self.strict_q_degrees[i as usize].clone();
        }
        let n = self.q_primes.len();
        (0..self.p_primes.len())
            .into_par_iter()
            .fold(
                || vec![0u32; n],
                |mut acc, k| {
                    let shift = i as u64 * self.r_factorial * self.p_primes[k];
                    for (q0, strict) in self.edges_of(k) {
                        if relation == Relation::Strict && !strict {
                            continue;
                        }
                        if let Some(j) = self.q_index(q0 + shift) {
                            acc[j] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u32; n],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
                    a
                },
            )
    }

    /// For each `p` and `q`, at most one `0 <= i < r` has `p ⊩' q - i r!p`.
    pub fn progressions_disjoint(&self) -> bool {
        self.progressions_disjoint
    }

    fn check_disjoint_progressions(&self) -> bool {
        (0..self.p_primes.len()).into_par_iter().all(|k| {
            let step = self.r_factorial * self.p_primes[k];
            let mut hits: Vec<u64> = self
                .edges_of(k)
                .filter(|&(_, strict)| strict)
                .flat_map(|(q0, _)| (0..self.r as u64).map(move |i| q0 + i * step))
                .collect();
            let total = hits.len();
            hits.sort_unstable();
            hits.dedup();
            hits.len() == total
        })
    }
}

/// `⊩_a`: strict edges whose whole progression satisfies `survives`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedRelation {
    r: u32,
    r_factorial: u64,
    p_primes: Vec<u64>,
    candidates: Vec<Vec<u64>>,
}

pub fn refine_relation<F>(graph: &RelationGraph, survives: F) -> RefinedRelation
where
    F: Fn(u64) -> bool + Sync,
{
    let candidates = (0..graph.p_primes.len())
        .into_par_iter()
        .map(|k| {
            let step = graph.r_factorial * graph.p_primes[k];
            graph
                .edges_of(k)
                .filter(|&(q, strict)| strict && (0..graph.r as u64).all(|j| survives(q + j * step)))
                .map(|(q, _)| q)
                .collect()
        })
        .collect();
    RefinedRelation {
        r: graph.r,
        r_factorial: graph.r_factorial,
        p_primes: graph.p_primes.clone(),
        candidates,
    }
}

impl RefinedRelation {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn r_factorial(&self) -> u64 {
        self.r_factorial
    }

    pub fn p_primes(&self) -> &[u64] {
        &self.p_primes
    }

    /// `Q(a, p)` for the `k`-th prime of [`Self::p_primes`].
    pub fn candidates(&self, k: usize) -> &[u64] {
        &self.candidates[k]
    }

    pub fn edge_count(&self) -> u64 {
        self.candidates.iter().map(|c| c.len() as u64).sum()
    }

    pub fn p_degrees(&self) -> Vec<u32> {
        self.candidates.iter().map(|c| c.len() as u32).collect()
    }

    /// Number of `p` with `p ⊩_a q - i r!p`, for every `q` reached.
    pub fn q_degree_map(&self, i: u32) -> std::collections::BTreeMap<u64, u32> {
        let mut map = std::collections::BTreeMap::new();
        for (k, c) in self.candidates.iter().enumerate() {
            let shift = i as u64 * self.r_factorial * self.p_primes[k];
            for &q in c {
                *map.entry(q + shift).or_insert(0) += 1;
            }
        }
        map
    }
}

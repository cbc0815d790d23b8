//! Exact `Y(x)` by depth-first search over residue tuples.
//!
//! For a fixed `y` the search decides whether `[1, y]` can be covered, visiting
//! primes in decreasing order. A node is pruned when the best possible
//! coverage of the remaining primes (each taking its fullest class) is smaller
//! than the number of uncovered positions. Reflection `t -> y + 1 - t` maps
//! covers to covers; for even `y` it swaps the two classes of 2, so only
//! `a_2 = 1` is tried.
//!
//! `Y(x)` is found by testing `y = lower + 1, lower + 2, ...` starting from the
//! greedy lower bound, since coverability of `[1, y]` is monotone in `y`.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::assignment::{verify_cover, ResidueAssignment};
use super::greedy::{greedy_y, PrimeOrder};
use crate::error::{Error, Result};
use crate::primes::small_primes;

/// Positions are bits of a `u128`, so the exact search handles `y <= 128`.
pub const MAX_EXACT_Y: u64 = 128;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSearch {
    pub budget: u64,
    pub parallel: bool,
}

impl Default for ExactSearch {
    fn default() -> Self {
        Self {
            budget: DEFAULT_NODE_BUDGET,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactY {
    pub y: u64,
    pub witness: ResidueAssignment,
    /// False when the node budget ran out; `y` is then only a lower bound.
    pub optimal: bool,
    pub nodes: u64,
}

/// Outcome of one feasibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverSearch {
    Found(ResidueAssignment),
    Infeasible,
    BudgetExceeded,
}

struct Level {
    p: u64,
    // (residue, mask of positions in [1, y] congruent to it), empty masks deduplicated
    classes: Vec<(u64, u128)>,
}

fn levels(x: u64, y: u64) -> Vec<Level> {
    let mut primes = small_primes(x);
    primes.reverse();
    primes
        .into_iter()
        .map(|p| {
            let mut classes = Vec::new();
            let mut seen_empty = false;
            for a in 0..p {
                let mut mask = 0u128;
                let mut t = if a == 0 { p } else { a };
                while t <= y {
                    mask |= 1 << (t - 1);
                    t += p;
                }
                if mask == 0 {
                    if seen_empty {
                        continue;
                    }
                    seen_empty = true;
                }
                if p == 2 && y % 2 == 0 && a == 0 {
                    continue;
                }
                classes.push((a, mask));
            }
            Level { p, classes }
        })
        .collect()
}

struct Shared<'a> {
    levels: &'a [Level],
    nodes: &'a AtomicU64,
    budget: u64,
    out_of_budget: &'a AtomicBool,
    // index of the lowest top-level branch that found a cover
    found_branch: &'a AtomicUsize,
}

impl Shared<'_> {
    fn dfs(&self, depth: usize, uncovered: u128, chosen: &mut Vec<u64>, branch: usize) -> bool {
        if uncovered == 0 {
            return true;
        }
        if depth == self.levels.len()
            || self.out_of_budget.load(Ordering::Relaxed)
            || self.found_branch.load(Ordering::Relaxed) < branch
        {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.out_of_budget.store(true, Ordering::Relaxed);
            return false;
        }
        let need = uncovered.count_ones();
        let reachable: u32 = self.levels[depth..]
            .iter()
            .map(|l| {
                l.classes
                    .iter()
                    .map(|&(_, m)| (m & uncovered).count_ones())
                    .max()
                    .unwrap_or(0)
            })
            .sum();
        if reachable < need {
            return false;
        }
        let mut order: Vec<(u32, u64, u128)> = self.levels[depth]
            .classes
            .iter()
            .map(|&(a, m)| ((m & uncovered).count_ones(), a, m))
            .collect();
        order.sort_by(|l, r| r.0.cmp(&l.0).then(l.1.cmp(&r.1)));
        for (_, a, m) in order {
            chosen.push(a);
            if self.dfs(depth + 1, uncovered & !m, chosen, branch) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

fn to_assignment(x: u64, levels: &[Level], chosen: &[u64]) -> ResidueAssignment {
    let mut out = ResidueAssignment::new(x);
    for (level, &a) in levels.iter().zip(chosen) {
        out.insert(level.p, a).expect("class of a prime <= x");
    }
    out.complete_with_zero();
    out
}

/// Decides whether the primes `<= x` can cover `[1, y]`, spending at most
/// `budget` search nodes counted in `nodes`.
pub fn search_cover(x: u64, y: u64, opts: &ExactSearch, nodes: &AtomicU64) -> Result<CoverSearch> {
    if y > MAX_EXACT_Y {
        return Err(Error::InvalidParameter(format!(
            "exact search supports y <= {MAX_EXACT_Y}, got {y}"
        )));
    }
    if y == 0 {
        let mut a = ResidueAssignment::new(x);
        a.complete_with_zero();
        return Ok(CoverSearch::Found(a));
    }
    let levels = levels(x, y);
    let full: u128 = if y == 128 { u128::MAX } else { (1u128 << y) - 1 };
    let out_of_budget = AtomicBool::new(false);
    let found_branch = AtomicUsize::new(usize::MAX);
    let shared = Shared {
        levels: &levels,
        nodes,
        budget: opts.budget,
        out_of_budget: &out_of_budget,
        found_branch: &found_branch,
    };
    let Some(top) = levels.first() else {
        return Ok(CoverSearch::Infeasible);
    };

    // Branch on the largest prime's class; the lowest successful branch wins
    // so the witness does not depend on scheduling.
    let results: Mutex<Vec<(usize, Vec<u64>)>> = Mutex::new(Vec::new());
    let run_branch = |(branch, &(a, m)): (usize, &(u64, u128))| {
        if found_branch.load(Ordering::Relaxed) < branch {
            return;
        }
        let mut chosen = vec![a];
        if shared.dfs(1, full & !m, &mut chosen, branch) {
            found_branch.fetch_min(branch, Ordering::Relaxed);
            results.lock().expect("poisoned").push((branch, chosen));
        }
    };
    if opts.parallel {
        top.classes.par_iter().enumerate().for_each(run_branch);
    } else {
        top.classes.iter().enumerate().for_each(run_branch);
    }

    let mut results = results.into_inner().expect("poisoned");
    results.sort_by_key(|(b, _)| *b);
    if let Some((_, chosen)) = results.into_iter().next() {
        let witness = to_assignment(x, &levels, &chosen);
        debug_assert!(verify_cover(y, &witness));
        return Ok(CoverSearch::Found(witness));
    }
    if out_of_budget.load(Ordering::Relaxed) {
        Ok(CoverSearch::BudgetExceeded)
    } else {
        Ok(CoverSearch::Infeasible)
    }
}

/// `Y(x)`: the largest `y` such that one class per prime `<= x` covers `[1, y]`.
pub fn exact_y(x: u64, opts: &ExactSearch) -> Result<ExactY> {
    let greedy = greedy_y(x, PrimeOrder::Increasing)?;
    let nodes = AtomicU64::new(0);
    let mut best_y = greedy.y.min(MAX_EXACT_Y);
    let mut witness = greedy.witness;
    loop {
        let next = best_y + 1;
        if next > MAX_EXACT_Y {
            return Err(Error::InvalidParameter(format!(
                "Y({x}) exceeds the exact search limit {MAX_EXACT_Y}"
            )));
        }
        match search_cover(x, next, opts, &nodes)? {
            CoverSearch::Found(a) => {
                best_y = next;
                witness = a;
            }
            CoverSearch::Infeasible => {
                return Ok(ExactY {
                    y: best_y,
                    witness,
                    optimal: true,
                    nodes: nodes.load(Ordering::Relaxed),
                })
            }
            CoverSearch::BudgetExceeded => {
                return Ok(ExactY {
                    y: best_y,
                    witness,
                    optimal: false,
                    nodes: nodes.load(Ordering::Relaxed),
                })
            }
        }
    }
}

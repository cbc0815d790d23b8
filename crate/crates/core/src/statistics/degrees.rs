use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::singular::singular_series;
use crate::construction::{Relation, RelationGraph, ALPHA_CUTOFF};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    P,
    Q,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p" | "P" => Ok(Self::P),
            "q" | "Q" => Ok(Self::Q),
            other => Err(Error::InvalidParameter(format!("unknown side {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeQuery {
    pub side: Side,
    pub relation: Relation,
    pub i: u32,
    /// Skip the `x sqrt(log x) <= y <= x log x` check.
    pub allow_outside_regime: bool,
}

impl DegreeQuery {
    pub fn new(side: Side, i: u32) -> Self {
        Self {
            side,
            relation: Relation::Full,
            i,
            allow_outside_regime: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub r: u32,
    pub x: u64,
    pub y: u64,
    pub side: Side,
    pub relation: Relation,
    pub i: u32,
    #[serde(skip)]
    pub vertices: Vec<u64>,
    #[serde(skip)]
    pub counts: Vec<u32>,
    pub vertex_count: usize,
    pub total: u64,
    pub alpha_r: f64,
    /// `alpha_r y / log^r x` on side P, `alpha_r x / (2 log^r x)` on side Q.
    pub predicted: f64,
    /// Quantiles of `count / predicted`; absent when there are no vertices.
    pub ratio_quantiles: Option<Quantiles>,
}

/// `(x sqrt(log x), x log x)`
pub fn degree_regime(x: u64) -> (f64, f64) {
    let l = (x as f64).ln();
    (x as f64 * l.sqrt(), x as f64 * l)
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

pub fn quantiles(values: &[f64]) -> Option<Quantiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(Quantiles {
        min: v[0],
        q25: nearest_rank(&v, 0.25),
        median: nearest_rank(&v, 0.5),
        q75: nearest_rank(&v, 0.75),
        max: v[v.len() - 1],
    })
}

/// Exact per-vertex degrees with the singular-series predictions.
pub fn degree_stats(graph: &RelationGraph, query: &DegreeQuery) -> Result<DegreeStats> {
    let (r, x, y) = (graph.r(), graph.x(), graph.y());
    if query.i >= r {
        return Err(Error::InvalidParameter(format!(
            "shift i = {} must be below r = {r}",
            query.i
        )));
    }
    let (lo, hi) = degree_regime(x);
    if !query.allow_outside_regime && !((y as f64) >= lo && (y as f64) <= hi) {
        return Err(Error::InvalidParameter(format!(
            "y = {y} outside [x sqrt(log x), x log x] = [{lo:.0}, {hi:.0}]"
        )));
    }
    let alpha_r = singular_series(r, ALPHA_CUTOFF)?.value;
    let log_r = (x as f64).ln().powi(r as i32);
    let (vertices, counts, predicted) = match query.side {
        Side::P => (
            graph.p_primes().to_vec(),
            graph.p_degrees(query.relation),
            alpha_r * y as f64 / log_r,
        ),
        Side::Q => (
            graph.q_primes().to_vec(),
            graph.q_degrees(query.relation, query.i),
            alpha_r * x as f64 / (2.0 * log_r),
        ),
    };
    let ratios: Vec<f64> = counts.iter().map(|&c| c as f64 / predicted).collect();
    Ok(DegreeStats {
        r,
        x,
        y,
        side: query.side,
        relation: query.relation,
        i: query.i,
        vertex_count: vertices.len(),
        total: counts.iter().map(|&c| c as u64).sum(),
        vertices,
        counts,
        alpha_r,
        predicted,
        ratio_quantiles: quantiles(&ratios),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_relation;
    use crate::primes::SieveConfig;

    fn any_regime(side: Side, i: u32) -> DegreeQuery {
        DegreeQuery {
            allow_outside_regime: true,
            ..DegreeQuery::new(side, i)
        }
    }

    #[test]
    fn r1_full_counts_all_of_q() {
        let g = build_relation(1, 100, 400, &SieveConfig::default()).unwrap();
        let s = degree_stats(&g, &any_regime(Side::P, 0)).unwrap();
        assert!(s.counts.iter().all(|&c| c as usize == g.q_primes().len()));
    }

    #[test]
    fn empty_q_gives_zero_counts() {
        let g = build_relation(2, 100, 20, &SieveConfig::default()).unwrap();
        for side in [Side::P, Side::Q] {
            let s = degree_stats(&g, &any_regime(side, 1)).unwrap();
            assert_eq!(s.total, 0);
        }
        assert!(degree_stats(&g, &DegreeQuery::new(Side::P, 0)).is_err());
    }

    #[test]
    fn sides_balance() {
        let g = build_relation(2, 1000, 5000, &SieveConfig::default()).unwrap();
        for relation in [Relation::Full, Relation::Strict] {
            for i in 0..2 {
                let p = degree_stats(
                    &g,
                    &DegreeQuery {
                        relation,
                        ..DegreeQuery::new(Side::P, i)
                    },
                )
                .unwrap();
                let q = degree_stats(
                    &g,
                    &DegreeQuery {
                        relation,
                        ..DegreeQuery::new(Side::Q, i)
                    },
                )
                .unwrap();
                assert_eq!(p.total, q.total);
            }
        }
        assert!(degree_stats(&g, &DegreeQuery::new(Side::P, 2)).is_err());
    }

    #[test]
    fn quantile_ranks() {
        let q = quantiles(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((q.min, q.q25, q.median, q.q75, q.max), (1.0, 1.0, 2.0, 3.0, 4.0));
        assert!(quantiles(&[]).is_none());
    }
}

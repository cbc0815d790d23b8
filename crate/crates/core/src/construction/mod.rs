//! The four-stage residue-class sieve that covers `[1, y]` with one class per
//! prime `p <= x`.

mod bits;
mod params;
mod partition;
mod relation;
mod stages;

use serde::{Deserialize, Serialize};

pub use params::{
    default_y, default_z, iterated_logs, ConstructionInput, ConstructionParams, DEFAULT_BAND, DEFAULT_EPSILON,
};
pub use partition::{partition_primes, PrimePartition};
pub use relation::{build_relation, refine_relation, RefinedRelation, Relation, RelationGraph};
pub use stages::{stage1, stage2, stage3, stage4, Stage1, Stage2, Stage3, Stage4, Survivors};

use crate::covering::{apply_classes, ResidueAssignment};
use crate::error::{Error, Result};
use crate::primes::SieveConfig;
use crate::statistics::{gamma_factors, singular_series};

/// Primes up to this bound enter the `alpha_r` used for degree predictions.
pub const ALPHA_CUTOFF: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
    pub s4: usize,
    pub empty_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage1Report {
    pub survivors: u64,
    pub q_primes: u64,
    pub smooth: u64,
    pub other: u64,
    pub split_exhaustive: bool,
    pub predicted_p_count: f64,
    pub predicted_q_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage2Report {
    pub survivors: u64,
    pub q_survivors: u64,
    pub gamma: f64,
    /// `gamma_1, ..., gamma_r`, empty when `r >= min S2`.
    pub gamma_i: Vec<f64>,
    /// `log_2 x / log z`
    pub gamma_mertens: Option<f64>,
    /// `r / (2 log r) * x / y`
    pub gamma_asymptotic: f64,
    /// `gamma * #Q`
    pub expected_q_survivors: f64,
    pub q_survivor_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub p_count: usize,
    pub q_count: usize,
    pub full_edges: u64,
    pub strict_edges: u64,
    pub refined_edges: u64,
    pub progressions_disjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage3Report {
    pub chosen: usize,
    pub deferred: usize,
    pub progression_removed: u64,
    pub class_removed: u64,
    pub survivors: u64,
    pub q_survivors: u64,
    /// Fraction of `Q(a)` still uncovered.
    pub q_survival_rate: Option<f64>,
    /// `(1 + epsilon) / r`
    pub survival_bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage4Report {
    pub pool_size: usize,
    pub survivors_in: u64,
    pub matched: usize,
    pub remainder: u64,
    pub deficit: u64,
}

/// Vertices whose degree lies within the band around its prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub alpha_r: f64,
    pub band: f64,
    pub p_degree_predicted: f64,
    pub q_degree_predicted: f64,
    pub p0: usize,
    pub q0: usize,
    pub p1: usize,
    pub q1: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub params: ConstructionParams,
    pub r_threshold_met: bool,
    pub partition: PartitionReport,
    pub stage1: Stage1Report,
    pub stage2: Stage2Report,
    pub relation: RelationReport,
    pub stage3: Stage3Report,
    pub stage4: Stage4Report,
    pub diagnostics: DiagnosticReport,
    /// `[y, after stage 1, after stage 2, after stage 3, after stage 4]`
    pub survivor_counts: Vec<u64>,
    pub success: bool,
    /// Largest `y'` with `[1, y']` covered by the final assignment.
    pub covered_prefix: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionOutcome {
    pub assignment: ResidueAssignment,
    pub remainder: Vec<u64>,
    pub report: StageReport,
}

fn within(ratio: Option<f64>, band: f64) -> bool {
    ratio.is_some_and(|v| v >= 1.0 / (1.0 + band) && v <= 1.0 + band)
}

fn ratio(actual: f64, predicted: f64) -> Option<f64> {
    (predicted > 0.0).then(|| actual / predicted)
}

/// Runs all four stages, then checks the combined assignment with the
/// covering module.
pub fn run_construction(params: &ConstructionParams, config: &SieveConfig) -> Result<ConstructionOutcome> {
    run_construction_with_band(params, config, DEFAULT_BAND)
}

pub fn run_construction_with_band(
    params: &ConstructionParams,
    config: &SieveConfig,
    band: f64,
) -> Result<ConstructionOutcome> {
    let (x, y, r) = (params.x, params.y, params.r);
    if y / 8 > config.mem_budget_bytes {
        return Err(Error::MemoryBudget {
            requested: y / 8,
            budget: config.mem_budget_bytes,
        });
    }
    let log_x = (x as f64).ln();
    let part = partition_primes(params);

    let (a1, s1) = stage1(params, &part)?;
    let (a2, s2) = stage2(params, &part, &s1)?;
    let graph = build_relation(r, x, y, config)?;
    let refined = refine_relation(&graph, |n| s2.survivors.contains(n) && graph.q_index(n).is_some());
    let (a3, s3) = stage3(params, &refined, &s2.survivors)?;
    let mut pool = part.s4.clone();
    pool.extend(&s3.deferred);
    pool.sort_unstable();
    let stage3_list = s3.survivors.to_vec();
    let (a4, s4) = stage4(x, &stage3_list, &pool)?;

    let mut assignment = a1;
    for fragment in [&a2, &a3, &a4] {
        assignment.merge(fragment)?;
    }
    if !assignment.is_total() {
        return Err(Error::InvalidAssignment("stages left a prime without a class".into()));
    }
    let check = apply_classes(y, &assignment);
    if check.survivors() != s4.remainder.as_slice() {
        return Err(Error::InvalidAssignment(format!(
            "pipeline remainder ({} elements) disagrees with the covering check ({} elements)",
            s4.remainder.len(),
            check.survivors().len()
        )));
    }

    let q_count = s1.q_primes.len() as f64;
    let gamma: f64 = part.s2.iter().map(|&s| 1.0 - 1.0 / s as f64).product();
    let gamma_i = gamma_factors(&part.s2, r).map(|g| g.values).unwrap_or_default();
    let gamma_r = gamma_i.last().copied();
    let (_, log2_x, _) = iterated_logs(x);
    let rf = r as f64;

    let alpha_r = singular_series(r, ALPHA_CUTOFF)?.value;
    let log_r_x = log_x.powi(r as i32);
    let p_pred = alpha_r * y as f64 / log_r_x;
    let q_pred = alpha_r * x as f64 / (2.0 * log_r_x);
    let p0 = graph
        .p_degrees(Relation::Full)
        .iter()
        .filter(|&&d| within(ratio(d as f64, p_pred), band))
        .count();
    let q0 = graph
        .q_degrees(Relation::Full, 0)
        .iter()
        .filter(|&&d| within(ratio(d as f64, q_pred), band))
        .count();
    let (p1, q1) = match gamma_r {
        Some(g_r) => {
            let p1 = refined
                .p_degrees()
                .iter()
                .filter(|&&d| within(ratio(d as f64, g_r * p_pred), band))
                .count();
            let q_map = refined.q_degree_map(0);
            let q1 = s2
                .q_survivors
                .iter()
                .filter(|q| {
                    let d = q_map.get(q).copied().unwrap_or(0) as f64;
                    within(ratio(d, g_r / gamma * q_pred), band)
                })
                .count();
            (p1, q1)
        }
        None => (0, 0),
    };

    let q_after: u64 = s2.q_survivors.iter().filter(|&&q| s3.survivors.contains(q)).count() as u64;
    let q_survival_rate = ratio(q_after as f64, s2.q_survivors.len() as f64);
    let survival_bound = (1.0 + params.epsilon) / rf;
    let empty_classes = [("s1", &part.s1), ("s2", &part.s2), ("s3", &part.s3), ("s4", &part.s4)]
        .iter()
        .filter(|(_, v)| v.is_empty())
        .map(|(n, _)| n.to_string())
        .collect();

    let report = StageReport {
        params: params.clone(),
        r_threshold_met: r >= 13,
        partition: PartitionReport {
            s1: part.s1.len(),
            s2: part.s2.len(),
            s3: part.s3.len(),
            s4: part.s4.len(),
            empty_classes,
        },
        stage1: Stage1Report {
            survivors: s1.survivors.count(),
            q_primes: s1.q_primes.len() as u64,
            smooth: s1.smooth.len() as u64,
            other: s1.other.len() as u64,
            split_exhaustive: s1.split_is_exhaustive(),
            predicted_p_count: x as f64 / (2.0 * log_x),
            predicted_q_count: y as f64 / log_x,
        },
        stage2: Stage2Report {
            survivors: s2.survivors.count(),
            q_survivors: s2.q_survivors.len() as u64,
            gamma,
            gamma_i,
            gamma_mertens: log2_x.map(|l2| l2 / (params.z as f64).ln()),
            gamma_asymptotic: rf / (2.0 * rf.ln()) * x as f64 / y as f64,
            expected_q_survivors: gamma * q_count,
            q_survivor_ratio: ratio(s2.q_survivors.len() as f64, gamma * q_count),
        },
        relation: RelationReport {
            p_count: graph.p_primes().len(),
            q_count: graph.q_primes().len(),
            full_edges: graph.edge_count(Relation::Full),
            strict_edges: graph.edge_count(Relation::Strict),
            refined_edges: refined.edge_count(),
            progressions_disjoint: graph.progressions_disjoint(),
        },
        stage3: Stage3Report {
            chosen: s3.choices.len(),
            deferred: s3.deferred.len(),
            progression_removed: s3.progression_removed,
            class_removed: s3.class_removed,
            survivors: s3.survivors.count(),
            q_survivors: q_after,
            q_survival_rate,
            survival_bound,
            within_bound: q_survival_rate.map_or(true, |v| v <= survival_bound),
        },
        stage4: Stage4Report {
            pool_size: s4.pool_size,
            survivors_in: stage3_list.len() as u64,
            matched: s4.matched.len(),
            remainder: s4.remainder.len() as u64,
            deficit: s4.remainder.len() as u64,
        },
        diagnostics: DiagnosticReport {
            alpha_r,
            band,
            p_degree_predicted: p_pred,
            q_degree_predicted: q_pred,
            p0,
            q0,
            p1,
            q1,
        },
        survivor_counts: vec![
            y,
            s1.survivors.count(),
            s2.survivors.count(),
            s3.survivors.count(),
            s4.remainder.len() as u64,
        ],
        success: s4.remainder.is_empty(),
        covered_prefix: check.covered_prefix(),
    };
    Ok(ConstructionOutcome {
        assignment,
        remainder: s4.remainder,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{check_certificate, crt_assemble, verify_cover};

    fn toy(seed: u64) -> ConstructionParams {
        ConstructionInput::new(2, 30, seed)
            .with_y(20)
            .with_z(4)
            .resolve()
            .unwrap()
    }

    #[test]
    fn toy_always_covers() {
        for seed in 0..20 {
            let out = run_construction(&toy(seed), &SieveConfig::default()).unwrap();
            assert!(out.report.success);
            assert!(verify_cover(20, &out.assignment));
            let cert = crt_assemble(&out.assignment, 20).unwrap();
            assert!(check_certificate(&cert));
            assert_eq!(out.report.covered_prefix, 20);
        }
    }

    #[test]
    fn deterministic_and_monotone() {
        let params = ConstructionInput::new(2, 2000, 5)
            .with_y(6000)
            .with_z(40)
            .resolve()
            .unwrap();
        let a = run_construction(&params, &SieveConfig::default()).unwrap();
        let b = run_construction(&params, &SieveConfig::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.report.survivor_counts.windows(2).all(|w| w[0] >= w[1]));
        assert!(a.report.relation.progressions_disjoint);
        let check = apply_classes(params.y, &a.assignment);
        assert_eq!(check.survivors(), a.remainder.as_slice());
        assert_eq!(a.report.covered_prefix, check.covered_prefix());
    }

    #[test]
    fn s2_empty_keeps_strict_relation() {
        let params = ConstructionInput::new(2, 1000, 3)
            .with_y(4000)
            .with_z(5)
            .resolve()
            .unwrap();
        let out = run_construction(&params, &SieveConfig::default()).unwrap();
        assert_eq!(out.report.partition.s2, 0);
        assert_eq!(out.report.stage2.gamma, 1.0);
        assert_eq!(out.report.relation.refined_edges, out.report.relation.strict_edges);
    }
}

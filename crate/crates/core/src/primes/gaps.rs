//! Prime-gap scans. A gap `(p, g)` counts toward the limit `X` when both
//! `p` and `p + g` are at most `X`.

use serde::{Deserialize, Serialize};

use super::sieve::{PrimeStream, SieveConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRecord {
    pub start: u64,
    pub gap: u64,
}

impl GapRecord {
    pub fn end(&self) -> u64 {
        self.start + self.gap
    }
}

/// One row of [`merit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeritRow {
    pub start: u64,
    pub gap: u64,
    /// gap / ln(start)
    pub merit: f64,
    /// gap / ln(start)^2
    pub merit2: f64,
}

fn check_limit(limit: u64) -> Result<()> {
    if limit < 3 {
        return Err(Error::InvalidParameter(format!(
            "limit {limit} has fewer than two primes at or below it"
        )));
    }
    Ok(())
}

/// Calls `f(p, q)` for every pair of consecutive primes `p < q <= limit`.
fn for_each_gap(limit: u64, config: &SieveConfig, mut f: impl FnMut(u64, u64)) -> Result<()> {
    let mut prev: Option<u64> = None;
    for q in PrimeStream::new(0, limit, config)? {
        if let Some(p) = prev {
            f(p, q);
        }
        prev = Some(q);
    }
    Ok(())
}

/// Largest gap between consecutive primes up to `limit`; ties go to the
/// smallest start.
pub fn max_gap(limit: u64, config: &SieveConfig) -> Result<GapRecord> {
    check_limit(limit)?;
    let mut best = GapRecord { start: 2, gap: 1 };
    for_each_gap(limit, config, |p, q| {
        if q - p > best.gap {
            best = GapRecord { start: p, gap: q - p };
        }
    })?;
    Ok(best)
}

/// Record-setting gaps up to `limit`, in increasing order of start.
pub fn gap_records(limit: u64, config: &SieveConfig) -> Result<Vec<GapRecord>> {
    check_limit(limit)?;
    let mut records: Vec<GapRecord> = Vec::new();
    for_each_gap(limit, config, |p, q| {
        let gap = q - p;
        if records.last().map_or(true, |r| gap > r.gap) {
            records.push(GapRecord { start: p, gap });
        }
    })?;
    Ok(records)
}

pub fn merit_rows(records: &[GapRecord]) -> Vec<MeritRow> {
    records
        .iter()
        .map(|r| {
            let ln = (r.start as f64).ln();
            MeritRow {
                start: r.start,
                gap: r.gap,
                merit: r.gap as f64 / ln,
                merit2: r.gap as f64 / (ln * ln),
            }
        })
        .collect()
}

/// Normalized sizes of every record gap up to `limit`.
pub fn merit_report(limit: u64, config: &SieveConfig) -> Result<Vec<MeritRow>> {
    Ok(merit_rows(&gap_records(limit, config)?))
}

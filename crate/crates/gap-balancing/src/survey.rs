//! Large-range sweeps over the gap size: class counting, conjecture
//! checking, smallest-k tables, and the ambiguous-class census.
//!
//! Per-k work is O(k) perfect-square tests on numbers of size O(k^2);
//! values fit in a machine word far past the target range, so the sweep
//! stays on u64/i128 with a bigint fallback.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{count_divisors_u64, is_perfect_square, is_perfect_square_u64};
use crate::pairs::GapContext;
use crate::{Error, Result};

/// Survey result for a single gap size.
#[derive(Debug, Clone, Serialize)]
pub struct SurveyRecord {
    pub k: u64,
    pub class_count: u64,
    /// Number of positive divisors of |2k^2 - 1|.
    pub divisor_count: u64,
    /// Whether 2k^2 - 1 is a perfect square (self-conjugate class present).
    pub ambiguous: bool,
    /// Seeds (x, y), ascending in x; empty for k = 0.
    pub seeds: Vec<(u64, u64)>,
}

/// Radicand of the balancing-pair equation on machine integers.
fn radicand_i128(k: u64, x: u64) -> i128 {
    let (k, x) = (k as i128, x as i128);
    8 * x * x + 8 * (1 - k) * x + (2 * k - 1) * (2 * k - 1)
}

/// Seeds for one k, half-window scan mirrored through conjugation.
fn seeds_fast(k: u64) -> Vec<(u64, u64)> {
    if k == 0 {
        return Vec::new();
    }
    let mut seeds = Vec::new();
    let half = (k - 1) / 2;
    for x in 0..=half {
        let rad = radicand_i128(k, x);
        debug_assert!(rad > 0);
        let y = if rad <= u64::MAX as i128 {
            is_perfect_square_u64(rad as u64)
        } else {
            is_perfect_square(&BigInt::from(rad)).map(|r| u64::try_from(r).expect("root fits u64"))
        };
        if let Some(y) = y {
            let mirror = k - 1 - x;
            if mirror != x {
                seeds.push((mirror, y));
            }
            seeds.push((x, y));
        }
    }
    seeds.sort_unstable();
    seeds
}

/// One record for a single k.
pub fn record_for(k: u64) -> SurveyRecord {
    let ctx = GapContext::new(k);
    let pell = ctx.pell_constant().unsigned_abs() as u64;
    let seeds = seeds_fast(k);
    let class_count = if k == 0 { 1 } else { seeds.len() as u64 };
    SurveyRecord {
        k,
        class_count,
        divisor_count: count_divisors_u64(pell),
        ambiguous: ctx.pell_constant() > 0
            && is_perfect_square_u64(ctx.pell_constant() as u64).is_some(),
        seeds,
    }
}

/// Records for every k in the range, parallel over k, output ordered by k.
pub fn sweep(k_min: u64, k_max: u64) -> Result<Vec<SurveyRecord>> {
    if k_min > k_max {
        return Err(Error::Domain(format!("empty range {k_min}..={k_max}")));
    }
    Ok((k_min..=k_max)
        .into_par_iter()
        .map(record_for)
        .collect())
}

/// A class count disagreeing with the divisor count of |2k^2 - 1|.
/// Mismatches are data, not errors: a counterexample would be a finding.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureMismatch {
    pub k: u64,
    pub class_count: u64,
    pub divisor_count: u64,
}

pub fn check_conjecture(k_min: u64, k_max: u64) -> Result<Vec<ConjectureMismatch>> {
    Ok(sweep(k_min, k_max)?
        .into_iter()
        .filter(|r| r.class_count != r.divisor_count)
        .map(|r| ConjectureMismatch {
            k: r.k,
            class_count: r.class_count,
            divisor_count: r.divisor_count,
        })
        .collect())
}

/// For each observed class count `n`, the smallest k attaining it, plus
/// the full set of observed counts.
pub fn table1(k_max: u64) -> Result<(BTreeMap<u64, u64>, BTreeSet<u64>)> {
    let records = sweep(0, k_max)?;
    let mut smallest: BTreeMap<u64, u64> = BTreeMap::new();
    let mut observed = BTreeSet::new();
    for r in &records {
        observed.insert(r.class_count);
        smallest.entry(r.class_count).or_insert(r.k);
    }
    Ok((smallest, observed))
}

/// All k <= k_max with 2k^2 - 1 a perfect square, ascending.
pub fn ambiguous_k_values(k_max: u64) -> Result<Vec<u64>> {
    if k_max < 1 {
        return Err(Error::Domain("k_max must be at least 1".into()));
    }
    Ok((1..=k_max)
        .into_par_iter()
        .filter(|&k| {
            let n = 2 * (k as u128) * (k as u128) - 1;
            u64::try_from(n)
                .ok()
                .and_then(is_perfect_square_u64)
                .is_some()
        })
        .collect())
}

/// CSV lines for a sweep, `k,class_count,divisor_count,ambiguous`.
pub fn to_csv(records: &[SurveyRecord]) -> String {
    let mut out = String::from("k,class_count,divisor_count,ambiguous\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.k, r.class_count, r.divisor_count, r.ambiguous
        ));
    }
    out
}

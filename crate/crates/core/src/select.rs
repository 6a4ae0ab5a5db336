//! Greedy full-rank coefficient matrix construction and the design entry point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::ifcore::{compute_q, design_rates, optimal_projection, QForm, RateReport};
use crate::linalg::{int_rank_independent, IntMatrix, IntVector, RealMatrix};
use crate::sdm::{candidate_set, CandidateSet, SearchConfig};

/// Upper limit on (2M+1)^L for exhaustive enumeration.
pub const EXHAUSTIVE_GUARD: u128 = 10_000_000;

/// How the candidate set is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchMethod {
    Sdm,
    Exhaustive,
}

impl FromStr for SearchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sdm" => Ok(Self::Sdm),
            "exhaustive" => Ok(Self::Exhaustive),
            other => Err(Error::invalid(format!("unknown method `{other}` (expected sdm|exhaustive)"))),
        }
    }
}

/// The route that produced a design.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DesignTag {
    Sdm,
    Exhaustive,
    MmseIdentityFallback,
}

impl fmt::Display for DesignTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesignTag::Sdm => "sdm",
            DesignTag::Exhaustive => "exhaustive",
            DesignTag::MmseIdentityFallback => "mmse-identity-fallback",
        })
    }
}

/// A complete receiver design for one channel.
#[derive(Clone, Debug)]
pub struct IfDesign {
    pub a: IntMatrix,
    pub b: RealMatrix,
    pub report: RateReport,
    pub success: bool,
    pub method: DesignTag,
}

/// Sorts ascending by f(t) = tᵀQt, ties by lexicographic coordinates.
pub fn sort_candidates(omega: &CandidateSet, q: &QForm) -> Result<Vec<IntVector>> {
    sort_vectors(&omega.vectors, q)
}

fn sort_vectors(vectors: &[IntVector], q: &QForm) -> Result<Vec<IntVector>> {
    Ok(sorted_refs(vectors, q)?.into_iter().cloned().collect())
}

fn key_order(x: &(f64, &IntVector), y: &(f64, &IntVector)) -> Ordering {
    match x.0.total_cmp(&y.0) {
        Ordering::Equal => x.1.cmp(y.1),
        o => o,
    }
}

fn sorted_refs<'a>(vectors: &'a [IntVector], q: &QForm) -> Result<Vec<&'a IntVector>> {
    if vectors.is_empty() {
        return Err(Error::invalid("cannot sort an empty candidate set"));
    }
    let mut keyed: Vec<(f64, &IntVector)> = vectors.iter().map(|v| (q.value(v), v)).collect();
    keyed.sort_by(key_order);
    Ok(keyed.into_iter().map(|(_, v)| v).collect())
}

// Greedy over the sorted list, sorting only a prefix first. The key order is
// total, so the prefix equals the head of the full sort; the full sort is
// only needed when the prefix runs out before reaching rank l.
fn greedy_sorted(vectors: &[IntVector], q: &QForm, l: usize) -> Result<Option<IntMatrix>> {
    const PREFIX_PER_DIM: usize = 32;
    let prefix = PREFIX_PER_DIM * l.max(1);
    if vectors.len() <= 2 * prefix {
        return greedy_select(sorted_refs(vectors, q)?, l);
    }
    let mut keyed: Vec<(f64, &IntVector)> = vectors.iter().map(|v| (q.value(v), v)).collect();
    keyed.select_nth_unstable_by(prefix, key_order);
    let head = &mut keyed[..prefix];
    head.sort_by(key_order);
    if let Some(a) = greedy_select(head.iter().map(|(_, v)| *v), l)? {
        return Ok(Some(a));
    }
    keyed.sort_by(key_order);
    greedy_select(keyed.iter().map(|(_, v)| *v), l)
}

/// Picks the earliest vectors that keep the chosen set linearly independent.
/// Returns `None` when the list runs out before `l` rows are found.
pub fn greedy_full_rank(sorted: &[IntVector], l: usize) -> Result<Option<IntMatrix>> {
    greedy_select(sorted, l)
}

fn greedy_select<'a>(sorted: impl IntoIterator<Item = &'a IntVector>, l: usize) -> Result<Option<IntMatrix>> {
    let mut chosen: Vec<IntVector> = Vec::with_capacity(l);
    for t in sorted {
        if chosen.len() == l {
            break;
        }
        if t.len() != l {
            return Err(Error::invalid(format!(
                "candidate of length {} in a dimension-{l} search",
                t.len()
            )));
        }
        chosen.push(t.clone());
        if !int_rank_independent(&chosen)? {
            chosen.pop();
        }
    }
    if chosen.len() == l {
        Ok(Some(IntMatrix::from_rows(chosen)?))
    } else {
        Ok(None)
    }
}

/// Every nonzero vector in [−M, M]^L, one per ± pair.
pub fn exhaustive_candidates(l: usize, m: i64) -> Result<CandidateSet> {
    let config = SearchConfig::new(m, 1.max(l.saturating_sub(1)))?;
    let side = (2 * m + 1) as u128;
    let size = (0..l).try_fold(1u128, |acc, _| acc.checked_mul(side)).unwrap_or(u128::MAX);
    if size > EXHAUSTIVE_GUARD {
        return Err(Error::InstanceTooLarge { size, limit: EXHAUSTIVE_GUARD });
    }
    let mut vectors = Vec::with_capacity((size as usize).saturating_sub(1) / 2);
    let mut cur = vec![-m; l];
    loop {
        let v = IntVector::new(cur.clone());
        if !v.is_zero() && v.is_sign_canonical() {
            vectors.push(v);
        }
        // odometer increment
        let mut k = l;
        loop {
            if k == 0 {
                return Ok(CandidateSet { vectors, config });
            }
            k -= 1;
            if cur[k] < m {
                cur[k] += 1;
                break;
            }
            cur[k] = -m;
        }
    }
}

/// Sort + greedy + fallback on an already built candidate list.
pub fn design_from_candidates(q: &QForm, candidates: &[IntVector], tag: DesignTag) -> Result<IfDesign> {
    let l = q.dim();
    let chosen = if candidates.is_empty() {
        None
    } else {
        greedy_sorted(candidates, q, l)?
    };
    let (a, success, method) = match chosen {
        Some(a) => (a, true, tag),
        None => (IntMatrix::identity(l), false, DesignTag::MmseIdentityFallback),
    };
    let b = optimal_projection(&a, q.channel())?;
    let report = design_rates(&a, q)?;
    Ok(IfDesign { a, b, report, success, method })
}

/// End-to-end design for one channel realization.
pub fn design_if(ch: &ChannelRealization, cfg: SearchConfig, method: SearchMethod) -> Result<IfDesign> {
    let q = compute_q(ch)?;
    let (omega, tag) = match method {
        SearchMethod::Sdm => (candidate_set(&q, cfg)?, DesignTag::Sdm),
        SearchMethod::Exhaustive => (exhaustive_candidates(ch.dim(), cfg.bound_m)?, DesignTag::Exhaustive),
    };
    design_from_candidates(&q, &omega.vectors, tag)
}

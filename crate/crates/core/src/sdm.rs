//! Candidate search along slowest-ascent lines.
//!
//! The continuous minimizer of `f(a) = aᵀQa` over `‖a‖ ≥ 1` is the eigenvector
//! `g₁` of the smallest eigenvalue. The lines `g₁ + ρ·gᵢ` through it, along the
//! next eigenvectors, are the directions in which `f` grows slowest. Integer
//! points closest to those lines make a small candidate set with small `f`.
//!
//! Along a line, the nearest integer point only changes when some coordinate
//! crosses a half-integer. Those crossings are the jump points; the interval
//! between two consecutive jump points has a single nearest point, found by
//! rounding the line at the interval midpoint.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ifcore::QForm;
use crate::linalg::{sym_eigen, EigenBasis, IntVector};

const DIRECTION_EPS: f64 = 1e-12;
const JUMP_MERGE_EPS: f64 = 1e-12;

/// Per-coordinate bound `M` and number of lines `J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub bound_m: i64,
    pub lines_j: usize,
}

impl SearchConfig {
    pub fn new(bound_m: i64, lines_j: usize) -> Result<Self> {
        if bound_m < 1 {
            return Err(Error::invalid(format!("bound M must be at least 1, got {bound_m}")));
        }
        if lines_j < 1 {
            return Err(Error::invalid("number of lines J must be at least 1"));
        }
        Ok(Self { bound_m, lines_j })
    }

    /// Checks 1 ≤ J ≤ L−1 for a given dimension.
    pub fn validate_for(&self, l: usize) -> Result<()> {
        if self.bound_m < 1 {
            return Err(Error::invalid(format!("bound M must be at least 1, got {}", self.bound_m)));
        }
        if self.lines_j < 1 || self.lines_j + 1 > l {
            return Err(Error::invalid(format!(
                "number of lines J = {} must satisfy 1 <= J <= L-1 = {}",
                self.lines_j,
                l as i64 - 1
            )));
        }
        Ok(())
    }
}

/// Deduplicated, sign-canonical, nonzero in-box integer vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    pub vectors: Vec<IntVector>,
    pub config: SearchConfig,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Builds a set from raw vectors: canonicalizes signs and drops zeros,
    /// out-of-box vectors and repeats, keeping first occurrences.
    pub fn from_raw(raw: impl IntoIterator<Item = IntVector>, config: SearchConfig) -> Self {
        let mut seen = HashSet::new();
        let mut vectors = Vec::new();
        for v in raw {
            if v.is_zero() || v.coords().iter().any(|c| c.abs() > config.bound_m) {
                continue;
            }
            let v = v.sign_canonical();
            if seen.insert(v.clone()) {
                vectors.push(v);
            }
        }
        Self { vectors, config }
    }
}

/// Half-integer grid {−M−3/2+j : j = 1..2M+2}.
pub fn midpoint_grid(m: i64) -> Result<Vec<f64>> {
    if m < 1 {
        return Err(Error::invalid(format!("bound M must be at least 1, got {m}")));
    }
    Ok((1..=2 * m + 2).map(|j| -(m as f64) - 1.5 + j as f64).collect())
}

/// Sorted values of ρ at which a coordinate of g1 + ρ·gi crosses a grid midpoint.
pub fn jump_points(g1: &[f64], gi: &[f64], m: i64) -> Result<Vec<f64>> {
    if g1.len() != gi.len() {
        return Err(Error::invalid("line origin and direction have different lengths"));
    }
    let grid = midpoint_grid(m)?;
    let mut rho = Vec::with_capacity(grid.len() * g1.len());
    let mut active = false;
    for (&origin, &dir) in g1.iter().zip(gi) {
        if dir.abs() < DIRECTION_EPS {
            continue;
        }
        active = true;
        rho.extend(grid.iter().map(|&mid| (mid - origin) / dir));
    }
    if !active {
        return Err(Error::DegenerateDirection);
    }
    rho.sort_by(f64::total_cmp);
    rho.dedup_by(|b, a| (*b - *a).abs() <= JUMP_MERGE_EPS);
    Ok(rho)
}

/// Nearest integer points of g1 + ρ·gi at each interval midpoint between
/// consecutive jump points, with out-of-box and zero points cleared.
pub fn line_candidates(g1: &[f64], gi: &[f64], m: i64) -> Result<Vec<IntVector>> {
    let rho = jump_points(g1, gi, m)?;
    let mut out = Vec::with_capacity(rho.len().saturating_sub(1));
    for pair in rho.windows(2) {
        let mid = 0.5 * (pair[0] + pair[1]);
        // f64::round is half away from zero
        let point = IntVector::new(
            g1.iter().zip(gi).map(|(&o, &d)| (o + mid * d).round() as i64).collect(),
        );
        if point.is_zero() || point.coords().iter().any(|c| c.abs() > m) {
            continue;
        }
        out.push(point);
    }
    Ok(out)
}

/// Full candidate search: eigendecompose Q and union the first J lines.
pub fn candidate_set(q: &QForm, cfg: SearchConfig) -> Result<CandidateSet> {
    cfg.validate_for(q.dim())?;
    let basis = sym_eigen(q.matrix())?;
    candidate_set_from_basis(&basis, cfg)
}

/// Candidate search on a precomputed eigenbasis.
pub fn candidate_set_from_basis(basis: &EigenBasis, cfg: SearchConfig) -> Result<CandidateSet> {
    cfg.validate_for(basis.dim())?;
    let g1 = &basis.vectors[0];
    let mut raw = Vec::new();
    for gi in &basis.vectors[1..=cfg.lines_j] {
        raw.extend(line_candidates(g1, gi, cfg.bound_m)?);
    }
    Ok(CandidateSet::from_raw(raw, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelRealization;
    use crate::ifcore::compute_q;
    use crate::linalg::RealMatrix;

    fn v(c: &[i64]) -> IntVector {
        IntVector::new(c.to_vec())
    }

    #[test]
    fn grid_values() {
        assert_eq!(midpoint_grid(1).unwrap(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(midpoint_grid(2).unwrap(), vec![-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]);
        let g3 = midpoint_grid(3).unwrap();
        assert_eq!(g3.len(), 8);
        assert_eq!(g3[0], -3.5);
        assert_eq!(g3[7], 3.5);
        assert!(g3.windows(2).all(|w| w[1] - w[0] == 1.0));
        assert!(midpoint_grid(0).is_err());
    }

    #[test]
    fn jump_points_axis_aligned() {
        assert_eq!(jump_points(&[1.0, 0.0], &[0.0, 1.0], 1).unwrap(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(jump_points(&[0.0, 0.0], &[1.0, 0.0], 1).unwrap(), vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn jump_points_merge_both_coordinates() {
        let got = jump_points(&[0.5, 0.5], &[0.5, -0.5], 1).unwrap();
        // coordinate 0: (m - 0.5)/0.5 = {-4, -2, 0, 2}; coordinate 1: {4, 2, 0, -2}
        assert_eq!(got, vec![-4.0, -2.0, 0.0, 2.0, 4.0]);
    }

    #[test]
    fn jump_points_degenerate_direction() {
        assert!(matches!(jump_points(&[1.0, 0.0], &[0.0, 1e-14], 1), Err(Error::DegenerateDirection)));
    }

    #[test]
    fn line_candidates_examples() {
        let expected = vec![v(&[1, -1]), v(&[1, 0]), v(&[1, 1])];
        assert_eq!(line_candidates(&[1.0, 0.0], &[0.0, 1.0], 1).unwrap(), expected);
        assert_eq!(line_candidates(&[0.6, 0.0], &[0.0, 1.0], 1).unwrap(), expected);
    }

    #[test]
    fn line_candidates_clear_out_of_box_points() {
        // origin outside the box in coordinate 0: every rounded point has |a_0| = 3
        let got = line_candidates(&[3.0, 0.0], &[0.0, 1.0], 1).unwrap();
        assert!(got.is_empty());
        let got = line_candidates(&[0.0, 0.0], &[1.0, 1.0], 1).unwrap();
        assert_eq!(got, vec![v(&[-1, -1]), v(&[1, 1])]);
    }

    #[test]
    fn candidate_set_diagonal_q() {
        // Q = diag(0.2, 0.5) is the quadratic form of H = diag(2, 1), P = 1.
        let h = RealMatrix::diagonal(&[2.0, 1.0]);
        let q = compute_q(&ChannelRealization::new(h, 1.0).unwrap()).unwrap();
        let set = candidate_set(&q, SearchConfig::new(1, 1).unwrap()).unwrap();
        assert_eq!(set.vectors, vec![v(&[1, -1]), v(&[1, 0]), v(&[1, 1])]);
    }

    #[test]
    fn candidate_set_degenerate_spectrum() {
        let q = compute_q(&ChannelRealization::new(RealMatrix::identity(2), 1.0).unwrap()).unwrap();
        let set = candidate_set(&q, SearchConfig::new(1, 1).unwrap()).unwrap();
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn candidate_set_rejects_too_many_lines() {
        let q = compute_q(&ChannelRealization::new(RealMatrix::identity(2), 1.0).unwrap()).unwrap();
        assert!(candidate_set(&q, SearchConfig { bound_m: 1, lines_j: 2 }).is_err());
        assert!(SearchConfig::new(0, 1).is_err());
        assert!(SearchConfig::new(1, 0).is_err());
    }
}

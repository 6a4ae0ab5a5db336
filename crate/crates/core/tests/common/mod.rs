//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use intforce::channel::{derive_trial_rng, sample_channel, ChannelRealization, RngState};
use intforce::linalg::{IntVector, RealMatrix};

/// Inverse of a symmetric positive definite matrix through its Cholesky factor.
pub fn spd_inverse(m: &RealMatrix) -> RealMatrix {
    let n = m.rows();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "matrix is not positive definite");
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // solve L·Lᵀ·X = I column by column
    let mut inv = RealMatrix::zeros(n, n);
    for c in 0..n {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        for i in 0..n {
            inv[(i, c)] = x[i];
        }
    }
    inv
}

/// Exact determinant by cofactor expansion.
pub fn cofactor_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    let mut total = 0i128;
    for col in 0..n {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, &x)| x).collect())
            .collect();
        let sign = if col % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][col] as i128 * cofactor_det(&minor);
    }
    total
}

/// Rank over the rationals by fraction-exact row reduction (numerator/denominator pairs).
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    // Work with i128 rows and cross-multiplication, reducing by gcd to keep entries small.
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r == rank || m[r][col] == 0 {
                continue;
            }
            let a = m[rank][col];
            let b = m[r][col];
            for k in 0..cols {
                m[r][k] = m[r][k] * a - m[rank][k] * b;
            }
            let g = m[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                m[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All points of [−m, m]^l except the origin.
pub fn box_points(l: usize, m: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-m; l];
    loop {
        if cur.iter().any(|&c| c != 0) {
            out.push(cur.clone());
        }
        let mut k = l;
        loop {
            if k == 0 {
                return out;
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

/// Nearest nonzero in-box integer point to `x` by exhaustive scan.
pub fn brute_closest(x: &[f64], points: &[Vec<i64>]) -> Vec<i64> {
    let mut best = &points[0];
    let mut best_d = f64::INFINITY;
    for p in points {
        let d: f64 = p.iter().zip(x).map(|(&a, &b)| (a as f64 - b).powi(2)).sum();
        if d < best_d {
            best_d = d;
            best = p;
        }
    }
    best.clone()
}

pub fn canonical(v: &[i64]) -> IntVector {
    IntVector::new(v.to_vec()).sign_canonical()
}

pub fn random_channel(rng: &mut RngState, l: usize, power: f64) -> ChannelRealization {
    ChannelRealization::new(sample_channel(rng, l), power).unwrap()
}

pub fn rng(seed: u64) -> RngState {
    derive_trial_rng(seed, 0)
}

pub fn random_symmetric(rng: &mut RngState, l: usize) -> RealMatrix {
    let g = sample_channel(rng, l);
    g.add(&g.transpose()).unwrap().scale(0.5)
}

pub fn random_int_vector(rng: &mut RngState, l: usize, bound: i64) -> IntVector {
    loop {
        let v: Vec<i64> = (0..l).map(|_| rng.next_below((2 * bound + 1) as u64) as i64 - bound).collect();
        if v.iter().any(|&c| c != 0) {
            return IntVector::new(v);
        }
    }
}

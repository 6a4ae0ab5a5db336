//! Dense real linear algebra and exact integer independence tests.
//!
//! Everything in this crate works on small square systems (L ≤ 16 in
//! practice), so the routines here favour plain loops over blocked kernels.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Off-diagonal Frobenius tolerance (relative to ‖A‖_F) at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative pivot threshold for inversion.
pub const PIVOT_TOLERANCE: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-12;
const SIGN_TIE_TOLERANCE: f64 = 1e-12;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::invalid(format!(
                "vector of length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn add(&self, other: &RealMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealMatrix) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &RealMatrix, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// (A + Aᵀ) / 2.
    pub fn symmetrized(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::invalid("cannot symmetrize a non-square matrix"));
        }
        let n = self.rows;
        let mut out = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        Ok(out)
    }

    fn check_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what} requires a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RealMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Integer coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<i64>);

impl IntVector {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = vec![0; len];
        v[index] = 1;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }

    /// Negates the vector if needed so the first nonzero coordinate is positive.
    pub fn sign_canonical(&self) -> Self {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => Self(self.0.iter().map(|&x| -x).collect()),
            _ => self.clone(),
        }
    }

    pub fn is_sign_canonical(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_none_or(|&c| c > 0)
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Square integer matrix stored as its rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: Vec<IntVector>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<IntVector>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "integer matrix with {n} rows has a row of length {}",
                r.len()
            )));
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: (0..n).map(|i| IntVector::unit(n, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &IntVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[IntVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i].0[j]
    }

    pub fn to_real(&self) -> RealMatrix {
        let n = self.dim();
        let data = self.rows.iter().flat_map(|r| r.0.iter().map(|&c| c as f64)).collect();
        RealMatrix { rows: n, cols: n, data }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> Result<i128> {
        let m = self
            .rows
            .iter()
            .map(|r| r.0.iter().map(|&c| c as i128).collect())
            .collect();
        bareiss_det(m)
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenBasis {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is sign-canonicalized
/// so that its largest-magnitude coordinate is positive (lowest index wins
/// among near-equal magnitudes), which makes the output deterministic.
pub fn sym_eigen(q: &RealMatrix) -> Result<EigenBasis> {
    q.check_square("sym_eigen")?;
    let n = q.rows();
    let scale = q.frobenius_norm();
    for i in 0..n {
        for j in (i + 1)..n {
            if (q[(i, j)] - q[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    let mut a = q.symmetrized()?;
    let mut v = RealMatrix::identity(n);
    let target = JACOBI_TOLERANCE * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut a, &mut v, p, r);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));

    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut g = v.column(i);
            canonicalize_sign(&mut g);
            g
        })
        .collect();
    Ok(EigenBasis { values, vectors })
}

fn off_diagonal_norm(a: &RealMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

// One rotation in the (p, r) plane zeroing a[p][r]; accumulates into v.
fn rotate(a: &mut RealMatrix, v: &mut RealMatrix, p: usize, r: usize) {
    let apr = a[(p, r)];
    if apr == 0.0 {
        return;
    }
    let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akr = a[(k, r)];
        a[(k, p)] = c * akp - s * akr;
        a[(k, r)] = s * akp + c * akr;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let ark = a[(r, k)];
        a[(p, k)] = c * apk - s * ark;
        a[(r, k)] = s * apk + c * ark;
    }
    a[(p, r)] = 0.0;
    a[(r, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkr = v[(k, r)];
        v[(k, p)] = c * vkp - s * vkr;
        v[(k, r)] = s * vkp + c * vkr;
    }
}

fn canonicalize_sign(g: &mut [f64]) {
    let max = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(&lead) = g.iter().find(|x| x.abs() >= max - SIGN_TIE_TOLERANCE) {
        if lead < 0.0 {
            g.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting.
pub fn solve_inverse(m: &RealMatrix) -> Result<RealMatrix> {
    m.check_square("solve_inverse")?;
    let n = m.rows();
    let threshold = PIVOT_TOLERANCE * m.max_abs();
    let mut a = m.clone();
    let mut inv = RealMatrix::identity(n);

    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[(r, col)]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty pivot range");
        if pivot.abs() <= threshold {
            return Err(Error::Singular { pivot: pivot.abs(), threshold });
        }
        if pivot_row != col {
            swap_rows(&mut a, col, pivot_row);
            swap_rows(&mut inv, col, pivot_row);
        }
        let recip = 1.0 / a[(col, col)];
        for j in 0..n {
            a[(col, j)] *= recip;
            inv[(col, j)] *= recip;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[(r, col)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                a[(r, j)] -= factor * a[(col, j)];
                inv[(r, j)] -= factor * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}

fn swap_rows(m: &mut RealMatrix, i: usize, j: usize) {
    let cols = m.cols;
    for k in 0..cols {
        m.data.swap(i * cols + k, j * cols + k);
    }
}

/// Determinant via LU elimination with partial pivoting.
pub fn det(m: &RealMatrix) -> Result<f64> {
    m.check_square("det")?;
    let n = m.rows();
    let mut a = m.clone();
    let mut result = 1.0;
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[(r, col)]))
            .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .expect("non-empty pivot range");
        if pivot == 0.0 {
            return Ok(0.0);
        }
        if pivot_row != col {
            swap_rows(&mut a, col, pivot_row);
            result = -result;
        }
        result *= pivot;
        for r in (col + 1)..n {
            let factor = a[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[(r, j)] -= factor * a[(col, j)];
            }
        }
    }
    Ok(result)
}

/// Exact determinant of an integer matrix using Bareiss elimination.
pub(crate) fn bareiss_det(mut m: Vec<Vec<i128>>) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let lhs = m[i][j].checked_mul(m[k][k]).ok_or(Error::Overflow)?;
                let rhs = m[i][k].checked_mul(m[k][j]).ok_or(Error::Overflow)?;
                let num = lhs.checked_sub(rhs).ok_or(Error::Overflow)?;
                // exact by Sylvester's identity
                m[i][j] = num / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// True iff the vectors are linearly independent over the rationals.
///
/// Decided exactly: the Gram matrix GᵀG of the vectors is formed in integer
/// arithmetic and its determinant is taken by Bareiss elimination.
pub fn int_rank_independent(vectors: &[IntVector]) -> Result<bool> {
    let Some(first) = vectors.first() else {
        return Err(Error::invalid("independence test needs at least one vector"));
    };
    let len = first.len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::invalid("vectors have mismatched lengths"));
    }
    if vectors.len() > len {
        return Ok(false);
    }
    let k = vectors.len();
    let mut gram = vec![vec![0i128; k]; k];
    for i in 0..k {
        for j in i..k {
            let mut acc: i128 = 0;
            for (&a, &b) in vectors[i].0.iter().zip(&vectors[j].0) {
                let term = (a as i128).checked_mul(b as i128).ok_or(Error::Overflow)?;
                acc = acc.checked_add(term).ok_or(Error::Overflow)?;
            }
            gram[i][j] = acc;
            gram[j][i] = acc;
        }
    }
    Ok(bareiss_det(gram)? != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &RealMatrix, b: &RealMatrix, tol: f64) -> bool {
        a.sub(b).unwrap().frobenius_norm() <= tol
    }

    #[test]
    fn eigen_of_diagonal() {
        let e = sym_eigen(&RealMatrix::diagonal(&[0.5, 0.2])).unwrap();
        assert_eq!(e.values, vec![0.2, 0.5]);
        assert_eq!(e.vectors[0], vec![0.0, 1.0]);
        assert_eq!(e.vectors[1], vec![1.0, 0.0]);
    }

    #[test]
    fn eigen_of_2x2_closed_form() {
        let q = RealMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = sym_eigen(&q).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[0][0] - h).abs() < 1e-12 && (e.vectors[0][1] + h).abs() < 1e-12);
        assert!((e.vectors[1][0] - h).abs() < 1e-12 && (e.vectors[1][1] - h).abs() < 1e-12);
    }

    #[test]
    fn eigen_rejects_bad_input() {
        let rect = RealMatrix::zeros(2, 3);
        assert!(matches!(sym_eigen(&rect), Err(Error::InvalidInput(_))));
        let asym = RealMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&asym), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn inverse_examples() {
        let two = RealMatrix::identity(2).scale(2.0);
        assert!(close(&solve_inverse(&two).unwrap(), &RealMatrix::identity(2).scale(0.5), 1e-15));

        let m = RealMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let expected = RealMatrix::from_rows(&[[-2.0, 1.0], [1.5, -0.5]]).unwrap();
        assert!(close(&solve_inverse(&m).unwrap(), &expected, 1e-12));

        let ones = RealMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(solve_inverse(&ones), Err(Error::Singular { .. })));
        assert!(matches!(solve_inverse(&RealMatrix::zeros(2, 2)), Err(Error::Singular { .. })));
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&RealMatrix::identity(3)).unwrap(), 1.0);
        let m = RealMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert!((det(&m).unwrap() + 2.0).abs() < 1e-12);
        let dep = RealMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0]]).unwrap();
        assert_eq!(det(&dep).unwrap(), 0.0);
        assert!(det(&RealMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn independence_examples() {
        let v = |c: &[i64]| IntVector::new(c.to_vec());
        assert!(int_rank_independent(&[v(&[1, 0]), v(&[0, 1])]).unwrap());
        assert!(!int_rank_independent(&[v(&[1, 0]), v(&[2, 0])]).unwrap());
        assert!(!int_rank_independent(&[v(&[1, 1, 0]), v(&[0, 1, 1]), v(&[1, 0, -1])]).unwrap());
        assert!(int_rank_independent(&[v(&[1, 0]), v(&[0, 1, 1])]).is_err());
        assert!(int_rank_independent(&[]).is_err());
    }

    #[test]
    fn bareiss_matches_small_cases() {
        assert_eq!(bareiss_det(vec![vec![0, 1], vec![1, 0]]).unwrap(), -1);
        assert_eq!(bareiss_det(vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]).unwrap(), 24);
        assert_eq!(bareiss_det(vec![]).unwrap(), 1);
    }

    #[test]
    fn sign_canonical() {
        assert_eq!(IntVector::new(vec![0, -1, 2]).sign_canonical(), IntVector::new(vec![0, 1, -2]));
        assert!(IntVector::new(vec![0, 0]).is_sign_canonical());
    }

    #[test]
    fn constructor_rejects_nan() {
        assert!(RealMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(RealMatrix::new(2, 1, vec![1.0]).is_err());
    }
}

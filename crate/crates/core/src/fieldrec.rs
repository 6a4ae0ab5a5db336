//! Message recovery over a prime field.
//!
//! The decoders of an integer-forcing receiver return the combinations
//! `u_m = Σ_l a_ml·w_l mod p`. Inverting `A` modulo `p` gives back the
//! original messages.

use crate::channel::RngState;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b % self.p)
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// L message rows of length k, entries in [0, p−1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageBlock {
    rows: Vec<Vec<u64>>,
}

impl MessageBlock {
    pub fn new(rows: Vec<Vec<u64>>, field: PrimeField) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("message rows have different lengths"));
        }
        if rows.iter().flatten().any(|&x| x >= field.modulus()) {
            return Err(Error::invalid(format!("message entries must be below {}", field.modulus())));
        }
        Ok(Self { rows })
    }

    pub fn random(l: usize, k: usize, field: PrimeField, rng: &mut RngState) -> Self {
        let rows = (0..l).map(|_| (0..k).map(|_| rng.next_below(field.modulus())).collect()).collect();
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn message_len(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Entrywise sum modulo p.
    pub fn add(&self, other: &MessageBlock, field: PrimeField) -> Result<Self> {
        if self.len() != other.len() || self.message_len() != other.message_len() {
            return Err(Error::invalid("message blocks have different shapes"));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect())
            .collect();
        Ok(Self { rows })
    }
}

/// Inverse of `a` modulo p by Gauss-Jordan elimination.
pub fn mat_inverse_mod_p(a: &IntMatrix, field: PrimeField) -> Result<Vec<Vec<u64>>> {
    let n = a.dim();
    let mut m: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| field.reduce(a.get(i, j))).collect()).collect();
    let mut inv: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| m[r][col] != 0)
            .ok_or(Error::NotInvertibleModP { p: field.modulus() })?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = field.inv(m[col][col]);
        for j in 0..n {
            m[col][j] = field.mul(m[col][j], scale);
            inv[col][j] = field.mul(inv[col][j], scale);
        }
        for r in 0..n {
            if r == col || m[r][col] == 0 {
                continue;
            }
            let factor = m[r][col];
            for j in 0..n {
                m[r][j] = field.sub(m[r][j], field.mul(factor, m[col][j]));
                inv[r][j] = field.sub(inv[r][j], field.mul(factor, inv[col][j]));
            }
        }
    }
    Ok(inv)
}

fn apply(coeffs: &[Vec<u64>], w: &MessageBlock, field: PrimeField) -> MessageBlock {
    let k = w.message_len();
    let rows = coeffs
        .iter()
        .map(|row| {
            (0..k)
                .map(|c| {
                    row.iter()
                        .zip(&w.rows)
                        .fold(0, |acc, (&q, msg)| field.add(acc, field.mul(q, msg[c])))
                })
                .collect()
        })
        .collect();
    MessageBlock { rows }
}

/// u_m = Σ_l (a_ml mod p)·w_l.
pub fn combine_messages(a: &IntMatrix, w: &MessageBlock, field: PrimeField) -> Result<MessageBlock> {
    if a.dim() != w.len() {
        return Err(Error::invalid(format!(
            "{} coefficient rows but {} messages",
            a.dim(),
            w.len()
        )));
    }
    let n = a.dim();
    let coeffs: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| field.reduce(a.get(i, j))).collect()).collect();
    Ok(apply(&coeffs, w, field))
}

pub fn recover_messages(a: &IntMatrix, u: &MessageBlock, field: PrimeField) -> Result<MessageBlock> {
    if a.dim() != u.len() {
        return Err(Error::invalid(format!(
            "{} coefficient rows but {} combinations",
            a.dim(),
            u.len()
        )));
    }
    let inv = mat_inverse_mod_p(a, field)?;
    Ok(apply(&inv, u, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntVector;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| IntVector::new(r.to_vec())).collect()).unwrap()
    }

    #[test]
    fn field_construction() {
        assert!(PrimeField::new(257).is_ok());
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(9).is_err());
    }

    #[test]
    fn inverse_examples() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(mat_inverse_mod_p(&mat(&[&[1, 1], &[0, 1]]), f3).unwrap(), vec![vec![1, 2], vec![0, 1]]);
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(mat_inverse_mod_p(&IntMatrix::identity(3), f7).unwrap(), vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1]
        ]);
        let f5 = PrimeField::new(5).unwrap();
        assert!(matches!(
            mat_inverse_mod_p(&mat(&[&[1, 1], &[1, 1]]), f5),
            Err(Error::NotInvertibleModP { p: 5 })
        ));
        // full rank over the rationals, singular mod 2
        let f2 = PrimeField::new(2).unwrap();
        assert!(mat_inverse_mod_p(&mat(&[&[1, 1], &[1, -1]]), f2).is_err());
    }

    #[test]
    fn combine_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let w = MessageBlock::new(vec![vec![1], vec![2]], f3).unwrap();
        let u = combine_messages(&mat(&[&[1, 1], &[0, 1]]), &w, f3).unwrap();
        assert_eq!(u.rows(), &[vec![0], vec![2]]);
        assert_eq!(combine_messages(&IntMatrix::identity(2), &w, f3).unwrap(), w);

        let w1 = MessageBlock::new(vec![vec![1]], f3).unwrap();
        let u = combine_messages(&mat(&[&[-1]]), &w1, f3).unwrap();
        assert_eq!(u.rows(), &[vec![2]]);
    }

    #[test]
    fn recover_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let a = mat(&[&[1, 1], &[0, 1]]);
        let w = MessageBlock::new(vec![vec![1], vec![2]], f3).unwrap();
        let u = combine_messages(&a, &w, f3).unwrap();
        assert_eq!(recover_messages(&a, &u, f3).unwrap(), w);
        assert_eq!(recover_messages(&IntMatrix::identity(2), &u, f3).unwrap(), u);
    }

    #[test]
    fn message_block_validates() {
        let f3 = PrimeField::new(3).unwrap();
        assert!(MessageBlock::new(vec![vec![3]], f3).is_err());
        assert!(MessageBlock::new(vec![vec![1, 2], vec![0]], f3).is_err());
    }
}

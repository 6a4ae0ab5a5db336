//! Achievable-rate machinery for integer-forcing receivers.
//!
//! For a channel `H` and power `P` the rate of an integer equation `a` with
//! projection row `b` is
//!
//! ```text
//! R(a, b) = ½·log₂( P / (‖b‖² + P·‖Hᵀb − a‖²) )
//! ```
//!
//! The best `b` for a fixed `a` is `bᵀ = aᵀHᵀ(HHᵀ + I/P)⁻¹`, and substituting
//! it collapses the rate to `½·log₂(1 / aᵀQa)` with
//! `Q = I − Hᵀ(HHᵀ + I/P)⁻¹H`. Both forms are exposed so they can be checked
//! against each other.

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, solve_inverse, IntMatrix, IntVector, RealMatrix};

/// The quadratic form governing equation rates for one channel.
#[derive(Clone, Debug)]
pub struct QForm {
    q: RealMatrix,
    channel: ChannelRealization,
}

impl QForm {
    pub fn matrix(&self) -> &RealMatrix {
        &self.q
    }

    pub fn channel(&self) -> &ChannelRealization {
        &self.channel
    }

    pub fn power(&self) -> f64 {
        self.channel.power()
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    /// f(a) = aᵀQa.
    pub fn value(&self, a: &IntVector) -> f64 {
        let n = self.dim();
        let c = a.coords();
        let mut acc = 0.0;
        for i in 0..n {
            if c[i] == 0 {
                continue;
            }
            let row = self.q.row(i);
            let mut inner = 0.0;
            for j in 0..n {
                inner += row[j] * c[j] as f64;
            }
            acc += c[i] as f64 * inner;
        }
        acc
    }
}

/// Per-equation rates and the bottleneck total `max(0, L·min R_m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub per_stream: Vec<f64>,
    pub total: f64,
}

impl RateReport {
    /// Σ max(0, R_m), the alternative baseline reading.
    pub fn sum_form(&self) -> f64 {
        self.per_stream.iter().map(|r| r.max(0.0)).sum()
    }
}

/// ZF evaluation result, flagging channels where HᵀH could not be inverted.
#[derive(Clone, Debug, PartialEq)]
pub struct ZfReport {
    pub rates: RateReport,
    pub singular: bool,
}

fn regularized_gram_inverse(ch: &ChannelRealization) -> RealMatrix {
    let h = ch.h();
    let f = h
        .matmul(&h.transpose())
        .expect("square channel")
        .add(&RealMatrix::identity(ch.dim()).scale(1.0 / ch.power()))
        .expect("same shape");
    solve_inverse(&f).expect("HHᵀ + I/P is positive definite")
}

pub fn compute_q(ch: &ChannelRealization) -> Result<QForm> {
    if !(ch.power().is_finite() && ch.power() > 0.0) {
        return Err(Error::invalid("power must be positive"));
    }
    let h = ch.h();
    let f_inv = regularized_gram_inverse(ch);
    let inner = h.transpose().matmul(&f_inv)?.matmul(h)?;
    let q = RealMatrix::identity(ch.dim()).sub(&inner)?.symmetrized()?;
    Ok(QForm { q, channel: ch.clone() })
}

/// B = A·Hᵀ·(HHᵀ + I/P)⁻¹.
pub fn optimal_projection(a: &IntMatrix, ch: &ChannelRealization) -> Result<RealMatrix> {
    if a.dim() != ch.dim() {
        return Err(Error::invalid(format!(
            "coefficient matrix is {0}x{0} but channel is {1}x{1}",
            a.dim(),
            ch.dim()
        )));
    }
    let f_inv = regularized_gram_inverse(ch);
    a.to_real().matmul(&ch.h().transpose())?.matmul(&f_inv)
}

pub fn rate_from_ab(a: &IntVector, b: &[f64], ch: &ChannelRealization) -> Result<f64> {
    let l = ch.dim();
    if a.len() != l || b.len() != l {
        return Err(Error::invalid(format!(
            "vectors of length {} and {} do not match channel dimension {l}",
            a.len(),
            b.len()
        )));
    }
    let p = ch.power();
    let ht_b = ch.h().transpose().mul_vec(b)?;
    let residual: f64 = ht_b
        .iter()
        .zip(a.coords())
        .map(|(x, &c)| (x - c as f64).powi(2))
        .sum();
    let denom = norm_sq(b) + p * residual;
    if denom == 0.0 {
        return Err(Error::invalid("zero rate denominator (a = 0 and b = 0)"));
    }
    Ok(0.5 * (p / denom).log2())
}

pub fn rate_from_q(a: &IntVector, q: &QForm) -> Result<f64> {
    if a.len() != q.dim() {
        return Err(Error::invalid(format!(
            "vector of length {} does not match dimension {}",
            a.len(),
            q.dim()
        )));
    }
    if a.is_zero() {
        return Err(Error::invalid("rate of the zero vector is undefined"));
    }
    Ok(0.5 * (1.0 / q.value(a)).log2())
}

pub fn total_rate(per_stream: Vec<f64>) -> Result<RateReport> {
    let min = per_stream
        .iter()
        .copied()
        .reduce(f64::min)
        .ok_or_else(|| Error::invalid("total rate of an empty stream list"))?;
    let total = (per_stream.len() as f64 * min).max(0.0);
    Ok(RateReport { per_stream, total })
}

pub fn zf_rates(ch: &ChannelRealization) -> ZfReport {
    let l = ch.dim();
    let h = ch.h();
    let ht = h.transpose();
    let gram = ht.matmul(h).expect("square channel");
    let zero = || ZfReport {
        rates: total_rate(vec![0.0; l]).expect("non-empty"),
        singular: true,
    };
    let Ok(gram_inv) = solve_inverse(&gram) else {
        return zero();
    };
    let b_zf = gram_inv.matmul(&ht).expect("square");
    let per_stream = (0..l)
        .map(|m| rate_from_ab(&IntVector::unit(l, m), b_zf.row(m), ch))
        .collect::<Result<Vec<_>>>();
    match per_stream {
        Ok(rates) => ZfReport { rates: total_rate(rates).expect("non-empty"), singular: false },
        Err(_) => zero(),
    }
}

/// MMSE is the integer-forcing design with A = I.
pub fn mmse_rates(ch: &ChannelRealization) -> Result<RateReport> {
    let q = compute_q(ch)?;
    mmse_rates_from_q(&q)
}

pub fn mmse_rates_from_q(q: &QForm) -> Result<RateReport> {
    let l = q.dim();
    let rates = (0..l)
        .map(|m| rate_from_q(&IntVector::unit(l, m), q))
        .collect::<Result<Vec<_>>>()?;
    total_rate(rates)
}

/// Per-stream rates of a full coefficient matrix via the quadratic form.
pub fn design_rates(a: &IntMatrix, q: &QForm) -> Result<RateReport> {
    let rates = a.rows().iter().map(|row| rate_from_q(row, q)).collect::<Result<Vec<_>>>()?;
    total_rate(rates)
}

/// Weighted MSE objective ‖b‖²/P + ‖Hᵀb − a‖² minimized by the optimal row.
pub fn projection_objective(a: &IntVector, b: &[f64], ch: &ChannelRealization) -> f64 {
    let ht_b = ch.h().transpose().mul_vec(b).expect("matching length");
    let residual: f64 = ht_b.iter().zip(a.coords()).map(|(x, &c)| (x - c as f64).powi(2)).sum();
    dot(b, b) / ch.power() + residual
}

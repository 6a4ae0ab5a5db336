//! Channel realizations, the seeded Gaussian source and capacity.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{det, RealMatrix};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Real L×L channel matrix together with the per-antenna power (unit noise).
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    h: RealMatrix,
    power: f64,
}

impl ChannelRealization {
    pub fn new(h: RealMatrix, power: f64) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::invalid(format!(
                "channel matrix must be square, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::invalid(format!("power must be positive, got {power}")));
        }
        Ok(Self { h, power })
    }

    /// Builds a realization from an SNR in dB, P = 10^(snr/10).
    pub fn from_snr_db(h: RealMatrix, snr_db: f64) -> Result<Self> {
        Self::new(h, snr_db_to_power(snr_db))
    }

    pub fn h(&self) -> &RealMatrix {
        &self.h
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// FNV-1a over the entry bit patterns; used to check that methods in one
    /// trial saw the same matrix.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for x in self.h.data() {
            for b in x.to_bits().to_le_bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        hash
    }
}

pub fn snr_db_to_power(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// splitmix64 generator with a Box-Muller Gaussian cache.
#[derive(Clone, Debug)]
pub struct RngState {
    state: u64,
    spare: Option<f64>,
}

impl RngState {
    pub fn from_seed(seed: u64) -> Self {
        Self { state: seed, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on (0, 1].
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Uniform integer in [0, bound).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Independent stream for one trial; depends only on the pair of inputs.
pub fn derive_trial_rng(master_seed: u64, trial_index: u64) -> RngState {
    let golden = mix64(trial_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    RngState::from_seed(mix64(master_seed ^ golden))
}

/// l×l matrix of i.i.d. N(0, 1) entries, filled row-major.
pub fn sample_channel(rng: &mut RngState, l: usize) -> RealMatrix {
    let data = (0..l * l).map(|_| rng.next_gaussian()).collect();
    RealMatrix::new(l, l, data).expect("Box-Muller samples are finite")
}

/// Real lifting [[Re, -Im], [Im, Re]] of a complex channel.
pub fn complex_to_real(h_re: &RealMatrix, h_im: &RealMatrix) -> Result<RealMatrix> {
    if !h_re.is_square() || h_re.rows() != h_im.rows() || h_re.cols() != h_im.cols() {
        return Err(Error::invalid(format!(
            "real and imaginary parts must be the same square size, got {}x{} and {}x{}",
            h_re.rows(),
            h_re.cols(),
            h_im.rows(),
            h_im.cols()
        )));
    }
    let n = h_re.rows();
    let mut out = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let re = h_re[(i, j)];
            let im = h_im[(i, j)];
            out[(i, j)] = re;
            out[(i, j + n)] = -im;
            out[(i + n, j)] = im;
            out[(i + n, j + n)] = re;
        }
    }
    Ok(out)
}

/// (1/2)·log₂ det(I + P·H·Hᵀ), bits per real channel use.
pub fn capacity(ch: &ChannelRealization) -> f64 {
    let h = ch.h();
    let gram = h.matmul(&h.transpose()).expect("square");
    let m = RealMatrix::identity(ch.dim()).add(&gram.scale(ch.power())).expect("same shape");
    let d = det(&m).expect("square");
    (0.5 * d.log2()).max(0.0)
}

/// Parses the whitespace-separated matrix text format: one row per line,
/// `#` comment lines and blank lines ignored.
pub fn parse_matrix(text: &str) -> Result<RealMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let x: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("cannot parse `{tok}` as a number"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse { line: line_no, msg: format!("non-finite entry `{tok}`") });
            }
            row.push(x);
        }
        if let Some(prev) = rows.first() {
            if prev.len() != row.len() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!(
                        "row has {} entries but line {first_line} has {}",
                        row.len(),
                        prev.len()
                    ),
                });
            }
        } else {
            first_line = line_no;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: text.lines().count().max(1), msg: "no matrix rows".into() });
    }
    RealMatrix::from_rows(&rows)
}

/// Like [`parse_matrix`] but additionally requires a square matrix.
pub fn parse_square_matrix(text: &str) -> Result<RealMatrix> {
    let m = parse_matrix(text)?;
    if !m.is_square() {
        let last = text
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            })
            .last()
            .map_or(1, |(i, _)| i + 1);
        return Err(Error::Parse {
            line: last,
            msg: format!("matrix must be square, got {}x{}", m.rows(), m.cols()),
        });
    }
    Ok(m)
}

pub fn read_matrix_file(path: &Path) -> Result<RealMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_square_matrix(&text)
}

pub fn format_matrix(m: &RealMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

//! Seeded Monte Carlo comparison of receivers.
//!
//! Every trial index owns an RNG stream derived from the master seed, so the
//! channel seen by trial `i` is the same for every method, every SNR point and
//! every swept parameter value. Trials run in parallel and are collected in
//! index order before aggregation, which keeps outputs byte-identical across
//! thread counts.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{capacity, derive_trial_rng, sample_channel, ChannelRealization, RngState};
use crate::error::{Error, Result};
use crate::fieldrec::{combine_messages, mat_inverse_mod_p, recover_messages, MessageBlock, PrimeField};
use crate::ifcore::{compute_q, mmse_rates_from_q, zf_rates};
use crate::linalg::IntVector;
use crate::sdm::{candidate_set, SearchConfig};
use crate::select::{design_from_candidates, exhaustive_candidates, DesignTag, IfDesign, EXHAUSTIVE_GUARD};

/// Message length used for the finite-field round trip.
pub const ROUND_TRIP_MESSAGE_LEN: usize = 4;

pub const AGGREGATE_HEADER: &str =
    "method,sweep_param,sweep_value,snr_db,avg_rate_min,avg_rate_sum,avg_rate_min_success_only,success_prob,trials,master_seed";
pub const RECORD_HEADER: &str = "trial,method,snr_db,rate_min,rate_sum,success,fallback,modp_invertible";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    IfSdm,
    IfExhaustive,
    Mmse,
    Zf,
    Capacity,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::IfSdm, Method::IfExhaustive, Method::Mmse, Method::Zf, Method::Capacity];

    pub fn name(self) -> &'static str {
        match self {
            Method::IfSdm => "if-sdm",
            Method::IfExhaustive => "if-exhaustive",
            Method::Mmse => "mmse",
            Method::Zf => "zf",
            Method::Capacity => "capacity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Snr,
    LinesJ,
    BoundM,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Snr => "snr",
            SweepParam::LinesJ => "lines",
            SweepParam::BoundM => "bound",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" => Ok(SweepParam::Snr),
            "lines" => Ok(SweepParam::LinesJ),
            "bound" => Ok(SweepParam::BoundM),
            other => Err(Error::invalid(format!("unknown sweep `{other}` (expected snr|lines|bound)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub l: usize,
    pub snr_db_grid: Vec<f64>,
    pub trials: usize,
    pub bound_m: i64,
    pub lines_j: usize,
    pub master_seed: u64,
    pub methods: Vec<Method>,
    /// Enables the mod-p invertibility check and message round trip.
    pub prime_p: Option<u64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::invalid(format!("antenna count L must be at least 2, got {}", self.l)));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.snr_db_grid.is_empty() {
            return Err(Error::invalid("SNR grid is empty"));
        }
        if self.snr_db_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("SNR grid contains a non-finite value"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods selected"));
        }
        SearchConfig { bound_m: self.bound_m, lines_j: self.lines_j }.validate_for(self.l)?;
        if self.methods.contains(&Method::IfExhaustive) {
            let side = (2 * self.bound_m + 1) as f64;
            let size = side.powi(self.l as i32);
            if size > EXHAUSTIVE_GUARD as f64 {
                return Err(Error::InstanceTooLarge { size: size as u128, limit: EXHAUSTIVE_GUARD });
            }
        }
        if let Some(p) = self.prime_p {
            PrimeField::new(p)?;
        }
        Ok(())
    }

    fn search(&self) -> SearchConfig {
        SearchConfig { bound_m: self.bound_m, lines_j: self.lines_j }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub snr_db: f64,
    pub method: Method,
    pub rate_min: f64,
    pub rate_sum: f64,
    pub success: bool,
    pub fallback: bool,
    pub modp_invertible: Option<bool>,
    pub channel_fingerprint: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub method: Method,
    pub sweep_param: SweepParam,
    pub sweep_value: f64,
    pub snr_db: f64,
    pub avg_rate_min: f64,
    pub avg_rate_sum: f64,
    /// NaN when no trial succeeded.
    pub avg_rate_min_success_only: f64,
    pub success_probability: f64,
    pub trials: usize,
    pub master_seed: u64,
}

impl Aggregate {
    /// Averages a method's records in the given order.
    pub fn from_records(
        method: Method,
        sweep_param: SweepParam,
        sweep_value: f64,
        snr_db: f64,
        master_seed: u64,
        records: &[TrialRecord],
    ) -> Self {
        let n = records.len();
        let mut sum_min = 0.0;
        let mut sum_sum = 0.0;
        let mut sum_success = 0.0;
        let mut successes = 0usize;
        for r in records {
            sum_min += r.rate_min;
            sum_sum += r.rate_sum;
            if r.success {
                successes += 1;
                sum_success += r.rate_min;
            }
        }
        let denom = n.max(1) as f64;
        Self {
            method,
            sweep_param,
            sweep_value,
            snr_db,
            avg_rate_min: sum_min / denom,
            avg_rate_sum: sum_sum / denom,
            avg_rate_min_success_only: if successes == 0 { f64::NAN } else { sum_success / successes as f64 },
            success_probability: successes as f64 / denom,
            trials: n,
            master_seed,
        }
    }
}

/// Channel for one trial; independent of SNR and method.
pub fn trial_channel(cfg: &ExperimentConfig, snr_db: f64, trial_index: usize) -> Result<(ChannelRealization, RngState)> {
    let mut rng = derive_trial_rng(cfg.master_seed, trial_index as u64);
    let h = sample_channel(&mut rng, cfg.l);
    Ok((ChannelRealization::from_snr_db(h, snr_db)?, rng))
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    exhaustive: Option<Vec<IntVector>>,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let exhaustive = if cfg.methods.contains(&Method::IfExhaustive) {
            Some(exhaustive_candidates(cfg.l, cfg.bound_m)?.vectors)
        } else {
            None
        };
        Ok(Self { cfg, exhaustive })
    }

    fn run_trial(&self, snr_db: f64, trial_index: usize) -> Result<Vec<TrialRecord>> {
        let cfg = self.cfg;
        let (ch, mut rng) = trial_channel(cfg, snr_db, trial_index)?;
        let fingerprint = ch.fingerprint();
        let q = compute_q(&ch)?;
        let field = cfg.prime_p.map(PrimeField::new).transpose()?;

        let mut out = Vec::with_capacity(cfg.methods.len());
        for &method in &cfg.methods {
            let record = |rate_min: f64, rate_sum: f64, success: bool, fallback: bool, modp: Option<bool>| TrialRecord {
                trial_index,
                snr_db,
                method,
                rate_min,
                rate_sum,
                success,
                fallback,
                modp_invertible: modp,
                channel_fingerprint: fingerprint,
            };
            let rec = match method {
                Method::IfSdm | Method::IfExhaustive => {
                    let design = if method == Method::IfSdm {
                        let omega = candidate_set(&q, cfg.search())?;
                        design_from_candidates(&q, &omega.vectors, DesignTag::Sdm)?
                    } else {
                        let all = self.exhaustive.as_deref().expect("exhaustive list prepared");
                        design_from_candidates(&q, all, DesignTag::Exhaustive)?
                    };
                    let modp = match field {
                        Some(f) => Some(round_trip(&design, f, &mut rng)?),
                        None => None,
                    };
                    record(
                        design.report.total,
                        design.report.sum_form(),
                        design.success,
                        design.method == DesignTag::MmseIdentityFallback,
                        modp,
                    )
                }
                Method::Mmse => {
                    let r = mmse_rates_from_q(&q)?;
                    record(r.total, r.sum_form(), true, false, None)
                }
                Method::Zf => {
                    let r = zf_rates(&ch);
                    record(r.rates.total, r.rates.sum_form(), !r.singular, false, None)
                }
                Method::Capacity => {
                    let c = capacity(&ch);
                    record(c, c, true, false, None)
                }
            };
            out.push(rec);
        }
        Ok(out)
    }

    fn run_point(&self, snr_db: f64) -> Result<Vec<Vec<TrialRecord>>> {
        (0..self.cfg.trials)
            .into_par_iter()
            .map(|i| self.run_trial(snr_db, i))
            .collect()
    }
}

// true when A is invertible mod p and a random message block survives
// combine + recover unchanged
fn round_trip(design: &IfDesign, field: PrimeField, rng: &mut RngState) -> Result<bool> {
    match mat_inverse_mod_p(&design.a, field) {
        Err(Error::NotInvertibleModP { .. }) => Ok(false),
        Err(e) => Err(e),
        Ok(_) => {
            let w = MessageBlock::random(design.a.dim(), ROUND_TRIP_MESSAGE_LEN, field, rng);
            let u = combine_messages(&design.a, &w, field)?;
            Ok(recover_messages(&design.a, &u, field)? == w)
        }
    }
}

/// One record per configured method for a single trial.
pub fn run_trial(cfg: &ExperimentConfig, snr_db: f64, trial_index: usize) -> Result<Vec<TrialRecord>> {
    Runner::new(cfg)?.run_trial(snr_db, trial_index)
}

/// All records for every trial at one SNR, in trial order.
pub fn run_point(cfg: &ExperimentConfig, snr_db: f64) -> Result<Vec<TrialRecord>> {
    Ok(Runner::new(cfg)?.run_point(snr_db)?.into_iter().flatten().collect())
}

/// Aggregates plus the raw records behind them.
#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub aggregates: Vec<Aggregate>,
    pub records: Vec<TrialRecord>,
}

fn sweep_configs(cfg: &ExperimentConfig, sweep: SweepParam, values: &[f64]) -> Result<Vec<(f64, ExperimentConfig)>> {
    let values: Vec<f64> = if values.is_empty() {
        match sweep {
            SweepParam::Snr => cfg.snr_db_grid.clone(),
            SweepParam::LinesJ => vec![cfg.lines_j as f64],
            SweepParam::BoundM => vec![cfg.bound_m as f64],
        }
    } else {
        values.to_vec()
    };
    let as_int = |v: f64, what: &str| -> Result<i64> {
        if v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::invalid(format!("{what} sweep value {v} is not an integer")));
        }
        Ok(v as i64)
    };
    values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            match sweep {
                SweepParam::Snr => c.snr_db_grid = vec![v],
                SweepParam::LinesJ => {
                    let j = as_int(v, "lines")?;
                    if j < 1 {
                        return Err(Error::invalid(format!("lines sweep value {j} is below 1")));
                    }
                    c.lines_j = j as usize;
                }
                SweepParam::BoundM => c.bound_m = as_int(v, "bound")?,
            }
            c.validate()?;
            Ok((v, c))
        })
        .collect()
}

/// Runs `trials` trials per (sweep value, SNR) point and aggregates per method.
///
/// An empty `values` list sweeps the config's own value (or its SNR grid for
/// an SNR sweep). Output is ordered by method (as configured), then sweep
/// value, then SNR.
pub fn run_sweep(cfg: &ExperimentConfig, sweep: SweepParam, values: &[f64]) -> Result<Vec<Aggregate>> {
    Ok(run_sweep_detailed(cfg, sweep, values)?.aggregates)
}

pub fn run_sweep_detailed(cfg: &ExperimentConfig, sweep: SweepParam, values: &[f64]) -> Result<SweepOutput> {
    cfg.validate()?;
    let points = sweep_configs(cfg, sweep, values)?;
    let mut output = SweepOutput::default();
    // (method position, point position, aggregate)
    let mut keyed: Vec<(usize, usize, Aggregate)> = Vec::new();
    let mut point_pos = 0;
    for (value, point_cfg) in &points {
        let runner = Runner::new(point_cfg)?;
        for &snr in &point_cfg.snr_db_grid {
            let per_trial = runner.run_point(snr)?;
            for (mpos, &method) in point_cfg.methods.iter().enumerate() {
                let recs: Vec<TrialRecord> = per_trial.iter().map(|t| t[mpos].clone()).collect();
                let agg = Aggregate::from_records(method, sweep, *value, snr, cfg.master_seed, &recs);
                keyed.push((mpos, point_pos, agg));
            }
            output.records.extend(per_trial.into_iter().flatten());
            point_pos += 1;
        }
    }
    keyed.sort_by_key(|(m, p, _)| (*m, *p));
    output.aggregates = keyed.into_iter().map(|(_, _, a)| a).collect();
    Ok(output)
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

pub fn aggregates_to_csv(aggregates: &[Aggregate]) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for a in aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            a.method,
            a.sweep_param.name(),
            fmt_f64(a.sweep_value),
            fmt_f64(a.snr_db),
            fmt_f64(a.avg_rate_min),
            fmt_f64(a.avg_rate_sum),
            fmt_f64(a.avg_rate_min_success_only),
            fmt_f64(a.success_probability),
            a.trials,
            a.master_seed
        );
    }
    out
}

pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let flag = |b: bool| if b { "1" } else { "0" };
    let mut out = String::from(RECORD_HEADER);
    out.push('\n');
    for r in records {
        let modp = match r.modp_invertible {
            Some(b) => flag(b),
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.trial_index,
            r.method,
            fmt_f64(r.snr_db),
            fmt_f64(r.rate_min),
            fmt_f64(r.rate_sum),
            flag(r.success),
            flag(r.fallback),
            modp
        );
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_aggregates_csv(aggregates: &[Aggregate], path: &Path) -> Result<()> {
    write_text(path, &aggregates_to_csv(aggregates))
}

pub fn write_records_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    write_text(path, &records_to_csv(records))
}

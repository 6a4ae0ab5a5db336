//! Command-line front end: `design`, `simulate` and `plot`.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when `design`
//! had to fall back to the identity coefficient matrix.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::channel::{read_matrix_file, ChannelRealization};
use crate::error::{Error, Result};
use crate::harness::{run_sweep_detailed, write_aggregates_csv, write_records_csv, ExperimentConfig, Method, SweepParam};
use crate::sdm::SearchConfig;
use crate::select::{design_if, SearchMethod};
use crate::svg::{fmt_sig6, line_chart, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FALLBACK: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "intforce", version, about = "Integer-forcing MIMO receiver design and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design a receiver for one channel matrix file.
    Design(DesignArgs),
    /// Run a seeded Monte Carlo sweep and write aggregate CSV.
    Simulate(SimulateArgs),
    /// Render an aggregate CSV as an SVG line chart.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    power: f64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    bound: i64,
    /// Defaults to ceil(L/2).
    #[arg(long)]
    lines: Option<usize>,
    #[arg(long, default_value = "sdm")]
    method: String,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 8)]
    l: usize,
    /// `a:step:b` (inclusive) or a comma list.
    #[arg(long = "snr-db", default_value = "0:5:30", allow_hyphen_values = true)]
    snr_db: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    bound: i64,
    /// Defaults to ceil(L/2).
    #[arg(long)]
    lines: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "if-sdm,if-exhaustive,mmse,zf,capacity")]
    methods: String,
    #[arg(long, default_value = "snr")]
    sweep: String,
    #[arg(long = "sweep-values", allow_hyphen_values = true)]
    sweep_values: Option<String>,
    #[arg(long)]
    out: PathBuf,
    /// Also run the mod-p recovery check with this prime.
    #[arg(long)]
    prime: Option<u64>,
    /// Optional per-trial record dump.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "snr_db")]
    x: String,
    #[arg(long, default_value = "avg_rate_min")]
    y: String,
    #[arg(long, default_value = "method")]
    series: String,
    #[arg(long, default_value = "")]
    title: String,
}

/// Parses `a:step:b` into an inclusive grid, or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| Error::invalid(format!("cannot parse `{s}` as a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid(format!("non-finite grid value `{s}`")))
        }
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 {
                return Err(Error::invalid("grid step must be positive"));
            }
            if stop < start {
                return Err(Error::invalid("grid end is below grid start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        [_] => {
            let values = text.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<Vec<_>>>()?;
            if values.is_empty() {
                return Err(Error::invalid("empty value list"));
            }
            Ok(values)
        }
        _ => Err(Error::invalid(format!("cannot parse grid `{text}` (expected a:step:b or a list)"))),
    }
}

fn parse_methods(text: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = name.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("no methods given"));
    }
    Ok(out)
}

fn default_lines(l: usize) -> usize {
    l.div_ceil(2).clamp(1, l.saturating_sub(1).max(1))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Design(a) => cmd_design(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Plot(a) => cmd_plot(&a, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn cmd_design(args: &DesignArgs, out: &mut dyn Write) -> Result<i32> {
    let method: SearchMethod = args.method.parse()?;
    if !(args.power.is_finite() && args.power > 0.0) {
        return Err(Error::invalid(format!("--power must be positive, got {}", args.power)));
    }
    let h = read_matrix_file(&args.channel)?;
    let l = h.rows();
    let ch = ChannelRealization::new(h, args.power)?;
    let lines = args.lines.unwrap_or_else(|| default_lines(l));
    let cfg = SearchConfig::new(args.bound, lines)?;
    if method == SearchMethod::Sdm {
        cfg.validate_for(l)?;
    }
    let design = design_if(&ch, cfg, method)?;

    let mut text = String::new();
    text.push_str(&format!("method {}\n", design.method));
    text.push_str("A\n");
    for row in design.a.rows() {
        let cells: Vec<String> = row.coords().iter().map(|c| c.to_string()).collect();
        text.push_str(&format!("  {}\n", cells.join(" ")));
    }
    text.push_str("B\n");
    for i in 0..design.b.rows() {
        let cells: Vec<String> = design.b.row(i).iter().map(|&x| fmt_sig6(x)).collect();
        text.push_str(&format!("  {}\n", cells.join(" ")));
    }
    let rates: Vec<String> = design.report.per_stream.iter().map(|r| format!("{r:.6}")).collect();
    text.push_str(&format!("rates {}\n", rates.join(" ")));
    text.push_str(&format!("R_total {:.6}\n", design.report.total));
    text.push_str(&format!("success {}\n", design.success));
    out.write_all(text.as_bytes()).map_err(io_stdout)?;
    Ok(if design.success { EXIT_OK } else { EXIT_FALLBACK })
}

fn io_stdout(source: std::io::Error) -> Error {
    Error::Io { path: PathBuf::from("<stdout>"), source }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let sweep: SweepParam = args.sweep.parse()?;
    let sweep_values = match &args.sweep_values {
        Some(s) => parse_grid(s)?,
        None => Vec::new(),
    };
    let cfg = ExperimentConfig {
        l: args.l,
        snr_db_grid: parse_grid(&args.snr_db)?,
        trials: args.trials,
        bound_m: args.bound,
        lines_j: args.lines.unwrap_or_else(|| default_lines(args.l)),
        master_seed: args.seed,
        methods: parse_methods(&args.methods)?,
        prime_p: args.prime,
    };
    cfg.validate()?;
    let output = run_sweep_detailed(&cfg, sweep, &sweep_values)?;
    write_aggregates_csv(&output.aggregates, &args.out)?;
    if let Some(path) = &args.records {
        write_records_csv(&output.records, path)?;
    }

    for &method in &cfg.methods {
        let best = output
            .aggregates
            .iter()
            .filter(|a| a.method == method)
            .max_by(|a, b| a.snr_db.total_cmp(&b.snr_db).then(a.sweep_value.total_cmp(&b.sweep_value)));
        if let Some(a) = best {
            writeln!(
                out,
                "{:<14} avg_rate_min {:.6} at {} dB ({} {}, {} trials)",
                method.name(),
                a.avg_rate_min,
                a.snr_db,
                sweep.name(),
                a.sweep_value,
                a.trials
            )
            .map_err(io_stdout)?;
        }
    }
    Ok(EXIT_OK)
}

/// Groups CSV rows into series keyed by `series_col`, in order of first appearance.
pub fn csv_series(text: &str, x_col: &str, y_col: &str, series_col: &str) -> Result<Vec<Series>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::invalid("CSV file is empty"))?
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::invalid(format!("column `{name}` not found in CSV header")))
    };
    let (xi, yi, si) = (col(x_col)?, col(y_col)?, col(series_col)?);

    let mut series: Vec<Series> = Vec::new();
    let mut rows = 0;
    for (n, line) in lines.enumerate() {
        rows += 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::Parse {
                line: n + 2,
                msg: format!("expected {} fields, found {}", header.len(), cells.len()),
            });
        }
        let parse = |i: usize| -> Result<f64> {
            cells[i].parse().map_err(|_| Error::Parse {
                line: n + 2,
                msg: format!("`{}` in column `{}` is not a number", cells[i], header[i]),
            })
        };
        let (x, y) = (parse(xi)?, parse(yi)?);
        let name = cells[si];
        let idx = match series.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                series.push(Series { name: name.to_string(), points: Vec::new() });
                series.len() - 1
            }
        };
        if x.is_finite() && y.is_finite() {
            series[idx].points.push((x, y));
        }
    }
    if rows == 0 {
        return Err(Error::invalid("no data rows"));
    }
    Ok(series)
}

fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&args.input).map_err(|source| Error::Io { path: args.input.clone(), source })?;
    let series = csv_series(&text, &args.x, &args.y, &args.series)?;
    let svg = line_chart(&series, &args.title, &args.x, &args.y);
    fs::write(&args.out, svg).map_err(|source| Error::Io { path: args.out.clone(), source })?;
    writeln!(out, "wrote {} ({} series)", args.out.display(), series.len()).map_err(io_stdout)?;
    Ok(())
}

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use intforce::channel::{format_matrix, snr_db_to_power};
use intforce::harness::{trial_channel, ExperimentConfig, Method};
use intforce::sdm::SearchConfig;
use intforce::select::{design_if, SearchMethod};

fn intforce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intforce")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn design_identity_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", "# identity\n1 0\n0 1\n");
    let o = intforce(&["design", "--channel", &h, "--power", "1", "--method", "exhaustive", "--bound", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("R_total 1.000000"), "{text}");
    assert!(text.contains("success true"));
    assert!(text.starts_with("method exhaustive"));
}

#[test]
fn design_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let rect = write(dir.path(), "rect.txt", "1 0 0\n0 1 0\n");
    let o = intforce(&["design", "--channel", &rect, "--power", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());

    let square = write(dir.path(), "sq.txt", "1 0\n0 1\n");
    let o = intforce(&["design", "--channel", &square, "--power", "-1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = intforce(&["design", "--channel", &square, "--power", "1", "--lines", "2"]);
    assert_eq!(o.status.code(), Some(1));

    let o = intforce(&["design", "--channel", &dir.path().join("missing.txt").to_string_lossy(), "--power", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn design_fallback_exit_code() {
    // scan seeded channels for one where the SDM candidates are rank deficient
    let cfg = ExperimentConfig {
        l: 8,
        snr_db_grid: vec![20.0],
        trials: 1,
        bound_m: 2,
        lines_j: 4,
        master_seed: 2013,
        methods: vec![Method::IfSdm],
        prime_p: None,
    };
    let search = SearchConfig::new(2, 4).unwrap();
    let failing = (0..20_000)
        .map(|t| trial_channel(&cfg, 20.0, t).unwrap().0)
        .find(|ch| !design_if(ch, search, SearchMethod::Sdm).unwrap().success)
        .expect("some seeded channel falls back");

    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", &format_matrix(failing.h()));
    let power = snr_db_to_power(20.0).to_string();
    let o = intforce(&["design", "--channel", &h, "--power", &power, "--bound", "2", "--lines", "4"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("method mmse-identity-fallback"), "{text}");
    assert!(text.contains("success false"));
}

#[test]
fn simulate_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let out_s = out.to_string_lossy().into_owned();
    let o = intforce(&[
        "simulate", "--l", "4", "--snr-db", "0:10:20", "--trials", "20", "--bound", "2", "--lines", "2", "--seed", "1",
        "--methods", "if-sdm,mmse,zf", "--out", &out_s,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("method,"));
    assert_eq!(lines.len(), 1 + 9);
    for m in ["if-sdm", "mmse", "zf"] {
        assert_eq!(lines.iter().filter(|l| l.starts_with(&format!("{m},"))).count(), 3);
    }
    assert_eq!(stdout(&o).lines().count(), 3);

    let svg = dir.path().join("plot.svg");
    let o = intforce(&["plot", "--in", &out_s, "--out", &svg.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = fs::read_to_string(&svg).unwrap();
    assert_eq!(body.matches("<polyline").count(), 3);
    assert_eq!(body.matches("<circle").count(), 9);
}

#[test]
fn simulate_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv").to_string_lossy().into_owned();
    let o = intforce(&["simulate", "--l", "4", "--lines", "9", "--trials", "2", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let o = intforce(&["simulate", "--l", "4", "--trials", "2", "--methods", "nope", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let o = intforce(&["simulate", "--l", "4", "--trials", "2", "--snr-db", "0:x:3", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let bad = dir.path().join("no/such/dir/out.csv").to_string_lossy().into_owned();
    let o = intforce(&["simulate", "--l", "2", "--trials", "2", "--methods", "mmse", "--out", &bad]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg").to_string_lossy().into_owned();
    let header = "method,sweep_param,sweep_value,snr_db,avg_rate_min,avg_rate_sum,avg_rate_min_success_only,success_prob,trials,master_seed\n";

    let single = write(dir.path(), "single.csv", &format!("{header}mmse,snr,20,20,5.5,6,5.5,1,10,1\n"));
    let o = intforce(&["plot", "--in", &single, "--out", &svg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = fs::read_to_string(&svg).unwrap();
    assert_eq!(body.matches("<circle").count(), 1);

    let empty = write(dir.path(), "empty.csv", header);
    let o = intforce(&["plot", "--in", &empty, "--out", &svg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no data rows"));

    let o = intforce(&["plot", "--in", &single, "--out", &svg, "--y", "avg_rate_bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("avg_rate_bogus"));
}

#[test]
fn help_and_usage() {
    assert_eq!(intforce(&["--help"]).status.code(), Some(0));
    assert_eq!(intforce(&[]).status.code(), Some(1));
    assert_eq!(intforce(&["frobnicate"]).status.code(), Some(1));
}

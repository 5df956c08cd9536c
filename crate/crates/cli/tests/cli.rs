use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orgsim::engine::{AuctionSchedule, Scenario, Structure};
use orgsim::landscape::{InterdependenceMatrix, StructureKind};
use orgsim_cli::{preset, Preset};

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate")).args(args).output().expect("binary runs")
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--preset", "paper-main", "--seed", "42", "--replications", "4", "--horizon", "15", "-o"];
    args.push(out.to_str().unwrap());
    args.extend_from_slice(extra);
    simulate(&args)
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = walkdir::WalkDir::new(dir)
        .into_iter()
        .map(|e| e.unwrap().into_path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn main_preset_matches_the_default_parameters() {
    let grid = preset(Preset::PaperMain);
    assert_eq!(grid.len(), 18);
    for s in &grid {
        assert_eq!((s.n, s.p_total, s.m_subtasks, s.horizon, s.replications), (12, 30, 3, 200, 1500));
        assert_eq!((s.scheme.alpha(), s.scheme.beta()), (0.5, 0.5));
        assert!([0.0, 0.25, 0.5].contains(&s.learn_prob));
        assert!([AuctionSchedule::Once, AuctionSchedule::Every(10), AuctionSchedule::Every(1)].contains(&s.schedule));
    }
    let decomposed = grid.iter().filter(|s| s.structure == Structure::Decomposed { k: 3 }).count();
    let interdependent = grid.iter().filter(|s| s.structure == Structure::Interdependent { k: 5 }).count();
    assert_eq!((decomposed, interdependent), (9, 9));
}

#[test]
fn writes_tables_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_run(dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["table2.csv", "table3.csv", "table4.csv", "table5.csv", "significance.csv", "summary.csv"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    assert_eq!(fs::read_dir(dir.path().join("series")).unwrap().count(), 18);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 19);
    assert!(stdout.contains("decomp_K3_P0.25_tau10_a0.5,"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("[18/18]"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert!(small_run(a.path(), &["--workers", "1"]).status.success());
    assert!(small_run(b.path(), &["--workers", "4"]).status.success());
    assert!(simulate(&[
        "--preset", "paper-main", "--seed", "43", "--replications", "4", "--horizon", "15", "-o",
        c.path().to_str().unwrap()
    ])
    .status
    .success());
    let first = csv_files(a.path());
    assert_eq!(first.len(), 24);
    assert_eq!(first, csv_files(b.path()));
    assert_ne!(first, csv_files(c.path()));
}

#[test]
fn traces_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_run(dir.path(), &["--emit-traces", "--emit-svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scenario = dir.path().join("interdep_K5_P0.5_tau10_a0.5");
    let trace = fs::read_to_string(scenario.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 4 * 15);
    // periods 1 and 11 hold auctions
    let flagged = trace.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(flagged, 4 * 2);
    let auctions = fs::read_to_string(scenario.join("auctions.csv")).unwrap();
    assert_eq!(auctions.lines().count(), 1 + 4 * 2 * 3);
    for line in auctions.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[4] >= cells[5], "winning bid below price: {line}");
    }
    let svg = fs::read_to_string(scenario.join("performance.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));

    // traced and untraced runs agree
    let plain = tempfile::tempdir().unwrap();
    assert!(small_run(plain.path(), &[]).status.success());
    assert_eq!(
        fs::read(dir.path().join("table2.csv")).unwrap(),
        fs::read(plain.path().join("table2.csv")).unwrap()
    );
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    fs::write(&empty, "master_seed = 3\n").unwrap();
    let out = simulate(&["--config", empty.to_str().unwrap(), "-o", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no scenarios"));

    let unbalanced = dir.path().join("scheme.toml");
    fs::write(&unbalanced, "[[scenario]]\nstructure = \"decomposed\"\nalpha = 0.6\nbeta = 0.3\n").unwrap();
    let out = simulate(&["--config", unbalanced.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = simulate(&["--preset", "paper-main", "--config", unbalanced.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("not-a-dir");
    fs::write(&blocker, "").unwrap();
    let out = small_run(&blocker, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_config_runs_and_skips_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "master_seed = 5\n[defaults]\nreplications = 3\nhorizon = 10\n\n\
         [[scenario]]\nstructure = \"roll\"\nk = 5\nlearn_prob = 0.25\ntau = 1\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = simulate(&["--config", config.to_str().unwrap(), "-o", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("series/roll_K5_P0.25_tau1_a0.5.csv").is_file());
    assert!(!out_dir.join("table2.csv").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("tables skipped"));
}

#[test]
fn matrix_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = InterdependenceMatrix::build(StructureKind::Interdependent, 12, 3, 5).unwrap();
    let text = matrix.to_text();
    let path = dir.path().join("cross.ixm");
    fs::write(&path, &text).unwrap();
    let parsed = InterdependenceMatrix::load(&path).unwrap();
    assert_eq!(parsed.to_text(), text);
    assert_eq!(parsed.rows(), matrix.rows());

    let out_dir = dir.path().join("out");
    let out = simulate(&[
        "--preset", "paper-main", "--matrix-file", path.to_str().unwrap(), "--replications", "3", "--horizon", "10",
        "-o", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // both structures collapse onto the file's, leaving one family of nine
    let series: Vec<_> = fs::read_dir(out_dir.join("series")).unwrap().collect();
    assert_eq!(series.len(), 9);
    assert!(out_dir.join("series/file-cross_K5_P0.5_tau1_a0.5.csv").is_file());
    let table = fs::read_to_string(out_dir.join("table2.csv")).unwrap();
    assert!(table.lines().next().unwrap().contains("file-cross_K5_a0.5:High"));

    // a malformed matrix is a configuration error
    fs::write(&path, "x0\n0x\n").unwrap();
    let out = simulate(&["--matrix-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scenario_labels_are_directory_names() {
    for s in preset(Preset::PaperCollectivism).iter().chain(&preset(Preset::PaperRoll)) {
        let label = s.label();
        assert!(label.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)), "{label}");
    }
    let s = Scenario::new(Structure::Decomposed { k: 3 }, 0.25, AuctionSchedule::Every(10));
    assert_eq!(s.label(), "decomp_K3_P0.25_tau10_a0.5");
}

use std::path::Path;
use std::process::{Command, Output};

use compgap::np::{CnfFormula, ManifestEntry, Stage};

fn compgap(args: &[&str], envs: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compgap"))
        .args(args)
        .envs(envs.iter().copied())
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// `(series, point, half_width)` per data row.
fn rows(csv: &str) -> Vec<(String, f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[10].parse().unwrap(), f[11].parse().unwrap())
        })
        .collect()
}

#[test]
fn risk_matches_noise_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = compgap(&["risk", "--trials", "100000", "--out", dir.path().to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "results.csv");
    assert!(csv.starts_with("experiment,series,d,alpha,b,hlen,slen,k_sym,n_sym,budget,point,half_width,trials,seed\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 2);
    for (_, point, hw) in &r {
        assert!((point - 0.05).abs() <= 3.0 * hw, "{point} ± {hw}");
    }
    assert_eq!(r[0].1, r[1].1, "wrapped risk equals base risk");
    assert_eq!(read(dir.path(), "transcript.log").lines().count(), 100_000);
}

#[test]
fn separation_default_shows_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = compgap(&["separation", "--out", dir.path().to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&read(dir.path(), "results.csv"));
    let get = |s: &str| r.iter().find(|x| x.0 == s).unwrap().1;
    let (bounded, unbounded, analytic) = (get("bounded"), get("unbounded"), get("analytic"));
    assert!(bounded <= 0.07, "{bounded}");
    assert!(unbounded - bounded >= analytic - 0.05 - 0.05, "{unbounded} vs {bounded}");
    let csv = read(dir.path(), "results.csv");
    let budgets: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(9).unwrap()).collect();
    assert_eq!(budgets, ["304", "258", "2"]);
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let out = compgap(
            &["separation", "--trials", "200", "--seed", "99", "--out", dir.path().to_str().unwrap()],
            &[("COMPGAP_THREADS", threads)],
        );
        assert!(out.status.success());
    }
    assert_eq!(read(a.path(), "results.csv"), read(b.path(), "results.csv"));
    assert_eq!(read(a.path(), "transcript.log"), read(b.path(), "transcript.log"));
    assert!(read(a.path(), "results.csv").lines().skip(1).all(|l| l.ends_with(",99")));
}

#[test]
fn config_errors_exit_with_2_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "# comment\nproblem.d = fifteen\n").unwrap();
    let out = compgap(&["risk", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    std::fs::write(&cfg, "problem.depth = 3\n").unwrap();
    assert_eq!(compgap(&["risk", "--config", cfg.to_str().unwrap()], &[]).status.code(), Some(2));

    // A 2·4² = 32-bit key does not fit the default 512-bit code.
    std::fs::write(&cfg, "ots.hlen = 4\n").unwrap();
    let out = compgap(&["separation", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verification key"));

    // b + ℓ = 50 + 256 exceeds t_max = 304.
    std::fs::write(&cfg, "problem.b = 50\n").unwrap();
    let out = compgap(&["separation", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_max"));

    let out = compgap(&["risk", "--trials", "10"], &[("COMPGAP_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn np_forge_writes_dimacs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("forge.conf");
    std::fs::write(&cfg, "problem.d = 11\nforge.stage = S1\nforge.count = 12\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = compgap(&["np-forge", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read(&out_dir.join("cnf"), "manifest.txt");
    let entries: Vec<ManifestEntry> = manifest.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(entries.len(), 12);
    for e in &entries {
        assert_eq!((e.stage, e.d, e.b), (Stage::S1, 11, 2));
        let f = CnfFormula::read_dimacs(&read(&out_dir.join("cnf"), &e.file)).unwrap();
        assert!(f.annotation("input").is_some());
        assert!(f.num_clauses() > 0);
    }
    let r = rows(&read(&out_dir, "results.csv"));
    assert_eq!(r[0].0, "S1-sat-rate");
}

#[test]
fn report_summarizes_existing_results() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(compgap(&["oracle-check", "--trials", "100", "--out", d], &[]).status.success());
    let out = compgap(&["report", "--out", d], &[]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().next().unwrap().starts_with("experiment"));
    assert!(text.contains("brute-force"));
    assert_eq!(compgap(&["report", "--out", dir.path().join("missing").to_str().unwrap()], &[]).status.code(), Some(1));
}

use std::path::Path;
use std::process::{Command, Output};

use packlab_cli::{emit_fig1_curves, execute, ExperimentConfig, Params, EXIT_BOUND_VIOLATED, EXIT_INVALID};
use packlab_core::decimate::NU2_MIN;

fn packlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_packlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn c5_edge_list() -> &'static str {
    "# vertices=5 threshold=1\n0 1\n0 4\n1 2\n2 3\n3 4\n"
}

#[test]
fn sample_poisson_writes_header_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = packlab(
        &[
            "sample-poisson",
            "--dim",
            "2",
            "--half-side",
            "5",
            "--intensity",
            "1",
            "--seed",
            "7",
            "--out",
            "pts.txt",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("pts.txt")).unwrap();
    assert!(text.starts_with("# dim=2 half_side=5"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pts.txt.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(meta["version"], packlab_core::VERSION);
}

#[test]
fn cover_of_five_cycle_has_size_three() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c5.txt"), c5_edge_list()).unwrap();
    for mode in ["exact", "constructive"] {
        let out = packlab(&["cover", "--input", "c5.txt", "--mode", mode], dir.path());
        assert!(out.status.success());
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["size"], 3);
        assert_eq!(report["mode"], mode);
        assert_eq!(report["cover"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn operational_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        packlab(&["no-such-command"], dir.path()).status.code(),
        Some(EXIT_INVALID)
    );
    assert_eq!(
        packlab(&["cover", "--input", "missing.txt"], dir.path()).status.code(),
        Some(EXIT_INVALID)
    );
    assert_eq!(packlab(&["cover"], dir.path()).status.code(), Some(EXIT_INVALID));
    assert_eq!(
        packlab(&["graph-census", "--distance", "-1"], dir.path()).status.code(),
        Some(EXIT_INVALID)
    );
    assert_eq!(packlab(&["--dim", "2"], dir.path()).status.code(), Some(EXIT_INVALID));

    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    assert_eq!(
        packlab(&["--config", "bad.json"], dir.path()).status.code(),
        Some(EXIT_INVALID)
    );
    std::fs::write(dir.path().join("v9.json"), r#"{"version": 9, "subcommand": "fig1"}"#).unwrap();
    assert_eq!(
        packlab(&["--config", "v9.json"], dir.path()).status.code(),
        Some(EXIT_INVALID)
    );
    std::fs::write(
        dir.path().join("extra.json"),
        r#"{"version": 1, "subcommand": "fig1", "params": {"colour": 1}}"#,
    )
    .unwrap();
    assert_eq!(
        packlab(&["--config", "extra.json"], dir.path()).status.code(),
        Some(EXIT_INVALID)
    );
}

#[test]
fn failed_bound_check_exits_with_three() {
    // box sizes listed largest first, so the exceedance fractions increase
    let dir = tempfile::tempdir().unwrap();
    let out = packlab(
        &[
            "concentration",
            "--half-sides",
            "16,4",
            "--trials",
            "400",
            "--seed",
            "3",
            "--out",
            "c.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(EXIT_BOUND_VIOLATED));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["non_increasing"], false);
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(
        "sample-poisson",
        Params {
            dim: Some(3),
            half_side: Some(2.0),
            seed: Some(11),
            ..Params::default()
        },
    );
    std::fs::write(dir.path().join("cfg.json"), cfg.to_json()).unwrap();
    let out = packlab(
        &["--config", "cfg.json", "--half-side", "3", "--out", "p.txt"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("p.txt")).unwrap();
    assert!(text.starts_with("# dim=3 half_side=3 convention=torus\n"));
}

#[test]
fn config_round_trips_and_hash_ignores_output_paths() {
    let mut cfg = ExperimentConfig::new(
        "d-curve",
        Params {
            distances: Some(vec![0.4, 0.5]),
            trials: Some(7),
            out: Some("a.csv".into()),
            ..Params::default()
        },
    );
    let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(back, cfg);
    let h = cfg.hash();
    cfg.params.out = Some("elsewhere/b.csv".into());
    assert_eq!(cfg.hash(), h);
    cfg.params.trials = Some(8);
    assert_ne!(cfg.hash(), h);
}

#[test]
fn execute_is_deterministic_in_memory() {
    for sub in [
        "graph-census",
        "decimate",
        "moments-check",
        "lattice2d",
        "schmidt-table",
        "fig1",
    ] {
        let cfg = ExperimentConfig::new(
            sub,
            Params {
                trials: Some(120),
                seed: Some(99),
                ..Params::default()
            },
        );
        let a = execute(&cfg).unwrap();
        let b = execute(&cfg).unwrap();
        assert_eq!(a, b, "{sub}");
    }
}

fn fig1_rows(csv: &str) -> Vec<(String, f64, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn fig1_contains_the_unit_volume_row() {
    let d = 1.0 / std::f64::consts::PI.sqrt();
    let rows = fig1_rows(&emit_fig1_curves(2, &[0.3, d, 0.7]).unwrap());
    assert!(rows
        .iter()
        .any(|(id, nu, v)| id == "lower13" && (nu - 0.5).abs() < 1e-12 && (v - 0.125).abs() < 1e-12));
    // every fraction is positive on this grid: three rows per d plus 99 explicit rows
    assert_eq!(rows.len(), 3 * 3 + 99);
    assert!(emit_fig1_curves(2, &[]).is_err());
}

#[test]
fn fig1_upper_curve_starts_at_its_minimum_fraction() {
    let grid: Vec<f64> = (1..200).map(|k| k as f64 * 0.01).collect();
    let rows = fig1_rows(&emit_fig1_curves(2, &grid).unwrap());
    let upper: Vec<f64> = rows.iter().filter(|r| r.0 == "upper14").map(|r| r.1).collect();
    assert_eq!(upper.len(), grid.len());
    assert!(upper.iter().all(|&nu| nu >= NU2_MIN - 1e-12));
    let lowest = upper.iter().copied().fold(1.0, f64::min);
    assert!(lowest - NU2_MIN < 1e-3);
}

#[test]
fn fig1_improved_lower_curve_dominates() {
    let grid: Vec<f64> = (1..400).map(|k| k as f64 * 0.0025).collect();
    let rows = fig1_rows(&emit_fig1_curves(2, &grid).unwrap());
    let mut l15: Vec<(f64, f64)> = rows.iter().filter(|r| r.0 == "lower15").map(|r| (r.1, r.2)).collect();
    l15.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut checked = 0;
    for (_, nu, v13) in rows.iter().filter(|r| r.0 == "lower13") {
        let Some(k) = l15.windows(2).position(|w| w[0].0 <= *nu && *nu <= w[1].0) else {
            continue;
        };
        let (a, b) = (l15[k], l15[k + 1]);
        let v15 = a.1 + (b.1 - a.1) * (nu - a.0) / (b.0 - a.0);
        assert!(v15 >= v13 - 1e-4, "nu = {nu}: {v15} < {v13}");
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn csv_outputs_use_plain_decimals_and_lf() {
    let cfg = ExperimentConfig::new("schmidt-table", Params::default());
    let text = execute(&cfg).unwrap().main.text;
    assert!(!text.contains('\r'));
    assert!(text.starts_with("n,x,limit_cdf,lower,upper,width,remainder,min_distance\n"));
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').count(), 8);
    }
}

//! End-to-end checks of the command line surface: exit codes, flag handling,
//! CSV layout.

use roughpath_cli::run_cli;
use std::path::PathBuf;

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("roughpath-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn missing_config_exits_one() {
    let code = run_cli(["roughpath", "wz", "--config", "definitely-missing.json"]);
    assert_eq!(code, 1);
}

#[test]
fn malformed_config_exits_one() {
    let dir = scratch_dir("bad");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(run_cli(["roughpath", "wz", "--config", cfg.to_str().unwrap()]), 1);

    // unknown fields are configuration errors too
    std::fs::write(&cfg, r#"{"experiment": "wz", "wat": 1}"#).unwrap();
    assert_eq!(run_cli(["roughpath", "wz", "--config", cfg.to_str().unwrap()]), 1);

    // invalid ranges
    std::fs::write(&cfg, r#"{"experiment": "wz", "p": 3.4}"#).unwrap();
    assert_eq!(run_cli(["roughpath", "wz", "--config", cfg.to_str().unwrap()]), 1);

    // experiment/subcommand mismatch
    std::fs::write(&cfg, r#"{"experiment": "goodseq"}"#).unwrap();
    assert_eq!(run_cli(["roughpath", "wz", "--config", cfg.to_str().unwrap()]), 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn ratefn_prints_value_and_writes_csv() {
    let dir = scratch_dir("ratefn");
    let cfg = dir.join("r.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "ratefn", "path": {"times": [0.0, 1.0], "points": [[0.0, 0.0], [3.0, 4.0]]}}"#,
    )
    .unwrap();
    let out = dir.join("r.csv");
    let code = run_cli([
        "roughpath",
        "ratefn",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code, 0);
    let rows = std::fs::read_to_string(&out).unwrap();
    assert!(rows.starts_with("experiment,scenario,level,mesh,metric,replicate,value\n"));
    assert!(rows.contains("ratefn,-,0,1e0,rate_function,0,1.25e1"));
    assert!(dir.join("r_summary.csv").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn small_wz_run_produces_sorted_rows() {
    let dir = scratch_dir("wz");
    let cfg = dir.join("wz.json");
    std::fs::write(
        &cfg,
        r#"{"experiment": "wz", "ref_level": 8, "levels": [4, 5], "replicates": 3, "seed": 9}"#,
    )
    .unwrap();
    let out = dir.join("wz.csv");
    let code = run_cli([
        "roughpath",
        "wz",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code, 0);
    let rows = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = rows.lines().skip(1).collect();
    // 2 metrics x 2 levels x 3 replicates
    assert_eq!(lines.len(), 12);
    let keys: Vec<(String, u32, u32)> = lines
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[4].to_string(), f[2].parse().unwrap(), f[5].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted, "rows must be sorted by (metric, level, replicate)");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_exits_zero() {
    assert_eq!(run_cli(["roughpath", "--help"]), 0);
    assert_eq!(run_cli(["roughpath", "wz", "--help"]), 0);
}

#[test]
fn unknown_subcommand_exits_one() {
    assert_eq!(run_cli(["roughpath", "frobnicate"]), 1);
}

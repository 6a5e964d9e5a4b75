use std::path::Path;
use std::process::{Command, Output};

fn skinlayer(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_skinlayer"));
    cmd.args(args).env_remove("SKINLAYER_OUT");
    if let Some(dir) = out_env {
        cmd.env("SKINLAYER_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr)
}

#[test]
fn rates_writes_csv_summary_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = skinlayer(&["rates", "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", text(&o));
    for k in 0..4 {
        let csv = std::fs::read_to_string(out.join(format!("rates_k{k}.csv"))).unwrap();
        assert!(csv.starts_with("k,delta,error,modes,polarization\n"));
        // six single-mode curves plus the aggregate, four skin depths each
        assert_eq!(csv.lines().count(), 1 + 7 * 4);
        assert!(csv.contains(",1;2;3,TE_r;TM_r\n"));
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["gibc"].as_array().unwrap().len(), 4);
    assert!(summary["gibc"][3]["max_condition"].as_f64().unwrap() > 1.0);
    assert!(std::fs::read_to_string(out.join("rates.gp")).unwrap().contains("rates_k3.csv"));
}

#[test]
fn single_mode_order_zero_slope_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = skinlayer(&["rates", "--modes", "1", "--orders", "0", "--json", "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", text(&o));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let slope = summary["gibc"][0]["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.2, "{slope}");
}

#[test]
fn empty_delta_list_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = skinlayer(&["rates", "--delta", "", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("delta list is empty"), "{}", text(&o));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "nothing is written on error");
}

#[test]
fn slope_outside_window_exits_nonzero() {
    // skin depths comparable to the radius are outside the asymptotic regime,
    // so the order-zero fit misses its window
    let dir = tempfile::tempdir().unwrap();
    let o = skinlayer(&["rates", "--orders", "0", "--delta", "1.5,1.2,1.0,0.9", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    assert!(text(&o).contains("FAIL gibc k=0"));
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["rates", "profiles-check", "symbol-check", "curl-check", "decay-check"] {
        let (a, b) = (dir.path().join(format!("{cmd}-a")), dir.path().join(format!("{cmd}-b")));
        for d in [&a, &b] {
            let o = skinlayer(&[cmd, "--seed", "11", "--out", d.to_str().unwrap()], None);
            assert!(o.status.success(), "{cmd}: {}", text(&o));
        }
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")) {
            assert_eq!(std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap(), "{cmd}: {n:?}");
        }
    }
}

#[test]
fn config_file_flags_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let from_file = dir.path().join("from-file");
    std::fs::write(
        &cfg,
        format!("out = {:?}\n[decay]\nsamples = 11\n[sweep]\npolarizations = [\"TM_r\"]\n", from_file.to_str().unwrap()),
    )
    .unwrap();
    let o = skinlayer(&["decay-check", "--config", cfg.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", text(&o));
    let csv = std::fs::read_to_string(from_file.join("decay.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 11);
    assert!(!csv.contains("TE_r"));

    let flag = dir.path().join("flag");
    let o = skinlayer(&["decay-check", "--config", cfg.to_str().unwrap(), "--out", flag.to_str().unwrap()], None);
    assert!(o.status.success() && flag.join("decay.csv").exists());

    let env = dir.path().join("env");
    let o = skinlayer(&["decay-check", "--out", flag.to_str().unwrap()], Some(&env));
    assert!(o.status.success() && env.join("decay.csv").exists());
}

#[test]
fn bad_config_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[problem]\nradius_out = 0.5\n").unwrap();
    let o = skinlayer(&["symbol-check", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("[problem]"), "{}", text(&o));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpg_cli::config;
use cpg_cli::output::{read_rows, write_rows, Format, SweepRow};
use cpg_core::lifshitz::Delta2Order;
use tempfile::TempDir;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets").join(format!("{name}.cfg"))
}

fn cpg(args: &[&str]) -> Output {
    cpg_with_env(args, &[])
}

fn cpg_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cpg"));
    cmd.args(args).env_remove("CPG_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("cpg runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The gapped preset with its `[sweep]` section replaced.
fn with_sweep(dir: &TempDir, name: &str, sweep: &str) -> PathBuf {
    let text = fs::read_to_string(preset("gapped")).unwrap();
    let start = text.find("[sweep]").unwrap();
    let end = text.find("[engine]").unwrap();
    let path = dir.path().join(name);
    fs::write(&path, format!("{}[sweep]\n{sweep}\n\n{}", &text[..start], &text[end..])).unwrap();
    path
}

fn sweep_file(cfg: &Path, out: &Path, format: &str, env: &[(&str, &str)]) -> Vec<SweepRow> {
    let o = cpg_with_env(
        &["sweep", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", format],
        env,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let format = if format == "csv" { Format::Csv } else { Format::Jsonl };
    read_rows(fs::read(out).unwrap().as_slice(), format).unwrap()
}

#[test]
fn shipped_presets_match_the_verification_presets() {
    for (name, expected, order) in [
        ("pristine", cpg_verify::presets::pristine(), Delta2Order::Full),
        ("gapped", cpg_verify::presets::gapped(), Delta2Order::FirstOrder),
        ("boundary", cpg_verify::presets::boundary(), Delta2Order::Full),
    ] {
        let loaded = config::load(&preset(name)).unwrap();
        assert_eq!(loaded.base, expected, "{name}");
        assert_eq!(loaded.settings.delta2_order, order, "{name}");
        assert!(loaded.raw.sweep.is_some());
    }
}

#[test]
fn energy_on_the_gapped_preset_is_attractive() {
    let o = cpg(&["energy", preset("gapped").to_str().unwrap(), "--temp", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    for key in ["e_zero_eV", "delta1_eV", "delta2_eV", "total_eV", "terms_used", "tail_bound_eV"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["total_eV"].as_f64().unwrap() < 0.0);
}

#[test]
fn zero_polarizability_gives_zero_energy() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(preset("gapped")).unwrap().replace("alpha0_nm3 = 0.02", "alpha0_nm3 = 0.0");
    let path = dir.path().join("off.cfg");
    fs::write(&path, text).unwrap();
    let o = cpg(&["energy", path.to_str().unwrap(), "--temp", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    for key in ["e_zero_eV", "delta1_eV", "delta2_eV", "total_eV"] {
        assert_eq!(v[key].as_f64(), Some(0.0), "{key}");
    }
    // Nothing to fit: the numerical failure code.
    let o = cpg(&["asymptotics", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn configuration_errors_exit_2_and_name_the_path() {
    let o = cpg(&["energy", "/no/such/config.cfg", "--temp", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/config.cfg"));

    let dir = TempDir::new().unwrap();
    let bad = with_sweep(&dir, "bad.cfg", "T_min_K = 1.0\nT_max_K = 2.0\npoints = 1\nspacing = \"log\"");
    let o = cpg(&["sweep", bad.to_str().unwrap(), "--out", dir.path().join("x.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.cfg"));

    let o = cpg(&["energy", preset("gapped").to_str().unwrap(), "--temp", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cpg(&["verify", "--suite", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cpg_with_env(&["energy", preset("gapped").to_str().unwrap(), "--temp", "1"], &[("CPG_THREADS", "0")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing").join("rows.csv");
    let o = cpg(&["sweep", preset("gapped").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn two_point_sweep_has_header_and_two_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = with_sweep(&dir, "two.cfg", "T_min_K = 2.0\nT_max_K = 4.0\npoints = 2\nspacing = \"linear\"");
    let out = dir.path().join("two.csv");
    let rows = sweep_file(&cfg, &out, "csv", &[]);
    assert_eq!(rows.len(), 2);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "T_K,tau,F_total_eV,E0_eV,delta1_eV,delta2_eV,S_eV_per_K,S_err_eV_per_K");
    assert_eq!((rows[0].t_k, rows[1].t_k), (2.0, 4.0));
}

#[test]
fn log_sweep_is_geometric_and_rows_add_up() {
    let dir = TempDir::new().unwrap();
    let cfg = with_sweep(&dir, "decade.cfg", "T_min_K = 0.5\nT_max_K = 5.0\npoints = 11\nspacing = \"log\"");
    let rows = sweep_file(&cfg, &dir.path().join("decade.csv"), "csv", &[]);
    assert_eq!(rows.len(), 11);
    let ratio = 10f64.powf(0.1);
    for w in rows.windows(2) {
        assert!((w[1].tau / w[0].tau / ratio - 1.0).abs() < 1e-12);
    }
    for r in &rows {
        assert_eq!(r.delta1_ev + r.delta2_ev + r.e0_ev, r.f_total_ev);
        assert!(r.s_ev_per_k > 0.0 && r.s_err_ev_per_k < r.s_ev_per_k);
    }
}

#[test]
fn sweep_files_round_trip_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    for format in ["csv", "jsonl"] {
        let out = dir.path().join(format!("rows.{format}"));
        let rows = sweep_file(&preset("gapped"), &out, format, &[]);
        let mut again = Vec::new();
        let f = if format == "csv" { Format::Csv } else { Format::Jsonl };
        write_rows(&rows, &mut again, f).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), fs::read_to_string(&out).unwrap(), "{format}");
    }
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let dir = TempDir::new().unwrap();
    let files: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|n| {
            let out = dir.path().join(format!("t{n}.csv"));
            sweep_file(&preset("gapped"), &out, "csv", &[("CPG_THREADS", n)]);
            fs::read(&out).unwrap()
        })
        .collect();
    assert_eq!(files[0], files[1]);
}

#[test]
fn asymptotics_table_on_the_gapped_preset() {
    let o = cpg(&["asymptotics", preset("gapped").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let field = |law: &str, quantity: &str, variant: &str, col: usize| -> f64 {
        let line = text
            .lines()
            .find(|l| {
                let w: Vec<&str> = l.split_whitespace().collect();
                w[0] == law && w[1] == quantity && w[2] == variant
            })
            .unwrap_or_else(|| panic!("no {law} {quantity} {variant} row in\n{text}"));
        line.split_whitespace().nth(col).unwrap().parse().unwrap()
    };
    assert!((field("T5-free-energy", "exponent", "-", 4) - 5.0).abs() <= 0.05);
    for variant in ["nominal", "zeta5", "corrected"] {
        field("T5-free-energy", "coefficient", variant, 3);
    }
    assert_eq!(field("exp-suppression", "slope_eV", "-", 3), -0.05);
    assert!((field("exp-suppression", "slope_eV", "-", 4) / -0.05 - 1.0).abs() <= 0.05);
}

#[test]
fn asymptotics_table_on_the_pristine_preset() {
    let o = cpg(&["asymptotics", preset("pristine").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o).lines().find(|l| l.starts_with("T3-pristine")).map(str::to_owned).unwrap();
    let fitted: f64 = row.split_whitespace().nth(4).unwrap().parse().unwrap();
    assert!((fitted - 3.0).abs() <= 0.1, "{row}");
}

#[test]
fn oracle_suite_passes() {
    let o = cpg(&["verify", "--suite", "oracles"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    assert!(text.contains("PASS [7]") && text.contains("PASS [8]"), "{text}");
}

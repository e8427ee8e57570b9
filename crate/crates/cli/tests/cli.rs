use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};
use wavemap_core::experiment::{theorem1_gap_run, GapReport, GapRunConfig};
use wavemap_core::field::{sample, write_field, write_state, TorusGrid};
use wavemap_core::norms::sobolev_norm;
use wavemap_core::wave::WaveState;

fn wavemap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavemap")).args(args).env_remove("CACHE_DIR").output().unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).expect("stdout line is JSON")).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn check_manifest(path: &Path) -> Value {
    let m: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let outs = m["outputs"].as_array().unwrap();
    assert!(!outs.is_empty());
    for o in outs {
        let p = Path::new(o["path"].as_str().unwrap());
        assert!(p.exists(), "{p:?} listed but missing");
        let bytes = std::fs::read(p).unwrap();
        use sha2::Digest;
        let sum: String = sha2::Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(o["sha256"].as_str().unwrap(), sum);
    }
    m
}

const SMALL_SWEEP: &str = r#"
kind = "gap"
n = 2
deltas = [0.3, 0.1]
lambda = 20.0
mu = 0.1
r0 = 100.0
seed = 7
negative_control = true
[target]
name = "flat_line"
[grid]
dim = 2
l = 16.0
n = 512
"#;

#[test]
fn unknown_flag_is_error() {
    let o = wavemap(&["norms", "--in", "x.field", "--s", "1", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--bogus"));
}

#[test]
fn missing_subcommand_is_error() {
    assert_eq!(wavemap(&[]).status.code(), Some(1));
}

#[test]
fn missing_input_is_error() {
    let o = wavemap(&["norms", "--in", "/definitely/not/here.field", "--s", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("input file not found"));
}

#[test]
fn malformed_config_is_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 2\ndeltas = \"oops\"\n").unwrap();
    let o = wavemap(&["sweep", "--config", cfg.to_str().unwrap(), "--out", d.path().join("r.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed config"), "{}", stderr(&o));
}

#[test]
fn norms_record_matches_library() {
    let d = tempfile::tempdir().unwrap();
    let grid = TorusGrid::new(2, 8.0, 64).unwrap();
    let f = sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), grid).unwrap();
    for name in ["f.field", "f.json"] {
        let p = d.path().join(name);
        write_field(&p, &f).unwrap();
        let o = wavemap(&["norms", "--in", p.to_str().unwrap(), "--s", "0.5", "--homogeneous"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let rec = &json_lines(&o)[0];
        assert_eq!(rec["method"], "fourier");
        assert_eq!(rec["norm"].as_f64().unwrap(), sobolev_norm(&f, 0.5, true).unwrap());
    }
    let p = d.path().join("f.field");
    let o = wavemap(&["norms", "--in", p.to_str().unwrap(), "--s", "0.5", "--method", "difference"]);
    let rec = &json_lines(&o)[0];
    assert_eq!(rec["method"], "fractional_integral");
    assert!(rec["shells_used"].as_u64().unwrap() > 0 && rec["tail_estimate"].as_f64().unwrap() >= 0.0);
}

#[test]
fn propagate_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let grid = TorusGrid::new(2, 8.0, 64).unwrap();
    let u = sample(|x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp(), grid).unwrap();
    let ut = sample(|x| x[0] * (-(x[0] * x[0] + x[1] * x[1])).exp(), grid).unwrap();
    let s0 = WaveState::new(u, ut, 0.0).unwrap();
    let a = d.path().join("a.state");
    let b = d.path().join("b.state");
    let c = d.path().join("c.state");
    write_state(&a, &s0).unwrap();
    let o = wavemap(&["propagate", "--in", a.to_str().unwrap(), "--t", "1", "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json_lines(&o)[0]["t"].as_f64(), Some(1.0));
    check_manifest(&d.path().join("b.manifest.json"));
    let o = wavemap(&["propagate", "--in", b.to_str().unwrap(), "--t", "0", "--out", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let back = wavemap_core::field::read_state(&c).unwrap();
    let err = back.u.values.iter().zip(&s0.u.values).chain(back.ut.values.iter().zip(&s0.ut.values)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn pointvalue_methods_agree() {
    let mut vals = Vec::new();
    for m in ["kernel", "radial", "representation"] {
        let o = wavemap(&["pointvalue", "--profile", "psi-exact", "--delta", "0.1", "--method", m]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let rec = &json_lines(&o)[0];
        assert_eq!(rec["method"], m);
        vals.push(rec["value"].as_f64().unwrap());
    }
    for v in vals {
        assert!((v - 0.5 * 1.5f64.ln()).abs() < 1e-8, "{v}");
    }
    let o = wavemap(&["pointvalue", "--profile", "log-cutoff", "--delta", "0.25", "--method", "kirchhoff", "--n", "3"]);
    assert!((json_lines(&o)[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let o = wavemap(&["pointvalue", "--profile", "gaussian", "--method", "representation", "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lemma1_and_chi_write_checksummed_outputs() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("l1");
    let o = wavemap(&["lemma1", "--n", "2", "--deltas", "0.3,0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = json_lines(&o);
    assert_eq!(recs.len(), 2);
    assert!(recs[1]["norm"].as_f64() < recs[0]["norm"].as_f64());
    assert!(recs[0]["t_j"].as_f64().unwrap() < 1.0);
    let m = check_manifest(&out.join("manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 3);
    let seq: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(out.join("sequence.json")).unwrap()).unwrap();
    assert_eq!(seq, recs);

    let chi = d.path().join("chi");
    let o = wavemap(&["chi", "--n", "2", "--out", chi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rec = &json_lines(&o)[0];
    assert!(rec["kappa"].as_f64().unwrap() > 0.0 && rec["grid_integral"].as_f64().unwrap().abs() < 1e-12);
    check_manifest(&chi.join("manifest.json"));
}

#[test]
fn lemma1_rejects_increasing_deltas() {
    let d = tempfile::tempdir().unwrap();
    let o = wavemap(&["lemma1", "--deltas", "0.1,0.3", "--out", d.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_report_and_manifest_reproduction() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("flat.cfg");
    std::fs::write(&cfg, SMALL_SWEEP).unwrap();
    let rep = d.path().join("flat.json");
    let o = wavemap(&["--jobs", "1", "sweep", "--config", cfg.to_str().unwrap(), "--out", rep.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines = json_lines(&o);
    assert_eq!(lines.last().unwrap()["verdict"], "pass");
    assert_eq!(lines.last().unwrap()["kind"], "negative_control");
    let m = check_manifest(&d.path().join("flat.manifest.json"));
    assert_eq!(m["seed"].as_u64(), Some(7));

    // the config echo alone regenerates the report
    let echo: GapRunConfig = serde_json::from_value(m["config_echo"].clone()).unwrap();
    let again = theorem1_gap_run(&echo).unwrap();
    let stored: GapReport = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(stored.rows.len(), again.rows.len());
    for (a, b) in stored.rows.iter().zip(&again.rows) {
        assert!((a.gap - b.gap).abs() <= 1e-14 * a.gap.abs().max(1.0));
        assert!((a.data_distance - b.data_distance).abs() <= 1e-14);
    }
    assert_eq!(stored.recompute_verdict(), stored.verdict);

    // single report → CSV + dat
    let plots = d.path().join("plots");
    let o = wavemap(&["report", rep.to_str().unwrap(), "--out-dir", plots.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(plots.join("merged.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "delta,flat.data_distance,flat.gap");
    assert_eq!(csv.lines().count(), 3);
    let dat = std::fs::read_to_string(plots.join("merged.dat")).unwrap();
    assert!(dat.starts_with("# delta"));
    check_manifest(&plots.join("merged.manifest.json"));

    // two reports side by side
    let copy = d.path().join("other.json");
    std::fs::copy(&rep, &copy).unwrap();
    let o = wavemap(&["report", rep.to_str().unwrap(), copy.to_str().unwrap(), "--out-dir", plots.to_str().unwrap(), "--name", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(plots.join("both.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 5);

    // schema mismatch names the file
    let o = wavemap(&["report", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("flat.cfg"));
}

#[test]
fn report_needs_inputs() {
    let o = wavemap(&["report"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no input reports"));
}

#[test]
fn jobs_zero_is_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("flat.cfg");
    std::fs::write(&cfg, SMALL_SWEEP).unwrap();
    let o = wavemap(&["--jobs", "0", "sweep", "--config", cfg.to_str().unwrap(), "--out", d.path().join("r.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["sphere_n2.cfg", "flat_control.cfg", "certificate_n2.cfg"] {
        let p = root.join(name);
        let o = wavemap(&["sweep", "--config", p.to_str().unwrap(), "--jobs", "0"]);
        // parsing succeeds, so the only complaint is the worker count
        assert!(stderr(&o).contains("--jobs"), "{name}: {}", stderr(&o));
    }
}

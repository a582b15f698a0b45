use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn xbar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xbar"))
        .args(args)
        .output()
        .expect("spawn xbar")
}

fn designs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../designs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> BTreeMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(r: &BTreeMap<String, String>, key: &str) -> f64 {
    r[key].parse().unwrap_or_else(|_| panic!("{key}={}", r[key]))
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.lines().count(), 1, "{text}");
    text
}

#[test]
fn simulate_then_metrics_three_element() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let ts = dir.path().join("r.s2p");
    let design = designs().join("three_element.json");
    let out = xbar(&["simulate", "--design", s(&design), "--out", s(&csv), "--touchstone", s(&ts)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let header = std::fs::read_to_string(&csv).unwrap();
    assert!(header.starts_with("f_hz,s11_re,s11_im,s21_re,s21_im,s22_re,s22_im,il_db,rl_db\n"));

    let from_csv = xbar(&["metrics", "--in", s(&csv)]);
    let from_ts = xbar(&["metrics", "--in", s(&ts)]);
    assert!(from_csv.status.success() && from_ts.status.success());
    let r = report(&from_csv);
    for key in [
        "fc_hz", "min_il_db", "fbw3", "fbw20", "oob_lower_db", "oob_lower_hz", "oob_upper_db",
        "oob_upper_hz", "tz_hz",
    ] {
        assert!(r.contains_key(key), "missing {key}");
    }
    assert!((num(&r, "fc_hz") - 20.5e9).abs() < 0.1e9);
    assert!((num(&r, "min_il_db") - 1.638).abs() < 0.2);
    assert!((num(&r, "fbw3") - 0.095).abs() < 0.005);
    assert!((num(&r, "fbw20") - 0.17).abs() < 0.01);
    assert!(num(&r, "oob_lower_db") > 13.0);
    assert!(num(&r, "oob_upper_db") > 14.0);
    // Both file formats carry the same response.
    let t = report(&from_ts);
    assert!((num(&t, "fbw3") - num(&r, "fbw3")).abs() < 1e-6);
}

#[test]
fn metrics_absolute_reference_changes_only_fbw20() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let design = designs().join("three_element.json");
    assert!(xbar(&["simulate", "--design", s(&design), "--out", s(&csv)]).status.success());
    let peak = report(&xbar(&["metrics", "--in", s(&csv)]));
    let abs = report(&xbar(&["metrics", "--in", s(&csv), "--fbw-ref", "absolute"]));
    assert_eq!(peak["fbw3"], abs["fbw3"]);
    assert!(num(&abs, "fbw20") < num(&peak, "fbw20"));
}

#[test]
fn scale_by_one_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let canon = dir.path().join("canon.json");
    let scaled = dir.path().join("scaled.json");
    let design = designs().join("three_element.json");
    // First pass canonicalizes the hand-written fixture.
    assert!(xbar(&["scale", "--design", s(&design), "--factor", "1.0", "--out", s(&canon)])
        .status
        .success());
    assert!(xbar(&["scale", "--design", s(&canon), "--factor", "1.0", "--out", s(&scaled)])
        .status
        .success());
    assert_eq!(std::fs::read(&canon).unwrap(), std::fs::read(&scaled).unwrap());
}

#[test]
fn synth_writes_realized_design_and_scales() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    let trace = dir.path().join("trace.csv");
    let out = xbar(&[
        "synth", "--fc", "20.5e9", "--fbw", "0.095", "--order", "3", "--oob-bias", "lower",
        "--out", s(&d), "--trace", s(&trace),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((num(&r, "fc_hz") / 20.5e9 - 1.0).abs() < 0.01);
    assert!((num(&r, "fbw3") - 0.095).abs() < 0.005);
    let text = std::fs::read_to_string(&d).unwrap();
    assert!(text.contains("\"physical\"") && text.contains("\"preset\": \"three_element\""));
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("iteration,objective,"));

    let up = dir.path().join("up.json");
    let out = xbar(&["scale", "--design", s(&d), "--factor", "1.1", "--out", s(&up)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_ne!(std::fs::read(&up).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn synth_eight_element_uses_fixed_trims() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    let out = xbar(&["synth", "--fc", "20.5e9", "--fbw", "0.064", "--order", "8", "--out", s(&d)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&d).unwrap();
    assert!(text.contains("\"base_t_nm\": 96"));
}

#[test]
fn fit_recovers_design_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let ts = dir.path().join("meas.s2p");
    let fitted = dir.path().join("fitted.json");
    let table = dir.path().join("table.csv");
    let design = designs().join("eight_element.json");
    assert!(xbar(&["simulate", "--design", s(&design), "--out", s(&dir.path().join("m.csv")),
        "--touchstone", s(&ts)])
    .status
    .success());
    let out = xbar(&[
        "fit", "--data", s(&ts), "--init", s(&design), "--band", "15e9:28e9", "--out",
        s(&fitted), "--report", s(&table),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["converged"], "true");
    let csv = std::fs::read_to_string(&table).unwrap();
    assert!(csv.starts_with("resonator,source,fs_ghz,k2_pct,q,c0_ff,rs_ohm,ls_nh\n"));
    assert!(csv.contains("series,Filter fitting,22.13,16.5,80,77,3.5,0.1"), "{csv}");
}

#[test]
fn extract_single_resonator() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("res.json");
    std::fs::write(
        &d,
        r#"{"z0_ohm": 50, "stages": [{"placement": "series", "label": "r", "multiplicity": 1,
            "resonator": {"fs_ghz": 20.0, "k2": 0.2, "q": 1000, "c0_ff": 80, "rs_ohm": 0, "ls_nh": 0}}]}"#,
    )
    .unwrap();
    let ts = dir.path().join("res.s2p");
    let csv = dir.path().join("res.csv");
    assert!(xbar(&["simulate", "--design", s(&d), "--fmin", "5e9", "--fmax", "30e9", "--step",
        "2e6", "--out", s(&csv), "--touchstone", s(&ts)])
    .status
    .success());
    let out = xbar(&["extract", "--data", s(&ts)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((num(&r, "fs_hz") / 20e9 - 1.0).abs() < 1e-3);
    assert!((num(&r, "k2") - 0.2).abs() < 2e-3);
    assert!((num(&r, "c0_f") / 80e-15 - 1.0).abs() < 0.02);
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = xbar(&["metrics", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error[usage]: "));

    let out = xbar(&["synth", "--fc", "20e9", "--fbw", "0.5", "--order", "3", "--out",
        s(&dir.path().join("x.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error[input]: "));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"z0_ohm": 50, "stages": [], "extra": 1}"#).unwrap();
    let out = xbar(&["simulate", "--design", s(&bad), "--out", s(&dir.path().join("r.csv"))]);
    assert_eq!(out.status.code(), Some(3));
    let line = stderr_line(&out);
    assert!(line.starts_with("error[schema]: ") && line.contains("extra"), "{line}");

    // A flat through line has no passband peak.
    let flat = dir.path().join("flat.s2p");
    std::fs::write(&flat, "# GHZ S RI R 50\n1 0 0 1 0 1 0 0 0\n2 0 0 1 0 1 0 0 0\n3 0 0 1 0 1 0 0 0\n")
        .unwrap();
    let out = xbar(&["metrics", "--in", s(&flat)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr_line(&out).starts_with("error[solver]: "));

    let out = xbar(&["metrics", "--in", s(&dir.path().join("missing.s2p"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("error[io]: "));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let design = designs().join("eight_element.json");
    let run = |tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let ts = dir.path().join(format!("{tag}.s2p"));
        let d = dir.path().join(format!("{tag}.json"));
        assert!(xbar(&["simulate", "--design", s(&design), "--out", s(&csv), "--touchstone",
            s(&ts)])
        .status
        .success());
        let m = xbar(&["metrics", "--in", s(&ts)]).stdout;
        let syn = xbar(&["synth", "--fc", "20.5e9", "--fbw", "0.095", "--order", "3", "--out",
            s(&d)])
        .stdout;
        (
            std::fs::read(&csv).unwrap(),
            std::fs::read(&ts).unwrap(),
            m,
            syn,
            std::fs::read(&d).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

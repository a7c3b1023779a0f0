use std::process::Command;

use seczeta::format::{parse_float, significant_digits};
use seczeta::mpcontext::digits_to_bits;
use seczeta_cli::render::{to_json, CriticalJson, EvalJson, PoleJson};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn seczeta(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_seczeta"));
    cmd.args(args).env_remove("SECZETA_MAX_DIGITS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no line starting with {key:?} in\n{text}"))
}

/// Agreement to within two units of the last decimal written in both.
fn close_to(value: &str, lit: &str) -> bool {
    let n = significant_digits(lit) as u32;
    let prec = digits_to_bits(n + 30);
    let x = parse_float(value, prec).unwrap();
    let p = parse_float(lit, prec).unwrap();
    let places = |t: &str| t.split_once('.').map_or(0, |(_, d)| d.len());
    let decimals = places(lit).min(places(value)) as i32;
    let unit = rug::Float::with_val(prec, 10u32);
    let unit = rug::Float::with_val(prec, rug::ops::Pow::pow(unit, -decimals));
    rug::Float::with_val(prec, &x - &p).abs() <= unit * 2.5
}

#[test]
fn breakdown_reproduces_published_table() {
    let r = seczeta(&["eval", "-s", "0.5+100j", "-d", "15", "-a", "0.015", "--breakdown"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = [
        ("Re(A) = ", "-1217647861137338225487423130072.80874450435043989"),
        ("Re(P) = ", "1391575559381350246767527628.7744199492782667711"),
        ("Re(E) = ", "18001556143696111321715567598902.9610490404231213"),
        ("Re(S) = ", "16782516706999391745981376941201.5941565980711322"),
        ("Re(Z) = ", "-0.216272011276718"),
    ];
    for (key, lit) in rows {
        let v = field(&r.stdout, key);
        assert!(close_to(v, lit), "{key}{v} vs {lit}");
    }
    assert_eq!(field(&r.stdout, "zeros used: "), "35");
    assert_eq!(field(&r.stdout, "von Mangoldt values used: "), "29");
}

#[test]
fn double_pole_is_reported() {
    let r = seczeta(&["eval", "-s", "1", "-d", "10"], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("double pole at s=1"), "{}", r.stderr);
    let r = seczeta(&["eval", "-s", "-3", "-d", "10"], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("simple pole at s=-3"), "{}", r.stderr);
}

#[test]
fn special_value_is_exact() {
    let r = seczeta(&["eval", "-s", "-2", "-d", "30"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("Z(-2) = -0.281250000000000000000000000000 + 0.000"), "{}", r.stdout);
}

#[test]
fn parse_errors_exit_with_one() {
    assert_eq!(seczeta(&["eval", "-s", "1+2+3j"], &[]).code, 1);
    assert_eq!(seczeta(&["eval", "-s", "2", "-a", "1.5"], &[]).code, 1);
    assert_eq!(seczeta(&["eval", "-s", "2", "-d", "0"], &[]).code, 1);
    assert_eq!(seczeta(&["finite-part", "--pole", "-2"], &[]).code, 1);
    assert_eq!(seczeta(&["no-such-command"], &[]).code, 1);
    assert_eq!(seczeta(&["--help"], &[]).code, 0);
}

#[test]
fn precision_cap_exits_with_three() {
    let r = seczeta(&["eval", "-s", "2", "-d", "100"], &[("SECZETA_MAX_DIGITS", "20")]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("infeasible precision"), "{}", r.stderr);
}

#[test]
fn json_round_trips_byte_for_byte() {
    let r = seczeta(&["eval", "-s", "0.25-14.5j", "-d", "20", "--error", "-o", "json"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let parsed: EvalJson = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(to_json(&parsed), r.stdout);
    assert_eq!(parsed.s.re, "0.25");
    assert_eq!(parsed.s.im, "-14.5");
    assert_eq!(parsed.a, "0.015");
    assert!(parsed.agreed_digits.unwrap() >= 19);
    // Keys appear in the documented order.
    let order = ["\"s\"", "\"a\"", "\"digits\"", "\"z\"", "\"terms\"", "\"A\"", "\"P\"", "\"E\"", "\"S\"",
        "\"zeros_used\"", "\"lambdas_used\"", "\"error_estimate\"", "\"agreed_digits\""];
    let pos: Vec<usize> = order.iter().map(|k| r.stdout.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
}

#[test]
fn long_input_is_not_truncated() {
    let lit = "-4.998726374199056073034302436758537803935149729503553078275";
    let r = seczeta(&["eval", "-s", lit, "-d", "10", "-o", "json"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let parsed: EvalJson = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(parsed.s.re, lit);
}

#[test]
fn zero_cache_is_reused_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.txt");
    let p = path.to_str().unwrap();
    let first = seczeta(&["zeros", "--upto-index", "5", "--digits", "25", "--cache", p], &[]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert!(first.stdout.contains("14.134725141734693790457"), "{}", first.stdout);
    assert!(path.exists());
    let again = seczeta(&["zeros", "--upto-index", "5", "--digits", "25", "--cache", p], &[]);
    assert_eq!(again.stdout, first.stdout);

    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("14.1347", "14.1348", 1)).unwrap();
    let bad = seczeta(&["zeros", "--upto-index", "5", "--cache", p], &[]);
    assert_eq!(bad.code, 4);
    assert!(bad.stderr.contains("checksum"), "{}", bad.stderr);
}

#[test]
fn selftest_fails_on_corrupted_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.txt");
    std::fs::write(&path, "SECZETA-ZEROS v1 30 1\n1 not-a-number\nCRC32 00000000\n").unwrap();
    let r = seczeta(&["selftest", "--cache", path.to_str().unwrap()], &[]);
    assert_ne!(r.code, 0);
    assert!(r.stdout.contains("FAIL  zero cache"), "{}", r.stdout);
}

#[test]
fn selftest_reports_the_precision_cap() {
    let r = seczeta(&["selftest"], &[("SECZETA_MAX_DIGITS", "20")]);
    assert_eq!(r.code, 3, "{}", r.stdout);
    assert!(r.stdout.contains("FAIL  100-digit evaluation: infeasible precision"), "{}", r.stdout);
}

#[test]
fn selftest_passes() {
    let r = seczeta(&["selftest"], &[]);
    assert_eq!(r.code, 0, "{}\n{}", r.stdout, r.stderr);
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("PASS")).count(), 11, "{}", r.stdout);
}

#[test]
fn critical_point_record() {
    let r = seczeta(&["critical", "--near", "-2", "-d", "15", "-o", "json"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j: CriticalJson = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(j.kind, "zero_of_Z");
    assert_eq!(j.location, "-1.87934753430942");
    assert_eq!(to_json(&j), r.stdout);
}

#[test]
fn residue_at_minus_one() {
    let r = seczeta(&["finite-part", "--pole", "-1", "-d", "12", "-o", "json"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j: PoleJson = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(j.residue, j.residue_closed_form);
    assert!(j.residue.starts_with("-0.00663145596"));
}

#[test]
fn xray_csv_has_the_axis_curve() {
    let r = seczeta(
        &["xray", "--sigma", "1.5:3", "--t", "-0.5:0.5", "--grid", "6x4", "-d", "10", "-o", "csv"],
        &[],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("curve_id,kind,sigma,t"));
    let axis: Vec<&str> = lines.filter(|l| l.contains(",real,")).collect();
    assert!(axis.len() >= 6, "{}", r.stdout);
    assert!(axis.iter().all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap().abs() < 1e-9));
}

#[test]
fn phi_equality_command() {
    let r = seczeta(&["modular-check", "-x", "0.25", "-d", "30", "--phi", "-o", "csv"], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let digits: u32 = r.stdout.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(digits >= 20);
}

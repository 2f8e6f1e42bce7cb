use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn raz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, bytes: &[u8]) -> String {
    let p = path(dir, name);
    std::fs::write(&p, bytes).unwrap();
    p
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

fn extract(x: &str, y: &str, out: &str, n1: &str, n2: &str, m: &str, l: &str) -> Output {
    raz(&[
        "extract", "--x", x, "--y", y, "--out", out, "--n1", n1, "--n2", n2, "--m", m, "--l", l,
    ])
}

#[test]
fn extract_with_zero_second_source_copies_nu() {
    let dir = TempDir::new().unwrap();
    let y = write(&dir, "y.bin", &[0x00]);
    let out = path(&dir, "out.bin");
    for x in [0x00u8, 0x5a, 0xff, 0x37, 0xc4] {
        let xp = write(&dir, "x.bin", &[x]);
        let o = extract(&xp, &y, &out, "8", "2", "2", "2");
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(read(&out), vec![(x >> 4) & 0b11]);
    }
}

#[test]
fn extract_golden_vector() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.bin", &[0x5a, 0xa3]);
    let y = write(&dir, "y.bin", &[0x05]);
    let out = path(&dir, "out.bin");
    let o = extract(&x, &y, &out, "14", "3", "4", "2");
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read(&out), vec![0x0b]);
}

#[test]
fn extract_is_deterministic_and_hex_matches_raw() {
    let dir = TempDir::new().unwrap();
    let xb: Vec<u8> = (0..24u8).map(|i| i.wrapping_mul(37) ^ 0x5c).collect();
    let x = write(&dir, "x.bin", &xb);
    let y = write(&dir, "y.bin", &[0x9e, 0x01]);
    let (a, b) = (path(&dir, "a.bin"), path(&dir, "b.bin"));
    assert!(extract(&x, &y, &a, "190", "9", "60", "5").status.success());
    assert!(extract(&x, &y, &b, "190", "9", "60", "5").status.success());
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a).len(), 8);

    let hex: String = xb.iter().map(|b| format!("{b:02x}")).collect();
    let xh = write(&dir, "x.hex", hex.as_bytes());
    let yh = write(&dir, "y.hex", b"9e01\n");
    let h = path(&dir, "h.hex");
    let o = raz(&[
        "extract", "--x", &xh, "--y", &yh, "--out", &h, "--n1", "190", "--n2", "9", "--m", "60",
        "--l", "5", "--format", "hex",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(read(&h)).unwrap();
    let raw_hex: String = read(&a).iter().map(|b| format!("{b:02x}")).collect();
    assert_eq!(text.trim(), raw_hex);
}

#[test]
fn extract_reports_claims_when_entropies_given() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.bin", &[0xaa; 25]);
    let y = write(&dir, "y.bin", &[0x0f; 13]);
    let out = path(&dir, "out.bin");
    let o = raz(&[
        "extract", "--x", &x, "--y", &y, "--out", &out, "--n1", "200", "--n2", "100", "--m",
        "4", "--l", "12", "--k1", "190", "--k2", "100",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    let claims: Vec<serde_json::Value> = err
        .lines()
        .filter(|l| l.starts_with('{'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(claims.len(), 2);
    assert_eq!(claims[0]["model"], "weak");
    assert_eq!(claims[1]["model"], "strong");
    for c in &claims {
        for key in ["n1", "k1", "n2", "k2", "m", "log2_eps", "model", "k1_adj", "k2_adj", "p", "l"] {
            assert!(c.get(key).is_some(), "missing {key}");
        }
    }
    assert!(err.contains("note:"));
}

#[test]
fn extract_validation_failures() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.bin", &[0; 4]);
    let y = write(&dir, "y.bin", &[0; 4]);
    let out = path(&dir, "out.bin");

    let o = extract(&x, &y, &out, "10", "6", "1", "1");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n2 <= n1/2"), "{}", stderr(&o));

    let o = extract(&x, &y, &out, "16", "3", "4", "2");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unsupported n1"));

    let o = extract(&x, &y, &out, "8", "2", "9", "2");
    assert_eq!(o.status.code(), Some(2));

    // only 32 bits available
    let o = extract(&x, &y, &out, "40", "2", "2", "2");
    assert_eq!(o.status.code(), Some(2));

    let o = extract(&x, &path(&dir, "missing.bin"), &out, "8", "2", "2", "2");
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn params_closed_form_example() {
    let o = raz(&[
        "params", "--mode", "analytic-theorem1", "--n1", "10000", "--k1", "8000", "--k2", "1000",
        "--lambda", "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["feasible"], true);
    assert_eq!(v["m"], 17);
    assert_eq!(v["claims"][0]["m"], 17);
    assert_eq!(v["claims"][0]["log2_eps"], -26.5);
}

#[test]
fn params_infeasible_document() {
    let o = raz(&[
        "params", "--mode", "max-m", "--n1", "10000", "--k1", "8000", "--k2", "0", "--log2-eps",
        "-16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["feasible"], false);
    assert!(v["reason"].is_string());
}

#[test]
fn params_min_k2_golden() {
    let o = raz(&[
        "params", "--mode", "min-k2", "--n1", "10000", "--k1", "8000", "--m", "1", "--model",
        "weak", "--log2-eps", "-16",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["claims"][0]["k2"], 74);
    assert_eq!((v["p"].as_u64(), v["l"].as_u64()), (Some(154), Some(8)));
}

#[test]
fn params_flag_errors() {
    // max-m needs --k2
    let o = raz(&["params", "--mode", "max-m", "--n1", "10000", "--k1", "8000", "--log2-eps", "-16"]);
    assert_eq!(o.status.code(), Some(2));
    let o = raz(&["params", "--mode", "analytic-theorem1", "--n1", "10000", "--k1", "8000", "--k2", "1000", "--lambda", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = raz(&["params", "--mode", "sideways", "--n1", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn params_curve_csv() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "curve.csv");
    let o = raz(&[
        "params", "--mode", "max-m", "--n1", "10000", "--k1", "8000", "--log2-eps", "-16",
        "--curve", "5", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = String::from_utf8(read(&out)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha2,k2,m,m_corrected"));
    let mut last = 0;
    for line in lines {
        let mc: usize = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(mc >= last);
        last = mc;
    }
    assert_eq!(last, 2953);
}

#[test]
fn bench_small_sizes_and_empty_list() {
    let o = raz(&["bench", "--sizes", "14,16,30", "--runs", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "n1,mean_seconds,std_seconds");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("14,") && rows[2].starts_with("30,"));
    assert!(stderr(&o).contains("n1 = 16"));

    let o = raz(&["bench", "--sizes", ""]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "n1,mean_seconds,std_seconds\n");
}

#[test]
fn selftest_passes_and_filters() {
    let o = raz(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 6);

    let o = raz(&["selftest", "--suite", "bias"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("suite bias: pass"));

    let o = raz(&["selftest", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_flags_a_corrupted_table() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "table.txt", b"# injected\n2 1\n3 1\n4 2\n5 2\n");
    let o = raz(&["selftest", "--suite", "table", "--table", &table]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("irreducibility failure: x^4 + x^2 + 1"), "{}", stdout(&o));
}

use std::path::Path;
use std::process::{Command, Output};

use cofit::harness::csvio::{parse_curves, parse_verdicts, CURVE_HEADER, VERDICT_HEADER};

const TINY: &str = r#"
v = 4
n = 6
ts = 40
cr = 0.5
iterations = 3
strategies = ["standard", "hybrid2", "noveln"]
repeats = 3
master_seed = 9
"#;

fn cofit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cofit"))
        .args(args)
        .output()
        .expect("spawn cofit")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn run_writes_curves_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), TINY);
    let out = dir.path().join("out");
    let o = cofit(&[
        "run",
        "--config",
        &config,
        "--workers",
        "2",
        "--out",
        &s(&out),
        "--dump-datasets",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let curves = std::fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().next(), Some(CURVE_HEADER));
    let rows = parse_curves(&curves, &out).unwrap();
    assert_eq!(rows.len(), 3 * 3);
    assert_eq!(rows[0].iteration, 1);
    // six decimals on every float field
    let first = curves.lines().nth(1).unwrap();
    assert!(
        first
            .split(',')
            .skip(2)
            .all(|f| f.split('.').nth(1).map(str::len) == Some(6)),
        "{first}"
    );

    let verdicts = std::fs::read_to_string(out.join("verdicts.csv")).unwrap();
    assert_eq!(verdicts.lines().next(), Some(VERDICT_HEADER));
    let v = parse_verdicts(&verdicts, &out).unwrap();
    assert_eq!(v.len(), 2);
    assert!(v
        .iter()
        .all(|r| r.baseline == "standard" && r.config == "v4-n6-ts40-cr0.5"));

    let dump = std::fs::read_to_string(out.join("datasets/run-0.csv")).unwrap();
    assert_eq!(dump.lines().next(), Some("f0,f1,f2,f3,label"));
    assert_eq!(dump.lines().count(), 41);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), TINY);
    let out = dir.path().join("out");
    let o = cofit(&[
        "run",
        "--config",
        &config,
        "--repeats",
        "2",
        "--seed",
        "5",
        "--out",
        &s(&out),
    ]);
    assert!(o.status.success());
    let written = std::fs::read_to_string(out.join("experiment.toml")).unwrap();
    assert!(written.contains("repeats = 2"), "{written}");
    assert!(written.contains("master_seed = 5"), "{written}");
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), TINY);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(cofit(&["run", "--config", &config, "--workers", "1", "--out", &s(&a)])
        .status
        .success());
    assert!(cofit(&["run", "--config", &config, "--workers", "3", "--out", &s(&b)])
        .status
        .success());
    for f in ["curves.csv", "verdicts.csv", "finals.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn invalid_configuration_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(&dir.path().join("out"));
    for bad in [
        TINY.replace("v = 4", "v = 1"),
        TINY.replace("cr = 0.5", "cr = 1.5"),
        TINY.replace("n = 6", "n = 1"),
        TINY.replace("\"noveln\"", "\"bogus\""),
        format!("{TINY}\nunknown_key = 3\n"),
        "this is not toml".to_string(),
    ] {
        let config = write_config(dir.path(), &bad);
        let o = cofit(&["run", "--config", &config, "--out", &out]);
        assert_eq!(o.status.code(), Some(1), "{bad}");
    }
    assert_eq!(cofit(&["run"]).status.code(), Some(1));
    assert_eq!(cofit(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn io_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = s(&dir.path().join("nope.toml"));
    assert_eq!(cofit(&["run", "--config", &missing]).status.code(), Some(2));

    // output path blocked by a regular file
    let config = write_config(dir.path(), TINY);
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let o = cofit(&["run", "--config", &config, "--out", &s(&blocker.join("sub"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_reads_two_curve_files() {
    let dir = tempfile::tempdir().unwrap();
    let a_cfg = TINY.replace(r#"["standard", "hybrid2", "noveln"]"#, r#"["standard"]"#);
    let b_cfg = TINY.replace(r#"["standard", "hybrid2", "noveln"]"#, r#"["hybrid2"]"#);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let c = write_config(dir.path(), &a_cfg);
    assert!(cofit(&["run", "--config", &c, "--out", &s(&a)]).status.success());
    let c = write_config(dir.path(), &b_cfg);
    assert!(cofit(&["run", "--config", &c, "--out", &s(&b)]).status.success());

    let o = cofit(&[
        "compare",
        "--a",
        &s(&b.join("curves.csv")),
        "--b",
        &s(&a.join("curves.csv")),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows = parse_verdicts(&text, Path::new("stdout")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(
        (rows[0].strategy.as_str(), rows[0].baseline.as_str()),
        ("hybrid2", "standard")
    );

    let missing = s(&dir.path().join("missing.csv"));
    let o = cofit(&["compare", "--a", &missing, "--b", &s(&a.join("curves.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = cofit(&[
        "compare",
        "--a",
        &s(&a.join("verdicts.csv")),
        "--b",
        &s(&a.join("curves.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn table1_tiny_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1");
    let o = cofit(&["table1", "--out", &s(&out), "--repeats", "2", "--iterations", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table, std::fs::read_to_string(out.join("table1.txt")).unwrap());
    assert!(table.contains("(8, 200, 200, 0.5)"));
    let verdicts = std::fs::read_to_string(out.join("verdicts.csv")).unwrap();
    assert_eq!(parse_verdicts(&verdicts, &out).unwrap().len(), 8 * 2);
}

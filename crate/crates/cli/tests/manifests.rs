use std::process::Command;

use rigidlab_cli::manifest::{parse_rational, Analysis};
use rigidlab_cli::{parse_manifest, run_experiment, OracleMode, Report, Status};
use rigidlab_core::exact::{ratio, Interval};

const MINIMAL: &str = "\
[system]
kind = adic
radices = 2
depth = 8

[analysis]
type = joining
d = 1
k = 1
";

fn run(text: &str) -> Report {
    let m = parse_manifest(text).unwrap_or_else(|e| panic!("{e:?}"));
    run_experiment(&m, OracleMode::Sample)
}

fn csv<'a>(report: &'a Report, file: &str) -> &'a str {
    &report
        .artifacts()
        .find(|a| a.file == file)
        .unwrap_or_else(|| panic!("no {file}"))
        .body
}

fn interval(lo: &str, hi: &str) -> Interval {
    Interval::new(parse_rational(lo).unwrap(), parse_rational(hi).unwrap())
}

#[test]
fn minimal_manifest_runs() {
    let r = run(MINIMAL);
    assert_eq!(r.outcomes.len(), 1);
    assert_eq!(r.outcomes[0].status, Status::Pass);
    // depth-1 dyadic cells swap under T
    let body = csv(&r, "01-joining.csv");
    assert!(body.contains("0,1,1/1,1/1,"), "{body}");
    assert!(body.contains("1,0,1/1,1/1,"), "{body}");
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn negative_depth_is_reported_with_line() {
    let errs = parse_manifest(&MINIMAL.replace("depth = 8", "depth = -4")).unwrap_err();
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].line, 4);
    assert!(errs[0].to_string().starts_with("line 4:"), "{}", errs[0]);
}

#[test]
fn rs_verify_theorem_manifest() {
    let text = "\
[system]
kind = adic
depth = 16
[extension]
cocycle = RUDIN_SHAPIRO
fiber = 2
[sequence]
name = p
values = 32, 64, 128, 256
[analysis]
type = verify-theorem
sequence = p
depth = 2
";
    let m = parse_manifest(text).unwrap();
    assert!(matches!(m.analyses[0], Analysis::VerifyTheorem { depth: 2, .. }));
    let r = run_experiment(&m, OracleMode::Sample);
    assert_eq!(r.outcomes[0].status, Status::Pass, "{:?}", r.outcomes[0].headlines);
    let body = csv(&r, "01-verify-theorem.csv");
    let rows: Vec<Interval> = body
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            interval(f[1], f[2])
        })
        .collect();
    assert_eq!(rows.len(), 4);
    // no residual is certainly larger than its predecessor
    for w in rows.windows(2) {
        assert!(w[1].lo() <= w[0].hi());
    }
    assert!(rows.last().unwrap().hi() <= &ratio(1, 50));
}

#[test]
fn dyadic_rigidity_alpha_one() {
    let text = "\
[system]
kind = adic
depth = 16
[sequence]
name = pow2
kind = heights
[analysis]
type = rigidity
sequence = pow2
depths = 1..6
";
    let r = run(text);
    let o = &r.outcomes[0];
    assert_eq!(o.status, Status::Info, "{:?}", o.headlines);
    assert!(o.headlines[0].contains("alpha = [1/1, 1/1]"), "{:?}", o.headlines);
    assert!(o.headlines.iter().any(|h| h.ends_with(", 0 mismatches")));
    let body = csv(&r, "01-rigidity.csv");
    assert!(body.lines().skip(1).all(|l| l.contains(",1/1,1/1,")), "{body}");
}

#[test]
fn morse_spectrum_first_correlation() {
    let text = "\
[system]
kind = adic
depth = 20
[extension]
cocycle = MORSE
fiber = 2
[analysis]
type = spectrum
function = fiber-sign
k_max = 64
";
    let r = run(text);
    let o = &r.outcomes[0];
    assert_eq!(o.status, Status::Info, "{:?}", o.headlines);
    let body = csv(&r, "01-spectrum-series.csv");
    let row = body.lines().find(|l| l.starts_with("1,")).unwrap();
    let f: Vec<&str> = row.split(',').collect();
    let rho1 = interval(f[1], f[2]);
    assert!(rho1.contains(&ratio(-1, 3)), "{row}");
    assert!(rho1.width() <= ratio(1, 1 << 19));
    assert!(csv(&r, "01-spectrum-oracle.csv")
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",true")));
}

#[test]
fn reruns_are_byte_identical() {
    let text = "\
[system]
kind = adic
radices = 3, 2
depth = 10
[extension]
cocycle = ZERO
fiber = 3
[sequence]
name = h
kind = shifted
shift = 1
[analysis]
type = correlate
a = 0, 1
b = 0
b_fiber = 0, 2
lags = 0..20
[analysis]
type = rigidity
sequence = h
depths = 1..3
[analysis]
type = joining
d = 2
k = 5
";
    let first = run(text);
    let second = run(text);
    let bodies = |r: &Report| {
        r.artifacts()
            .map(|a| (a.file.clone(), a.body.clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(bodies(&first), bodies(&second));
    assert_eq!(first.summary("x"), second.summary("y").replacen("# y", "# x", 1));
    assert_eq!(first.exit_code(), 0);
}

#[test]
fn chacon_tower_analyses() {
    let text = "\
[system]
kind = rank-one
schedule = chacon
stage = 8
[sequence]
name = h
kind = heights
terms = 3..7
[analysis]
type = rigidity
sequence = h
depths = 1..2
[analysis]
type = joining
d = 2
k = 4
";
    let r = run(text);
    for o in &r.outcomes {
        assert_ne!(o.status, Status::Fail, "{:?}", o.headlines);
        assert_ne!(o.status, Status::Aborted, "{:?}", o.headlines);
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rigidlab"))
}

#[test]
fn binary_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.txt");
    std::fs::write(&manifest, MINIMAL).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args([
            "run",
            manifest.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--oracle",
            "off",
        ])
        .output()
        .unwrap();
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert_eq!(std::fs::read_to_string(out.join("manifest.txt")).unwrap(), MINIMAL);
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.starts_with("# rigidlab"));
    assert!(summary.contains("[01] joining PASS"));
    assert!(out.join("01-joining.csv").exists());
}

#[test]
fn binary_config_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bad.txt");
    std::fs::write(
        &manifest,
        MINIMAL.replace("depth = 8", "depth = -1").replace("k = 1", "k = x"),
    )
    .unwrap();
    let out = bin().args(["run", manifest.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4:") && err.contains("line 9:"), "{err}");
}

#[test]
fn binary_resource_abort_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.txt");
    std::fs::write(
        &manifest,
        "[system]\nkind = rank-one\nschedule = chacon\nstage = 2\n[analysis]\ntype = joining\nd = 1\nk = 40\n",
    )
    .unwrap();
    let out = bin().args(["run", manifest.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn binary_verify_cocycles() {
    let out = bin().args(["verify-cocycles", "--k-max", "4096"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("MORSE: PASS") && text.contains("RUDIN_SHAPIRO: PASS"),
        "{text}"
    );
}

#[test]
fn binary_demo_pipeline() {
    let out = bin().args(["demo", "remark-1-4"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("[01] rigidity PASS"), "{text}");
    assert!(text.contains("base alpha = [1/1, 1/1]"), "{text}");
    assert!(text.contains("[02] verify-theorem PASS"), "{text}");
}

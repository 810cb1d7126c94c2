use serde_json::Value;
use std::process::{Command, Output};

const GENERIC: [&str; 4] = ["--omega1", "0.5,0", "--omega2", "0.3,0.55"];
const SQUARE: [&str; 4] = ["--omega1", "0.5,0", "--omega2", "0,0.5"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modsigma")).args(args).output().expect("binary runs")
}

fn run_with(base: &[&str], lattice: &[&str], extra: &[&str]) -> Output {
    let all: Vec<&str> = base.iter().chain(lattice).chain(extra).copied().collect();
    run(&all)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run_with(&["eval"], &GENERIC, &["--fn", "nope", "--z", "0.1,0.1"]).status.code(), Some(2));
    assert_eq!(run_with(&["eval"], &GENERIC, &["--fn", "zeta", "--z", "0.1"]).status.code(), Some(2));
    assert_eq!(
        run(&["eval", "--omega1", "0.5,0", "--omega2", "1,0", "--fn", "zeta", "--z", "0.1,0"]).status.code(),
        Some(2)
    );
    assert_eq!(run_with(&["eval"], &GENERIC, &["--fn", "zeta", "--z", "1,0"]).status.code(), Some(3));
    assert_eq!(run_with(&["eval"], &GENERIC, &["--fn", "wp", "--z", "0,0"]).status.code(), Some(3));
    assert_eq!(run_with(&["eval"], &GENERIC, &["--fn", "sigma", "--z", "1,0"]).status.code(), Some(0));
}

#[test]
fn eval_square_zeta_at_half_period() {
    let v = json(&run_with(&["eval"], &SQUARE, &["--fn", "zeta", "--z", "0.5,0"]));
    let (re, im) = complex(&v);
    assert!((re - std::f64::consts::FRAC_PI_2).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn output_is_byte_deterministic() {
    for args in
        [vec!["grid", "--fn", "completion", "--n", "6", "--cells", "2"], vec!["zeros", "--voronoi"], vec!["invariants"]]
    {
        let a = run_with(&args, &GENERIC, &[]);
        let b = run_with(&args, &GENERIC, &[]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
    let a = run(&["selftest", "--lattices", "10"]);
    assert_eq!(a.stdout, run(&["selftest", "--lattices", "10"]).stdout);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args: Vec<&str> =
        ["grid", "--fn", "sigma", "--n", "8", "--cells", "2"].iter().chain(&GENERIC).copied().collect();
    let many = run(&args);
    let one =
        Command::new(env!("CARGO_BIN_EXE_modsigma")).args(&args).env("SIGMA_LATTICE_THREADS", "1").output().unwrap();
    assert_eq!(many.stdout, one.stdout);
}

#[test]
fn grid_has_one_header_and_periodic_modulus() {
    let out = run_with(&["grid", "--fn", "zfun", "--n", "5", "--cells", "2"], &GENERIC, &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,re,im"));
    let rows: Vec<[f64; 4]> = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [f[0], f[1], f[2], f[3]]
        })
        .collect();
    assert_eq!(rows.len(), 4 * 25);
    assert!(!text.lines().skip(1).any(|l| l.starts_with('x')));
    let shift = (1.0, 0.0);
    let mut matched = 0;
    for a in &rows {
        if let Some(b) =
            rows.iter().find(|b| (b[0] - a[0] - shift.0).abs() < 1e-12 && (b[1] - a[1] - shift.1).abs() < 1e-12)
        {
            let (ma, mb) = (a[2].hypot(a[3]), b[2].hypot(b[3]));
            assert!((ma - mb).abs() < 1e-11 * (1.0 + ma), "{a:?} {b:?}");
            matched += 1;
        }
    }
    assert_eq!(matched, 2 * 25);
}

#[test]
fn printed_numbers_round_trip() {
    let out = run_with(&["invariants"], &GENERIC, &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let g2 = complex(&v["gamma2"]);
    // 17 significant digits survive a text round trip exactly
    for x in [g2.0, g2.1, v["area"].as_f64().unwrap()] {
        let s = format!("{x:.16e}");
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert!(text.contains(&s), "{s}");
    }
    assert!((g2.0 - 0.497_440_487_350_314).abs() < 1e-13);
}

#[test]
fn zeros_generic_census() {
    let v = json(&run_with(&["zeros", "--voronoi"], &GENERIC, &[]));
    assert_eq!(v["census"]["nHolo"], 3);
    assert_eq!(v["census"]["nAnti"], 2);
    assert_eq!(v["census"]["windingSum"], 0);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 5);
    assert!(v["voronoi"]["maxDiscrepancy"].as_f64().unwrap() > 1e-4);
}

#[test]
fn zeros_square_corner() {
    let v = json(&run_with(&["zeros"], &SQUARE, &[]));
    let anti: Vec<(f64, f64)> = v["zeros"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|z| z["kind"] == "antiholomorphic")
        .map(|z| complex(&z["position"]))
        .collect();
    assert!(!anti.is_empty());
    for (x, y) in anti {
        assert!((x.abs() - 0.5).abs() < 1e-6 && (y.abs() - 0.5).abs() < 1e-6, "{x} {y}");
    }
}

#[test]
fn zeros_hexagonal_match_voronoi() {
    let w2 = format!("{},{}", 0.25, 0.25 * 3f64.sqrt());
    let v = json(&run(&["zeros", "--omega1", "0.5,0", "--omega2", &w2, "--voronoi"]));
    assert_eq!(v["census"]["windingSum"], 0);
    assert!(v["voronoi"]["maxDiscrepancy"].as_f64().unwrap() < 1e-8);
}

#[test]
fn selftest_passes_and_catches_perturbation() {
    let ok = run(&["selftest"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(run(&["selftest", "--seed", "7"]).status.code(), Some(0));
    let bad = run(&["selftest", "--lattices", "10", "--perturb-gamma2", "1e-3"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.contains("FAILED eta_weierstrass"), "{text}");
}

#[test]
fn wavefunction_spec_round_trip() {
    let spec_args = ["--nphi", "3", "--w", "0.1,0.1", "--w", "-0.2,0.3", "--w", "0.05,-0.4"];
    let printed = run_with(&["wavefunction", "--print-spec"], &GENERIC, &spec_args);
    assert!(printed.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    std::fs::write(&path, &printed.stdout).unwrap();

    let direct = json(&run_with(&["wavefunction", "--z", "0.3,0.1", "--check"], &GENERIC, &spec_args));
    let loaded = json(&run(&["wavefunction", "--spec", path.to_str().unwrap(), "--z", "0.3,0.1", "--check"]));
    assert_eq!(direct, loaded);
    assert_eq!(loaded["zeroCount"], 3);
    for r in loaded["boundaryResidual"].as_array().unwrap() {
        assert!(r.as_f64().unwrap() < 1e-9);
    }

    let mismatch = run_with(&["wavefunction", "--z", "0.3,0.1"], &GENERIC, &["--nphi", "2", "--w", "0.1,0.1"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

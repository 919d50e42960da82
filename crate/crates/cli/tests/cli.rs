use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dehnfill::io::{read_document, read_manifold, write_manifold, Document};
use dehnfill::{make_symmetric_curve, symmetry_matrices, BigComplex, MultiSeries, NZPotential, QuadraticNumber};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_dehnfill");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("DEHN_PRECISION_BITS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cubic_file(dir: &TempDir, name: &str, tau: (f64, f64)) -> PathBuf {
    let p = 256;
    let phi =
        MultiSeries::from_terms(1, 10, p, [(vec![2], BigComplex::from_f64(tau.0, tau.1, p)), (vec![4], BigComplex::from_f64(0.5, 0.0, p))])
            .unwrap();
    let m = NZPotential::from_phi(name, phi, false);
    let path = dir.path().join(format!("{name}.json"));
    std::fs::write(&path, write_manifold(&m)).unwrap();
    path
}

fn symmetric_file(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("sym.json");
    let o = run(&["make", "--kind", "symmetric-curve", "--tau", "i", "--seed", "3=1", "--out", s(&path)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn make_then_validate_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = symmetric_file(&dir);
    let o = run(&["validate", s(&path)]);
    assert_eq!(code(&o), 0);
    let Document::Validation(v) = read_document(&stdout(&o)).unwrap() else { panic!("not a validation document") };
    assert!(v.valid && v.violations.is_empty());

    let tau = QuadraticNumber::i();
    let sigma = symmetry_matrices(&tau).unwrap().remove(0);
    let seeds = BTreeMap::from([(3u32, BigComplex::one(256))]);
    let direct = make_symmetric_curve(&tau, &sigma, &seeds, 9, 256).unwrap();
    let loaded = read_manifold(&std::fs::read_to_string(&path).unwrap(), None).unwrap();
    assert_eq!(loaded, direct);
}

#[test]
fn sgi_from_curve_files() {
    let dir = TempDir::new().unwrap();
    let c1 = cubic_file(&dir, "a", (0.0, 1.0));
    let c2 = cubic_file(&dir, "b", (0.25, 2.0));
    let out = dir.path().join("sgi.json");
    let o = run(&["make", "--kind", "sgi", "--curve1", s(&c1), "--curve2", s(&c2), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = read_manifold(&std::fs::read_to_string(&out).unwrap(), None).unwrap();
    assert!(m.sgi && m.n_cusps == 2 && m.validate().is_valid());
    assert_eq!(code(&run(&["validate", s(&out)])), 0);
}

#[test]
fn every_output_reads_back() {
    let dir = TempDir::new().unwrap();
    let sym = symmetric_file(&dir);
    let cubic = cubic_file(&dir, "cubic", (0.0, 1.0));
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"shape": "coupled",
            "blocks": [[[0,0],[0,0]], [[1,0],[0,1]], [[1,0],[0,1]], [[0,0],[0,0]]],
            "slopes": [{"p": 7, "q": 2}, {"p": 5, "q": 3}],
            "slopes_prime": [{"p": 5, "q": 3}, {"p": 7, "q": 2}]}"#,
    )
    .unwrap();

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["validate", s(&sym)], "validation"),
        (vec!["make", "--kind", "symmetric-curve", "--tau", "i", "--truncation-order", "7"], "manifold"),
        (vec!["solve", "--manifold", s(&cubic), "--slopes", "41/3"], "solution"),
        (vec!["invariants", "--manifold", s(&cubic), "--slopes", "-41/3"], "invariants"),
        (vec!["search", "--manifold", s(&sym), "--min-norm", "20", "--max-norm", "24", "--tol", "1e-6"], "reports"),
        (vec!["classify", "--tau1", "i", "--tau2", "√-2", "--pair", "7/2,5/3;2/-7,5/3"], "classification"),
        (vec!["symmetries", "--tau", "1/2 + 1/2 √-3"], "symmetries"),
        (vec!["verify-relations", "--spec", s(&spec)], "witness"),
        (vec!["verify-pair", "--manifold", s(&sym), "--slopes", "50/1", "--slopes-prime", "-1/50"], "reports"),
    ];
    for (args, want) in cases {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let doc = read_document(&stdout(&o)).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert_eq!(doc.name(), want, "{args:?}");
        if let Document::Witness(w) = &doc {
            assert!(w.all_pass && w.trichotomy_case == Some(1));
        }
        if let Document::Reports(r) = &doc {
            assert!(!r.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let sym = symmetric_file(&dir);

    // usage and file errors
    assert_eq!(code(&run(&["validate", "/nonexistent/m.json"])), 2);
    assert_eq!(code(&run(&["solve", "--manifold", s(&sym), "--slopes", "4/2"])), 2);
    assert_eq!(code(&run(&["classify", "--tau1", "i", "--tau2", "q", "--pair", "1/1,1/2;1/1,1/2"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{").unwrap();
    assert_eq!(code(&run(&["validate", s(&garbage)])), 2);

    // domain failures
    let lower = dir.path().join("lower.json");
    let text = std::fs::read_to_string(cubic_file(&dir, "lower", (0.0, -1.0))).unwrap();
    std::fs::write(&lower, text).unwrap();
    assert_eq!(code(&run(&["validate", s(&lower)])), 1);
    assert_eq!(code(&run(&["solve", "--manifold", s(&sym), "--slopes", "1/0"])), 1);
    let pair = ["classify", "--tau1", "i", "--tau2", "√-2", "--pair", "7/2,5/3;2/-7,5/3"];
    assert_eq!(code(&run(&[&pair[..], &["--expect", "SigmaOrbit"]].concat())), 0);
    assert_eq!(code(&run(&[&pair[..], &["--expect", "Identity"]].concat())), 1);
    let vp = ["verify-pair", "--manifold", s(&sym), "--slopes", "50/1", "--slopes-prime", "-1/50"];
    assert_eq!(code(&run(&[&vp[..], &["--expect", "sigmaorbit"]].concat())), 0);
    assert_eq!(code(&run(&[&vp[..], &["--expect", "Unrelated"]].concat())), 1);
}

#[test]
fn precision_from_environment() {
    let dir = TempDir::new().unwrap();
    let cubic = cubic_file(&dir, "cubic", (0.0, 1.0));
    let o =
        Command::new(BIN).args(["solve", "--manifold", s(&cubic), "--slopes", "41/3"]).env("DEHN_PRECISION_BITS", "128").output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let Document::Solution(sol) = read_document(&stdout(&o)).unwrap() else { panic!("not a solution") };
    assert_eq!(sol.precision_bits, 128);
    let o =
        Command::new(BIN).args(["solve", "--manifold", s(&cubic), "--slopes", "41/3"]).env("DEHN_PRECISION_BITS", "16").output().unwrap();
    assert_eq!(code(&o), 2);
}

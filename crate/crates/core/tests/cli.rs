use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpskit::algebra::{ActivatedMps, ScaleInvariantSigmoid};
use mpskit::boolean::{compile_gate, GateKind, TruthTable};
use mpskit::io::Model;
use mpskit::mps::{random_mps, FeatureMap, Mps, RandomMpsSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn mpskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpskit"))
        .args(args)
        .env_remove("MPSKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_table(dir: &TempDir, name: &str, t: &TruthTable) -> PathBuf {
    let p = path(dir, name);
    std::fs::write(&p, t.to_text()).unwrap();
    p
}

fn parity_table(n: usize) -> TruthTable {
    TruthTable::from_fn(n, |b| b.iter().filter(|&&x| x).count() % 2 == 1).unwrap()
}

fn save_parity_model(dir: &TempDir) -> PathBuf {
    let g = compile_gate(&GateKind::Parity(3)).unwrap();
    let p = path(dir, "parity.json");
    Model::Plain {
        mps: g.mps,
        feature_maps: g.feature_maps,
    }
    .save(&p)
    .unwrap();
    p
}

fn save_activated(dir: &TempDir, name: &str, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mps = random_mps(&RandomMpsSpec::new(vec![2; 3], 2).label(3), &mut rng).unwrap();
    let fms = vec![FeatureMap::AffineOne, FeatureMap::TrigPair, FeatureMap::BinaryIndicator];
    let w = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    let model = ActivatedMps::new(mps, fms, w, ScaleInvariantSigmoid::reciprocal_shift(1.5).unwrap()).unwrap();
    let p = path(dir, name);
    Model::Activated(model).save(&p).unwrap();
    p
}

#[test]
fn compile_then_verify_or3() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "or3.json");
    let c = mpskit(&["compile", "--expr", "X1|X2|X3", "--out", s(&out)]);
    assert_eq!(c.status.code(), Some(0), "{}", stderr(&c));
    assert!(stdout(&c).contains("terms m = 7, minimized m' = 3"), "{}", stdout(&c));
    let v = mpskit(&["verify", "--mps", s(&out), "--expr", "X1|X2|X3"]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout(&v), "PASS 8/8\n");
}

#[test]
fn constant_zero_compiles_and_verifies() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "zero.json");
    assert_eq!(
        mpskit(&["compile", "--expr", "0", "--out", s(&out)]).status.code(),
        Some(0)
    );
    let v = mpskit(&["verify", "--mps", s(&out), "--expr", "0"]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    assert!(stdout(&v).starts_with("PASS"));
}

#[test]
fn random_arity5_table_verifies_with_and_without_minimization() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let t = TruthTable::new(5, (0..32).map(|_| rng.random_bool(0.5)).collect()).unwrap();
    let table = write_table(&dir, "t5.txt", &t);
    for minimize in [false, true] {
        let out = path(&dir, "t5.json");
        let mut args = vec!["compile", "--table", s(&table), "--out", s(&out)];
        if minimize {
            args.push("--minimize");
        }
        assert_eq!(mpskit(&args).status.code(), Some(0));
        let v = mpskit(&["verify", "--mps", s(&out), "--table", s(&table)]);
        assert_eq!(stdout(&v), "PASS 32/32\n", "minimize={minimize}");
    }
}

#[test]
fn parity_golden_model_verifies() {
    let dir = TempDir::new().unwrap();
    let model = save_parity_model(&dir);
    let table = write_table(&dir, "parity.txt", &parity_table(3));
    let v = mpskit(&["verify", "--mps", s(&model), "--table", s(&table)]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout(&v), "PASS 8/8\n");
}

#[test]
fn corrupted_entry_reports_mismatch_row() {
    let dir = TempDir::new().unwrap();
    let g = compile_gate(&GateKind::Parity(3)).unwrap();
    let mut sites = g.mps.into_sites();
    // Bond 0 of the last site carries row 111 through its x component.
    let v = sites[2].get(0, 0, 0, 0);
    sites[2].set(0, 0, 0, 0, 1.0 - v);
    let mps = Mps::new(sites, mpskit::mps::Boundary::Open).unwrap();
    let p = path(&dir, "bad.json");
    Model::Plain {
        mps,
        feature_maps: g.feature_maps,
    }
    .save(&p)
    .unwrap();
    let table = write_table(&dir, "parity.txt", &parity_table(3));
    let v = mpskit(&["verify", "--mps", s(&p), "--table", s(&table)]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).starts_with("FAIL row "), "{}", stdout(&v));
    let j = mpskit(&["--json", "verify", "--mps", s(&p), "--table", s(&table)]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(doc["passed"], false);
    assert!(doc["first_mismatch"]["row"].as_u64().unwrap() < 8);
}

#[test]
fn flatten_json_gives_parity_weights() {
    let dir = TempDir::new().unwrap();
    let model = save_parity_model(&dir);
    let o = mpskit(&["--json", "flatten", "--model", s(&model)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((doc["D"].as_u64(), doc["S"].as_u64()), (Some(1), Some(8)));
    let w: Vec<f64> = serde_json::from_value(doc["weights"].clone()).unwrap();
    assert_eq!(w, vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
}

#[test]
fn scale_by_one_keeps_values_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = save_activated(&dir, "a.json", 1);
    let points = path(&dir, "probe.txt");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let probe: String = (0..50)
        .map(|_| {
            format!(
                "{},{},{}\n",
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>()
            )
        })
        .collect();
    std::fs::write(&points, probe).unwrap();
    let before = mpskit(&["eval", "--model", s(&a), "--points", s(&points)]);
    for via_c in [false, true] {
        let scaled = path(&dir, "scaled.json");
        let mut args = vec!["scale", "--model", s(&a), "--k", "1", "--out", s(&scaled)];
        if via_c {
            args.push("--via-c");
        }
        assert_eq!(mpskit(&args).status.code(), Some(0));
        let after = mpskit(&["eval", "--model", s(&scaled), "--points", s(&points)]);
        assert_eq!(stdout(&before), stdout(&after), "via_c={via_c}");
    }
}

#[test]
fn add_and_eval_sum() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (save_activated(&dir, "a.json", 3), save_activated(&dir, "b.json", 4));
    let sum = path(&dir, "sum.json");
    assert_eq!(
        mpskit(&["add", "--a", s(&a), "--b", s(&b), "--out", s(&sum)])
            .status
            .code(),
        Some(0)
    );
    let x = "0.2,-0.7,0.9";
    let val = |p: &Path| -> f64 {
        stdout(&mpskit(&["eval", "--model", s(p), "--x", x]))
            .trim()
            .parse()
            .unwrap()
    };
    let (va, vb, vs) = (val(&a), val(&b), val(&sum));
    assert!((vs - (va + vb)).abs() <= 1e-12 * (va.abs() + vb.abs()).max(1.0));
    let neg = path(&dir, "neg.json");
    assert_eq!(
        mpskit(&["scale", "--model", s(&a), "--k", "-2.5", "--out", s(&neg)])
            .status
            .code(),
        Some(0)
    );
    assert!((val(&neg) + 2.5 * va).abs() <= 1e-12 * va.abs().max(1.0));
}

#[test]
fn gp_check_writes_report() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "gp.toml");
    std::fs::write(
        &cfg,
        "n_sites = 3\nchi = 1\ndataset = [[1.0, 0.5, -1.0], [0.0, 1.0, 1.0]]\nbootstrap_resamples = 20\n",
    )
    .unwrap();
    let (report, csv) = (path(&dir, "report.txt"), path(&dir, "report.csv"));
    let args = [
        "gp-check",
        "--config",
        s(&cfg),
        "--seed",
        "5",
        "--widths",
        "2,16",
        "--samples",
        "600",
        "--out",
        s(&report),
        "--csv",
        s(&csv),
    ];
    let o = mpskit(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(std::fs::read_to_string(&report).unwrap().contains("kurt"));
    let first = std::fs::read(&csv).unwrap();
    assert_eq!(mpskit(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&csv).unwrap(), first, "same seed, same CSV");
    let missing_seed = mpskit(&["gp-check", "--config", s(&cfg)]);
    assert_eq!(missing_seed.status.code(), Some(2));
}

#[test]
fn fit_requires_seed_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    assert_eq!(mpskit(&["fit", "--iterations", "10"]).status.code(), Some(2));
    let out = path(&dir, "fit.json");
    let args = [
        "--json",
        "fit",
        "--seed",
        "3",
        "--width",
        "4",
        "--iterations",
        "200",
        "--out",
        s(&out),
    ];
    let a = mpskit(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let model_a = std::fs::read(&out).unwrap();
    let b = mpskit(&args);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(std::fs::read(&out).unwrap(), model_a);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(doc["sup_error"].as_f64().unwrap().is_finite());
    assert!(doc["grad_check"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn oversized_flatten_hits_size_guard() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mps = random_mps(&RandomMpsSpec::new(vec![2; 21], 1), &mut rng).unwrap();
    let p = path(&dir, "big.json");
    Model::Plain {
        mps,
        feature_maps: vec![FeatureMap::AffineOne; 21],
    }
    .save(&p)
    .unwrap();
    let o = mpskit(&["flatten", "--model", s(&p)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.json");
    let o = mpskit(&["compile", "--expr", "X1 & (X2 |", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));
    let both = mpskit(&["compile", "--expr", "X1", "--table", "t.txt", "--out", s(&out)]);
    assert_eq!(both.status.code(), Some(2));
    let missing = mpskit(&["eval", "--model", s(&path(&dir, "nope.json")), "--x", "1"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn compile_output_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for p in [&a, &b] {
        let o = mpskit(&[
            "compile",
            "--expr",
            "(X1 & !X3) | (X2 & X4) | !X1",
            "--minimize",
            "--out",
            s(p),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let loaded = Model::load(&a).unwrap();
    assert_eq!(Model::from_json(&loaded.to_json()).unwrap(), loaded);
}

#[test]
fn report_counts_parity_parameters() {
    let o = mpskit(&[
        "--json",
        "report",
        "--expr",
        "(X1&!X2&!X3)|(!X1&X2&!X3)|(!X1&!X2&X3)|(X1&X2&X3)",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["m"], 4);
    assert_eq!(doc["parameter_count"], 48);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "gp.toml");
    std::fs::write(
        &cfg,
        "n_sites = 2\nchi = 1\ndataset = [[1.0, 0.5]]\nbootstrap_resamples = 0\n",
    )
    .unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mpskit"))
            .args([
                "--json",
                "gp-check",
                "--config",
                s(&cfg),
                "--seed",
                "1",
                "--widths",
                "1,4",
                "--samples",
                "500",
            ])
            .env("MPSKIT_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(stdout(&one), stdout(&four));
    assert_eq!(run("zero").status.code(), Some(2));
}

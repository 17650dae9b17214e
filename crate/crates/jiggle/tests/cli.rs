use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TRIANGLE: &str = r#"{"ambient_dim":2,"vertices":[[0,0],[1,0],[0,1]],"simplices":[[0,1,2]]}"#;
const GRID: &str = r#"{"ambient_dim":2,"vertices":[[0,0],[1,0],[0,1],[1,1]],"simplices":[[0,1,3],[0,2,3]]}"#;
const HORIZONTAL: &str = r#"{"kind":"constant","frame":[[1,0]]}"#;

fn jiggle(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jiggle"))
        .current_dir(dir)
        .env_remove("JIGGLE_CERTIFICATION")
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = jiggle(dir, args);
    assert_eq!(code(&o), 0, "{args:?}\n{}", String::from_utf8_lossy(&o.stderr));
    o
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn constant_map(dir: &Path, name: &str, complex: &str, value: &str) -> PathBuf {
    let k: Value = serde_json::from_str(complex).unwrap();
    let n = k["vertices"].as_array().unwrap().len();
    let v: Value = serde_json::from_str(value).unwrap();
    let map = serde_json::json!({"complex": k, "values": vec![v; n]});
    write(dir, name, &map.to_string())
}

#[test]
fn subdivide_counts_and_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "t.json", TRIANGLE);
    ok(d.path(), &["subdivide", "--input", "t.json", "--level", "2", "--out", "a.json"]);
    ok(d.path(), &["subdivide", "--input", "t.json", "--level", "2", "--out", "b.json", "--emit-off", "b.off"]);
    let a = std::fs::read(d.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(d.path().join("b.json")).unwrap());
    assert_eq!(read_json(&d.path().join("a.json"))["simplices"].as_array().unwrap().len(), 16);
    assert!(std::fs::read_to_string(d.path().join("b.off")).unwrap().starts_with("OFF"));

    // export then import is the identity
    ok(d.path(), &["subdivide", "--input", "a.json", "--level", "0", "--out", "c.json"]);
    assert_eq!(a, std::fs::read(d.path().join("c.json")).unwrap());
    // no temporary files are left behind
    let names: Vec<String> = std::fs::read_dir(d.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(names.iter().all(|n| !n.starts_with('.')), "{names:?}");
}

#[test]
fn metrics_table_halves_rmax() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "t.json", TRIANGLE);
    let o = ok(d.path(), &["metrics", "--input", "t.json", "--max-level", "3", "--out", "m.json"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rmax"));
    let m = read_json(&d.path().join("m.json"));
    let rows = m.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for w in rows.windows(2) {
        let r = w[1]["rmax"].as_f64().unwrap() / w[0]["rmax"].as_f64().unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }
}

#[test]
fn color_and_linearize() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "g.json", GRID);
    ok(d.path(), &["color", "--input", "g.json", "--level", "1", "--out", "c.json"]);
    let c = read_json(&d.path().join("c.json"));
    assert_eq!(c["colors"].as_array().unwrap().len(), 8);
    let map = serde_json::json!({"complex": "g.json", "smooth": {"name": "quadratic", "params": [1.0, 0.0]}});
    write(d.path(), "f.json", &map.to_string());
    let o = ok(d.path(), &["linearize", "--map", "f.json", "--level", "2", "--out", "l.json"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("d_C0"));
    assert_eq!(read_json(&d.path().join("l.json"))["values"].as_array().unwrap().len(), 25);
}

#[test]
fn jiggle_then_verify() {
    let d = tempfile::tempdir().unwrap();
    constant_map(d.path(), "zero.json", GRID, "[0.0]");
    let args = ["jiggle", "--map", "zero.json", "--relation", "maxrank", "--epsilon", "0.1", "--out", "out.json", "--report", "rep.json"];
    ok(d.path(), &args);
    let rep = read_json(&d.path().join("rep.json"));
    assert!(rep["min_margin"].as_f64().unwrap() > 0.0);
    assert!(rep["d_c1"].as_f64().unwrap() < 0.1);
    assert_eq!(rep["certification"], "sampled");
    let first = std::fs::read(d.path().join("out.json")).unwrap();
    ok(d.path(), &args);
    assert_eq!(first, std::fs::read(d.path().join("out.json")).unwrap());

    let o = jiggle(d.path(), &["verify", "--map", "out.json", "--relation", "maxrank", "--against", "zero.json", "--epsilon", "0.1", "--report", "v.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&d.path().join("v.json"))["ok"], true);
    // the unmodified input is not a solution
    let o = jiggle(d.path(), &["verify", "--map", "zero.json", "--relation", "maxrank", "--report", "v0.json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(read_json(&d.path().join("v0.json"))["failing"].as_array().unwrap().len(), 2);
}

#[test]
fn certification_comes_from_the_environment() {
    let d = tempfile::tempdir().unwrap();
    constant_map(d.path(), "zero.json", GRID, "[0.0]");
    let o = Command::new(env!("CARGO_BIN_EXE_jiggle"))
        .current_dir(d.path())
        .env("JIGGLE_CERTIFICATION", "lipschitz")
        .args(["jiggle", "--map", "zero.json", "--relation", "maxrank", "--epsilon", "0.1", "--out", "o.json", "--report", "r.json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&d.path().join("r.json"))["certification"], "lipschitz");
    ok(d.path(), &["jiggle", "--map", "zero.json", "--relation", "maxrank", "--mode", "sampled", "--epsilon", "0.1", "--out", "o.json", "--report", "r.json"]);
    assert_eq!(read_json(&d.path().join("r.json"))["certification"], "sampled");
}

#[test]
fn negative_controls_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let cube = serde_json::json!({
        "complex": {"ambient_dim": 3, "vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]], "simplices": [[0,1,2,3]]},
        "values": [[0,0,1],[0,0,1],[0,0,1],[0,0,1]]
    });
    write(d.path(), "dz.json", &cube.to_string());
    assert_eq!(code(&jiggle(d.path(), &["verify", "--map", "dz.json", "--relation", "contact3d"])), 2);

    write(d.path(), "g.json", GRID);
    let o = jiggle(d.path(), &["verify", "--complex", "g.json", "--relation", "verygenpos", "--xi", HORIZONTAL]);
    assert_eq!(code(&o), 2);
}

#[test]
fn triangulation_and_demo() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "g.json", GRID);
    ok(d.path(), &["jiggle-triangulation", "--input", "g.json", "--xi", HORIZONTAL, "--epsilon", "0.05", "--level", "1", "--out", "t.json", "--report", "r.json"]);
    assert_eq!(read_json(&d.path().join("r.json"))["general_position"][0]["in_general_position"], true);
    ok(d.path(), &["verify", "--complex", "t.json", "--relation", "verygenpos", "--xi", HORIZONTAL]);

    ok(d.path(), &["demo", "thurston2d", "--n", "2", "--out-dir", "demo"]);
    assert!(d.path().join("demo").is_dir());
}

#[test]
fn usage_errors_exit_1() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.json", "{not json");
    write(d.path(), "t.json", TRIANGLE);
    for args in [
        vec!["subdivide", "--input", "missing.json", "--out", "x.json"],
        vec!["subdivide", "--input", "bad.json", "--out", "x.json"],
        vec!["subdivide", "--input", "t.json", "--bogus"],
        vec!["jiggle", "--map", "t.json", "--relation", "nonsense", "--epsilon", "0.1", "--out", "x.json"],
        vec!["subdivide", "--input", "t.json", "--out", "x.json", "--cone-off", "{}"],
    ] {
        let o = jiggle(d.path(), &args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert!(!d.path().join("x.json").exists());
    assert_eq!(code(&jiggle(d.path(), &["--version"])), 0);
    assert_eq!(code(&jiggle(d.path(), &["--help"])), 0);
}

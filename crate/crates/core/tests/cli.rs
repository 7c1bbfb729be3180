use std::path::{Path, PathBuf};

use cupi_assembly::cli::{run, Outcome};
use tempfile::TempDir;

const RP2: &str = r#"{"maximal_simplices":[[0,1,2],[0,2,3],[0,1,4],[0,3,5],[0,4,5],[1,2,5],[1,3,4],[1,3,5],[2,3,4],[2,4,5]]}"#;
const TWO_EDGES: &str = r#"{"maximal_simplices":[[0,1],[0,2]]}"#;
const SKY_01: &str = r#"{"stalks":{"0,1":{"generators":{"0":1}}}}"#;
const SKY_02: &str = r#"{"stalks":{"0,2":{"generators":{"0":1}}}}"#;
const CONSTANT_EDGE: &str = r#"{
  "stalks": {
    "0": {"generators": {"0": 1}},
    "1": {"generators": {"0": 1}},
    "0,1": {"generators": {"0": 1}, "restrictions": {"0": [[0,0,1]], "1": [[0,0,1]]}}
  }
}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn cupi(args: &[&str]) -> anyhow::Result<Outcome> {
    run(std::iter::once("cupi").chain(args.iter().copied()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cup_above_dimension_is_zero() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", TWO_EDGES);
    let out = cupi(&["cup", "--complex", s(&x), "--i", "3", "--simplex", "0,1"]).unwrap();
    assert_eq!(out, Outcome { status: 0, stdout: "0\n".into() });
}

#[test]
fn cup_zero_on_an_edge() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", TWO_EDGES);
    let out = cupi(&["cup", "--complex", s(&x), "--i", "0", "--simplex", "0,1"]).unwrap();
    assert_eq!(out.stdout, "+1 [0]⊗[0,1]\n+1 [0,1]⊗[1]\n");
}

#[test]
fn cup_machine_output_is_json() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", TWO_EDGES);
    let out = cupi(&["--format", "machine", "cup", "--complex", s(&x), "--i", "1", "--simplex", "0,1"]).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["i"], 1);
    assert!(!v["terms"].as_array().unwrap().is_empty());
}

#[test]
fn squares_on_rp2() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "rp2.json", RP2);
    let out = cupi(&["squares", "--complex", s(&x)]).unwrap();
    assert_eq!(out.status, 0);
    assert!(out.stdout.contains("mod 2 betti numbers: 1 1 1"), "{}", out.stdout);
    assert!(out.stdout.contains("     1      0   1      2  [1]"), "{}", out.stdout);
}

#[test]
fn validate_coalgebra_passes() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "rp2.json", RP2);
    let out = cupi(&["validate-coalgebra", "--complex", s(&x)]).unwrap();
    assert_eq!(out.status, 0);
    assert!(out.stdout.ends_with("0 failures\n"), "{}", out.stdout);
}

#[test]
fn verify_comodule_on_constant_presheaf() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"maximal_simplices":[[0,1]]}"#);
    let n = write(&dir, "n.json", CONSTANT_EDGE);
    let out = cupi(&["verify-comodule", "--complex", s(&x), "--presheaf", s(&n)]).unwrap();
    assert_eq!(out.status, 0, "{}", out.stdout);
    assert!(out.stdout.starts_with("rank 3,"), "{}", out.stdout);
}

#[test]
fn assemble_writes_machine_doc() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"maximal_simplices":[[0,1]]}"#);
    let n = write(&dir, "n.json", CONSTANT_EDGE);
    let dest = dir.path().join("a.json");
    let out = cupi(&["assemble", "--complex", s(&x), "--presheaf", s(&n), "--out", s(&dest)]).unwrap();
    assert_eq!(out.status, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["basis"].as_array().unwrap().len(), 3);
    // ∂[01⊗0] = [1⊗0] - [0⊗0]
    let mut d: Vec<(usize, usize, i64)> = serde_json::from_value(v["differential"].clone()).unwrap();
    d.sort_unstable();
    assert_eq!(d, vec![(0, 2, -1), (1, 2, 1)]);
}

#[test]
fn reconstruct_rejects_a_map_between_edges() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", TWO_EDGES);
    let n = write(&dir, "n.json", SKY_01);
    let n2 = write(&dir, "n2.json", SKY_02);
    let m = write(&dir, "m.json", r#"{"entries":[[0,0,1]]}"#);
    let out =
        cupi(&["reconstruct", "--complex", s(&x), "--presheaf-src", s(&n), "--presheaf-dst", s(&n2), "--map", s(&m)])
            .unwrap();
    assert_eq!(out.status, 1);
    assert_eq!(
        out.stdout,
        "rejected: SupportSimplex at [0,1⊗0]\nwitness: Equivariance i=1 twisted=false at [0,1⊗0]: +1·([0,1], 0) -1·([0,2], 0)\n"
    );
}

#[test]
fn reconstruct_accepts_identity() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"maximal_simplices":[[0,1]]}"#);
    let n = write(&dir, "n.json", CONSTANT_EDGE);
    let m = write(&dir, "m.json", r#"{"entries":[[0,0,1],[1,1,1],[2,2,1]]}"#);
    let dest = dir.path().join("f.json");
    let out = cupi(&[
        "reconstruct",
        "--complex",
        s(&x),
        "--presheaf-src",
        s(&n),
        "--presheaf-dst",
        s(&n),
        "--map",
        s(&m),
        "--out",
        s(&dest),
    ])
    .unwrap();
    assert_eq!(out.status, 0, "{}", out.stdout);
    assert!(out.stdout.starts_with("accepted:"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["components"].as_object().unwrap().len(), 3);
}

#[test]
fn roundtrip_on_constant_presheaf() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"maximal_simplices":[[0,1]]}"#);
    let n = write(&dir, "n.json", CONSTANT_EDGE);
    let out = cupi(&["roundtrip", "--complex", s(&x), "--presheaf-src", s(&n), "--trials", "3"]).unwrap();
    assert_eq!(out.status, 0, "{}", out.stdout);
    assert!(out.stdout.contains("fullness: 3/3"), "{}", out.stdout);
}

#[test]
fn syntax_error_carries_line_and_column() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "bad.json", "{\"maximal_simplices\":\n [[0,1],\n  [1,2]");
    let err = cupi(&["squares", "--complex", s(&x)]).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("bad.json: line 3, column 7"), "{msg}");
}

#[test]
fn unknown_simplex_in_presheaf_is_a_field_error() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", TWO_EDGES);
    let n = write(&dir, "n.json", r#"{"stalks":{"1,2":{"generators":{"0":1}}}}"#);
    let err = cupi(&["assemble", "--complex", s(&x), "--presheaf", s(&n)]).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("field stalks.\"1,2\""), "{msg}");
}

#[test]
fn non_chain_differential_is_rejected() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.json", r#"{"maximal_simplices":[[0]]}"#);
    let n = write(
        &dir,
        "n.json",
        r#"{"stalks":{"0":{"generators":{"0":1,"1":1,"2":1},"differential":[[1,2,1],[0,1,1]]}}}"#,
    );
    assert!(cupi(&["verify-comodule", "--complex", s(&x), "--presheaf", s(&n)]).is_err());
}

#[test]
fn usage_errors_come_from_clap() {
    let err = cupi(&["cup", "--i", "1"]).unwrap_err();
    assert!(err.downcast_ref::<clap::Error>().is_some());
}

use std::path::{Path, PathBuf};
use std::process::Command;

use qhecke::formats::{ring_from_file, Loader, RingFile};
use qhecke::execute;
use qhecke_core::{FusionRing, RingExt};
use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut all = vec!["qhecke"];
    all.extend_from_slice(args);
    let e = execute(all);
    (e.code, e.stdout, e.stderr)
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|_| panic!("not JSON (exit {}): {}{}", code, out, err));
    (code, v)
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn hecke_table_of_s3() {
    let (code, v) = json(&["hecke", &data("ring_s3.json"), &data("sub_12.json"), "--pairs", "all"]);
    assert_eq!(code, 0);
    let entry = v["results"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["left"] == "D:(13)" && e["right"] == "D:(13)")
        .unwrap();
    assert_eq!(entry["product"]["D:e"], "2/1");
    assert_eq!(entry["product"]["D:(13)"], "1/1");
    assert_eq!(v["outcome"], "ok");
    assert_eq!(v["results"]["mu"]["D:e"], "1/1");

    let (code, csv, _) = run(&["--format", "csv", "hecke", &data("ring_s3.json"), &data("sub_12.json")]);
    assert_eq!(code, 0);
    assert!(csv.starts_with("left,right,class,coefficient\n"));
    assert!(csv.contains("D:(13),D:(13),D:e,2/1\n"));

    let (code, _, err) = run(&["--format", "csv", "validate", &data("ring_s3.json")]);
    assert_eq!(code, 4);
    assert!(err.contains("no tabular result"), "{}", err);
}

#[test]
fn nabla_of_profinite_hnn() {
    let (code, v) = json(&["--max-grade", "2", "nabla", &data("hnn_profinite.recipe")]);
    assert_eq!(code, 0, "{}", v);
    let classes = v["results"]["classes"].as_array().unwrap();
    let w = classes.iter().find(|c| c["class"] == "D:w").unwrap();
    assert_eq!((w["l"].as_u64(), w["r"].as_u64(), &w["nabla"]), (Some(3), Some(2), &Value::from("3/1")));
    assert_eq!(v["results"]["closed_forms"]["nabla_w"], "3/1");
    assert_eq!(v["results"]["closed_forms_agree"], true);
}

#[test]
fn validate_reports() {
    let (code, v) = json(&["validate", &data("ring_s3.json")]);
    assert_eq!(code, 0);
    assert!(v["results"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert!(v["inputs"].as_object().unwrap().keys().any(|k| k.ends_with("ring_s3.json")));

    let (code, v) = json(&["validate", &data("ring_s3.json"), &data("sub_12.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["subgroup"]["closed"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--max-grade", "2", "suite", &data("hnn_profinite.recipe")];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(!a.contains("wall_time_ms"));
    for cmd in ["cosets", "kappa", "kms", "faithful", "cokernel-support"] {
        let args = ["--max-grade", "6", cmd, &data("ring_s3.json"), &data("sub_12.json")];
        assert_eq!(run(&args).1, run(&args).1, "{}", cmd);
    }
    let (_, v) = json(&["--timing", "validate", &data("ring_s3.json")]);
    assert!(v["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn thread_count_does_not_change_output() {
    let base = ["rt-scan", &data("z_free_su2.recipe"), "--beta", "1:-1;1:1;2:1"];
    let one = run(&[&["--threads", "1", "--max-grade", "5"], &base[..]].concat());
    let four = run(&[&["--threads", "4", "--max-grade", "5"], &base[..]].concat());
    assert_eq!(one, four);
}

#[test]
fn exit_codes() {
    let bad = scratch("bad_rational.json");
    std::fs::write(
        &bad,
        r#"{"format": "qhecke-ring/1", "unimodular_kac": true,
  "objects": [{"id": "1", "dim": 1, "qdim": "1/x", "conj": "1", "grade": 0}],
  "unit": "1", "fusion": [{"left": "1", "right": "1", "decomp": [["1", 1]]}]}"#,
    )
    .unwrap();
    let (code, _, err) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("objects[0].qdim") && err.contains("1/x"), "{}", err);

    let unknown = scratch("unknown_id.json");
    std::fs::write(&unknown, std::fs::read_to_string(&bad).unwrap().replace("1/x", "1/1").replace("[\"1\", 1]", "[\"q\", 1]"))
        .unwrap();
    let (code, _, err) = run(&["validate", unknown.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("fusion[0].decomp[0]") && err.contains("\"q\""), "{}", err);

    let syntax = scratch("syntax.json");
    std::fs::write(&syntax, "{\n  \"format\": \"qhecke-ring/1\",\n  \"objects\": [,\n}").unwrap();
    let (code, _, err) = run(&["validate", syntax.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("line 3"), "{}", err);

    let (code, _, _) = run(&["validate", "no/such/file.json"]);
    assert_eq!(code, 4);
    let (code, _, _) = run(&["no-such-command"]);
    assert_eq!(code, 4);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("rt-scan"));

    let not_closed = scratch("not_closed.json");
    std::fs::write(&not_closed, r#"{"format": "qhecke-subgroup/1", "members": ["e", "(123)"]}"#).unwrap();
    let (code, _, err) = run(&["cosets", &data("ring_s3.json"), not_closed.to_str().unwrap()]);
    assert_eq!(code, 2, "{}", err);

    let (code, v) = json(&["--max-grade", "3", "cosets", &data("z_free_su2.recipe")]);
    assert_eq!(code, 3);
    assert_eq!(v["outcome"], "inconclusive");
    assert!(!v["completeness"].as_array().unwrap().is_empty());
}

#[test]
fn planted_defect_fails_validation() {
    let text = std::fs::read_to_string(data("dual_s3.json")).unwrap();
    let mut file: RingFile = serde_json::from_str(&text).unwrap();
    let v = file.objects.iter_mut().find(|o| o.id == "v").unwrap();
    v.qdim = "3/1".into();
    v.dim = 3;
    let path = scratch("defect.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let (code, v) = json(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["outcome"], "validation-failed");
    let failed = v["results"]["checks"].as_array().unwrap().iter().find(|c| c["axiom"] == "qdim-homomorphism").unwrap();
    assert!(failed["failures"][0].as_str().unwrap().contains("(v, v)"), "{}", failed);
}

#[test]
fn build_round_trips() {
    for recipe in ["dual_s3.recipe", "dual_q8.recipe", "s3.recipe"] {
        let out = scratch(&recipe.replace(".recipe", ".json"));
        let (code, v) = json(&["build", &data(recipe), "-o", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{}", v);
        assert_eq!(v["results"]["written"], true);

        let mut loader = Loader::new(4);
        let (memory, _) = loader.load_ring(Path::new(&data(recipe))).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let file: RingFile = serde_json::from_str(&text).unwrap();
        let loaded = ring_from_file(out.to_str().unwrap(), &file).unwrap();
        let (a, b) = (memory.shared(), &loaded);
        let ids_a = a.enumerate_up_to(u32::MAX);
        let ids_b = b.enumerate_up_to(u32::MAX);
        let names_a: Vec<String> = ids_a.iter().map(|x| a.render(x)).collect();
        let names_b: Vec<String> = ids_b.iter().map(|x| b.render(x)).collect();
        assert_eq!(names_a, names_b);
        for (x, y) in ids_a.iter().zip(&ids_b) {
            let (ox, oy) = (a.object(x).unwrap(), b.object(y).unwrap());
            assert_eq!((ox.dim, ox.qdim, ox.grade), (oy.dim, oy.qdim, oy.grade));
            assert_eq!(a.render(&ox.conj), b.render(&oy.conj));
            for (u, v) in ids_a.iter().zip(&ids_b) {
                assert_eq!(a.render_decomposition(&a.fuse(x, u).unwrap()), b.render_decomposition(&b.fuse(y, v).unwrap()));
            }
        }

        let again = scratch(&format!("again_{}", recipe.replace(".recipe", ".json")));
        let (code, _) = json(&["build", out.to_str().unwrap(), "-o", again.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
    }
}

#[test]
fn binary_writes_output_file_and_exit_code() {
    let out = scratch("operator.json");
    let status = Command::new(env!("CARGO_BIN_EXE_qhecke"))
        .args(["--output", out.to_str().unwrap(), "operator", &data("ring_s3.json"), &data("sub_12.json")])
        .args(["--tau", "(13)", "--norm"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let upper = v["results"]["norm"]["upper"].as_f64().unwrap();
    assert!((upper - 2.0).abs() < 1e-9);

    let status = Command::new(env!("CARGO_BIN_EXE_qhecke")).args(["validate", "missing.json"]).output().unwrap();
    assert_eq!(status.status.code(), Some(4));
}

#[test]
fn remaining_commands_succeed() {
    let s3 = [data("ring_s3.json"), data("sub_12.json")];
    for args in [
        vec!["kappa".to_string(), s3[0].clone(), s3[1].clone(), "--class-invariance".into()],
        vec!["kms".into(), s3[0].clone(), s3[1].clone()],
        vec!["adjoint".into(), s3[0].clone(), s3[1].clone()],
        vec!["faithful".into(), s3[0].clone(), s3[1].clone()],
        vec!["cokernel-support".into(), s3[0].clone(), s3[1].clone()],
        vec!["qdouble".into(), "cyclic:4".into()],
        vec!["qdouble".into(), data("groups/s3.json")],
        vec!["theta-domains".into(), data("hnn_profinite.recipe")],
        vec!["--max-grade".into(), "12".into(), "suite".into(), data("su2_so3.recipe")],
    ] {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, v) = json(&refs);
        assert_eq!(code, 0, "{:?}: {}", args, v);
        assert_eq!(v["outcome"], "ok");
    }
}

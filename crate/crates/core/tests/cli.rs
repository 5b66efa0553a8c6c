use std::path::Path;
use std::process::{Command, Output};

use ununfold::io::read_obj;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ununfold"))
        .args(args)
        .current_dir(dir)
        .env_remove("UNUNFOLD_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_writes_expected_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], usize, usize); 5] = [
        (&["spiked-tetrahedron"], 20, 24),
        (&["spiked-tetrahedron", "--kind", "triangulated"], 20, 36),
        (&["hat"], 7, 6),
        (&["hat", "--kind", "triangulated"], 7, 9),
        (&["fan"], 9, 8),
    ];
    for (i, (args, v, f)) in cases.iter().enumerate() {
        let out = format!("m{i}.obj");
        let mut a = vec!["generate"];
        a.extend_from_slice(args);
        a.extend(["-o", &out]);
        let o = run(&a, dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let m = read_obj(&dir.path().join(&out)).unwrap();
        assert_eq!((m.vertex_count(), m.face_count()), (*v, *f), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("bad.obj"), "v 0 0 0\nv 1 0 0\nf 1 2 x\n").unwrap();
    std::fs::write(p.join("cfg"), "nonsense = 1\n").unwrap();
    let cases: [(&[&str], i32); 7] = [
        (&["count-trees", "cube"], 0),
        (&["count-trees", "--mesh", "bad.obj"], 3),
        (&["count-trees", "--mesh", "missing.obj"], 1),
        (&["verify", "spiked-tetrahedron", "--mode", "bounded-forests"], 4),
        (&["net", "spiked-tetrahedron", "--general", "--band-skew", "90"], 2),
        (&["generate", "hat", "--alpha", "95"], 2),
        (&["--config", "cfg", "count-trees", "cube"], 2),
    ];
    for (args, code) in cases {
        assert_eq!(run(args, p).status.code(), Some(code), "{args:?}");
    }
}

#[test]
fn count_trees_prints_matrix_tree_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["count-trees", "spiked-tetrahedron"], dir.path());
    assert_eq!(stdout(&o).trim(), "1825050000");
    let o = run(
        &["count-trees", "spiked-tetrahedron", "--kind", "triangulated"],
        dir.path(),
    );
    assert_eq!(stdout(&o).trim(), "382205952000");
}

#[test]
fn verify_report_is_byte_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["verify", "spiked-tetrahedron", "--budget", "20000"];
    let a = run(&[&base[..], &["--workers", "1"]].concat(), dir.path());
    let b = run(&[&base[..], &["--workers", "3"]].concat(), dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["total_candidates"], 20000);
    assert_eq!(json["non_overlapping"], 0);
    assert_eq!(json["expected_candidates"], "1825050000");
    assert_eq!(json["exhaustive"], false);
    assert!(json.get("timing").is_none());
}

#[test]
fn verify_hat_reports_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "hat", "--report", "r.json"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("512 candidates"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"], "edge-ununfoldable");
    assert_eq!(json["non_overlapping"], 0);
}

#[test]
fn config_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg"), "kind = triangulated\noutput = t.obj\n").unwrap();
    let o = run(&["--config", "cfg", "generate", "hat"], dir.path());
    assert!(o.status.success());
    assert_eq!(read_obj(&dir.path().join("t.obj")).unwrap().face_count(), 9);
}

#[test]
fn net_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["net", "cube", "--first-found", "-o", "cube.svg"], dir.path());
    assert!(o.status.success());
    let svg = std::fs::read_to_string(dir.path().join("cube.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 6);
    let o = run(&["net", "spiked-tetrahedron", "--general", "-o", "g.svg"], dir.path());
    assert!(o.status.success());
    let o = run(&["net", "fan", "--cut", "0", "-o", "f.svg"], dir.path());
    assert!(o.status.success());
    let svg = std::fs::read_to_string(dir.path().join("f.svg")).unwrap();
    assert!(svg.contains("<path"));
}

#[test]
fn net_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["net", "fan", "--cut", "0", "-o", "f.json"], dir.path());
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(json["faces"].as_array().unwrap().len(), 8);
    assert_eq!(json["cut_edges"], serde_json::json!([0]));
    assert!(!json["overlaps"].as_array().unwrap().is_empty());
}

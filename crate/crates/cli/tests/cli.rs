use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn modlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modlab")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn attr(tag: &str, name: &str) -> f64 {
    let key = format!(" {name}=\"");
    let rest = &tag[tag.find(&key).unwrap() + key.len()..];
    rest[..rest.find('"').unwrap()].parse().unwrap()
}

#[test]
fn generated_grid_decomposes_to_two_thirds() {
    let dir = scratch("grid");
    let g = dir.join("g.json");
    assert!(modlab(&["generate", "grid", "--L", "2", "--n", "3", "--out", p(&g)]).status.success());
    let out = modlab(&["decompose", p(&g)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("modulus = 0.666666666667"));
}

#[test]
fn rectangle_study_writes_one_row_per_n() {
    let dir = scratch("rect");
    let csv = dir.join("out.csv");
    assert!(modlab(&["converge", "rect", "--L", "1", "--n", "1,2,4,8", "--csv", p(&csv)]).status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("parameter,modulusPrimal,modulusDual,fulkersonProduct,harmonicMaxError,pmfDistance,runtimeMs\n"));
}

#[test]
fn svg_areas_sum_to_the_printed_modulus() {
    let dir = scratch("tile");
    let g = dir.join("g.json");
    let svg = dir.join("t.svg");
    assert!(modlab(&["generate", "grid", "--L", "2", "--n", "3", "--out", p(&g)]).status.success());
    let out = modlab(&["tile", p(&g), "--svg", p(&svg)]);
    assert!(out.status.success());
    let printed: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("modulus = "))
        .unwrap()
        .parse()
        .unwrap();
    let text = std::fs::read_to_string(&svg).unwrap();
    let area: f64 = text
        .split("<rect")
        .skip(1)
        .map(|tag| attr(tag, "width") * attr(tag, "height"))
        .sum();
    assert!((area - printed).abs() <= 1e-9);
}

#[test]
fn validate_only_writes_nothing() {
    let dir = scratch("validate");
    let g = dir.join("g.json");
    let out = modlab(&["--validate-only", "generate", "rotated", "--n", "2", "--out", p(&g)]);
    assert!(out.status.success());
    assert!(!g.exists());
    assert!(modlab(&["generate", "rotated", "--n", "2", "--out", p(&g)]).status.success());
    for cmd in ["solve", "decompose", "tile", "check"] {
        let target = dir.join(format!("{cmd}.out"));
        let flag = if cmd == "tile" { "--svg" } else { "--out" };
        let args: Vec<&str> = if cmd == "check" {
            vec!["check", p(&g), "--validate-only"]
        } else {
            vec![cmd, p(&g), flag, p(&target), "--validate-only"]
        };
        assert!(modlab(&args).status.success(), "{cmd}");
        assert!(!target.exists(), "{cmd}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(modlab(&["generate", "hexagonal", "--n", "2"]).status.code(), Some(2));
    assert_eq!(modlab(&["--tol=-1", "converge", "rect", "--n", "1"]).status.code(), Some(2));
    assert_eq!(modlab(&["converge", "rect", "--n", "4,2"]).status.code(), Some(2));
    assert_eq!(modlab(&["solve", "/nonexistent/file.json"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_modlab"))
        .args(["converge", "rect", "--n", "1"])
        .env("MODLAB_TOL", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_one_and_name_the_invariant() {
    let dir = scratch("domain");
    let net = dir.join("zero.json");
    // A single edge of zero conductance.
    std::fs::write(
        &net,
        r#"{"vertices":[{"id":0,"x":0.0,"y":0.0},{"id":1,"x":1.0,"y":0.0}],"edges":[{"id":0,"u":0,"v":1,"sigma":0.0}],"A":[0],"B":[1],"boundary":[0,1]}"#,
    )
    .unwrap();
    let out = modlab(&["solve", p(&net)]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive-weight"));

    let node = dir.join("square.node");
    let ele = dir.join("square.ele");
    std::fs::write(&node, "4 2 0 1\n1 0 0 1\n2 1 0 2\n3 1 1 3\n4 0 1 4\n").unwrap();
    std::fs::write(&ele, "2 3 0\n1 1 2 3\n2 1 3 4\n").unwrap();
    let out = modlab(&["ingest", p(&node), p(&ele)]);
    assert_eq!(out.status.code(), Some(1));
}

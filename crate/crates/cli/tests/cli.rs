use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn steklov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn spectrum_of_k2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k2.json", r#"{"n":2,"edges":[[0,1]],"boundary":[0,1]}"#);
    let o = steklov(&["spectrum", &f]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0 2");
    let o = steklov(&["spectrum", &f, "--k", "2"]);
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn resistance_of_p3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p3.json", r#"{"n":3,"edges":[[0,1],[1,2]],"boundary":[0]}"#);
    let o = steklov(&["resist", &f, "--u", "0", "--v", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "2.0");
    assert!(row[2].parse::<f64>().unwrap() <= 1e-9);
}

#[test]
fn generated_torus_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let t = t.to_str().unwrap();
    assert!(steklov(&["gen", "torus", "3", "3", "-o", t]).status.success());
    let o = steklov(&["spectrum", t]);
    assert!(o.status.success());
    let vals: Vec<f64> = stdout(&o).split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(vals.len(), 9);
    assert_eq!(vals[0], 0.0);
}

#[test]
fn embedded_commands() {
    let dir = tempfile::tempdir().unwrap();
    let oct = dir.path().join("oct.json");
    let oct = oct.to_str().unwrap();
    assert!(steklov(&["gen", "octahedron", "-o", oct]).status.success());

    let sub = dir.path().join("sub.json");
    let o = steklov(&["subdivide", oct, "--k", "1", "-o", sub.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_like::Doc = serde_like::parse(&fs::read_to_string(&sub).unwrap());
    assert_eq!(doc.n, 18);

    let o = steklov(&["immerse", oct, "--k", "1", "--seed", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("xi "));

    let svg = dir.path().join("p.svg");
    let o = steklov(&["pack", oct, "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<circle").count(), 6);

    let o = steklov(&["certify-planar", oct]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("degree_bound 5.33333333333"));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = steklov(&["sweep", "--gmax", "2", "--res", "4", "--policy", "random:0.5:3", "--csv", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(steklov(&["--help"]).status.code(), Some(0));
    assert_eq!(steklov(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(steklov(&["spectrum", "/nonexistent.json"]).status.code(), Some(1));
    let bad = write(dir.path(), "bad.json", r#"{"n":2,"edges":[[1,0]],"boundary":[0]}"#);
    let o = steklov(&["spectrum", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("edges[0]"));
    let flat = write(dir.path(), "flat.json", r#"{"n":3,"edges":[[0,1],[1,2]],"boundary":[0]}"#);
    assert_eq!(steklov(&["pack", &flat]).status.code(), Some(1));
    let big = write(dir.path(), "big.json", r#"{"n":5,"edges":[],"boundary":[0]}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(["spectrum", &big])
        .env("STEKLOV_MAX_N", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

/// Minimal reader for the vertex count of a document.
mod serde_like {
    pub struct Doc {
        pub n: usize,
    }

    pub fn parse(text: &str) -> Doc {
        let rest = &text[text.find("\"n\":").unwrap() + 4..];
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap();
        Doc {
            n: rest[..end].parse().unwrap(),
        }
    }
}

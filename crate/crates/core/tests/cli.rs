use std::path::Path;
use std::process::{Command, Output};

use hfrep::io::{read_hfrf, FieldImage};

fn hfrep(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfrep")).args(args).current_dir(dir).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["gen", "--model", "teapot", "--out", "x.hfrf"],
        vec!["gen", "--model", "star", "--route", "sweep", "--out", "x.hfrf"],
        vec!["gen", "--model", "star", "--bogus", "--out", "x.hfrf"],
        vec!["gen", "--model", "star", "--res", "2", "--out", "x.hfrf"],
        vec!["idf", "--model", "star", "--source", "0;0", "--out", "x.hfrf"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = hfrep(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn module_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["gen", "--model", "sphere", "--route", "idf", "--res", "9", "--out", "x.hfrf"],
        &["render", "--in", "missing.hfrf", "--out", "x.ppm"],
        &["trace", "--model", "star", "--out", "x.ppm"],
        &["idf", "--model", "star", "--source", "0.99,0.99", "--res", "65", "--out", "x.hfrf"],
    ];
    for args in cases {
        let o = hfrep(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let msg = stderr(&o);
        assert_eq!(msg.trim_end().lines().count(), 1, "{msg}");
        assert!(msg.starts_with("hfrep: "), "{msg}");
    }
}

#[test]
fn gen_then_render() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = hfrep(&["gen", "--model", "heart", "--route", "fim", "--res", "97", "--out", "h.hfrf"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = read_hfrf(d.join("h.hfrf")).unwrap();
    assert_eq!(g.dims(), [97, 97, 1]);
    assert!(g.values().iter().any(|v| *v > 0.0) && g.values().iter().any(|v| *v < 0.0));

    for out in ["a.ppm", "b.ppm"] {
        let o = hfrep(&["render", "--in", "h.hfrf", "--iso", "0.05", "--out", out], d);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (std::fs::read(d.join("a.ppm")).unwrap(), std::fs::read(d.join("b.ppm")).unwrap());
    assert_eq!(a, b);
    let img = FieldImage::from_ppm(&a).unwrap();
    assert_eq!((img.width(), img.height()), (97, 97));
    assert!(hfrep(&["render", "--in", "h.hfrf", "--iso", "0", "--out", "c.ppm"], d).status.code() == Some(1));
}

#[test]
fn adaptive_route_writes_tree_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["gen", "--model", "star", "--route", "hfim-adf", "--res", "65", "--min-depth", "3", "--max-depth", "6"];
    let o = hfrep(&[&args[..], &["--out", "s.hfrf"]].concat(), d);
    assert!(o.status.success(), "{}", stderr(&o));
    let stats = std::fs::read_to_string(d.join("s.stats.txt")).unwrap();
    assert!(stats.contains("leaves") && stats.contains("vertices"), "{stats}");
    assert_eq!(read_hfrf(d.join("s.hfrf")).unwrap().dims(), [65, 65, 1]);
}

#[test]
fn idf_attr_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = hfrep(&["idf", "--model", "star", "--source", "0,0", "--res", "65", "--out", "i.hfrf"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = read_hfrf(d.join("i.hfrf")).unwrap();
    assert!(g.values().iter().all(|v| *v >= 0.0));

    std::fs::write(
        d.join("scheme.txt"),
        "res = 65\nexterior = 0 0 0\nattribute = constant 1 0 0\nattribute = wood 3 30 1\nband = 0 0.1 0\nband = 0.1 5 1\n",
    )
    .unwrap();
    let o = hfrep(&["attr", "--model", "star", "--scheme", "scheme.txt", "--out", "a.ppm", "--size", "64"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let img = FieldImage::read_ppm(d.join("a.ppm")).unwrap();
    assert_eq!(img.pixel(0, 0), [0, 0, 0]);
    assert!(img.pixels().contains(&[255, 0, 0]));

    std::fs::write(d.join("bad.txt"), "attribute = wood 0.5 1 1\n").unwrap();
    let o = hfrep(&["attr", "--model", "star", "--scheme", "bad.txt", "--out", "b.ppm"], d);
    assert_eq!(o.status.code(), Some(1));

    let o = hfrep(&["trace", "--model", "sphere", "--res", "32", "--size", "24", "--out", "t.ppm"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    let img = FieldImage::read_ppm(d.join("t.ppm")).unwrap();
    assert_ne!(img.pixel(12, 12), img.pixel(0, 0));

    let o = hfrep(&["trace", "--model", "sphere", "--res", "32", "--max-lipschitz", "0.5", "--out", "r.ppm"], d);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lipschitz"));
}

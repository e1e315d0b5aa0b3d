use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn catalog(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog");
    root.join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_traintrack")).args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_traintrack"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("traintrack-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn catalog_entries_validate() {
    for name in ["s05-a", "s05-b", "s12-a", "s12-b", "s20-a", "s20-b"] {
        let o = run(&["validate", &catalog(&format!("{name}.trk"))]);
        assert!(o.status.success(), "{name}");
        assert_eq!(stdout(&o), "OK\n");
    }
}

#[test]
fn split_output_pipes_into_validate() {
    let split = run(&["split", &catalog("s05-a.trk"), "e7", "R"]);
    assert!(split.status.success(), "{}", String::from_utf8_lossy(&split.stderr));
    let v = run_stdin(&["validate", "-"], &split.stdout);
    assert!(v.status.success());
    assert_eq!(stdout(&v), "OK\n");
    let c = run_stdin(&["collapse", "-", "7"], &split.stdout);
    assert!(c.status.success());
    let original = std::fs::read_to_string(catalog("s05-a.trk")).unwrap();
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(body(&stdout(&c)).len(), body(&original).len());
}

#[test]
fn parse_errors_report_line_and_column() {
    let o = run_stdin(&["validate", "-"], b"track bigons=0\nsw 0 a:0.0 b:0.x\n");
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2:14") || err.contains("line 2"), "{err}");
}

#[test]
fn violations_name_their_clause() {
    let o = run_stdin(&["validate", "-", "--surface", "0,0"], b"track bigons=0\nsw 0 a:0.0 b:0.1\nbr 0 0.a0 0.b0\n");
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("VIOLATION forbidden region")), "{}", stdout(&o));
}

#[test]
fn split_rejects_small_branches() {
    let o = run(&["split", &catalog("s05-a.trk"), "1", "R"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn qi_output_is_deterministic_across_job_counts() {
    let args = ["qi", "--strip", &catalog("s05-a.trk"), "--guide", &catalog("s05-a.gm"), "--radius", "5"];
    let one = run(&[&["--jobs", "1"], &args[..]].concat());
    let four = run(&[&["--jobs", "4"], &args[..]].concat());
    let again = run(&args);
    assert!(one.status.success());
    assert_eq!(stdout(&one), stdout(&four));
    assert_eq!(stdout(&one), stdout(&again));
    let text = stdout(&one);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["c_lower 1.000000 sq=1/1", "c_upper 2.000000 sq=4/1"]);
}

#[test]
fn strip_commands_run_on_the_catalog() {
    let strip = catalog("s12-a.trk");
    let guide = catalog("s12-a.gm");
    let base = ["--strip", strip.as_str(), "--guide", guide.as_str(), "--radius", "3", "--accept-truncated"];
    for cmd in ["enumerate-strip", "complex", "links", "stats"] {
        let o = run(&[&[cmd][..], &base[..]].concat());
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!stdout(&o).is_empty(), "{cmd}");
    }
    let stats = stdout(&run(&[&["stats"][..], &base[..]].concat()));
    for field in ["vertices=", "edges=", "truncated=1", "max_cube_dim=", "f_vector=", "links_checked=", "links_flag=1"] {
        assert!(stats.contains(field), "{stats}");
    }
    let e = stdout(&run(&[&["enumerate-strip"][..], &base[..]].concat()));
    assert!(e.starts_with("v 0 phi:"));
}

#[test]
fn track_commands_run_on_the_catalog() {
    let t = catalog("s05-a.trk");
    let g = catalog("s05-a.gm");
    let regions = stdout(&run(&["regions", &t]));
    assert!(regions.lines().last().unwrap().starts_with("census"));
    let m = run(&["measures", &t, "--guide", &g]);
    assert!(m.status.success());
    assert!(stdout(&m).contains("transverse="));
    let d = run(&["dual", &t]);
    assert!(d.status.success());
    assert!(stdout(&d).starts_with("# source"));
    let comb = run_stdin(&["comb", "-"], &d.stdout);
    assert!(comb.status.success(), "{}", String::from_utf8_lossy(&comb.stderr));
    assert!(stdout(&comb).starts_with("# comb steps="));
    let tw = run(&["twist", &t, "7/1"]);
    assert!(tw.status.success(), "{}", String::from_utf8_lossy(&tw.stderr));
    assert!(stdout(&tw).contains("k=1"));
    let cl = run(&["collapse-lambda", &t, &g]);
    assert!(cl.status.success(), "{}", String::from_utf8_lossy(&cl.stderr));
    assert!(stdout(&cl).lines().last().unwrap().ends_with("output=ok"));
    let s05b = catalog("s05-b.trk");
    let mixed = stdout(&run(&["regions", &s05b]));
    assert!(!mixed.is_empty());
}

#[test]
fn split_transports_guides_in_their_direction() {
    let out = tmp("guide.gm");
    let wrong = run(&["split", &catalog("s05-a.trk"), "7", "R", "--guide", &catalog("s05-a.gm"), "--guide-out", &out]);
    assert_eq!(wrong.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&wrong.stderr).contains("measure incompatible"));
    let o = run(&["split", &catalog("s05-a.trk"), "7", "L", "--guide", &catalog("s05-a.gm"), "--guide-out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = std::fs::read_to_string(&out).unwrap();
    assert!(!g.trim().is_empty());
    let m = run_stdin(&["measures", "-", "--guide", &out], &o.stdout);
    assert!(m.status.success());
    assert!(stdout(&m).contains("transverse=1"), "{}", stdout(&m));
}

#[test]
fn bicombe_finds_the_splitting_sequence() {
    let first = run(&["split", &catalog("s05-a.trk"), "7", "R"]);
    let path = tmp("after.trk");
    std::fs::write(&path, &first.stdout).unwrap();
    let o = run(&["bicombe", &catalog("s05-a.trk"), &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "sequence 7R");
    assert!(text.lines().any(|l| l.starts_with("station 1")));
}

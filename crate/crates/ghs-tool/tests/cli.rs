use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ghs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghs"))
        .args(args)
        .output()
        .expect("run ghs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn values<'a>(text: &'a str, key: &str) -> Vec<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .collect()
}

fn family_file(dir: &TempDir, tag: &str, g: u32) -> PathBuf {
    let path = dir.path().join(format!("{}-{}.txt", tag, g));
    let o = ghs(&[
        "family",
        tag,
        "--g",
        &g.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn family_flip_writes_two_pieces() {
    let o = ghs(&["family", "flip", "--g", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("piece ")).count(), 2);
    assert!(text
        .lines()
        .any(|l| l == "edge 0 1:0 2:0 genus 2 grade 6 ref A"));
}

#[test]
fn family_closed_has_four_pieces_and_grade_nine() {
    let text = stdout(&ghs(&["family", "closed", "--g", "2"]));
    assert_eq!(text.lines().filter(|l| l.starts_with("piece ")).count(), 4);
    let edges: Vec<&str> = text.lines().filter(|l| l.starts_with("edge ")).collect();
    let mut genera: Vec<&str> = edges
        .iter()
        .map(|l| l.split_whitespace().nth(5).unwrap())
        .collect();
    genera.sort();
    assert_eq!(genera, ["1", "1", "2", "2"]);
    assert!(edges.iter().all(|l| l.contains("grade 9")));
}

#[test]
fn bad_parameters_exit_2() {
    assert_eq!(code(&ghs(&["family", "flip", "--g", "1"])), 2);
    assert_eq!(code(&ghs(&["family", "mobius", "--g", "2"])), 2);
    assert_eq!(code(&ghs(&["verify", "flip", "--g", "3..2"])), 2);
    assert_eq!(code(&ghs(&["verify", "flip"])), 2);
    assert_eq!(code(&ghs(&["frobnicate"])), 2);
    assert_eq!(code(&ghs(&["--help"])), 0);
}

#[test]
fn genus_of_family_endpoints() {
    let dir = TempDir::new().unwrap();
    let flip = family_file(&dir, "flip", 2);
    assert_eq!(stdout(&ghs(&["genus", p(&flip), "H^1"])), "4\n");
    let closed = family_file(&dir, "closed", 2);
    assert_eq!(stdout(&ghs(&["genus", p(&closed), "H^1"])), "8\n");
    let torus = family_file(&dir, "torus-boundary", 3);
    assert_eq!(stdout(&ghs(&["genus", p(&torus), "H^*"])), "6\n");
}

#[test]
fn genus_errors() {
    let dir = TempDir::new().unwrap();
    let flip = family_file(&dir, "flip", 2);
    let o = ghs(&["genus", p(&flip), "H^7"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("H^7"));

    let garbage = dir.path().join("garbage.txt");
    fs::write(&garbage, "SCENARIO flip two cap 6\n").unwrap();
    assert_eq!(code(&ghs(&["genus", p(&garbage), "H^1"])), 2);
    assert_eq!(code(&ghs(&["genus", "/nonexistent/file", "H^1"])), 2);

    let text = fs::read_to_string(&flip).unwrap();
    let incoherent = dir.path().join("incoherent.txt");
    fs::write(
        &incoherent,
        text.replacen(
            "thin 0 genus 2 edge 0 copy 0 sign +",
            "thin 0 genus 2 edge 0 copy 0 sign -",
            1,
        ),
    )
    .unwrap();
    assert_eq!(code(&ghs(&["genus", p(&incoherent), "H^1"])), 3);
}

#[test]
fn verify_flip_range() {
    let o = ghs(&["verify", "flip", "--g", "2..5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(values(&text, "LOWER_BOUND"), ["6", "8", "10", "12"]);
    assert_eq!(values(&text, "STAB_COUNT"), ["2", "3", "4", "5"]);
    assert_eq!(values(&text, "SPLITTING_GENUS"), ["4", "5", "6", "7"]);
    assert_eq!(values(&text, "SEARCH_RESULT"), ["SKIPPED"; 4]);
    assert!(text.ends_with("RESULT PASS\n"));
    assert_eq!(stdout(&ghs(&["verify", "flip", "--g-range", "2..5"])), text);
}

#[test]
fn verify_closed_g2() {
    let text = stdout(&ghs(&["verify", "closed", "--g", "2"]));
    assert_eq!(values(&text, "LOWER_BOUND"), ["9"]);
    assert_eq!(values(&text, "STAB_COUNT"), ["1"]);
    assert_eq!(values(&text, "SPLITTING_GENUS"), ["8"]);
    assert_eq!(values(&text, "CHECK parity"), ["PASS"]);
}

#[test]
fn verify_torus_boundary_range() {
    let text = stdout(&ghs(&["verify", "torus-boundary", "--g", "2..4"]));
    assert_eq!(values(&text, "ENDPOINT_GENERA"), ["4 5", "5 6", "6 7"]);
    assert_eq!(values(&text, "STAB_COUNT"), ["1", "2", "3"]);
}

#[test]
fn verify_flip_report_is_stable() {
    let want = "\
FAMILY flip
G 2
SPLITTING_GENUS 4
ENDPOINT_GENERA 4 4
LOWER_BOUND 6
STAB_COUNT 2
SEARCH_RESULT UNREACHABLE_BELOW 6
STATES_EXPLORED 8
CERTIFICATE symbolic model
CHECK endpoint_genera PASS
CHECK splitting_genus PASS
CHECK lower_bound PASS
CHECK stab_count PASS
CHECK search PASS

RESULT PASS
";
    let o = ghs(&["verify", "flip", "--g", "2", "--search"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), want);
}

#[test]
fn verify_search_budget() {
    let args = ["verify", "flip", "--g", "2", "--search", "--budget", "2"];
    let o = ghs(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(values(&stdout(&o), "SEARCH_RESULT"), ["BUDGET_EXCEEDED"]);
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(code(&ghs(&strict)), 4);
    let cap_too_big = ghs(&["verify", "flip", "--g", "2", "--search", "--cap", "7"]);
    assert_eq!(code(&cap_too_big), 2);
}

#[test]
fn verify_samples_are_seeded() {
    let a = stdout(&ghs(&[
        "verify",
        "flip",
        "--g",
        "2",
        "--samples",
        "20",
        "--seed",
        "5",
    ]));
    let b = stdout(&ghs(&[
        "verify",
        "flip",
        "--g",
        "2",
        "--samples",
        "20",
        "--seed",
        "5",
    ]));
    assert_eq!(a, b);
    assert_eq!(values(&a, "CHECK properties"), ["PASS"]);
}

#[test]
fn search_finds_path_at_the_bound_and_reduce_replays_it() {
    let dir = TempDir::new().unwrap();
    let flip = family_file(&dir, "flip", 2);
    let with_path = dir.path().join("path.txt");
    let o = ghs(&["search", p(&flip), "--cap", "6", "--out", p(&with_path)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(values(&text, "SEARCH_RESULT"), ["PATH_FOUND genus 6"]);
    assert_eq!(values(&text, "CHECK search"), ["PASS"]);

    // Replay every `down` link from its source entry.
    for link in values(&text, "LINK") {
        let (idx, rest) = link.split_once(' ').unwrap();
        let Some(mv) = rest.strip_prefix("down ") else {
            continue;
        };
        let i: usize = idx.parse().unwrap();
        let script = dir.path().join(format!("link{}.txt", i));
        fs::write(&script, format!("{}\n", mv)).unwrap();
        let o = ghs(&[
            "reduce",
            p(&with_path),
            &format!("path:{}", i - 1),
            p(&script),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("CHECK PASS"));
    }

    let o = ghs(&["search", p(&flip)]);
    assert_eq!(
        values(&stdout(&o), "SEARCH_RESULT"),
        ["UNREACHABLE_BELOW 6"]
    );
}

#[test]
fn reduce_flags_destabilizations() {
    let dir = TempDir::new().unwrap();
    let flip = family_file(&dir, "flip", 2);
    let with_path = dir.path().join("path.txt");
    assert_eq!(
        code(&ghs(&[
            "search",
            p(&flip),
            "--cap",
            "6",
            "--out",
            p(&with_path)
        ])),
        0
    );
    let script = dir.path().join("destab.txt");
    fs::write(
        &script,
        "# two spheres\nmove 1 below ns,ns above ns,ns joint 0,0,3\n",
    )
    .unwrap();
    let o = ghs(&["reduce", p(&with_path), "path:1", p(&script)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(values(&text, "MOVE"), ["1 DESTAB 6 4 CHECK PASS"]);
    assert_eq!(values(&text, "GENUS_AFTER"), ["4"]);

    let split = dir.path().join("split.txt");
    fs::write(
        &split,
        "move 1 below ns above sep:2:3 joint 2@0:B:+,2@0:B:-\n",
    )
    .unwrap();
    let out = dir.path().join("reduced.txt");
    let o = ghs(&[
        "reduce",
        p(&with_path),
        "path:1",
        p(&split),
        "--out",
        p(&out),
    ]);
    assert_eq!(values(&stdout(&o), "MOVE"), ["1 NON_DESTAB 6 6 CHECK PASS"]);
    assert_eq!(stdout(&ghs(&["genus", p(&out), "result"])), "6\n");
}

#[test]
fn reduce_failures_name_the_move() {
    let dir = TempDir::new().unwrap();
    let flip = family_file(&dir, "flip", 2);
    let with_path = dir.path().join("path.txt");
    assert_eq!(
        code(&ghs(&[
            "search",
            p(&flip),
            "--cap",
            "6",
            "--out",
            p(&with_path)
        ])),
        0
    );
    let script = dir.path().join("bad.txt");
    fs::write(
        &script,
        "move 1 below ns above sep:2:3 joint 2@0:B:+,2@0:B:-\nmove 1 below ns above joint 1\n",
    )
    .unwrap();
    let o = ghs(&["reduce", p(&with_path), "path:1", p(&script)]);
    assert_eq!(code(&o), 3);
    assert_eq!(values(&stdout(&o), "FAILED_MOVE"), ["2"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("move 2"));

    fs::write(&script, "move 0 below ns above ns joint 7\n").unwrap();
    let o = ghs(&["reduce", p(&flip), "H^1", p(&script)]);
    assert_eq!(code(&o), 3);
    assert_eq!(values(&stdout(&o), "FAILED_MOVE"), ["1"]);
}

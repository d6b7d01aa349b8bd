use std::path::Path;
use std::process::{Command, Output};

fn peelkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peelkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("PEELKIT_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_points(dir: &Path, name: &str, coords: &[(i64, i64)]) {
    let points: Vec<String> = coords
        .iter()
        .enumerate()
        .map(|(i, (x, y))| format!(r#"{{"id":{i},"x":"{x}/1","y":"{y}/1","path":[]}}"#))
        .collect();
    let text = format!(
        r#"{{"schema_version":1,"n":{},"points":[{}]}}"#,
        coords.len(),
        points.join(",")
    );
    std::fs::write(dir.join(name), text).unwrap();
}

fn convex(n: i64) -> Vec<(i64, i64)> {
    (0..n).map(|i| (i, i * i)).collect()
}

#[test]
fn construct_writes_validated_sets() {
    let dir = tempfile::tempdir().unwrap();
    let o = peelkit(&["construct", "s", "--n", "9", "--out", "s9.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s9.json")).unwrap()).unwrap();
    assert_eq!(file["n"], 9);
    assert_eq!(file["points"].as_array().unwrap().len(), 9);
    assert_eq!(file["schema_version"], 1);

    let o = peelkit(&["construct", "b", "--n", "18", "--ray", "1", "--out", "b.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("14 points"));

    let o = peelkit(&["construct", "s", "--n", "0", "--out", "x.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = peelkit(&["construct", "b", "--n", "8", "--out", "x.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = peelkit(&["construct", "b", "--n", "9", "--ray", "4", "--out", "x.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn count_examples() {
    let dir = tempfile::tempdir().unwrap();
    write_points(dir.path(), "gon5.json", &convex(5));
    write_points(dir.path(), "gon6.json", &convex(6));
    write_points(dir.path(), "tri.json", &[(0, 0), (6, 0), (0, 6), (1, 1)]);
    write_points(dir.path(), "line.json", &[(0, 0), (1, 1), (2, 2)]);

    assert_eq!(stdout(&peelkit(&["count", "--in", "gon5.json"], dir.path())), "120\n");
    let est = peelkit(
        &["count", "--in", "gon6.json", "--estimate", "--samples", "1", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(stdout(&est), "720 ± 0\n");
    assert_eq!(stdout(&peelkit(&["count", "--in", "tri.json"], dir.path())), "18\n");

    let listed = peelkit(&["count", "--in", "tri.json", "--enumerate", "--limit", "2"], dir.path());
    assert_eq!(stdout(&listed), "0 1 2 3\n0 1 3 2\n18\n");

    assert_eq!(peelkit(&["count", "--in", "line.json"], dir.path()).status.code(), Some(2));
    assert_eq!(peelkit(&["count", "--in", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn sequence_checks_and_simplified_sequences() {
    let dir = tempfile::tempdir().unwrap();
    write_points(dir.path(), "tri.json", &[(0, 0), (6, 0), (0, 6), (1, 1)]);
    let ok = peelkit(&["check-sequence", "--in", "tri.json", "--seq", "0,3,1,2"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let bad = peelkit(&["check-sequence", "--in", "tri.json", "--seq", "3,0,1,2"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let short = peelkit(&["check-sequence", "--in", "tri.json", "--seq", "0,1"], dir.path());
    assert_eq!(short.status.code(), Some(2));

    std::fs::write(dir.path().join("singles.json"), "[[0],[1],[2],[3]]").unwrap();
    let o = peelkit(&["simplified", "--in", "tri.json", "--partition", "singles.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simplified sequences: 18\n"));

    peelkit(&["construct", "s", "--n", "9", "--out", "s9.json"], dir.path());
    let o = peelkit(&["simplified", "--in", "s9.json", "--by-rays"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("decomposition lemma holds"));

    peelkit(&["construct", "s", "--n", "13", "--out", "s13.json"], dir.path());
    let o = peelkit(&["simplified", "--in", "s13.json", "--by-rays"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_targets_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = peelkit(&["verify", "base-cases"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("96/96 hold"));

    let o = peelkit(&["verify", "certificate", "--precision", "128"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("28/28 hold"));

    let o = peelkit(&["verify", "theorem", "--nmax", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0));

    let o = peelkit(&["verify", "lemmas", "--nmax", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("13/13 hold"));

    let low = peelkit(&["verify", "certificate", "--precision", "8"], dir.path());
    assert_eq!(low.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&low.stderr).contains("--precision"));

    let env = Command::new(env!("CARGO_BIN_EXE_peelkit"))
        .args(["verify", "certificate"])
        .env("PEELKIT_PRECISION_BITS", "8")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));

    assert_eq!(peelkit(&["verify", "everything"], dir.path()).status.code(), Some(2));
}

#[test]
fn render_and_svg_glyphs() {
    let dir = tempfile::tempdir().unwrap();
    let o = peelkit(
        &["construct", "s", "--n", "9", "--out", "s9.json", "--svg", "s9.svg", "--unflattened"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("s9.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="pt""#).count(), 9);
    assert_eq!(svg.matches(r#"class="ray""#).count(), 12);

    let o = peelkit(&["render", "--in", "s9.json", "--out", "plain.svg"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("plain.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="pt""#).count(), 9);
    assert_eq!(svg.matches(r#"class="ray""#).count(), 0);
}

#[test]
fn run_reports_omit_timings_unless_asked() {
    let dir = tempfile::tempdir().unwrap();
    write_points(dir.path(), "tri.json", &[(0, 0), (6, 0), (0, 6), (1, 1)]);
    peelkit(&["count", "--in", "tri.json", "--report", "r.json"], dir.path());
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["command"], "count");
    assert_eq!(r["outputs"]["count"], "18");
    assert!(r.get("timings").is_none());

    peelkit(&["count", "--in", "tri.json", "--report", "t.json", "--timings"], dir.path());
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(t["timings"]["total_seconds"].is_number());
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn rankone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankone"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rankone-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_shipped_staircase() {
    let out = rankone(&["classify", path(&configs().join("staircase_t.toml"))]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn classify_odometer_fails_verification() {
    let dir = scratch("odo");
    let spec = dir.join("odo.toml");
    std::fs::write(&spec, "label = \"odo\"\nmax_stage = 8\n\n[cuts]\nrule = \"explicit\"\nvalues = [2, 2, 2, 2, 2, 2, 2, 2]\n\n[spacers]\nrule = \"none\"\n").unwrap();
    let out = rankone(&["classify", path(&spec)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_three_with_a_record() {
    let dir = scratch("bad");
    let spec = dir.join("bad.toml");
    std::fs::write(
        &spec,
        "label = \"x\"\nmax_stage = 2\n[cuts]\nrule = \"explicit\"\nvalues = [1, 5]\n",
    )
    .unwrap();
    for args in [
        vec!["stats", path(&spec)],
        vec!["stats", "/nonexistent/spec.toml"],
        vec!["stats", "--bogus-flag", path(&spec)],
        vec![
            "classify",
            "--gamma",
            "not-a-ratio",
            path(&configs().join("staircase_t.toml")),
        ],
    ] {
        let out = rankone(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        let line = String::from_utf8_lossy(&out.stderr);
        let rec: serde_json::Value = serde_json::from_str(line.lines().last().unwrap()).unwrap();
        assert!(rec.get("error").is_some(), "{line}");
    }
}

#[test]
fn partner_round_trip() {
    let dir = scratch("partner");
    let s = dir.join("s.toml");
    let t = configs().join("staircase_t.toml");
    let out = rankone(&[
        "construct-partner",
        path(&t),
        "--out",
        path(&s),
        "--trace",
        path(&dir.join("trace.json")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("trace.json").exists());
    assert_eq!(
        rankone(&["verify-partner", path(&t), path(&s)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        rankone(&["chain-check", path(&t), path(&s)]).status.code(),
        Some(0)
    );
    let odo = dir.join("odo.toml");
    std::fs::write(&odo, "label = \"odo\"\nmax_stage = 12\n\n[cuts]\nrule = \"explicit\"\nvalues = [2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2]\n\n[spacers]\nrule = \"none\"\n").unwrap();
    assert_eq!(
        rankone(&["verify-partner", path(&t), path(&odo)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_is_deterministic_and_matches_persisted_words() {
    let cfg = configs().join("small_pair.toml");
    let (a, b) = (scratch("sweep-a"), scratch("sweep-b"));
    assert_eq!(
        rankone(&["--out-dir", path(&a), "fbar-sweep", path(&cfg)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        rankone(&["--out-dir", path(&b), "fbar-sweep", path(&cfg)])
            .status
            .code(),
        Some(0)
    );
    let ra = std::fs::read(a.join("records.jsonl")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("records.jsonl")).unwrap());

    let first: serde_json::Value =
        serde_json::from_str(std::str::from_utf8(&ra).unwrap().lines().next().unwrap()).unwrap();
    let n = first["n"].as_u64().unwrap().to_string();
    let st = &first["start"];
    let word = |x: &str, y: &str, file: &str| {
        let f = a.join(file);
        let out = rankone(&[
            "code",
            path(&configs().join("small_t.toml")),
            "--stage",
            "2",
            "--len",
            &n,
            "--start",
            x,
            "--partner",
            path(&configs().join("small_s.toml")),
            "--partner-start",
            y,
            "--out",
            path(&f),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        f
    };
    let u = word(
        st["x"].as_str().unwrap(),
        st["y"].as_str().unwrap(),
        "u.txt",
    );
    let v = word(
        st["x_prime"].as_str().unwrap(),
        st["y_prime"].as_str().unwrap(),
        "v.txt",
    );
    let out = rankone(&[
        "--format",
        "records",
        "fbar",
        "--method",
        "exact",
        path(&u),
        path(&v),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rec: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec["fbar"], first["fbar"]);

    let rep = rankone(&[
        "--out-dir",
        path(&a),
        "report",
        path(&a.join("records.jsonl")),
    ]);
    assert_eq!(rep.status.code(), Some(0));
    let table = std::fs::read_to_string(a.join("report.tsv")).unwrap();
    assert!(table.starts_with("subject\tn\tpairs\tmedian"));
    assert!(a.join("plot.gp").exists());
}

#[test]
fn empty_records_exit_two() {
    let dir = scratch("empty");
    let rec = dir.join("records.jsonl");
    std::fs::write(&rec, "").unwrap();
    assert_eq!(
        rankone(&["--out-dir", path(&dir), "report", path(&rec)])
            .status
            .code(),
        Some(2)
    );
}

use std::fs;
use std::process::Command;

use plasmid_archive::codec::Encoding;
use plasmid_archive_cli::{cmd_decode, cmd_encode, cmd_run, Preset, RunOptions, OUT_DIR_ENV};

const BIN: &str = env!("CARGO_BIN_EXE_plasmid-archive");

// Keeps simulation presets to a few seconds.
fn cheap() -> Vec<String> {
    ["time_limit_s=300", "conjugation_time_s=100", "payload.bytes=200", "positioning.duration_s=2", "positioning.n_bacteria=3"]
        .map(String::from)
        .to_vec()
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("payload.bin");
    let data: Vec<u8> = (0..18_400u32).map(|i| (i.wrapping_mul(2_654_435_761) >> 13) as u8).collect();
    fs::write(&input, &data).unwrap();
    for encoding in [Encoding::Basic, Encoding::Goldman] {
        let manifest = dir.path().join(format!("out/{encoding}.toml"));
        let m = cmd_encode(&input, encoding, &manifest, 200).unwrap();
        if encoding == Encoding::Basic {
            assert_eq!(m.total_plasmids, 368);
        }
        let first = fs::read(&manifest).unwrap();
        cmd_encode(&input, encoding, &manifest, 200).unwrap();
        assert_eq!(fs::read(&manifest).unwrap(), first, "encode is idempotent");
        let back = dir.path().join(format!("{encoding}.bin"));
        assert_eq!(cmd_decode(&manifest, &back).unwrap(), data.len());
        assert_eq!(fs::read(&back).unwrap(), data);
    }
}

#[test]
fn empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty");
    fs::write(&input, b"").unwrap();
    let manifest = dir.path().join("empty.toml");
    assert_eq!(cmd_encode(&input, Encoding::Goldman, &manifest, 200).unwrap().total_plasmids, 0);
    let out = dir.path().join("back");
    assert_eq!(cmd_decode(&manifest, &out).unwrap(), 0);
    assert!(fs::read(&out).unwrap().is_empty());
}

#[test]
fn missing_plasmid_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    fs::write(&input, vec![7u8; 500]).unwrap();
    let manifest = dir.path().join("m.toml");
    cmd_encode(&input, Encoding::Basic, &manifest, 200).unwrap();
    let fasta = dir.path().join("m.fasta");
    let text = fs::read_to_string(&fasta).unwrap();
    let kept: Vec<&str> = text.lines().enumerate().filter(|(i, _)| i / 2 != 3).map(|(_, l)| l).collect();
    fs::write(&fasta, kept.join("\n")).unwrap();
    let err = cmd_decode(&manifest, &dir.path().join("x")).unwrap_err();
    assert!(format!("{err:#}").contains("[3]"), "{err:#}");
}

#[test]
fn io_errors_name_the_path() {
    let err = cmd_encode("/nonexistent/input".as_ref(), Encoding::Basic, "/tmp/never.toml".as_ref(), 200).unwrap_err();
    assert!(format!("{err:#}").contains("/nonexistent/input"));
}

fn run(preset: Preset, out: &std::path::Path, jobs: usize, extra: &[&str]) -> Vec<u8> {
    let mut opts = RunOptions::new(preset);
    opts.seed = Some(42);
    opts.out_dir = Some(out.to_path_buf());
    opts.jobs = Some(jobs);
    opts.overrides = cheap();
    opts.overrides.extend(extra.iter().map(|s| s.to_string()));
    let s = cmd_run(&opts).unwrap();
    fs::read(s.csv_path).unwrap()
}

#[test]
fn positioning_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let extra = ["positioning.dest_points_per_circle=1", "positioning.start_points_per_circle=2"];
    let a = run(Preset::Positioning, &dir.path().join("a"), 1, &extra);
    let b = run(Preset::Positioning, &dir.path().join("b"), 3, &extra);
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 4 * 3 * 2);
}

#[test]
fn desk_scale_retrieval_has_36_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut opts = RunOptions::new(Preset::Retrieval);
    opts.out_dir = Some(dir.path().to_path_buf());
    opts.desk_scale = true;
    opts.jobs = Some(2);
    opts.overrides = cheap();
    opts.overrides.push("time_limit_s=150".into());
    let s = cmd_run(&opts).unwrap();
    assert_eq!(s.runs, 36);
    let text = fs::read_to_string(&s.csv_path).unwrap();
    assert_eq!(text.lines().count(), 37);
    assert!(text.starts_with("run_id,seed,kind,"));
    assert!(s.line.contains("36 runs"));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "n_retrievers_per_cluster = 2\n[motility]\nD = 8.0\n").unwrap();
    let mut opts = RunOptions::new(Preset::Retrieval);
    opts.out_dir = Some(dir.path().to_path_buf());
    opts.config = Some(cfg);
    opts.overrides = cheap();
    opts.overrides.push("motility.D=11".into());
    let s = cmd_run(&opts).unwrap();
    let text = fs::read_to_string(s.csv_path).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[5], "2");
    assert_eq!(row[6], "11.0");
}

#[test]
fn binary_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["run", "--preset", "codec-bench", "--desk-scale", "--seed", "1"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(dir.path().join("codec-bench.csv").exists());

    let bad = Command::new(BIN).args(["run", "--preset", "nonsense"]).output().unwrap();
    assert!(!bad.status.success());
    let bad = Command::new(BIN)
        .args(["run", "--preset", "retrieval", "event_dt_s=0.03"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8(bad.stderr).unwrap().contains("event_dt_s"));
}

#[test]
fn trajectory_dump() {
    let dir = tempfile::tempdir().unwrap();
    let mut opts = RunOptions::new(Preset::Retrieval);
    opts.out_dir = Some(dir.path().to_path_buf());
    opts.trajectory = true;
    opts.overrides = cheap();
    opts.overrides.push("n_retrievers_per_cluster=2".into());
    cmd_run(&opts).unwrap();
    let text = fs::read_to_string(dir.path().join("retrieval-trajectory.csv")).unwrap();
    assert!(text.starts_with("t,id,x,y,theta,mode\n"));
    // 5 ticks below the 300 s limit, 8 retrievers
    assert_eq!(text.lines().count(), 1 + 5 * 8);
    opts.preset = Preset::CodecBench;
    assert!(cmd_run(&opts).is_err());
}

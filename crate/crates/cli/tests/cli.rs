use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "scheme,position_m,mean_mbps,ci95_mbps,n_drops,per_ue_mean_mbps";

fn hstsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hstsim"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn means(csv: &str) -> Vec<(String, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (format!("{},{}", f[0], f[1]), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn all_schemes_over_eleven_positions() {
    let out = hstsim(&[
        "--scheme",
        "all",
        "--positions",
        "0:100:1000",
        "--drops",
        "20",
        "--seed",
        "7",
        "--ttis",
        "4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len() - 1, 33);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f.len(), 6);
        assert!(["baseline", "coordination", "cooperation"].contains(&f[0]));
        assert_eq!(f[4], "20");
        let mean: f64 = f[2].parse().unwrap();
        assert!(mean > 0.0 && mean.is_finite());
    }
}

#[test]
fn reruns_are_byte_identical_and_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let args = [
        "--scheme",
        "baseline,relay",
        "--positions",
        "0,500",
        "--drops",
        "3",
        "--seed",
        "11",
        "--ttis",
        "20",
    ];
    for path in [&a, &b] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", path.to_str().unwrap()]);
        assert!(hstsim(&full).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let manifest = dir.path().join("a.csv.manifest");
    let text = fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("# master_seed: 11"));
    assert!(text.contains("# output: "));
    let out = hstsim(&["--config", manifest.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn thicker_walls_never_raise_throughput() {
    let run = |pen: &str| {
        let out = hstsim(&[
            "--scheme",
            "baseline",
            "--positions",
            "0:100:1000",
            "--drops",
            "3",
            "--ttis",
            "30",
            "--penetration-db",
            pen,
        ]);
        assert!(out.status.success());
        means(&stdout(&out))
    };
    let (thin, thick) = (run("10"), run("40"));
    assert_eq!(thin.len(), 11);
    for ((key, a), (_, b)) in thin.iter().zip(&thick) {
        assert!(b <= a, "{key}: 40 dB {b} > 10 dB {a}");
    }
}

#[test]
fn mobility_and_plot_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mob = dir.path().join("mob.csv");
    let svg = dir.path().join("plot.svg");
    let out = hstsim(&[
        "--scheme",
        "all",
        "--positions",
        "0,500",
        "--drops",
        "2",
        "--ttis",
        "5",
        "--mobility-out",
        mob.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mob = fs::read_to_string(mob).unwrap();
    let lines: Vec<&str> = mob.lines().collect();
    assert_eq!(
        lines[0],
        "mode,cell_length_m,speed_kmh,handover_period_s,total_per_ue_handovers,blocked_ues"
    );
    assert!(lines[1].starts_with("per_ue,1000,350,10.28"));
    assert!(lines[1].ends_with(",4600,0"));
    assert!(lines[2].starts_with("moving_cell,50000,350,514.28"));
    assert!(lines[2].ends_with(",0,0"));
    let svg = fs::read_to_string(svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("coordination"));
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# short run\nscheme=relay\npositions_m=500\ndrops_per_point=2\nttis_per_drop=5\n",
    )
    .unwrap();
    let out = hstsim(&["--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = stdout(&out);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("relay,500,"));
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&hstsim(&["--help"])), 0);
    assert_eq!(code(&hstsim(&["--version"])), 0);
    assert_eq!(code(&hstsim(&["--no-such-flag"])), 1);
    assert_eq!(code(&hstsim(&["--scheme", "teleport"])), 1);
    assert_eq!(code(&hstsim(&["--drops", "1"])), 1);
    assert_eq!(
        code(&hstsim(&["--positions", "0:100:2000", "--drops", "2", "--ttis", "1"])),
        1
    );
    assert_eq!(code(&hstsim(&["--penetration-db", "-3"])), 1);
    assert_eq!(code(&hstsim(&["--config", "/nonexistent/run.cfg"])), 1);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "penetration_db=10\ntrain_speed_kmh=-5\n").unwrap();
    let out = hstsim(&["--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("train_speed_kmh") && err.contains("line 2"), "{err}");

    let unwritable = Path::new("/nonexistent/dir/out.csv");
    let out = hstsim(&[
        "--positions",
        "0",
        "--drops",
        "2",
        "--ttis",
        "1",
        "--scheme",
        "baseline",
        "--out",
        unwritable.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

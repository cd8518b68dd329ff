use std::path::Path;
use std::process::{Command, Output};

fn transonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transonic")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn background_mode_writes_branch_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = transonic(&["--mode", "background", "--out", &out_arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("shock_radius = 1.5"));
    for f in ["report.toml", "supersonic.csv", "subsonic.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let table = std::fs::read_to_string(dir.path().join("subsonic.csv")).unwrap();
    assert!(table.starts_with("r,rho,U,P,M\n"));
}

#[test]
fn full_mode_converges_and_dumps_kernels() {
    let dir = tempfile::tempdir().unwrap();
    let out = transonic(&["--mode", "full", "--out", &out_arg(dir.path()), "--dump-kernels"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["history.csv", "shock.csv", "fields.csv", "kernels.csv"] {
        let body = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(body.lines().count() > 1, "{f} has no rows");
    }
    let report = std::fs::read_to_string(dir.path().join("report.toml")).unwrap();
    assert!(report.contains("converged = true"));
}

#[test]
fn iteration_cap_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = transonic(&["--mode", "full", "--max-iters", "1", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged = false"));
}

#[test]
fn config_file_and_grid_scale() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let mut text = transonic::config::RunConfig::default().to_toml();
    text = text.replace("n_r = 32", "n_r = 16").replace("n_theta = 16", "n_theta = 8").replace("n_x3 = 16", "n_x3 = 8");
    text = text.replace("modes_theta = 12", "modes_theta = 6").replace("modes_x3 = 12", "modes_x3 = 6");
    std::fs::write(&cfg, text).unwrap();
    let out = transonic(&["--config", cfg.to_str().unwrap(), "--mode", "inflow", "--grid-scale", "2", "--out", &out_arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("grid = [32, 16, 16]"));
}

#[test]
fn bad_config_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let text = transonic::config::RunConfig::default().to_toml().replace("mach = 2.0", "mach = 0.5");
    std::fs::write(&cfg, text).unwrap();
    let out = transonic(&["--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inlet.mach"));
}

#[test]
fn sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = transonic(&["--mode", "sweep", "--out", &out_arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let r: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(r.len(), 5);
    assert!(r.windows(2).all(|w| w[1] < w[0]));
}

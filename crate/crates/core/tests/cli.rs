use std::path::Path;
use std::process::{Command, Output};

fn plap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(args)
        .env("PLAP_OUTPUT_DIR", dir)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Data rows split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let mut fields = Vec::new();
            let mut cur = String::new();
            let mut quoted = false;
            for c in l.chars() {
                match c {
                    '"' => quoted = !quoted,
                    ',' if !quoted => fields.push(std::mem::take(&mut cur)),
                    _ => cur.push(c),
                }
            }
            fields.push(cur);
            fields
        })
        .collect()
}

fn detail(row: &[String], name: &str) -> f64 {
    row[13]
        .split(';')
        .find_map(|kv| kv.strip_prefix(&format!("{name}=")))
        .unwrap_or_else(|| panic!("no detail {name} in {}", row[13]))
        .parse()
        .unwrap()
}

#[test]
fn model_eigen_writes_to_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = plap(&["model-eigen", "--n", "2", "--K", "0", "--r", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("model-eigen.csv")).unwrap();
    assert!(text.starts_with("# plap "));
    assert!(text.lines().any(|l| l.starts_with("# config-sha256: ")));
    assert!(text.lines().any(|l| l == plap_core::cli::COLUMNS));
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    let lambda = detail(&r[0], "lambda");
    assert!((lambda - 5.783_185_962_946_784).abs() < 1e-6 * lambda);
}

#[test]
fn explicit_output_path_wins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/hemisphere.csv");
    let out = plap(
        &["warped-eigen", "--profile", "sphere:1", "--radius", "1.5707963267948966", "--output", path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = rows(&std::fs::read_to_string(&path).unwrap());
    assert!((detail(&r[0], "lambda") - 2.0).abs() < 1e-6);
    assert!(!dir.path().join("warped-eigen.csv").exists());
}

#[test]
fn invalid_configuration_lists_every_violation_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = plap(&["verify", "cheng", "--profile", "torus", "--p", "0.5", "--K", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert_eq!(msg.matches("invalid configuration").count(), 1, "{msg}");
    assert!(msg.contains("torus"));
    assert!(msg.contains("--p"));
    assert!(msg.contains("--radius"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn violated_check_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // alpha = 1 is too small on a perturbed sphere: the Obata check must report it
    let out = plap(&["verify", "obata", "--profile", "perturbed-sphere:0.08,2", "--K", "1", "--p", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("FAILED"));
    let r = rows(&std::fs::read_to_string(dir.path().join("verify-obata.csv")).unwrap());
    assert_eq!(r[0][12], "violated");
    let required = detail(&r[0], "alpha_required");
    let ok = plap(
        &["verify", "obata", "--profile", "perturbed-sphere:0.08,2", "--K", "1", "--alpha", &format!("{}", required * 1.0001)],
        dir.path(),
    );
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
}

#[test]
fn lichnerowicz_with_auto_min_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = plap(
        &["verify", "lichnerowicz", "--profile", "perturbed-sphere:0.03,2", "--p", "2", "--q", "2", "--K", "auto-min"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn amplitude_sweep_shrinks_the_isoperimetric_constant() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--axis", "a", "--values", "0.08,0.04,0.02,0.01", "--target", "isoperimetric",
        "--profile", "perturbed-sphere:0.08,2", "--K", "1", "--radius", "1",
    ];
    let out = plap(&args, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("sweep-isoperimetric-a.csv")).unwrap();
    let r = rows(&text);
    assert_eq!(r.len(), 4);
    let dev: Vec<f64> = r.iter().map(|row| (detail(row, "alpha_min") - 1.0).abs()).collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
    let norms: Vec<f64> = r.iter().map(|row| row[11].parse().unwrap()).collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    assert_eq!(r[0][1], "a=0.08");
}

#[test]
fn radius_sweep_is_monotone_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--axis", "r", "--values", "0.5,1,1.5,2", "--profile", "sphere", "--K", "1", "--p", "3"];
    let first = plap(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let path = dir.path().join("sweep-model-eigen-radius.csv");
    let a = std::fs::read(&path).unwrap();
    let lambdas: Vec<f64> = rows(&String::from_utf8_lossy(&a)).iter().map(|r| detail(r, "lambda")).collect();
    assert!(lambdas.windows(2).all(|w| w[1] < w[0]), "{lambdas:?}");

    let mut jobs = args.to_vec();
    jobs.extend(["--jobs", "3"]);
    plap(&jobs, dir.path());
    assert_eq!(a, std::fs::read(&path).unwrap());
}

#[test]
fn failures_inside_a_sweep_become_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    // p = 0.5 is invalid; the other values still run
    let out = plap(&["sweep", "--axis", "p", "--values", "2,0.5,3", "--K", "1", "--radius", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = rows(&std::fs::read_to_string(dir.path().join("sweep-model-eigen-p.csv")).unwrap());
    let verdicts: Vec<&str> = r.iter().map(|row| row[12].as_str()).collect();
    assert_eq!(verdicts.iter().filter(|v| **v == "error").count(), 1, "{verdicts:?}");
    assert_eq!(r.len(), 3);
}

#[test]
fn stdout_without_destination() {
    let out = Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(["curvature", "--profile", "perturbed-sphere:0.05,2", "--K", "1", "--q", "2,3"])
        .env_remove("PLAP_OUTPUT_DIR")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == plap_core::cli::COLUMNS));
}

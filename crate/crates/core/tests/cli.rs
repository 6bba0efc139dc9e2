use std::path::Path;
use std::process::{Command, Output};

fn moinst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moinst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &str = r#"
problems = ["zdt1-d2"]
repetitions = 2
base_seed = 3
[[search_transforms]]
kind = "beta_cdf"
alpha = 0.5
beta = 2.0
[[algorithms]]
name = "random_search"
population = 10
budget = 200
[[algorithms]]
name = "nsga2"
population = 10
budget = 200
"#;

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out");
    let o = moinst(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--parallel",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["config.toml", "runs.jsonl", "runs.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }

    let input = out.to_str().unwrap();
    let relative = moinst(&["report", "--in", input, "--kind", "relative"]);
    assert!(relative.status.success());
    let text = stdout(&relative);
    assert!(text.lines().next().unwrap().contains("family"));
    assert!(text.contains("beta-cdf-search"));

    let runs = moinst(&["report", "--in", input, "--kind", "runs"]);
    // header plus 2 instances x 2 algorithms x 2 repetitions
    assert_eq!(stdout(&runs).lines().count(), 9);

    let curve_path = dir.path().join("curve.csv");
    let curve = moinst(&[
        "report",
        "--in",
        input,
        "--kind",
        "over-time",
        "--algo",
        "nsga2",
        "--transform",
        "beta-a0.5-b2",
        "--out",
        curve_path.to_str().unwrap(),
    ]);
    assert!(curve.status.success());
    let curve = std::fs::read_to_string(curve_path).unwrap();
    assert!(curve.lines().skip(1).all(|l| l.contains("nsga2") && l.contains("s:beta-a0.5-b2")));
}

#[test]
fn density_of_right_angle_is_zero() {
    let o = moinst(&["density", "--transform", "rot-angle0", "--n", "100"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim().parse::<f64>().unwrap() < 1e-12);
    let o = moinst(&["density", "--transform", "beta-a5-b5", "--n", "100"]);
    assert!(stdout(&o).trim().parse::<f64>().unwrap() > 0.0);
}

#[test]
fn list_shows_problems() {
    let o = moinst(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("zdt3-d2") && text.contains("mmf1-d2") && text.contains("moead"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(moinst(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(moinst(&["--help"]).status.code(), Some(0));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "problems = [\"nope-d2\"]\n[[algorithms]]\nname = \"nsga2\"\npopulation = 10\nbudget = 100\n").unwrap();
    let o = moinst(&["run", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let missing = dir.path().join("absent");
    let o = moinst(&["report", "--in", missing.to_str().unwrap(), "--kind", "runs"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!Path::new(&missing).exists());
}

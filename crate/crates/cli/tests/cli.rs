use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use omega_cli::exit;

fn omega(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_csv(dir: &Path, name: &str, rows: &[(usize, f64)]) -> String {
    let path = dir.join(name);
    let mut text = String::from("step,distance,payoff\n");
    for (step, d) in rows {
        text.push_str(&format!("{step},{d},0\n"));
    }
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_preset_writes_full_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("omega.csv");
    let res = omega(&["run", "--preset", "bilinear_omega", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    assert!(stdout(&res).contains("diverged: false"));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,distance,payoff");
    assert!(lines[1].starts_with("0,"));
    assert!(lines.last().unwrap().starts_with("1000,"));
    assert_eq!(lines.len(), 1 + 101);
}

#[test]
fn divergence_is_not_an_error() {
    let res = omega(&[
        "run",
        "--preset",
        "quadratic_sgd",
        "--set",
        "optimizer_x.eta=5",
        "--set",
        "game.d_x=10",
        "--set",
        "game.d_y=10",
        "--set",
        "game.n=10",
    ]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    assert!(stderr(&res).contains("diverged: true"));
    assert!(stdout(&res).starts_with("step,distance,payoff\n"));
}

#[test]
fn unwritable_output_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing").join("out.csv");
    let res = omega(&[
        "run",
        "--preset",
        "bilinear_omega",
        "--set",
        "run.steps=5",
        "--out",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), exit::IO);
    assert!(!missing.exists());

    let locked = dir.path().join("locked");
    fs::create_dir(&locked).unwrap();
    let target = locked.join("out.csv");
    let mut perms = fs::metadata(&locked).unwrap().permissions();
    perms.set_readonly(true);
    fs::set_permissions(&locked, perms.clone()).unwrap();
    let res = omega(&[
        "run",
        "--preset",
        "bilinear_omega",
        "--set",
        "run.steps=5",
        "--out",
        target.to_str().unwrap(),
    ]);
    #[allow(clippy::permissions_set_readonly_false)]
    perms.set_readonly(false);
    fs::set_permissions(&locked, perms).unwrap();
    // root ignores directory permissions; then the write simply succeeds
    if code(&res) != exit::OK {
        assert_eq!(code(&res), exit::IO);
        assert!(!target.exists());
        assert_eq!(fs::read_dir(&locked).unwrap().count(), 0);
    }
}

#[test]
fn config_errors_exit_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "[game]\nkind = \"bilinear\"\n[optimizer_x]\nkind = \"sgd\"\neta = -0.1\n",
    )
    .unwrap();
    let res = omega(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&res), exit::USAGE);
    assert!(stderr(&res).contains("optimizer_x.eta"));

    fs::write(&path, "[game]\nkind = \"bilinear\"\n\n[run\n").unwrap();
    let res = omega(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&res), exit::USAGE);
    assert!(stderr(&res).contains("line 4"), "{}", stderr(&res));

    let res = omega(&["run", "--preset", "bilinear_omega", "--set", "run.stepz=3"]);
    assert_eq!(code(&res), exit::USAGE);
    assert!(stderr(&res).contains("run.stepz"));

    let res = omega(&["run", "--preset", "nope"]);
    assert_eq!(code(&res), exit::USAGE);

    let res = omega(&["run", "--config", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(code(&res), exit::IO);

    let res = omega(&["frobnicate"]);
    assert_eq!(code(&res), exit::USAGE);
}

#[test]
fn sweep_batch_sizes_two_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table1.csv");
    let res = omega(&[
        "sweep",
        "--preset",
        "bilinear_isog",
        "--preset",
        "bilinear_omega",
        "--set",
        "game.d_x=10",
        "--set",
        "game.d_y=10",
        "--set",
        "game.n=20",
        "--axis",
        "batch_size",
        "--values",
        "1,5,10,20",
        "--at-step",
        "200",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "batch_size,bilinear_isog,bilinear_omega");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));
    assert!(stdout(&res).contains("bilinear_omega"));
}

#[test]
fn sweep_is_independent_of_job_count() {
    let args = |jobs: &str| {
        omega(&[
            "sweep",
            "--preset",
            "quadratic_omega",
            "--set",
            "game.d_x=8",
            "--set",
            "game.d_y=8",
            "--set",
            "game.n=10",
            "--axis",
            "beta",
            "--values",
            "0,0.5,0.9,0.99",
            "--at-step",
            "100",
            "--jobs",
            jobs,
        ])
    };
    let (a, b) = (args("1"), args("4"));
    assert_eq!(code(&a), exit::OK, "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 5);
}

#[test]
fn sweep_usage_errors() {
    let res = omega(&["sweep", "--preset", "bilinear_omega", "--axis", "beta", "--values", ""]);
    assert_eq!(code(&res), exit::USAGE);
    let res = omega(&[
        "sweep",
        "--preset",
        "bilinear_omega",
        "--axis",
        "gamma",
        "--values",
        "0.5",
    ]);
    assert_eq!(code(&res), exit::USAGE);
    let res = omega(&[
        "sweep",
        "--preset",
        "bilinear_omega",
        "--axis",
        "kappa_a",
        "--values",
        "10",
    ]);
    assert_eq!(code(&res), exit::USAGE);
}

#[test]
fn nash_on_explicit_samples() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("game.json");
    fs::write(
        &game,
        r#"{"samples":[{"coupling":[[1.0]],"lin_x":[0.5],"lin_y":[-0.3]}]}"#,
    )
    .unwrap();
    let out = dir.path().join("w.csv");
    let res = omega(&[
        "nash",
        "--game-json",
        game.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    let text = stdout(&res);
    assert!(text.contains("x* = [-0.3]"), "{text}");
    assert!(text.contains("y* = [-0.5]"), "{text}");
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("block,index,value\nx,0,-0.3"));
}

#[test]
fn nash_singular_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("game.json");
    fs::write(
        &game,
        r#"{"samples":[
            {"coupling":[[1.0, 0.0],[0.0, 1.0]],"lin_x":[0.5, 0.1],"lin_y":[0.0, 0.2]},
            {"coupling":[[1.0, 0.0],[0.0, -1.0]],"lin_x":[0.5, 0.1],"lin_y":[0.0, 0.2]}
        ]}"#,
    )
    .unwrap();
    let res = omega(&["nash", "--game-json", game.to_str().unwrap()]);
    assert_eq!(code(&res), exit::NO_EQUILIBRIUM);
    assert!(stderr(&res).contains("bilinear"));

    fs::write(
        &game,
        r#"{"samples":[{"coupling":[[1.0],[2.0, 3.0]],"lin_x":[0.5],"lin_y":[0.1]}]}"#,
    )
    .unwrap();
    assert_eq!(
        code(&omega(&["nash", "--game-json", game.to_str().unwrap()])),
        exit::MALFORMED_INPUT
    );
    fs::write(&game, "{not json").unwrap();
    assert_eq!(
        code(&omega(&["nash", "--game-json", game.to_str().unwrap()])),
        exit::MALFORMED_INPUT
    );
}

#[test]
fn nash_on_generated_quadratic() {
    let res = omega(&["nash", "--set", "game.kind=quadratic", "--seed", "3"]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    let text = stdout(&res);
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual <= 1e-8);
    assert!(text.contains("|x*| = "));
}

#[test]
fn table_reads_preceding_log_point() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_csv(dir.path(), "a.csv", &[(0, 3.0), (10, 2.0), (20, 1.0)]);
    let b = write_csv(dir.path(), "b.csv", &[(0, 5.0), (20, 4.0)]);
    let out = dir.path().join("t.csv");
    let res = omega(&["table", &a, &b, "--at-step", "15", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,a,b");
    let cells: Vec<f64> = lines[1].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert_eq!(cells, vec![2.0, 5.0]);
}

#[test]
fn plot_minimal_chart() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_csv(dir.path(), "only.csv", &[(0, 2.0), (10, 1.0)]);
    let res = omega(&["plot", &a]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    let svg = stdout(&res);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 1);
    let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(points.split(' ').count(), 2);
}

#[test]
fn plot_log_axis_clamps_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_csv(dir.path(), "z.csv", &[(0, 1.0), (10, 0.0)]);
    let res = omega(&["plot", &a, "--log-y"]);
    assert_eq!(code(&res), exit::OK);
    assert!(stderr(&res).contains("warning"));
    assert!(stderr(&res).contains("1e-16"));
    assert!(stdout(&res).contains("1e-16"));
}

#[test]
fn plot_three_series_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<String> = ["sgd", "isog", "omega"]
        .iter()
        .enumerate()
        .map(|(i, name)| {
            write_csv(
                dir.path(),
                &format!("{name}.csv"),
                &[(0, 3.0), (10, 2.0 + i as f64), (20, 1.5)],
            )
        })
        .collect();
    let out_a = dir.path().join("a.svg");
    let out_b = dir.path().join("b.svg");
    for out in [&out_a, &out_b] {
        let mut args = vec!["plot"];
        args.extend(files.iter().map(String::as_str));
        args.extend(["--log-y", "--title", "Bilinear", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&omega(&args)), exit::OK);
    }
    let a = fs::read(&out_a).unwrap();
    assert_eq!(a, fs::read(&out_b).unwrap());
    let svg = String::from_utf8(a).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
    assert_eq!(svg.matches("class=\"legend\"").count(), 3);
    for name in ["sgd", "isog", "omega"] {
        assert!(svg.contains(&format!(">{name}</text>")));
    }
}

#[test]
fn plot_malformed_csv_names_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "step,distance,payoff\n0,1.0,0\n10,oops,0\n").unwrap();
    let res = omega(&["plot", path.to_str().unwrap()]);
    assert_eq!(code(&res), exit::MALFORMED_INPUT);
    assert!(stderr(&res).contains("row 3"), "{}", stderr(&res));
}

#[test]
fn run_then_plot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("quad.csv");
    let res = omega(&[
        "run",
        "--preset",
        "quadratic_omega",
        "--set",
        "game.d_x=10",
        "--set",
        "game.d_y=10",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    let res = omega(&["plot", csv.to_str().unwrap(), "--log-y", "--smooth", "3"]);
    assert_eq!(code(&res), exit::OK, "{}", stderr(&res));
    assert_eq!(stdout(&res).matches("<polyline").count(), 1);
}

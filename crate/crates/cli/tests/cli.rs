use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn chemoeda(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemoeda"))
        .current_dir(dir)
        .env_remove("CHEMOEDA_OUT")
        .env_remove("RUST_LOG")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn summary_file(dir: &Path, label: &str, protocol: &str, mean: f64, std: f64) -> String {
    let name = format!("{label}.results.csv");
    write(
        dir,
        &name,
        &format!("# label: {label}\n# protocol: {protocol}\n# summary\n# n: 30\n# mean: {mean}\n# std: {std}\n"),
    );
    name
}

/// Data rows of a CSV output file.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn validate_default_instance() {
    let tmp = TempDir::new().unwrap();
    let o = chemoeda(tmp.path(), &["validate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("valid: 10 dose times, 10 drugs"));
    assert!(out.contains("untreated tumour exceeds n_max"), "{out}");
}

#[test]
fn validate_reports_every_violation() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "bad.instance", "n0 = 2e12\nlambda = -1\n");
    let o = chemoeda(tmp.path(), &["validate", "bad.instance"]);
    assert_eq!(o.status.code(), Some(4));
    let out = stdout(&o);
    assert!(out.contains("n0 < theta"), "{out}");
    assert!(out.contains("lambda"), "{out}");
}

#[test]
fn validate_unknown_key_is_a_parse_error() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "bad.instance", "s = 2\nspeed = 3\n");
    let o = chemoeda(tmp.path(), &["validate", "bad.instance"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("speed") && err.contains("line 2"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(
        chemoeda(tmp.path(), &["run", "umda", "--frobnicate"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(chemoeda(tmp.path(), &["plotdata"]).status.code(), Some(2));
    assert_eq!(chemoeda(tmp.path(), &["run", "sga"]).status.code(), Some(2));
    assert_eq!(
        chemoeda(tmp.path(), &["run", "umda", "--set", "colour=red"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn run_trace_is_monotone_and_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "run",
        "umda",
        "--pop",
        "112",
        "--select",
        "tournament:6",
        "--budget",
        "3000",
        "--seed",
        "4",
    ];
    for dir in [&a, &b] {
        let o = chemoeda(dir.path(), &args);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in ["run-umda-seed4.trace.csv", "run-umda-seed4.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
    let trace = fs::read_to_string(a.path().join("run-umda-seed4.trace.csv")).unwrap();
    assert!(trace.contains("# instance_hash: "));
    assert!(trace.contains(
        "# spec: optimizer=umda; seed=4; instance=default; pop=112; select=tournament:6"
    ));
    let best: Vec<f64> = rows(&trace).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(best.len() > 2);
    assert!(best.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn run_hboa_reports_first_feasible() {
    let tmp = TempDir::new().unwrap();
    let o = chemoeda(
        tmp.path(),
        &[
            "run",
            "hboa",
            "--pop",
            "400",
            "--select",
            "truncation:40",
            "--stop-on-feasible",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("first feasible at evaluation"),
        "{}",
        stdout(&o)
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run-hboa-seed1.json")).unwrap())
            .unwrap();
    assert!(json["record"]["first_feasible"].as_u64().is_some());
    assert_eq!(json["record"]["stop_reason"], "feasible_found");
}

#[test]
fn flags_override_set_and_instance_overrides_change_hash() {
    let tmp = TempDir::new().unwrap();
    let o = chemoeda(
        tmp.path(),
        &[
            "-v",
            "run",
            "ga",
            "--set",
            "pop=50",
            "--pop",
            "60",
            "--budget",
            "200",
            "--set",
            "n_max=1.5e9",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("--pop overrides `pop`: 50 -> 60"), "{err}");
    assert!(err.contains("--set overrides instance `n_max`"), "{err}");
    let trace = fs::read_to_string(tmp.path().join("run-ga-seed1.trace.csv")).unwrap();
    assert!(trace.contains("pop=60;"));
    let default_hash = stdout(&chemoeda(tmp.path(), &["validate"]))
        .lines()
        .find_map(|l| l.strip_prefix("instance_hash: ").map(str::to_string))
        .unwrap();
    assert!(!trace.contains(&default_hash));
}

#[test]
fn out_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("results");
    let o = Command::new(env!("CARGO_BIN_EXE_chemoeda"))
        .current_dir(tmp.path())
        .env("CHEMOEDA_OUT", &out)
        .args(["linkage", "--onemax", "8"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.join("linkage-seed1.csv").exists());
}

const UMDA_SPEC: &str = "label = umda\noptimizer = umda\nprotocol = efficiency\nruns = 6\npop = 112\nselect = tournament:6\n";

#[test]
fn efficiency_experiment_writes_rows_and_footer() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "umda.spec", UMDA_SPEC);
    let o = chemoeda(tmp.path(), &["experiment", "umda.spec"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("umda.results.csv")).unwrap();
    assert_eq!(rows(&text).iter().filter(|r| r.len() == 5).count(), 6);
    assert!(text.contains("# summary\n# runs: 6\n# censored: 0\n# n: 6\n"));
    assert!(text.contains(
        "# spec: label=umda; instance=default; optimizer=umda; protocol=efficiency; runs=6"
    ));
    assert!(tmp.path().join("umda.results.csv.meta.json").exists());
}

#[test]
fn quality_experiment_uses_the_whole_cap() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "q.spec",
        "label = q\noptimizer = umda\nprotocol = quality\nruns = 2\ncap = 200000\npop = 160\nselect = truncation:0.5\n",
    );
    let o = chemoeda(tmp.path(), &["experiment", "q.spec"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("q.results.csv")).unwrap();
    let rows = rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[4] == "200000"));
}

#[test]
fn experiment_flags_override_spec() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "umda.spec", UMDA_SPEC);
    let o = chemoeda(
        tmp.path(),
        &["experiment", "umda.spec", "--runs", "3", "--seed", "40"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("umda.results.csv")).unwrap();
    let seeds: Vec<String> = rows(&text).iter().map(|r| r[1].clone()).collect();
    assert_eq!(seeds, ["40", "41", "42"]);
}

#[test]
fn experiment_with_one_run_is_rejected() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "umda.spec", UMDA_SPEC);
    let o = chemoeda(tmp.path(), &["experiment", "umda.spec", "--runs", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 2 runs"));
}

#[test]
fn experiment_spec_errors_name_the_line() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "bad.spec", "optimizer = umda\nruns = many\n");
    let o = chemoeda(tmp.path(), &["experiment", "bad.spec"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn experiment_reads_instance_relative_to_spec() {
    let tmp = TempDir::new().unwrap();
    let sub = tmp.path().join("specs");
    fs::create_dir(&sub).unwrap();
    write(
        &sub,
        "easy.instance",
        "n_max = 1e12\nc_seff = 1e4, 1e4, 1e4, 1e4\n",
    );
    write(
        &sub,
        "easy.spec",
        "label = easy\ninstance = easy.instance\noptimizer = ga\nruns = 2\npop = 20\n",
    );
    let o = chemoeda(tmp.path(), &["experiment", "specs/easy.spec"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("easy.results.csv")).unwrap();
    // the all-feasible instance is solved in the initial population
    assert!(rows(&text)
        .iter()
        .all(|r| r[2].parse::<f64>().unwrap() <= 20.0));
}

#[test]
fn experiment_is_byte_identical_across_executions() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        write(dir.path(), "umda.spec", UMDA_SPEC);
        assert!(
            chemoeda(dir.path(), &["experiment", "umda.spec", "--jobs", "2"])
                .status
                .success()
        );
    }
    for name in ["umda.results.csv", "umda.results.csv.meta.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn compare_identical_summaries() {
    let tmp = TempDir::new().unwrap();
    let a = summary_file(tmp.path(), "a", "efficiency", 100.0, 10.0);
    let b = summary_file(tmp.path(), "b", "efficiency", 100.0, 10.0);
    let o = chemoeda(tmp.path(), &["compare", &a, &b]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][4].parse::<f64>().unwrap(), 0.0);
    assert_eq!(r[0][5].parse::<f64>().unwrap(), 1.0);
    assert!(tmp.path().join("comparison.csv").exists());
}

#[test]
fn compare_reproduces_reference_standard_errors() {
    let tmp = TempDir::new().unwrap();
    let u = summary_file(tmp.path(), "umda", "efficiency", 2695.5, 490.3);
    let h = summary_file(tmp.path(), "hboa", "efficiency", 7917.6, 843.0);
    let g = summary_file(tmp.path(), "ga", "efficiency", 16208.1, 12045.8);
    let o = chemoeda(tmp.path(), &["compare", &u, &h, &g]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    let pairs: Vec<(&str, &str)> = r.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(pairs, [("umda", "hboa"), ("umda", "ga"), ("hboa", "ga")]);
    let se = |i: usize| r[i][3].parse::<f64>().unwrap();
    assert!((se(0) - 178.05).abs() <= 0.01, "{}", se(0));
    assert!((se(1) - 2201.07).abs() <= 0.01, "{}", se(1));
}

#[test]
fn compare_rejects_mixed_protocols() {
    let tmp = TempDir::new().unwrap();
    let a = summary_file(tmp.path(), "a", "efficiency", 100.0, 10.0);
    let b = summary_file(tmp.path(), "b", "quality", 0.4, 0.01);
    let o = chemoeda(tmp.path(), &["compare", &a, &b]);
    assert!(!o.status.success());
}

#[test]
fn plotdata_echoes_summaries() {
    let tmp = TempDir::new().unwrap();
    let table = [
        ("umda", 2695.5, 490.3),
        ("hboa", 7917.6, 843.0),
        ("ga", 16208.1, 12045.8),
        ("pbil", 5959.5, 522.4),
        ("deum", 5015.8, 1426.9),
    ];
    let files: Vec<String> = table
        .iter()
        .map(|(l, m, s)| summary_file(tmp.path(), l, "efficiency", *m, *s))
        .collect();
    let one = chemoeda(tmp.path(), &["plotdata", &files[0]]);
    assert_eq!(rows(&stdout(&one)).len(), 1);

    let args: Vec<&str> = std::iter::once("plotdata")
        .chain(files.iter().map(String::as_str))
        .collect();
    let o = chemoeda(tmp.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&fs::read_to_string(tmp.path().join("plotdata.csv")).unwrap());
    assert_eq!(r.len(), 5);
    for (row, (l, m, s)) in r.iter().zip(table) {
        assert_eq!(row[0], l);
        assert_eq!(row[1].parse::<f64>().unwrap(), m);
        assert_eq!(row[2].parse::<f64>().unwrap(), s);
    }
}

#[test]
fn linkage_on_tiny_instance() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "tiny.instance", "s = 2\nd = 2\n");
    let start = std::time::Instant::now();
    let o = chemoeda(
        tmp.path(),
        &["linkage", "--instance", "tiny.instance", "--seed", "5"],
    );
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("of 120 pairs interact (density"),
        "{}",
        stdout(&o)
    );
    let text = fs::read_to_string(tmp.path().join("linkage-seed5.csv")).unwrap();
    assert!(text.contains("# L = 16\n"));
    assert!(text.contains("# instance_hash = "));
}

#[test]
fn linkage_onemax_control_has_no_pairs() {
    let tmp = TempDir::new().unwrap();
    let o = chemoeda(tmp.path(), &["linkage", "--onemax", "30"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("0 of 435 pairs"), "{}", stdout(&o));
}

#[test]
fn linkage_is_byte_identical_across_executions() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        write(dir.path(), "small.instance", "s = 4\nd = 4\n");
        assert!(chemoeda(
            dir.path(),
            &["linkage", "--instance", "small.instance", "--seed", "2"]
        )
        .status
        .success());
    }
    let name = "linkage-seed2.csv";
    assert_eq!(
        fs::read(a.path().join(name)).unwrap(),
        fs::read(b.path().join(name)).unwrap()
    );
}

#[test]
fn bisect_prints_a_population() {
    let tmp = TempDir::new().unwrap();
    let o = chemoeda(
        tmp.path(),
        &[
            "bisect",
            "umda",
            "--select",
            "tournament:6",
            "--lo",
            "20",
            "--hi",
            "40",
            "--trials",
            "3",
            "--cap",
            "20000",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let pop: usize = out.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(pop >= 20, "{out}");
}

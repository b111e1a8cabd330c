use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use chemoeda::harness::{
    bisection_population, compare_all, comparison_to_string, plotdata_to_string, read_results,
    run_experiment, write_results, BisectionSettings, ExperimentSpec, ExperimentSummary, Metadata,
};
use chemoeda::linkage::detect_interactions;
use chemoeda::model::tumour_trajectory;
use chemoeda::objective::OneMax;
use chemoeda::{
    run_optimizer, ChemoObjective, DoseSchedule, Error, OptimizerConfig, OptimizerKind, Result,
    RunRecord,
};

use crate::args::{
    BisectArgs, Cli, Command, ExperimentArgs, Global, LinkageArgs, OptimizerFlags, RunArgs,
};
use crate::settings::{instance_source, load_instance, parse_sets, set_config, set_spec};
use crate::EXIT_INVARIANT;

const DEFAULT_SEED: u64 = 1;

pub fn dispatch(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { instance } => validate(g, instance.as_deref()),
        Command::Run(a) => run(g, a),
        Command::Experiment(a) => experiment(g, a),
        Command::Compare { files } => compare(g, files),
        Command::Linkage(a) => linkage(g, a),
        Command::Plotdata { files } => plotdata(g, files),
        Command::Bisect(a) => bisect(g, a),
    }
}

fn write_out(g: &Global, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(&g.out)?;
    let path = g.out.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn validate(g: &Global, path: Option<&Path>) -> Result<u8> {
    let sets = parse_sets(&g.set)?;
    let (inst, rest) = load_instance(path, &sets)?;
    if let Some((k, _)) = rest.first() {
        return Err(Error::Config(format!("`{k}` is not an instance key")));
    }
    println!("instance: {}", instance_source(path));
    if let Err(Error::Invariant(v)) = inst.validate() {
        println!("invalid: {} invariant violation(s)", v.names().len());
        for name in v.names() {
            println!("  violated: {name}");
        }
        return Ok(EXIT_INVARIANT);
    }
    println!(
        "valid: {} dose times, {} drugs, {} organs, {} bits",
        inst.s,
        inst.d,
        inst.organs(),
        inst.chromosome_len()
    );
    println!("instance_hash: {}", inst.content_hash());
    let traj = tumour_trajectory(&DoseSchedule::zeros(inst.s, inst.d), &inst)?;
    println!("untreated trajectory (n_max = {:e}):", inst.n_max);
    for (t, n) in inst.dose_times.iter().zip(&traj.sizes) {
        println!("  t = {t}: N = {n:e}");
    }
    match traj.first_exceeding(inst.n_max) {
        Some(i) => println!(
            "untreated tumour exceeds n_max at t = {}",
            inst.dose_times[i]
        ),
        None => println!("untreated tumour stays below n_max over the horizon"),
    }
    Ok(0)
}

/// Optimizer config from defaults, then `--set`, then dedicated flags.
fn optimizer_config(flags: &OptimizerFlags, rest: &[(String, String)]) -> Result<OptimizerConfig> {
    let mut cfg = OptimizerConfig::default();
    for (k, v) in rest {
        set_config(&mut cfg, k, v, "--set")?;
    }
    if let Some(p) = flags.pop {
        set_config(&mut cfg, "pop", &p.to_string(), "--pop")?;
    }
    if let Some(s) = &flags.select {
        set_config(&mut cfg, "select", s, "--select")?;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct RunFile<'a> {
    tool_version: &'a str,
    instance: String,
    instance_hash: String,
    record: &'a RunRecord,
}

fn run(g: &Global, a: &RunArgs) -> Result<u8> {
    let kind: OptimizerKind = a.kind.parse()?;
    let sets = parse_sets(&g.set)?;
    let (inst, rest) = load_instance(a.opt.instance.as_deref(), &sets)?;
    let mut cfg = optimizer_config(&a.opt, &rest)?;
    if let Some(b) = a.budget {
        set_config(&mut cfg, "budget", &b.to_string(), "--budget")?;
    }
    if a.stop_on_feasible {
        set_config(&mut cfg, "stop_on_feasible", "true", "--stop-on-feasible")?;
    }
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let source = instance_source(a.opt.instance.as_deref());
    let hash = inst.content_hash();
    let obj = ChemoObjective::new(inst)?;
    let rec = run_optimizer(kind, &obj, &cfg, seed)?;

    let mut echo = vec![
        format!("optimizer={kind}"),
        format!("seed={seed}"),
        format!("instance={source}"),
    ];
    echo.extend(cfg.to_pairs().into_iter().map(|(k, v)| format!("{k}={v}")));
    let mut trace = String::from("# chemoeda run trace\n");
    let _ = writeln!(trace, "# tool_version: {}", chemoeda::VERSION);
    let _ = writeln!(trace, "# instance_hash: {hash}");
    let _ = writeln!(trace, "# spec: {}", echo.join("; "));
    trace.push_str("generation,evaluations,best,mean\n");
    for s in &rec.trace {
        let _ = writeln!(
            trace,
            "{},{},{:?},{:?}",
            s.generation, s.evaluations, s.best, s.mean
        );
    }
    let file = RunFile {
        tool_version: chemoeda::VERSION,
        instance: source,
        instance_hash: hash,
        record: &rec,
    };
    let json = serde_json::to_string_pretty(&file).map_err(|e| Error::Experiment(e.to_string()))?;
    let stem = format!("run-{kind}-seed{seed}");
    let rec_path = write_out(g, &format!("{stem}.json"), &(json + "\n"))?;
    let trace_path = write_out(g, &format!("{stem}.trace.csv"), &trace)?;

    println!(
        "{kind} seed {seed}: {} evaluations, stop: {:?}",
        rec.evaluations, rec.stop_reason
    );
    println!(
        "best fitness {} ({})",
        rec.best_fitness,
        if rec.best_feasible {
            "feasible"
        } else {
            "infeasible"
        }
    );
    match rec.first_feasible {
        Some(e) => println!("first feasible at evaluation {e}"),
        None => println!("no feasible schedule found"),
    }
    println!("wrote {} and {}", rec_path.display(), trace_path.display());
    Ok(0)
}

fn experiment(g: &Global, a: &ExperimentArgs) -> Result<u8> {
    let text = fs::read_to_string(&a.spec)?;
    let mut spec = ExperimentSpec::from_file_str(&text)?;
    log::info!("spec file {}: {}", a.spec.display(), spec.echo());

    let instance_path = match &a.instance {
        Some(p) => {
            set_spec(
                &mut spec,
                "instance",
                &p.display().to_string(),
                "--instance",
            )?;
            Some(p.clone())
        }
        None if spec.instance == "default" => None,
        None => {
            let p = PathBuf::from(&spec.instance);
            let dir = a.spec.parent().unwrap_or(Path::new(""));
            Some(if p.is_relative() { dir.join(p) } else { p })
        }
    };
    let sets = parse_sets(&g.set)?;
    let (inst, rest) = load_instance(instance_path.as_deref(), &sets)?;
    for (k, v) in &rest {
        set_spec(&mut spec, k, v, "--set")?;
    }
    if let Some(n) = a.runs {
        set_spec(&mut spec, "runs", &n.to_string(), "--runs")?;
    }
    if let Some(c) = a.cap {
        set_spec(&mut spec, "cap", &c.to_string(), "--cap")?;
    }
    if let Some(s) = g.seed {
        set_spec(&mut spec, "base_seed", &s.to_string(), "--seed")?;
    }
    let meta = Metadata::new(inst.content_hash());
    let obj = ChemoObjective::new(inst)?;
    let summary = run_experiment(&spec, &obj)?;

    fs::create_dir_all(&g.out)?;
    let path = g.out.join(format!("{}.results.csv", spec.label));
    let sidecar = write_results(&path, &summary, &meta)?;
    let m = summary.moments;
    println!(
        "{} ({}): n {} of {} runs, censored {}, mean {}, std {}",
        summary.label,
        summary.protocol,
        m.n,
        summary.runs.len(),
        summary.censored(),
        m.mean,
        m.std
    );
    println!("wrote {} and {}", path.display(), sidecar.display());
    Ok(0)
}

fn read_all(files: &[PathBuf]) -> Result<Vec<ExperimentSummary>> {
    files.iter().map(|f| read_results(f)).collect()
}

fn joined(files: &[PathBuf]) -> String {
    files
        .iter()
        .map(|f| f.display().to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn compare(g: &Global, files: &[PathBuf]) -> Result<u8> {
    let summaries = read_all(files)?;
    let rows = compare_all(&summaries)?;
    let table = comparison_to_string(&rows, &[("inputs", joined(files))]);
    let path = write_out(g, "comparison.csv", &table)?;
    print!("{table}");
    log::info!("wrote {}", path.display());
    Ok(0)
}

fn plotdata(g: &Global, files: &[PathBuf]) -> Result<u8> {
    let summaries = read_all(files)?;
    let table = plotdata_to_string(&summaries, &[("inputs", joined(files))]);
    let path = write_out(g, "plotdata.csv", &table)?;
    print!("{table}");
    log::info!("wrote {}", path.display());
    Ok(0)
}

fn linkage(g: &Global, a: &LinkageArgs) -> Result<u8> {
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let (report, source, hash) = match a.onemax {
        Some(len) => {
            let r = detect_interactions(&OneMax(len), a.backgrounds, a.tol, seed)?;
            (r, format!("onemax:{len}"), format!("onemax:{len}"))
        }
        None => {
            let sets = parse_sets(&g.set)?;
            let (inst, rest) = load_instance(a.instance.as_deref(), &sets)?;
            if let Some((k, _)) = rest.first() {
                return Err(Error::Config(format!("`{k}` is not an instance key")));
            }
            let hash = inst.content_hash();
            let obj = ChemoObjective::new(inst)?;
            let r = detect_interactions(&obj, a.backgrounds, a.tol, seed)?;
            (r, instance_source(a.instance.as_deref()), hash)
        }
    };
    let text = report.to_file_string(&[("instance", source), ("instance_hash", hash)]);
    let path = write_out(g, &format!("linkage-seed{seed}.csv"), &text)?;
    println!(
        "{} of {} pairs interact (density {:.4}), {} evaluations",
        report.pairs.len(),
        report.possible_pairs(),
        report.density(),
        report.evaluations
    );
    println!("wrote {}", path.display());
    Ok(0)
}

fn bisect(g: &Global, a: &BisectArgs) -> Result<u8> {
    let kind: OptimizerKind = a.kind.parse()?;
    let sets = parse_sets(&g.set)?;
    let (inst, rest) = load_instance(a.opt.instance.as_deref(), &sets)?;
    let cfg = optimizer_config(&a.opt, &rest)?
        .with_budget(a.cap)
        .stop_on_feasible();
    let obj = ChemoObjective::new(inst)?;
    let settings = BisectionSettings {
        lo: a.lo,
        hi: a.hi,
        target_rate: a.target_rate,
        trials: a.trials,
        cap: a.max_pop,
        base_seed: g.seed.unwrap_or(DEFAULT_SEED),
    };
    let pop = bisection_population(
        |pop, seed| {
            let mut c = cfg.clone();
            c.population = pop;
            if c.budget < pop as u64 {
                return Ok(false);
            }
            let rec = run_optimizer(kind, &obj, &c, seed)?;
            log::debug!(
                "pop {pop} seed {seed}: first feasible {:?}",
                rec.first_feasible
            );
            Ok(rec.first_feasible.is_some())
        },
        settings,
    )?;
    println!("{kind}: population {pop}");
    Ok(0)
}

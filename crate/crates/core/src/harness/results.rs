use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::experiment::{ExperimentSpec, ExperimentSummary, Protocol, RunOutcome};
use super::stats::{welch_t_test, Moments, TTestResult};

pub const RESULTS_COLUMNS: &str = "run_index,seed,metric_value,censored,total_evaluations";
const SUMMARY_MARKER: &str = "# summary";

/// Provenance written at the top of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub instance_hash: String,
}

impl Metadata {
    pub fn new(instance_hash: impl Into<String>) -> Self {
        Metadata {
            tool_version: crate::VERSION.to_string(),
            instance_hash: instance_hash.into(),
        }
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that parses back to the same value.
    format!("{v:?}")
}

/// Renders a summary as a results CSV with header and summary footer.
pub fn results_to_string(summary: &ExperimentSummary, meta: &Metadata) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# chemoeda results");
    let _ = writeln!(out, "# tool_version: {}", meta.tool_version);
    let _ = writeln!(out, "# instance_hash: {}", meta.instance_hash);
    let _ = writeln!(out, "# label: {}", summary.label);
    let _ = writeln!(out, "# protocol: {}", summary.protocol);
    if let Some(spec) = &summary.spec {
        let _ = writeln!(out, "# spec: {}", spec.echo());
    }
    let _ = writeln!(out, "{RESULTS_COLUMNS}");
    for r in &summary.runs {
        let metric = r.metric.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.run_index,
            r.seed,
            metric,
            u8::from(r.censored),
            r.total_evaluations
        );
    }
    let m = summary.moments;
    let _ = writeln!(out, "{SUMMARY_MARKER}");
    let _ = writeln!(out, "# runs: {}", summary.runs.len());
    let _ = writeln!(out, "# censored: {}", summary.censored());
    let _ = writeln!(out, "# n: {}", m.n);
    let _ = writeln!(out, "# mean: {}", fmt_f64(m.mean));
    let _ = writeln!(out, "# std: {}", fmt_f64(m.std));
    out
}

fn parse_num<T: std::str::FromStr>(line: usize, what: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what}: `{}` is not a number", v.trim())))
}

/// Parses a results file back into a summary.
///
/// A file may omit the run rows; the footer statistics are then the only
/// data. When rows are present, the footer must agree with them.
pub fn results_from_str(text: &str) -> Result<ExperimentSummary> {
    let mut label = None;
    let mut protocol = None;
    let mut spec_echo = None;
    let (mut mean, mut std, mut n) = (None, None, None);
    let mut in_footer = false;
    let mut saw_columns = false;
    let mut runs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == SUMMARY_MARKER {
            in_footer = true;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let Some((key, value)) = comment.split_once(':') else {
                continue;
            };
            let value = value.trim();
            match (in_footer, key.trim()) {
                (false, "label") => label = Some(value.to_string()),
                (false, "protocol") => {
                    protocol = Some(
                        value
                            .parse::<Protocol>()
                            .map_err(|e| Error::parse(line_no, e.to_string()))?,
                    )
                }
                (false, "spec") => spec_echo = Some((line_no, value.to_string())),
                (true, "mean") => mean = Some(parse_num::<f64>(line_no, "mean", value)?),
                (true, "std") => std = Some(parse_num::<f64>(line_no, "std", value)?),
                (true, "n") => n = Some(parse_num::<usize>(line_no, "n", value)?),
                _ => {}
            }
            continue;
        }
        if in_footer {
            return Err(Error::parse(line_no, "data row after the summary footer"));
        }
        if line == RESULTS_COLUMNS {
            saw_columns = true;
            continue;
        }
        if !saw_columns {
            return Err(Error::parse(line_no, "data row before the column header"));
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::parse(
                line_no,
                format!("expected 5 columns, found {}", cols.len()),
            ));
        }
        let metric = if cols[2].trim().is_empty() {
            None
        } else {
            Some(parse_num::<f64>(line_no, "metric_value", cols[2])?)
        };
        let censored = match cols[3].trim() {
            "0" => false,
            "1" => true,
            other => return Err(Error::parse(line_no, format!("censored flag `{other}`"))),
        };
        if censored != metric.is_none() {
            return Err(Error::parse(
                line_no,
                "censored rows must have an empty metric and vice versa",
            ));
        }
        runs.push(RunOutcome {
            run_index: parse_num(line_no, "run_index", cols[0])?,
            seed: parse_num(line_no, "seed", cols[1])?,
            metric,
            censored,
            total_evaluations: parse_num(line_no, "total_evaluations", cols[4])?,
        });
    }
    let label = label.ok_or_else(|| Error::parse(0, "missing `# label:` header"))?;
    let protocol = protocol.ok_or_else(|| Error::parse(0, "missing `# protocol:` header"))?;
    let spec = match spec_echo {
        Some((line_no, echo)) => Some(spec_from_echo(&echo).map_err(|e| match e {
            Error::Parse { message, .. } | Error::Config(message) => {
                Error::parse(line_no, format!("spec: {message}"))
            }
            other => other,
        })?),
        None => None,
    };
    if runs.is_empty() {
        let (Some(mean), Some(std), Some(n)) = (mean, std, n) else {
            return Err(Error::parse(
                0,
                "no run rows and an incomplete summary footer",
            ));
        };
        let mut s = ExperimentSummary::from_moments(label, protocol, Moments { mean, std, n });
        s.spec = spec;
        return Ok(s);
    }
    let s = ExperimentSummary::from_runs(label, protocol, runs, spec)?;
    if let Some(n) = n {
        if n != s.moments.n {
            return Err(Error::parse(
                0,
                format!("footer n = {n} but rows give {}", s.moments.n),
            ));
        }
    }
    Ok(s)
}

fn spec_from_echo(echo: &str) -> Result<ExperimentSpec> {
    let text: String = echo
        .split("; ")
        .map(|kv| format!("{}\n", kv.replacen('=', " = ", 1)))
        .collect();
    ExperimentSpec::from_file_str(&text)
}

pub fn read_results(path: &Path) -> Result<ExperimentSummary> {
    let text = std::fs::read_to_string(path)?;
    results_from_str(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Sidecar written next to a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarMetadata {
    #[serde(flatten)]
    pub meta: Metadata,
    pub label: String,
    pub protocol: Protocol,
    pub spec: Option<ExperimentSpec>,
    pub moments: Moments,
    pub censored: usize,
}

pub fn sidecar_path(results: &Path) -> PathBuf {
    let mut name = results
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".meta.json");
    results.with_file_name(name)
}

pub fn sidecar_to_string(summary: &ExperimentSummary, meta: &Metadata) -> Result<String> {
    let side = SidecarMetadata {
        meta: meta.clone(),
        label: summary.label.clone(),
        protocol: summary.protocol,
        spec: summary.spec.clone(),
        moments: summary.moments,
        censored: summary.censored(),
    };
    serde_json::to_string_pretty(&side)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Experiment(e.to_string()))
}

/// Writes the results file and its sidecar; returns the sidecar path.
pub fn write_results(path: &Path, summary: &ExperimentSummary, meta: &Metadata) -> Result<PathBuf> {
    std::fs::write(path, results_to_string(summary, meta))?;
    let side = sidecar_path(path);
    std::fs::write(&side, sidecar_to_string(summary, meta)?)?;
    Ok(side)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub test: TTestResult,
}

/// All pairwise Welch tests, in argument order: (0,1), (0,2), ..., (1,2), ...
pub fn compare_all(summaries: &[ExperimentSummary]) -> Result<Vec<Comparison>> {
    if summaries.len() < 2 {
        return Err(Error::Experiment(format!(
            "comparison needs at least 2 summaries, got {}",
            summaries.len()
        )));
    }
    let protocol = summaries[0].protocol;
    if let Some(other) = summaries.iter().find(|s| s.protocol != protocol) {
        return Err(Error::Experiment(format!(
            "mixed protocols: `{}` is {protocol}, `{}` is {}",
            summaries[0].label, other.label, other.protocol
        )));
    }
    let mut out = Vec::new();
    for (i, a) in summaries.iter().enumerate() {
        for b in &summaries[i + 1..] {
            out.push(Comparison {
                a: a.label.clone(),
                b: b.label.clone(),
                test: welch_t_test(a.moments, b.moments)?,
            });
        }
    }
    Ok(out)
}

/// Comparison table as CSV. Differences and t are printed as magnitudes.
pub fn comparison_to_string(rows: &[Comparison], header: &[(&str, String)]) -> String {
    let mut out = String::from("# chemoeda comparison\n");
    out.push_str(&format!("# tool_version: {}\n", crate::VERSION));
    for (k, v) in header {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str("a,b,mean_diff,std_error,t,p,df,degenerate\n");
    for r in rows {
        let t = &r.test;
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.4},{:.4},{:.6e},{:.2},{}",
            r.a,
            r.b,
            t.diff.abs(),
            t.std_error,
            t.t.abs(),
            t.p,
            t.df,
            u8::from(t.degenerate)
        );
    }
    out
}

/// `label,mean,std` rows for bar charts with one-deviation error bars.
pub fn plotdata_to_string(summaries: &[ExperimentSummary], header: &[(&str, String)]) -> String {
    let mut out = String::from("# chemoeda plotdata\n");
    out.push_str(&format!("# tool_version: {}\n", crate::VERSION));
    for (k, v) in header {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str("label,mean,std\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{}",
            s.label,
            fmt_f64(s.moments.mean),
            fmt_f64(s.moments.std)
        );
    }
    out
}

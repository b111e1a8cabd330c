//! Instance loading and `--set` overrides, with every override logged.

use std::collections::BTreeMap;
use std::path::Path;

use chemoeda::harness::ExperimentSpec;
use chemoeda::{Error, OptimizerConfig, ProblemInstance, Result};

/// Splits `key=value` override strings.
pub fn parse_sets(raw: &[String]) -> Result<Vec<(String, String)>> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .filter(|(k, _)| !k.is_empty())
                .ok_or_else(|| Error::Config(format!("`--set {s}`: expected KEY=VALUE")))
        })
        .collect()
}

/// Field values keyed by name, `eta` rows joined with `;`.
fn fields(inst: &ProblemInstance) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut eta = Vec::new();
    let mut in_eta = false;
    for line in inst.to_file_string().lines() {
        match line.split_once('=') {
            Some((k, v)) => {
                in_eta = k.trim() == "eta";
                out.insert(k.trim().to_string(), v.trim().to_string());
            }
            None if in_eta => eta.push(line.trim().to_string()),
            None => {}
        }
    }
    out.insert("eta".into(), eta.join("; "));
    out
}

fn log_changes(before: &BTreeMap<String, String>, after: &BTreeMap<String, String>, source: &str) {
    for (k, v) in after {
        match before.get(k) {
            Some(old) if old == v => {}
            Some(old) => log::info!("{source} overrides instance `{k}`: {old} -> {v}"),
            None => log::info!("{source} sets instance `{k}` = {v}"),
        }
    }
}

/// Where the instance came from, as echoed into output headers.
pub fn instance_source(path: Option<&Path>) -> String {
    path.map_or_else(|| "default".to_string(), |p| p.display().to_string())
}

/// Loads the bundled default or a file, applying instance-key overrides.
/// Overrides that are not instance keys are returned untouched. The
/// instance is not validated.
pub fn load_instance(
    path: Option<&Path>,
    sets: &[(String, String)],
) -> Result<(ProblemInstance, Vec<(String, String)>)> {
    let mut inst = match path {
        None => ProblemInstance::default(),
        Some(p) => {
            let inst = ProblemInstance::from_path(p)?;
            let defaults = ProblemInstance::default_for(inst.s, inst.d);
            log_changes(
                &fields(&defaults),
                &fields(&inst),
                &format!("instance file {}", p.display()),
            );
            inst
        }
    };
    let mut rest = Vec::new();
    for (k, v) in sets {
        let before = fields(&inst);
        if inst.set(k, v)? {
            log_changes(&before, &fields(&inst), "--set");
        } else {
            rest.push((k.clone(), v.clone()));
        }
    }
    Ok((inst, rest))
}

fn config_value(cfg: &OptimizerConfig, key: &str) -> Option<String> {
    cfg.to_pairs()
        .into_iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v)
}

/// Applies one optimizer setting, logging the change.
pub fn set_config(cfg: &mut OptimizerConfig, key: &str, value: &str, source: &str) -> Result<()> {
    let old = config_value(cfg, key);
    if !cfg.set(key, value)? {
        return Err(Error::Config(format!("unknown setting `{key}`")));
    }
    log_setting(source, key, old, config_value(cfg, key));
    Ok(())
}

fn spec_value(spec: &ExperimentSpec, key: &str) -> Option<String> {
    spec.echo()
        .split("; ")
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.to_string())
}

/// Applies one experiment or optimizer setting, logging the change.
pub fn set_spec(spec: &mut ExperimentSpec, key: &str, value: &str, source: &str) -> Result<()> {
    let old = spec_value(spec, key);
    spec.set(key, value)?;
    log_setting(source, key, old, spec_value(spec, key));
    Ok(())
}

fn log_setting(source: &str, key: &str, old: Option<String>, new: Option<String>) {
    let new = new.unwrap_or_else(|| "?".into());
    match old {
        Some(old) if old == new => {}
        Some(old) => log::info!("{source} overrides `{key}`: {old} -> {new}"),
        None => log::info!("{source} sets `{key}` = {new}"),
    }
}

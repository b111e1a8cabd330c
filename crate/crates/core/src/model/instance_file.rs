use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kv::{self, Entry};

use super::instance::ProblemInstance;

/// The bundled default instance, identical to [`ProblemInstance::default`].
pub const DEFAULT_INSTANCE_FILE: &str = include_str!("../../data/default.instance");

const KEYS: &[&str] = &[
    "s",
    "d",
    "bits_per_dose",
    "lambda",
    "theta",
    "n0",
    "kappa",
    "eta",
    "delta_c",
    "dose_times",
    "c_max",
    "c_cum",
    "n_max",
    "c_seff",
    "penalties",
];

impl ProblemInstance {
    /// Parses an instance file. Missing keys take the built-in defaults for
    /// the file's `s` and `d`; unknown keys are rejected. The result is not
    /// validated, call [`ProblemInstance::validate`] for that.
    pub fn from_file_str(text: &str) -> Result<Self> {
        let entries = kv::parse(text)?;
        if let Some(e) = entries.iter().find(|e| !KEYS.contains(&e.key.as_str())) {
            return Err(Error::parse(e.line, format!("unknown key `{}`", e.key)));
        }
        let get = |key: &str| entries.iter().find(|e| e.key == key);
        let s = get("s").map(kv::usize_value).transpose()?.unwrap_or(10);
        let d = get("d").map(kv::usize_value).transpose()?.unwrap_or(10);
        let mut inst = ProblemInstance::default_for(s, d);

        for entry in &entries {
            apply(&mut inst, entry)?;
        }
        Ok(inst)
    }

    /// Overrides one field from its file-line form. Rows of `eta` are
    /// separated by `;`. Returns `false` for keys that are not instance keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        if !KEYS.contains(&key) {
            return Ok(false);
        }
        let text = if key == "eta" {
            format!(
                "eta =\n{}\n",
                value.split(';').collect::<Vec<_>>().join("\n")
            )
        } else {
            format!("{key} = {value}\n")
        };
        for entry in kv::parse(&text)? {
            apply(self, &entry)?;
        }
        Ok(true)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_file_str(&text)
    }

    /// Canonical rendering; parses back to an identical instance.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "s = {}", self.s);
        let _ = writeln!(out, "d = {}", self.d);
        let _ = writeln!(out, "bits_per_dose = {}", self.bits_per_dose);
        let _ = writeln!(out, "lambda = {}", self.lambda);
        let _ = writeln!(out, "theta = {}", self.theta);
        let _ = writeln!(out, "n0 = {}", self.n0);
        let _ = writeln!(out, "n_max = {}", self.n_max);
        let _ = writeln!(out, "kappa = {}", kv::join(&self.kappa));
        let _ = writeln!(out, "delta_c = {}", kv::join(&self.delta_c));
        let _ = writeln!(out, "dose_times = {}", kv::join(&self.dose_times));
        let _ = writeln!(out, "c_max = {}", kv::join(&self.c_max));
        let _ = writeln!(out, "c_cum = {}", kv::join(&self.c_cum));
        let _ = writeln!(out, "c_seff = {}", kv::join(&self.c_seff));
        let _ = writeln!(out, "penalties = {}", kv::join(&self.penalties));
        let _ = writeln!(out, "eta =");
        for row in &self.eta {
            let _ = writeln!(out, "  {}", kv::join(row));
        }
        out
    }
}

fn apply(inst: &mut ProblemInstance, e: &Entry) -> Result<()> {
    match e.key.as_str() {
        "s" => inst.s = kv::usize_value(e)?,
        "d" => inst.d = kv::usize_value(e)?,
        "bits_per_dose" => inst.bits_per_dose = kv::usize_value(e)?,
        "lambda" => inst.lambda = kv::f64_value(e)?,
        "theta" => inst.theta = kv::f64_value(e)?,
        "n0" => inst.n0 = kv::f64_value(e)?,
        "n_max" => inst.n_max = kv::f64_value(e)?,
        "kappa" => inst.kappa = kv::vector(e)?,
        "delta_c" => inst.delta_c = kv::vector(e)?,
        "dose_times" => inst.dose_times = kv::vector(e)?,
        "c_max" => inst.c_max = kv::vector(e)?,
        "c_cum" => inst.c_cum = kv::vector(e)?,
        "c_seff" => inst.c_seff = kv::vector(e)?,
        "eta" => inst.eta = kv::matrix(e)?,
        "penalties" => {
            let v = kv::vector(e)?;
            inst.penalties = v.try_into().map_err(|v: Vec<f64>| {
                Error::parse(
                    e.line,
                    format!("`penalties` needs exactly 4 values, found {}", v.len()),
                )
            })?;
        }
        other => return Err(Error::parse(e.line, format!("unknown key `{other}`"))),
    }
    Ok(())
}

//! Run configuration: preset defaults, then the config file, then flags.
//!
//! Files are JSON. Nested objects mirror the experiment spec; keys may also
//! be dotted paths (`"reference.h_e": 0.0625`), which is the same form the
//! `--set` flag takes. A `manifest.json` from an earlier run is accepted as
//! is: its `config` object is read and everything else ignored.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dirac_core::harness::{ExperimentSpec, Preset, StabilitySetup, TauSpec, DEFAULT_NODE_CAP};
use dirac_core::Scheme;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Converge,
    Stability,
    Honeycomb,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Converge => "converge",
            Command::Stability => "stability",
            Command::Honeycomb => "honeycomb",
        }
    }

    fn default_preset(self) -> Preset {
        match self {
            Command::Honeycomb => Preset::Honeycomb2d,
            _ => Preset::Gaussian1d,
        }
    }

    fn default_schemes(self, preset: Preset) -> Vec<Scheme> {
        match (self, preset) {
            (Command::Solve | Command::Honeycomb, _) | (_, Preset::Honeycomb2d) => vec![Scheme::Tsfp],
            (Command::Stability, _) => Scheme::FDTD.to_vec(),
            (Command::Converge, _) => Scheme::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Steps between observable rows; 0 picks about a thousand rows.
    pub every: usize,
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityOptions {
    pub factors: Vec<f64>,
    #[serde(flatten)]
    pub setup: StabilitySetup,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { factors: vec![0.5, 0.9, 2.0], setup: StabilitySetup::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HoneycombOptions {
    pub snapshot_times: Vec<f64>,
    pub node_cap: usize,
}

impl Default for HoneycombOptions {
    fn default() -> Self {
        Self { snapshot_times: vec![0.0, 2.0, 4.0, 6.0, 8.0], node_cap: DEFAULT_NODE_CAP }
    }
}

/// Everything a command needs; this is what `manifest.json` echoes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    #[serde(flatten)]
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub solve: SolveOptions,
    #[serde(default)]
    pub stability: StabilityOptions,
    #[serde(default)]
    pub honeycomb: HoneycombOptions,
}

impl RunFile {
    pub fn defaults(command: Command, preset: Preset) -> Self {
        let mut experiment = ExperimentSpec::new(preset, command.default_schemes(preset));
        if command == Command::Honeycomb {
            experiment.eps = vec![1.0, 0.2];
        }
        if command == Command::Solve {
            experiment.eps = vec![1.0];
        }
        Self {
            experiment,
            solve: SolveOptions::default(),
            stability: StabilityOptions::default(),
            honeycomb: HoneycombOptions::default(),
        }
    }
}

/// Flag values that land in the run configuration; `None` leaves the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub schemes: Option<String>,
    pub eps: Option<String>,
    pub h: Option<String>,
    pub tau: Option<String>,
    pub t_final: Option<String>,
    pub set: Vec<String>,
}

/// Parses `0.25`, `1e-3` or `1/16`.
pub fn parse_num(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>()? / b.trim().parse::<f64>()?,
        None => s.parse::<f64>()?,
    };
    if !v.is_finite() {
        bail!("`{s}` is not a finite number");
    }
    Ok(v)
}

fn parse_list(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| parse_num(x).with_context(|| format!("{field}: cannot read `{x}`"))).collect()
}

fn tau_list(s: &str) -> Result<Vec<TauSpec>> {
    s.split(',')
        .map(|x| {
            if x.trim().eq_ignore_ascii_case("auto") {
                Ok(TauSpec::AUTO)
            } else {
                Ok(TauSpec::Value(parse_num(x).with_context(|| format!("tau: cannot read `{x}`"))?))
            }
        })
        .collect()
}

/// Turns `{"a.b": 1}` into `{"a": {"b": 1}}`, recursively.
fn unflatten(v: Value) -> Result<Value> {
    let Value::Object(map) = v else { return Ok(v) };
    let mut out = Value::Object(Map::new());
    for (k, v) in map {
        let v = unflatten(v)?;
        let (parents, last) = match k.rsplit_once('.') {
            Some((a, b)) => (a.split('.').collect::<Vec<_>>(), b),
            None => (vec![], k.as_str()),
        };
        let mut cur = &mut out;
        for part in parents {
            let obj = cur.as_object_mut().ok_or_else(|| anyhow!("key `{k}` clashes with a scalar value"))?;
            cur = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
        }
        let obj = cur.as_object_mut().ok_or_else(|| anyhow!("key `{k}` clashes with a scalar value"))?;
        match (obj.get_mut(last), v) {
            (Some(Value::Object(dst)), Value::Object(src)) => dst.extend(src),
            (_, v) => {
                obj.insert(last.to_string(), v);
            }
        }
    }
    Ok(out)
}

/// Enum-valued fields. A value with a different variant tag replaces the
/// old one whole; the same tag merges field by field.
const ENUM_FIELDS: [(&str, &str); 4] =
    [("problem.potential", "kind"), ("problem.initial", "kind"), ("stability.initial", "kind"), ("cells", "rule")];

fn enum_tag(path: &str) -> Option<&'static str> {
    ENUM_FIELDS.iter().find(|(p, _)| *p == path).map(|(_, t)| *t)
}

/// Overlays `src` on `dst`; keys unknown to `dst` are rejected by path.
fn merge(dst: &mut Value, src: Value, path: &str) -> Result<()> {
    if let Some(tag) = enum_tag(path) {
        let differs = src.get(tag).is_some_and(|t| Some(t) != dst.get(tag));
        if differs || !dst.is_object() {
            *dst = src;
            return Ok(());
        }
        if let (Value::Object(d), Value::Object(s)) = (&mut *dst, src) {
            d.extend(s);
        }
        return Ok(());
    }
    match (dst, src) {
        (Value::Object(d), Value::Object(s)) => {
            for (k, v) in s {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match d.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v, &p)?,
                    Some(slot) if enum_tag(&p).is_some() => merge(slot, v, &p)?,
                    Some(slot) => *slot = v,
                    None => bail!("unknown configuration field `{p}`"),
                }
            }
            Ok(())
        }
        (d, s) => {
            *d = s;
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let v = match v {
        Value::Object(mut m) if m.contains_key("config") && m.contains_key("command") => m.remove("config").unwrap(),
        Value::Object(m) => Value::Object(m),
        _ => bail!("{}: top level must be a JSON object", path.display()),
    };
    unflatten(v)
}

fn preset_of(v: &Value) -> Option<String> {
    v.pointer("/problem/preset").and_then(Value::as_str).map(str::to_string)
}

/// A `key=value` pair from `--set`; the value is JSON when it parses, else a string.
fn set_pair(s: &str) -> Result<Value> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("--set expects key=value, got `{s}`"))?;
    let v = serde_json::from_str(v)
        .ok()
        .or_else(|| parse_num(v).ok().map(Value::from))
        .unwrap_or_else(|| Value::String(v.to_string()));
    let mut m = Map::new();
    m.insert(k.trim().to_string(), v);
    unflatten(Value::Object(m))
}

/// Resolves defaults, file and flags into a validated [`RunFile`].
pub fn resolve(command: Command, file: Option<&Path>, o: &Overrides) -> Result<RunFile> {
    let file_value = file.map(read_file).transpose()?;
    let preset_name = o
        .preset
        .clone()
        .or_else(|| file_value.as_ref().and_then(preset_of))
        .unwrap_or_else(|| command.default_preset().name().to_string());
    let preset: Preset = preset_name.parse().map_err(|e| anyhow!("preset: {e}"))?;

    let mut value = serde_json::to_value(RunFile::defaults(command, preset))?;
    if let Some(v) = file_value {
        merge(&mut value, v, "")?;
    }
    let mut flags = Map::new();
    if let Some(p) = &o.preset {
        flags.insert("problem".into(), serde_json::json!({ "preset": p }));
    }
    if let Some(s) = &o.schemes {
        let list = s
            .split(',')
            .map(|x| x.parse::<Scheme>().map(String::from).map_err(|e| anyhow!("scheme: {e}")))
            .collect::<Result<Vec<_>>>()?;
        flags.insert("schemes".into(), serde_json::to_value(list)?);
    }
    if let Some(s) = &o.eps {
        flags.insert("eps".into(), serde_json::to_value(parse_list("eps", s)?)?);
    }
    if let Some(s) = &o.h {
        flags.insert("h".into(), serde_json::to_value(parse_list("h", s)?)?);
    }
    if let Some(s) = &o.tau {
        flags.insert("tau".into(), serde_json::to_value(tau_list(s)?)?);
    }
    if let Some(s) = &o.t_final {
        flags.insert("t_final".into(), serde_json::to_value(parse_num(s).context("t_final")?)?);
    }
    merge(&mut value, Value::Object(flags), "")?;
    for s in &o.set {
        merge(&mut value, set_pair(s)?, "")?;
    }

    let run: RunFile = serde_json::from_value(value).context("configuration does not fit the run schema")?;
    run.experiment.validate()?;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_fractions() {
        assert_eq!(parse_num("1/16").unwrap(), 0.0625);
        assert_eq!(parse_num(" 2.5e-1 ").unwrap(), 0.25);
        assert!(parse_num("abc").is_err());
        assert!(parse_num("1/0").is_err());
    }

    #[test]
    fn dotted_keys_nest() {
        let v = unflatten(serde_json::json!({ "a.b": 1, "a": { "c": 2 }, "d": 3 })).unwrap();
        assert_eq!(v, serde_json::json!({ "a": { "b": 1, "c": 2 }, "d": 3 }));
    }

    #[test]
    fn set_values() {
        assert_eq!(set_pair("reference.h_e=1/8").unwrap(), serde_json::json!({ "reference": { "h_e": 0.125 } }));
        assert_eq!(set_pair("eps=[1, 0.5]").unwrap(), serde_json::json!({ "eps": [1, 0.5] }));
        assert_eq!(set_pair("problem.preset=custom").unwrap(), serde_json::json!({ "problem": { "preset": "custom" } }));
        assert!(set_pair("novalue").is_err());
    }

    #[test]
    fn unknown_fields_are_named() {
        let mut dst = serde_json::json!({ "reference": { "h_e": 1.0 } });
        let err = merge(&mut dst, serde_json::json!({ "reference": { "he": 2.0 } }), "").unwrap_err();
        assert!(err.to_string().contains("reference.he"));
    }

    #[test]
    fn tagged_objects_replace() {
        let mut dst = serde_json::json!({ "cells": { "rule": "product" } });
        merge(&mut dst, serde_json::json!({ "cells": { "rule": "coupled", "ratio": 2.0 } }), "").unwrap();
        assert_eq!(dst["cells"]["ratio"], 2.0);
        merge(&mut dst, serde_json::json!({ "cells": { "levels": 3 } }), "").unwrap();
        assert_eq!(dst["cells"], serde_json::json!({ "rule": "coupled", "ratio": 2.0, "levels": 3 }));
    }

    #[test]
    fn flags_build_product_cells() {
        let o = Overrides {
            schemes: Some("tsfp".into()),
            eps: Some("1,0.5".into()),
            tau: Some("0.1,0.025".into()),
            ..Default::default()
        };
        let run = resolve(Command::Converge, None, &o).unwrap();
        assert_eq!(run.experiment.cells().len(), 4);
    }

    #[test]
    fn honeycomb_defaults() {
        let run = resolve(Command::Honeycomb, None, &Overrides::default()).unwrap();
        let e = &run.experiment;
        assert_eq!(e.h, vec![1.0 / 16.0]);
        assert_eq!(e.tau, vec![TauSpec::Value(0.01)]);
        assert_eq!(e.problem.domain, [-10.0, 10.0]);
        assert_eq!(e.problem.dim, 2);
    }

    #[test]
    fn bad_values_name_the_field() {
        let tau = Overrides { tau: Some("5".into()), ..Default::default() };
        assert!(format!("{:#}", resolve(Command::Converge, None, &tau).unwrap_err()).contains("tau"));
        let scheme = Overrides { schemes: Some("rk4".into()), ..Default::default() };
        assert!(format!("{:#}", resolve(Command::Converge, None, &scheme).unwrap_err()).contains("scheme"));
        let h = Overrides { h: Some("0.3".into()), ..Default::default() };
        assert!(format!("{:#}", resolve(Command::Converge, None, &h).unwrap_err()).contains("h"));
    }
}

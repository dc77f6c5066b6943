//! Layered run configuration: preset defaults, then a TOML file, then
//! command-line overrides, merged as TOML trees.

use anyhow::{anyhow, bail, Context, Result};
use plasmid_archive::engine::{SimConfig, SweepParams};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

/// Payload sizes and sampling for the codec benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecBenchParams {
    pub sizes: Vec<usize>,
    pub samples: usize,
}

impl Default for CodecBenchParams {
    fn default() -> Self {
        Self { sizes: vec![0, 1, 16, 256, 1024, 4096, 18_400], samples: 5 }
    }
}

/// Everything a preset needs. `sweep` only matters for grid runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub sweep: SweepParams,
    pub codec_bench: CodecBenchParams,
}

impl RunConfig {
    pub fn to_table(&self) -> Result<Table> {
        let mut t = Table::try_from(&self.sim)?;
        t.insert("sweep".into(), Value::try_from(&self.sweep)?);
        t.insert("codec_bench".into(), Value::try_from(&self.codec_bench)?);
        Ok(t)
    }

    pub fn from_table(mut t: Table) -> Result<RunConfig> {
        let sweep = match t.remove("sweep") {
            Some(v) => v.try_into().context("sweep")?,
            None => SweepParams::default(),
        };
        let codec_bench = match t.remove("codec_bench") {
            Some(v) => v.try_into().context("codec_bench")?,
            None => CodecBenchParams::default(),
        };
        let sim: SimConfig = Value::Table(t).try_into().context("config")?;
        Ok(RunConfig { sim, sweep, codec_bench })
    }
}

/// Recursively overlays `top` onto `base`; tables merge, everything else is
/// replaced.
pub fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Parses `a.b.c=value`. The value is read as a TOML literal when possible
/// (`14`, `-inf`, `"x"`, `[1, 2]`) and as a bare string otherwise.
pub fn parse_override(text: &str) -> Result<(Vec<String>, Value)> {
    let (path, raw) = text.split_once('=').ok_or_else(|| anyhow!("override {text:?} is not KEY=VALUE"))?;
    let path: Vec<String> = path.trim().split('.').map(str::to_string).collect();
    if path.iter().any(String::is_empty) {
        bail!("override {text:?} has an empty key segment");
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((path, value))
}

pub fn apply_override(table: &mut Table, path: &[String], value: Value) -> Result<()> {
    let (last, parents) = path.split_last().ok_or_else(|| anyhow!("empty override key"))?;
    let mut cur = table;
    for seg in parents {
        let entry = cur.entry(seg.clone()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| anyhow!("override key {seg:?} is not a table"))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

/// Builds the effective config: `defaults` < `file` < `overrides`.
pub fn layer(defaults: &RunConfig, file: Option<&str>, overrides: &[String]) -> Result<RunConfig> {
    let mut table = defaults.to_table()?;
    if let Some(text) = file {
        let top: Table = text.parse().context("config file is not valid TOML")?;
        merge(&mut table, top);
    }
    for o in overrides {
        let (path, value) = parse_override(o)?;
        apply_override(&mut table, &path, value)?;
    }
    RunConfig::from_table(table)
}

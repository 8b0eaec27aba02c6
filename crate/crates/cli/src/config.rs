//! Run configuration: built-in preset, then the TOML file, then `--set`
//! overrides and dedicated flags, merged as JSON trees before a strict
//! deserialization.

use std::path::{Path, PathBuf};

use levy_growth::circle_cov::CircleCovModel;
use levy_growth::growth::{example_preset, preset_grid, GrowthModelSpec, TumourRow};
use levy_growth::inference::{DirectRadialFamily, FreeParameter, SearchOptions};
use levy_growth::levy::{BasisSpec, GridSpec};
use levy_growth::moments::{LinearModel, Point, Statistic};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const PRESET_ANGLES: usize = 256;
pub const PRESET_DT: f64 = 0.25;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    /// Output location and threading do not change results, so they are
    /// left out of the configuration hash.
    #[serde(default = "default_out", skip_serializing)]
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    #[serde(default, skip_serializing)]
    pub threads: usize,
    /// Sub-lattice size for partial cells.
    #[serde(default = "default_fine")]
    pub fine: usize,
    pub model: Option<GrowthModelSpec>,
    pub grid: Option<GridSpec>,
    pub times: Option<Vec<f64>>,
    pub cov: Option<CovConfig>,
    pub verify: Option<VerifyConfig>,
    pub fit: Option<FitConfig>,
    pub moments: Option<MomentsConfig>,
}

fn one() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_fine() -> usize {
    4
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovConfig {
    pub model: CircleCovModel,
    pub times: Vec<f64>,
    /// Explicit lags; otherwise `n_lags` equally spaced lags on [0, π].
    pub lags: Option<Vec<f64>>,
    #[serde(default = "default_lags")]
    pub n_lags: usize,
}

fn default_lags() -> usize {
    33
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Exact moments of the lattice field that is sampled.
    Mesh,
    /// Continuum moments.
    Adaptive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCheck {
    pub statistic: Statistic,
    pub points: Vec<Point>,
    #[serde(default)]
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub model: LinearModel,
    pub checks: Vec<VerifyCheck>,
    #[serde(default = "default_mode")]
    pub mode: VerifyMode,
    /// |z| above this fails the run.
    #[serde(default = "default_z")]
    pub max_z: f64,
}

fn default_mode() -> VerifyMode {
    VerifyMode::Mesh
}

fn default_z() -> f64 {
    3.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FitFamily {
    DirectRadial(DirectRadialFamily),
    /// Moments of log R at one tumour table row.
    Tumour { row: TumourRow, basis: BasisSpec },
    /// Fourier likelihood with τ_k scaled by one factor.
    TauScale { model: CircleCovModel, #[serde(default = "unit")] scale: f64 },
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub data: Option<PathBuf>,
    pub family: FitFamily,
    pub free: Vec<FreeParameter>,
    /// Fourier orders used by the likelihood.
    #[serde(default = "default_orders")]
    pub orders: usize,
    #[serde(default)]
    pub search: SearchOptions,
}

fn default_orders() -> usize {
    6
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub data: Option<PathBuf>,
    /// Number of lags on the geometric ladder, including 0.
    #[serde(default = "default_ladder")]
    pub ladder: usize,
    /// Work on log R.
    #[serde(default)]
    pub log: bool,
    /// Also export Fourier coefficients up to this order.
    #[serde(default)]
    pub orders: usize,
}

fn default_ladder() -> usize {
    levy_growth::inference::DEFAULT_LADDER_LEN
}

impl Default for MomentsConfig {
    fn default() -> Self {
        MomentsConfig { data: None, ladder: default_ladder(), log: false, orders: 0 }
    }
}

/// Sources in increasing precedence.
#[derive(Default)]
pub struct Sources<'a> {
    pub preset: Option<&'a str>,
    pub file: Option<&'a Path>,
    pub sets: &'a [String],
    pub flags: Vec<(&'static str, Value)>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), ConfigError> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ConfigError(format!("--set: malformed key `{path}`")));
    }
    let mut node = root;
    for k in &keys[..keys.len() - 1] {
        let obj = node.as_object_mut().ok_or_else(|| ConfigError(format!("--set {path}: `{k}` is not a table")))?;
        node = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    let obj = node.as_object_mut().ok_or_else(|| ConfigError(format!("--set {path}: parent is not a table")))?;
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// `key.path=value`, with the value read as a TOML literal and taken as a
/// bare string if that fails.
fn parse_set(s: &str) -> Result<(String, Value), ConfigError> {
    let (k, v) = s.split_once('=').ok_or_else(|| ConfigError(format!("--set `{s}`: expected key=value")))?;
    let parsed: Value = match toml::from_str::<Value>(&format!("v = {v}")) {
        Ok(Value::Object(mut m)) => m.remove("v").unwrap_or(Value::Null),
        _ => Value::String(v.to_string()),
    };
    Ok((k.trim().to_string(), parsed))
}

fn preset_value(id: &str) -> Result<Value, ConfigError> {
    let model = example_preset(id).map_err(|e| ConfigError(e.to_string()))?;
    let (grid, times) = preset_grid(id, PRESET_ANGLES, PRESET_DT).map_err(|e| ConfigError(e.to_string()))?;
    Ok(serde_json::json!({ "model": model, "grid": grid, "times": times }))
}

pub fn load(src: &Sources) -> Result<RunConfig, ConfigError> {
    let mut root = Value::Object(Map::new());
    if let Some(id) = src.preset {
        merge(&mut root, preset_value(id)?);
    }
    if let Some(path) = src.file {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        let v: Value = toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        merge(&mut root, v);
    }
    for s in src.sets {
        let (k, v) = parse_set(s)?;
        set_path(&mut root, &k, v)?;
    }
    for (k, v) in &src.flags {
        set_path(&mut root, k, v.clone())?;
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(root).map_err(|e| {
        let path = e.path().to_string();
        ConfigError(format!("field `{path}`: {}", e.into_inner()))
    })?;
    if cfg.replicates == 0 {
        return Err(ConfigError("field `replicates`: must be at least 1".into()));
    }
    if cfg.fine == 0 {
        return Err(ConfigError("field `fine`: must be at least 1".into()));
    }
    Ok(cfg)
}

/// FNV-1a hash of the resolved configuration.
pub fn config_hash(cfg: &RunConfig) -> u64 {
    levy_growth::rng::fnv1a(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_loads() {
        for id in levy_growth::growth::PRESET_IDS {
            let cfg = load(&Sources { preset: Some(id), ..Default::default() }).unwrap();
            assert!(cfg.model.is_some() && cfg.grid.is_some());
        }
    }

    #[test]
    fn overrides_apply_in_order() {
        let sets = ["grid.n_angles=64".to_string(), "seed=3".to_string()];
        let cfg = load(&Sources {
            preset: Some("ex4"),
            sets: &sets,
            flags: vec![("seed", Value::from(9u64))],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.grid.unwrap().n_angles, 64);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn unknown_keys_name_the_field() {
        let sets = ["grid.cells=64".to_string()];
        let err = load(&Sources { preset: Some("ex4"), sets: &sets, ..Default::default() }).unwrap_err();
        assert!(err.0.contains("grid") && err.0.contains("cells"), "{}", err.0);
    }
}

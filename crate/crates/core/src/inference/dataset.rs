use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::ambit::wrap;
use crate::error::{Error, Result};
use crate::growth::GrowthHistory;

/// Radial profiles on a common angular grid: `profiles[i][r][j]` is
/// replicate r at `times[i]` and `angles[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileDataset {
    pub times: Vec<f64>,
    pub angles: Vec<f64>,
    pub profiles: Vec<Vec<Vec<f64>>>,
}

impl ProfileDataset {
    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times.len() != self.profiles.len() {
            return Err(Error::InsufficientData("need profiles at one or more times".into()));
        }
        for (t, reps) in self.times.iter().zip(&self.profiles) {
            if reps.is_empty() {
                return Err(Error::InsufficientData(format!("no profile at t = {t}")));
            }
            if reps.iter().any(|p| p.len() != self.angles.len()) {
                return Err(Error::MalformedFile(format!("profile at t = {t} does not match the angle grid")));
            }
        }
        Ok(())
    }

    /// One replicate per history; histories must share times and grid.
    pub fn from_histories(hs: &[GrowthHistory]) -> Result<Self> {
        let first = hs.first().ok_or_else(|| Error::InsufficientData("no histories".into()))?;
        if hs.iter().any(|h| h.times != first.times || h.angles != first.angles) {
            return Err(Error::MalformedFile("histories differ in times or angles".into()));
        }
        let profiles = (0..first.times.len()).map(|i| hs.iter().map(|h| h.radii[i].clone()).collect()).collect();
        Ok(ProfileDataset { times: first.times.clone(), angles: first.angles.clone(), profiles })
    }

    /// Exponential models need positive radii.
    pub fn require_positive(&self) -> Result<()> {
        for (t, reps) in self.times.iter().zip(&self.profiles) {
            if let Some(v) = reps.iter().flatten().find(|v| !(**v > 0.0)) {
                return Err(Error::NonPositiveRadius { t: *t, value: *v });
            }
        }
        Ok(())
    }

    /// log R, after checking positivity.
    pub fn log(&self) -> Result<Self> {
        self.require_positive()?;
        let mut d = self.clone();
        for v in d.profiles.iter_mut().flatten().flatten() {
            *v = v.ln();
        }
        Ok(d)
    }

    /// Keep the times at the given indices.
    pub fn select_times(&self, idx: &[usize]) -> Self {
        ProfileDataset {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            angles: self.angles.clone(),
            profiles: idx.iter().map(|&i| self.profiles[i].clone()).collect(),
        }
    }
}

#[derive(Deserialize)]
struct Record {
    t: f64,
    phi: f64,
    r: f64,
    #[serde(default)]
    replicate: Option<usize>,
}

/// Check that sorted angles form a uniform grid around the circle.
fn check_uniform(angles: &[f64]) -> Result<()> {
    let n = angles.len();
    if n < 2 {
        return Err(Error::NonUniformGrid("fewer than two angles".into()));
    }
    let step = 2.0 * PI / n as f64;
    for (j, w) in angles.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > 1e-6 * step {
            return Err(Error::NonUniformGrid(format!("gap {} after angle index {j}, expected {step}", w[1] - w[0])));
        }
    }
    let wrap_gap = angles[0] + 2.0 * PI - angles[n - 1];
    if (wrap_gap - step).abs() > 1e-6 * step {
        return Err(Error::NonUniformGrid(format!("gap {wrap_gap} across ±π, expected {step}")));
    }
    Ok(())
}

/// Read a CSV with header `t,phi,r` or `t,phi,r,replicate`. Lines starting
/// with `#` are skipped and angles are wrapped to [−π, π).
pub fn ingest_profiles(path: impl AsRef<Path>) -> Result<ProfileDataset> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    for need in ["t", "phi", "r"] {
        if !headers.iter().any(|h| h == need) {
            return Err(Error::MalformedFile(format!("missing column `{need}`")));
        }
    }
    let mut groups: BTreeMap<(u64, usize), Vec<(f64, f64)>> = BTreeMap::new();
    let mut time_keys: BTreeMap<u64, f64> = BTreeMap::new();
    for (line, rec) in reader.deserialize::<Record>().enumerate() {
        let rec = rec.map_err(|e| Error::MalformedFile(format!("record {}: {e}", line + 1)))?;
        if !(rec.t.is_finite() && rec.phi.is_finite() && rec.r.is_finite()) {
            return Err(Error::MalformedFile(format!("record {}: non-finite value", line + 1)));
        }
        // Order-preserving key for f64 times.
        let key = if rec.t >= 0.0 { rec.t.to_bits() ^ (1 << 63) } else { !rec.t.to_bits() };
        time_keys.insert(key, rec.t);
        groups.entry((key, rec.replicate.unwrap_or(0))).or_default().push((wrap(rec.phi), rec.r));
    }
    if groups.is_empty() {
        return Err(Error::MalformedFile("no records".into()));
    }
    let mut angles: Option<Vec<f64>> = None;
    let mut by_time: BTreeMap<u64, Vec<Vec<f64>>> = BTreeMap::new();
    for ((key, _), mut rows) in groups {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let phis: Vec<f64> = rows.iter().map(|r| r.0).collect();
        check_uniform(&phis)?;
        match &angles {
            None => angles = Some(phis),
            Some(a) => {
                if a.len() != phis.len() || a.iter().zip(&phis).any(|(x, y)| (x - y).abs() > 1e-9) {
                    return Err(Error::NonUniformGrid(format!("t = {}: angles differ from the first profile", time_keys[&key])));
                }
            }
        }
        by_time.entry(key).or_default().push(rows.into_iter().map(|r| r.1).collect());
    }
    let times = by_time.keys().map(|k| time_keys[k]).collect();
    let profiles = by_time.into_values().collect();
    let d = ProfileDataset { times, angles: angles.expect("non-empty"), profiles };
    d.validate()?;
    Ok(d)
}

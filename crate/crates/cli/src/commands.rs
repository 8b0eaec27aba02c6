use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use levy_growth::circle_cov::covariance_table;
use levy_growth::discretize::Discretization;
use levy_growth::export::{provenance, write_cov_table, write_coefficients, write_histories, write_polylines, write_rows};
use levy_growth::fourier_radial::radial_fourier;
use levy_growth::growth::{CompiledModel, GrowthHistory};
use levy_growth::inference::{
    empirical_moments_with, fit_fourier_mle, fit_moments, ingest_profiles, lag_ladder, FitReport, ProfileDataset,
    ScaledTau, TumourFamily,
};
use levy_growth::levy::GridSpec;
use levy_growth::moments::{mc_verify, MomentMode, ModelMomentQuery};
use levy_growth::rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{config_hash, FitFamily, MomentsConfig, RunConfig, VerifyMode};

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Model(levy_growth::Error),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Model(_) => 3,
            Failure::Verification(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Model(e) => write!(f, "model error: {e}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<levy_growth::Error> for Failure {
    fn from(e: levy_growth::Error) -> Self {
        Failure::Model(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Model(e.into())
    }
}

type Outcome = Result<Vec<PathBuf>, Failure>;

fn missing(section: &str, cmd: &str) -> Failure {
    Failure::Config(format!("`{cmd}` needs a [{section}] section or a preset that provides it"))
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), Failure> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let f = File::create(&path)?;
    Ok((path, BufWriter::new(f)))
}

fn header(cfg: &RunConfig, seeded: bool) -> String {
    provenance(seeded.then_some(cfg.seed), config_hash(cfg))
}

fn disc(cfg: &RunConfig) -> Discretization {
    Discretization { refine: cfg.fine }
}

fn model_parts(cfg: &RunConfig, cmd: &str) -> Result<(CompiledModel, GridSpec), Failure> {
    let spec = cfg.model.as_ref().ok_or_else(|| missing("model", cmd))?;
    let grid = cfg.grid.clone().ok_or_else(|| missing("grid", cmd))?;
    let times = cfg.times.clone().ok_or_else(|| missing("times", cmd))?;
    Ok((CompiledModel::new(spec, &grid, &times, disc(cfg))?, grid))
}

/// Replicate r is drawn with seed mix(seed, r).
fn run_replicates(cfg: &RunConfig, cmd: &str) -> Result<Vec<GrowthHistory>, Failure> {
    let (model, _) = model_parts(cfg, cmd)?;
    let hs = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| model.run(rng::mix(cfg.seed, r as u64)))
        .collect::<levy_growth::Result<Vec<_>>>()?;
    Ok(hs)
}

fn time_label(t: f64) -> String {
    format!("{t}").replace('.', "p").replace('-', "m")
}

pub fn simulate(cfg: &RunConfig) -> Outcome {
    let hs = run_replicates(cfg, "simulate")?;
    let dir = &cfg.out_dir;
    let mut written = Vec::new();
    let (path, mut w) = create(dir, "history.csv")?;
    write_histories(&mut w, &hs, &header(cfg, true))?;
    w.flush()?;
    written.push(path);
    for (r, h) in hs.iter().enumerate() {
        for (i, &t) in h.times.iter().enumerate() {
            let name = if hs.len() == 1 {
                format!("polyline_t{}.csv", time_label(t))
            } else {
                format!("polyline_t{}_r{r}.csv", time_label(t))
            };
            let one = GrowthHistory { times: vec![t], radii: vec![h.radii[i].clone()], ..h.clone() };
            let (path, mut w) = create(dir, &name)?;
            write_polylines(&mut w, &one)?;
            w.flush()?;
            written.push(path);
        }
    }
    let negative: usize = hs.iter().map(|h| h.non_positive).sum();
    if negative > 0 {
        eprintln!("warning: {negative} non-positive radii in the output");
    }
    Ok(written)
}

pub fn cov(cfg: &RunConfig) -> Outcome {
    let c = cfg.cov.as_ref().ok_or_else(|| missing("cov", "cov"))?;
    if c.times.is_empty() {
        return Err(Failure::Config("field `cov.times`: at least one time is required".into()));
    }
    let lags: Vec<f64> = match &c.lags {
        Some(l) => l.clone(),
        None if c.n_lags >= 2 => (0..c.n_lags).map(|i| std::f64::consts::PI * i as f64 / (c.n_lags - 1) as f64).collect(),
        None => vec![0.0],
    };
    let rows = covariance_table(&c.model, &c.times, &lags);
    let (path, mut w) = create(&cfg.out_dir, "cov.csv")?;
    write_cov_table(&mut w, &rows, &header(cfg, false))?;
    w.flush()?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct VerifyRow {
    check: usize,
    statistic: levy_growth::moments::Statistic,
    analytic: f64,
    mc: f64,
    se: f64,
    z: f64,
    replicates: usize,
}

pub fn mc_verify_cmd(cfg: &RunConfig) -> Outcome {
    let v = cfg.verify.as_ref().ok_or_else(|| missing("verify", "mc-verify"))?;
    let grid = cfg.grid.clone().ok_or_else(|| missing("grid", "mc-verify"))?;
    if cfg.replicates < 3 {
        return Err(Failure::Config("field `replicates`: mc-verify needs at least 3".into()));
    }
    let mut rows = Vec::new();
    for (i, check) in v.checks.iter().enumerate() {
        let mut q = ModelMomentQuery::new(v.model.clone(), check.points.clone()).with_lambdas(check.lambdas.clone());
        if v.mode == VerifyMode::Mesh {
            q = q.with_mode(MomentMode::Mesh { grid: grid.clone(), disc: disc(cfg) });
        }
        let rep = mc_verify(&q, check.statistic, cfg.replicates, rng::mix(cfg.seed, i as u64), &grid, disc(cfg))?;
        rows.push(VerifyRow {
            check: i,
            statistic: rep.statistic,
            analytic: rep.analytic,
            mc: rep.mc,
            se: rep.se,
            z: rep.z,
            replicates: rep.replicates,
        });
    }
    let (path, mut w) = create(&cfg.out_dir, "mc_verify.csv")?;
    let bad: Vec<String> = rows.iter().filter(|r| !(r.z.abs() <= v.max_z)).map(|r| format!("check {} z = {}", r.check, r.z)).collect();
    write_rows(&mut w, &header(cfg, true), rows)?;
    w.flush()?;
    if !bad.is_empty() {
        return Err(Failure::Verification(format!("|z| > {} in {}", v.max_z, bad.join(", "))));
    }
    Ok(vec![path])
}

/// Profiles from `data` if given, otherwise simulated replicates.
fn dataset(cfg: &RunConfig, data: Option<&Path>, cmd: &str) -> Result<ProfileDataset, Failure> {
    match data {
        Some(p) => Ok(ingest_profiles(p)?),
        None => Ok(ProfileDataset::from_histories(&run_replicates(cfg, cmd)?)?),
    }
}

#[derive(Serialize)]
struct FitOutput<'a> {
    provenance: String,
    family: &'a FitFamily,
    #[serde(flatten)]
    report: FitReport,
}

pub fn fit(cfg: &RunConfig) -> Outcome {
    let f = cfg.fit.as_ref().ok_or_else(|| missing("fit", "fit"))?;
    let data = dataset(cfg, f.data.as_deref(), "fit")?;
    let report = match &f.family {
        FitFamily::DirectRadial(fam) => fit_moments(fam, &data, &f.free, &f.search)?,
        FitFamily::Tumour { row, basis } => {
            let i = data
                .times
                .iter()
                .position(|t| (t - row.t).abs() < 1e-9)
                .ok_or_else(|| Failure::Model(levy_growth::Error::InsufficientData(format!("no profiles at t = {}", row.t))))?;
            let data = data.select_times(&[i]);
            let n = data.n_angles();
            let step = 2.0 * std::f64::consts::PI / n as f64;
            let lags: Vec<f64> =
                lag_ladder(n, levy_growth::inference::DEFAULT_LADDER_LEN).iter().map(|&c| c as f64 * step).collect();
            let fam = TumourFamily::new(*row, basis.clone(), &lags)?;
            fit_moments(&fam, &data, &f.free, &f.search)?
        }
        FitFamily::TauScale { model, scale } => {
            let fam = ScaledTau { base: model.clone(), scale: *scale };
            fit_fourier_mle(&fam, &data, f.orders, &f.free, &f.search)?
        }
    };
    let out = FitOutput { provenance: header(cfg, true).trim_start_matches("# ").to_string(), family: &f.family, report };
    let (path, mut w) = create(&cfg.out_dir, "fit.json")?;
    serde_json::to_writer_pretty(&mut w, &out).map_err(|e| Failure::Model(levy_growth::Error::Io(e.into())))?;
    writeln!(w)?;
    w.flush()?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct SpatialRow {
    t: f64,
    lag_cells: usize,
    lag: f64,
    cov: f64,
}

#[derive(Serialize)]
struct SummaryRow {
    t: f64,
    replicates: usize,
    mean: f64,
    variance: f64,
}

#[derive(Serialize)]
struct TemporalRow {
    t1: f64,
    t2: f64,
    cov: f64,
}

pub fn moments(cfg: &RunConfig) -> Outcome {
    let m = cfg.moments.clone().unwrap_or_default();
    let mut data = dataset(cfg, m.data.as_deref(), "moments")?;
    if m.log {
        data = data.log()?;
    }
    let emp = empirical_moments_with(&data, &lag_ladder(data.n_angles(), m.ladder))?;
    let head = header(cfg, m.data.is_none());
    let dir = &cfg.out_dir;
    let mut written = Vec::new();

    let (path, mut w) = create(dir, "moments_summary.csv")?;
    let rows = (0..emp.times.len()).map(|i| SummaryRow {
        t: emp.times[i],
        replicates: emp.replicates[i],
        mean: emp.mean[i],
        variance: emp.variance[i],
    });
    write_rows(&mut w, &head, rows)?;
    w.flush()?;
    written.push(path);

    let (path, mut w) = create(dir, "moments_spatial.csv")?;
    let rows = emp.times.iter().zip(&emp.spatial).flat_map(|(&t, s)| {
        emp.lag_cells.iter().zip(&emp.lags).zip(s).map(move |((&c, &lag), &cov)| SpatialRow { t, lag_cells: c, lag, cov })
    });
    write_rows(&mut w, &head, rows)?;
    w.flush()?;
    written.push(path);

    let (path, mut w) = create(dir, "moments_temporal.csv")?;
    let rows = emp.temporal.iter().map(|&(i, l, cov)| TemporalRow { t1: emp.times[i], t2: emp.times[l], cov });
    write_rows(&mut w, &head, rows)?;
    w.flush()?;
    written.push(path);

    if m.orders > 0 {
        written.push(coefficients(&data, &m, dir, &head)?);
    }
    Ok(written)
}

/// Fourier coefficients of the replicate-mean profile at each time.
fn coefficients(data: &ProfileDataset, m: &MomentsConfig, dir: &Path, head: &str) -> Result<PathBuf, Failure> {
    let n = data.n_angles();
    let series = data
        .profiles
        .iter()
        .map(|reps| {
            let mean: Vec<f64> = (0..n).map(|j| reps.iter().map(|p| p[j]).sum::<f64>() / reps.len() as f64).collect();
            radial_fourier(&mean, m.orders)
        })
        .collect::<levy_growth::Result<Vec<_>>>()?;
    let (path, mut w) = create(dir, "coefficients.csv")?;
    write_coefficients(&mut w, &data.times, &series, head)?;
    w.flush()?;
    Ok(path)
}

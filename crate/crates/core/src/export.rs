//! CSV writers. Every file starts with one `# ` provenance line.

use std::io::Write;

use serde::Serialize;

use crate::circle_cov::CovRow;
use crate::error::Result;
use crate::fourier_radial::FourierSeries;
use crate::growth::GrowthHistory;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance line: crate version, seed and configuration hash.
pub fn provenance(seed: Option<u64>, config_hash: u64) -> String {
    match seed {
        Some(s) => format!("# levy-growth {VERSION} seed={s} config={config_hash:016x}"),
        None => format!("# levy-growth {VERSION} config={config_hash:016x}"),
    }
}

pub fn write_rows<W: Write, R: Serialize>(mut out: W, header: &str, rows: impl IntoIterator<Item = R>) -> Result<()> {
    writeln!(out, "{header}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RadiusRow {
    t: f64,
    phi: f64,
    r: f64,
}

#[derive(Serialize)]
struct ReplicateRow {
    t: f64,
    phi: f64,
    r: f64,
    replicate: usize,
}

#[derive(Serialize)]
struct PolylineRow {
    t: f64,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct CoefRow {
    t: f64,
    k: usize,
    a: f64,
    b: f64,
}

fn history_provenance(h: &GrowthHistory) -> String {
    format!(
        "{} grid={}x[{},{}]/{}",
        provenance(Some(h.seed), h.spec_hash),
        h.grid.n_angles,
        h.grid.t_min,
        h.grid.t_max,
        h.grid.dt
    )
}

/// Columns t, phi, r.
pub fn write_history<W: Write>(out: W, h: &GrowthHistory) -> Result<()> {
    let rows = h.times.iter().zip(&h.radii).flat_map(|(&t, row)| {
        h.angles.iter().zip(row).map(move |(&phi, &r)| RadiusRow { t, phi, r })
    });
    write_rows(out, &history_provenance(h), rows)
}

/// Columns t, phi, r, replicate; histories must share times and grid.
pub fn write_histories<W: Write>(out: W, hs: &[GrowthHistory], header: &str) -> Result<()> {
    let rows = hs.iter().enumerate().flat_map(|(i, h)| {
        h.times.iter().zip(&h.radii).flat_map(move |(&t, row)| {
            h.angles.iter().zip(row).map(move |(&phi, &r)| ReplicateRow { t, phi, r, replicate: i })
        })
    });
    write_rows(out, header, rows)
}

/// Closed boundary curves (R cos φ, R sin φ) per time; the first point is
/// repeated at the end of each curve.
pub fn write_polylines<W: Write>(out: W, h: &GrowthHistory) -> Result<()> {
    let rows = h.times.iter().zip(&h.radii).flat_map(|(&t, row)| {
        let n = row.len();
        (0..=n).map(move |i| {
            let j = i % n;
            let (s, c) = h.angles[j].sin_cos();
            PolylineRow { t, x: row[j] * c, y: row[j] * s }
        })
    });
    write_rows(out, &history_provenance(h), rows)
}

/// Columns t1, t2, dphi, cov.
pub fn write_cov_table<W: Write>(out: W, rows: &[CovRow], header: &str) -> Result<()> {
    write_rows(out, header, rows.iter().copied())
}

/// Columns t, k, a, b.
pub fn write_coefficients<W: Write>(out: W, times: &[f64], series: &[FourierSeries], header: &str) -> Result<()> {
    let rows = times.iter().zip(series).flat_map(|(&t, s)| {
        (0..s.a.len()).map(move |k| CoefRow { t, k, a: s.a[k], b: s.b[k] })
    });
    write_rows(out, header, rows)
}

use serde::Serialize;

use super::dataset::ProfileDataset;
use crate::error::{Error, Result};

pub const DEFAULT_LADDER_LEN: usize = 16;

/// Lag offsets in grid cells: 0, then up to `len − 1` distinct offsets
/// spaced geometrically from 1 cell to N/2 cells (a lag of π).
pub fn lag_ladder(n_angles: usize, len: usize) -> Vec<usize> {
    let half = n_angles / 2;
    let mut out = vec![0];
    if half == 0 || len < 2 {
        return out;
    }
    let m = len - 1;
    for i in 0..m {
        let x = if m == 1 { half as f64 } else { (half as f64).powf(i as f64 / (m - 1) as f64) };
        let c = (x.round() as usize).clamp(1, half);
        if *out.last().unwrap() < c {
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalMoments {
    pub times: Vec<f64>,
    pub replicates: Vec<usize>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Lag offsets in cells and their angles.
    pub lag_cells: Vec<usize>,
    pub lags: Vec<f64>,
    /// `spatial[i][m]` = Cov(R_t(φ), R_t(φ + lags[m])) at `times[i]`;
    /// `spatial[i][0]` is the variance.
    pub spatial: Vec<Vec<f64>>,
    /// (i, l, Cov(R_{t_i}(φ), R_{t_l}(φ))) for i < l.
    pub temporal: Vec<(usize, usize, f64)>,
}

/// Angle-averaged covariance of profiles a and b at a cyclic cell offset,
/// unbiased over replicates. With one replicate the angular mean replaces
/// the replicate mean.
fn cross_cov(a: &[Vec<f64>], b: &[Vec<f64>], offset: usize) -> f64 {
    let n = a[0].len();
    let reps = a.len();
    if reps >= 2 {
        let mean_a: Vec<f64> = (0..n).map(|j| a.iter().map(|p| p[j]).sum::<f64>() / reps as f64).collect();
        let mean_b: Vec<f64> = (0..n).map(|j| b.iter().map(|p| p[j]).sum::<f64>() / reps as f64).collect();
        let mut total = 0.0;
        for j in 0..n {
            let k = (j + offset) % n;
            let s: f64 = a.iter().zip(b).map(|(pa, pb)| (pa[j] - mean_a[j]) * (pb[k] - mean_b[k])).sum();
            total += s / (reps - 1) as f64;
        }
        total / n as f64
    } else {
        let ma = a[0].iter().sum::<f64>() / n as f64;
        let mb = b[0].iter().sum::<f64>() / n as f64;
        (0..n).map(|j| (a[0][j] - ma) * (b[0][(j + offset) % n] - mb)).sum::<f64>() / n as f64
    }
}

/// Moments with the default 16-lag ladder.
pub fn empirical_moments(data: &ProfileDataset) -> Result<EmpiricalMoments> {
    empirical_moments_with(data, &lag_ladder(data.n_angles(), DEFAULT_LADDER_LEN))
}

pub fn empirical_moments_with(data: &ProfileDataset, lag_cells: &[usize]) -> Result<EmpiricalMoments> {
    data.validate()?;
    let n = data.n_angles();
    if lag_cells.first() != Some(&0) || lag_cells.iter().any(|&c| c > n / 2) {
        return Err(Error::InsufficientData("lag ladder must start at 0 and stay within half the circle".into()));
    }
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut mean = Vec::new();
    let mut spatial = Vec::new();
    for reps in &data.profiles {
        let count = (reps.len() * n) as f64;
        mean.push(reps.iter().flatten().sum::<f64>() / count);
        spatial.push(lag_cells.iter().map(|&c| cross_cov(reps, reps, c)).collect::<Vec<f64>>());
    }
    let mut temporal = Vec::new();
    for i in 0..data.times.len() {
        for l in i + 1..data.times.len() {
            let (a, b) = (&data.profiles[i], &data.profiles[l]);
            if a.len() == b.len() {
                temporal.push((i, l, cross_cov(a, b, 0)));
            }
        }
    }
    Ok(EmpiricalMoments {
        times: data.times.clone(),
        replicates: data.profiles.iter().map(Vec::len).collect(),
        mean,
        variance: spatial.iter().map(|s| s[0]).collect(),
        lag_cells: lag_cells.to_vec(),
        lags: lag_cells.iter().map(|&c| c as f64 * step).collect(),
        spatial,
        temporal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_shape() {
        let l = lag_ladder(1024, 16);
        assert_eq!(l[0], 0);
        assert_eq!(*l.last().unwrap(), 512);
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert!(l.len() <= 16);
        assert_eq!(lag_ladder(8, 16), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn constant_profiles_have_no_variance() {
        let d = ProfileDataset { times: vec![1.0], angles: vec![0.0; 8], profiles: vec![vec![vec![2.5; 8]; 3]] };
        let m = empirical_moments(&d).unwrap();
        assert!(m.spatial[0].iter().all(|v| v.abs() < 1e-15));
        assert_eq!(m.mean[0], 2.5);
    }
}

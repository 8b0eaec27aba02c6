use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Space-time lattice: `n_angles` cells of width 2π/n_angles starting at
/// −π, and rows of height `dt` covering [t_min, t_max].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_angles: usize,
    pub dt: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl GridSpec {
    pub fn new(n_angles: usize, dt: f64, t_min: f64, t_max: f64) -> Result<Self> {
        let g = GridSpec { n_angles, dt, t_min, t_max };
        g.validate()?;
        Ok(g)
    }

    /// Build from an angular step, which must divide 2π.
    pub fn from_angle_step(dphi: f64, dt: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if !(dphi > 0.0) {
            return Err(Error::InvalidGrid(format!("angle step {dphi} must be positive")));
        }
        let n = 2.0 * PI / dphi;
        if (n - n.round()).abs() > 1e-9 * n {
            return Err(Error::InvalidGrid(format!("2π/{dphi} = {n} is not an integer")));
        }
        Self::new(n.round() as usize, dt, t_min, t_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_angles == 0 {
            return Err(Error::InvalidGrid("at least one angle is required".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidGrid(format!("time step {} must be positive", self.dt)));
        }
        if !(self.t_max > self.t_min && self.t_min.is_finite() && self.t_max.is_finite()) {
            return Err(Error::InvalidGrid("need t_min < t_max".into()));
        }
        let rows = (self.t_max - self.t_min) / self.dt;
        if (rows - rows.round()).abs() > 1e-9 * rows.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "window length {} is not a multiple of the time step {}",
                self.t_max - self.t_min,
                self.dt
            )));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        ((self.t_max - self.t_min) / self.dt).round() as usize
    }

    pub fn n_cells(&self) -> usize {
        self.n_rows() * self.n_angles
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.n_angles as f64
    }

    /// Evaluation angle j, which is also the left edge of angular cell j.
    pub fn angle(&self, j: usize) -> f64 {
        -PI + j as f64 * self.dphi()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_angles).map(|j| self.angle(j)).collect()
    }

    pub fn row_bounds(&self, r: usize) -> (f64, f64) {
        let lo = self.t_min + r as f64 * self.dt;
        (lo, if r + 1 == self.n_rows() { self.t_max } else { lo + self.dt })
    }

    pub fn cell(&self, r: usize, j: usize) -> usize {
        r * self.n_angles + j
    }

    /// Rows whose open interior meets (lo, hi).
    pub fn rows_meeting(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let n = self.n_rows();
        if !(hi > lo) {
            return 0..0;
        }
        let a = ((lo - self.t_min) / self.dt).floor().max(0.0) as usize;
        let b = (((hi - self.t_min) / self.dt).ceil().max(0.0) as usize).min(n);
        let mut a = a.min(n);
        let mut b = b;
        while a < b && self.row_bounds(a).1 <= lo {
            a += 1;
        }
        while b > a && self.row_bounds(b - 1).0 >= hi {
            b -= 1;
        }
        a..b
    }

    /// Same lattice with each cell split `factor` times along both axes.
    pub fn refined(&self, factor: usize) -> GridSpec {
        GridSpec {
            n_angles: self.n_angles * factor,
            dt: self.dt / factor as f64,
            t_min: self.t_min,
            t_max: self.t_max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_step_must_divide_circle() {
        assert!(GridSpec::from_angle_step(2.0 * PI / 1000.0, 1.0, 0.0, 10.0).is_ok());
        assert!(matches!(GridSpec::from_angle_step(0.3, 1.0, 0.0, 10.0), Err(Error::InvalidGrid(_))));
        assert!(GridSpec::new(8, 0.3, 0.0, 1.0).is_err());
    }

    #[test]
    fn rows_meeting_interval() {
        let g = GridSpec::new(4, 1.0, 0.0, 10.0).unwrap();
        assert_eq!(g.rows_meeting(2.0, 5.0), 2..5);
        assert_eq!(g.rows_meeting(2.5, 5.5), 2..6);
        assert_eq!(g.rows_meeting(-3.0, 0.0), 0..0);
        assert_eq!(g.rows_meeting(9.5, 20.0), 9..10);
        assert_eq!(g.angle(0), -PI);
    }
}

//! Time signals for boundary forces and body-force scaling.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vector-valued boundary force history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputSignal {
    Zero,
    /// `amplitude·sin(πt/duration)` on `[0, duration]`, zero elsewhere.
    HalfSine { amplitude: Vec<f64>, duration: f64 },
    /// Rows `[t, f_1, …, f_d]`, linearly interpolated and held constant
    /// outside the sampled range.
    Table { samples: Vec<Vec<f64>> },
}

impl InputSignal {
    pub fn eval(&self, t: f64, dim: usize) -> Vec<f64> {
        match self {
            InputSignal::Zero => vec![0.0; dim],
            InputSignal::HalfSine {
                amplitude,
                duration,
            } => {
                if (0.0..=*duration).contains(&t) {
                    let s = (PI * t / duration).sin();
                    amplitude.iter().map(|a| a * s).collect()
                } else {
                    vec![0.0; dim]
                }
            }
            InputSignal::Table { samples } => interpolate_rows(samples, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            InputSignal::Zero => true,
            InputSignal::HalfSine { amplitude, .. } => amplitude.iter().all(|&a| a == 0.0),
            InputSignal::Table { samples } => samples.iter().all(|row| row[1..].iter().all(|&f| f == 0.0)),
        }
    }

    pub fn validate(&self, dim: usize, path: &str, errors: &mut Vec<String>) {
        match self {
            InputSignal::Zero => {}
            InputSignal::HalfSine {
                amplitude,
                duration,
            } => {
                if amplitude.len() != dim {
                    errors.push(format!("{path}.amplitude: expected {dim} components, got {}", amplitude.len()));
                }
                if !(*duration > 0.0 && duration.is_finite()) {
                    errors.push(format!("{path}.duration: must be positive, got {duration}"));
                }
            }
            InputSignal::Table { samples } => {
                if samples.is_empty() {
                    errors.push(format!("{path}.samples: table is empty"));
                }
                for (i, row) in samples.iter().enumerate() {
                    if row.len() != dim + 1 {
                        errors.push(format!("{path}.samples[{i}]: expected [t, {dim} force components]"));
                    }
                }
                if samples.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    errors.push(format!("{path}.samples: times must be strictly increasing"));
                }
            }
        }
    }
}

fn interpolate_rows(rows: &[Vec<f64>], t: f64) -> Vec<f64> {
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    if t <= first[0] {
        return first[1..].to_vec();
    }
    if t >= last[0] {
        return last[1..].to_vec();
    }
    let i = rows.partition_point(|row| row[0] <= t);
    let (a, b) = (&rows[i - 1], &rows[i]);
    let w = (t - a[0]) / (b[0] - a[0]);
    a[1..].iter().zip(&b[1..]).map(|(x, y)| x + w * (y - x)).collect()
}

/// Scalar piecewise-linear factor, held constant outside the sampled range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule(Vec<[f64; 2]>);

impl Schedule {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("schedule needs at least one point".into()));
        }
        if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(Error::Config("schedule times must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        let rows: Vec<Vec<f64>> = self.0.iter().map(|p| p.to_vec()).collect();
        interpolate_rows(&rows, t)[0]
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0][1] == w[1][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_sine_pulse() {
        let s = InputSignal::HalfSine {
            amplitude: vec![1.0, 1.0],
            duration: 0.2,
        };
        let peak = s.eval(0.1, 2);
        assert!((peak[0] - 1.0).abs() < 1e-15 && (peak[1] - 1.0).abs() < 1e-15);
        assert_eq!(s.eval(0.25, 2), vec![0.0, 0.0]);
        assert_eq!(s.eval(0.2 + 1e-12, 2), vec![0.0, 0.0]);
        assert!(s.eval(0.2 - 1e-9, 2)[0].abs() < 1e-7);
        assert!(s.eval(0.2, 2)[0].abs() < 1e-15);
        assert_eq!(InputSignal::Zero.eval(3.7, 3), vec![0.0; 3]);
    }

    #[test]
    fn table_interpolates_and_holds() {
        let s = InputSignal::Table {
            samples: vec![vec![0.0, 0.0, 2.0], vec![1.0, 1.0, 0.0], vec![2.0, 3.0, 0.0]],
        };
        assert_eq!(s.eval(-1.0, 2), vec![0.0, 2.0]);
        assert_eq!(s.eval(0.5, 2), vec![0.5, 1.0]);
        assert_eq!(s.eval(1.5, 2), vec![2.0, 0.0]);
        assert_eq!(s.eval(9.0, 2), vec![3.0, 0.0]);
    }

    #[test]
    fn validation_catches_shape_errors() {
        let mut errors = Vec::new();
        InputSignal::HalfSine {
            amplitude: vec![1.0],
            duration: -1.0,
        }
        .validate(2, "boundary.right.signal", &mut errors);
        assert_eq!(errors.len(), 2);
        assert!(errors[0].starts_with("boundary.right.signal.amplitude"));
    }

    #[test]
    fn schedule() {
        let s = Schedule::new(vec![[0.0, 1.0], [1.0, 3.0]]).unwrap();
        assert_eq!(s.eval(0.5), 2.0);
        assert!(!s.is_constant());
        assert!(Schedule::new(vec![[0.0, 2.0], [1.0, 2.0]]).unwrap().is_constant());
        assert!(Schedule::new(vec![[1.0, 2.0], [1.0, 2.0]]).is_err());
    }
}

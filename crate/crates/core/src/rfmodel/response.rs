use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The K discrete evaluation frequencies spanning the desired band.
///
/// Frequencies are strictly increasing and positive. A single-point grid is
/// legal for model evaluation (peak/Q extraction rejects it separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    freqs_hz: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(freqs_hz: Vec<f64>) -> Result<Self> {
        if freqs_hz.is_empty() {
            return Err(Error::invalid("frequency grid must contain at least one point"));
        }
        for w in freqs_hz.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(format!(
                    "frequencies must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if !(freqs_hz[0] > 0.0) || !freqs_hz.iter().all(|f| f.is_finite()) {
            return Err(Error::invalid("frequencies must be finite and positive"));
        }
        Ok(Self { freqs_hz })
    }

    /// Uniform grid of `n` points centered on `center_hz` spanning `span_hz`.
    pub fn centered(center_hz: f64, span_hz: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid size must be at least 1"));
        }
        if n == 1 {
            return Self::new(vec![center_hz]);
        }
        let lo = center_hz - span_hz / 2.0;
        let step = span_hz / (n - 1) as f64;
        Self::new((0..n).map(|i| lo + i as f64 * step).collect())
    }

    pub fn freqs_hz(&self) -> &[f64] {
        &self.freqs_hz
    }

    pub fn len(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor guarantees K >= 1
    }

    pub fn min_hz(&self) -> f64 {
        self.freqs_hz[0]
    }

    pub fn max_hz(&self) -> f64 {
        *self.freqs_hz.last().unwrap()
    }

    pub fn center_hz(&self) -> f64 {
        (self.min_hz() + self.max_hz()) / 2.0
    }

    pub fn span_hz(&self) -> f64 {
        self.max_hz() - self.min_hz()
    }
}

/// A complex transfer function sampled on a [`FrequencyGrid`].
///
/// Values are dimensionless voltage ratios: SI channels, canceller responses,
/// and residuals all live here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponse {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl ComplexResponse {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid length {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::invalid("response values must be finite"));
        }
        Ok(Self { grid, values })
    }

    /// Evaluate a pointwise function of frequency on every grid point.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.freqs_hz().iter().map(|&fk| f(fk)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Linear interpolation of the complex value at an arbitrary frequency
    /// inside the grid span.
    pub fn interp(&self, f_hz: f64) -> Result<Complex64> {
        let fs = self.grid.freqs_hz();
        if f_hz < fs[0] || f_hz > fs[fs.len() - 1] {
            return Err(Error::invalid(format!(
                "frequency {f_hz} Hz outside grid span [{}, {}]",
                fs[0],
                fs[fs.len() - 1]
            )));
        }
        let idx = fs.partition_point(|&f| f < f_hz);
        if idx == 0 {
            return Ok(self.values[0]);
        }
        let (f0, f1) = (fs[idx - 1], fs[idx.min(fs.len() - 1)]);
        if idx == fs.len() || f1 == f0 {
            return Ok(self.values[idx - 1]);
        }
        let t = (f_hz - f0) / (f1 - f0);
        Ok(self.values[idx - 1] * (1.0 - t) + self.values[idx] * t)
    }
}

/// Pointwise difference `h_si - h_canc` on identical grids.
pub fn residual(h_si: &ComplexResponse, h_canc: &ComplexResponse) -> Result<ComplexResponse> {
    if h_si.grid() != h_canc.grid() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points or differing frequencies",
            h_si.len(),
            h_canc.len()
        )));
    }
    let values = h_si
        .values()
        .iter()
        .zip(h_canc.values())
        .map(|(a, b)| a - b)
        .collect();
    ComplexResponse::new(h_si.grid().clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_non_increasing() {
        assert!(FrequencyGrid::new(vec![1e9, 1e9]).is_err());
        assert!(FrequencyGrid::new(vec![2e9, 1e9]).is_err());
        assert!(FrequencyGrid::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn single_point_grid_is_legal() {
        let g = FrequencyGrid::new(vec![900e6]).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn centered_grid_spans() {
        let g = FrequencyGrid::centered(900e6, 20e6, 52).unwrap();
        assert_eq!(g.len(), 52);
        assert!((g.min_hz() - 890e6).abs() < 1e-3);
        assert!((g.max_hz() - 910e6).abs() < 1e-3);
    }

    #[test]
    fn response_length_must_match() {
        let g = FrequencyGrid::new(vec![1e9, 2e9]).unwrap();
        assert!(ComplexResponse::new(g, vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn residual_requires_same_grid() {
        let g1 = FrequencyGrid::new(vec![1e9, 2e9]).unwrap();
        let g2 = FrequencyGrid::new(vec![1e9, 3e9]).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); 2];
        let a = ComplexResponse::new(g1, ones.clone()).unwrap();
        let b = ComplexResponse::new(g2, ones).unwrap();
        assert!(residual(&a, &b).is_err());
    }

    #[test]
    fn residual_of_self_is_zero() {
        let g = FrequencyGrid::new(vec![1e9, 2e9]).unwrap();
        let a = ComplexResponse::new(g, vec![Complex64::new(0.3, -0.4); 2]).unwrap();
        let r = residual(&a, &a).unwrap();
        assert!(r.values().iter().all(|v| v.norm() == 0.0));
    }
}

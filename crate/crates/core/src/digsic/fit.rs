//! Least-squares memory-polynomial digital canceller.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Memory-polynomial structure: odd orders up to `max_odd_order`, with
/// `memory_depth` lagged taps per order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemPolySpec {
    pub max_odd_order: usize,
    pub memory_depth: usize,
    pub regularization: f64,
}

impl Default for MemPolySpec {
    fn default() -> Self {
        MemPolySpec {
            max_odd_order: 7,
            memory_depth: 8,
            regularization: 0.0,
        }
    }
}

impl MemPolySpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_odd_order == 0 || self.max_odd_order % 2 == 0 || self.max_odd_order > 7 {
            return Err(Error::invalid(
                "polynomial order must be odd and at most 7",
            ));
        }
        if self.memory_depth == 0 {
            return Err(Error::invalid("memory depth must be >= 1"));
        }
        if self.regularization < 0.0 {
            return Err(Error::invalid("regularization must be >= 0"));
        }
        Ok(())
    }

    pub fn orders(&self) -> Vec<usize> {
        (1..=self.max_odd_order).step_by(2).collect()
    }

    pub fn coefficient_count(&self) -> usize {
        self.orders().len() * self.memory_depth
    }
}

/// Fitted coefficients and the cancellation they achieve on the training
/// block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitalCancellerFit {
    /// Row-major (order, lag) coefficient matrix, orders outermost.
    pub coefficients: Vec<(f64, f64)>,
    /// 10 log10(power(rx) / power(rx - fit)).
    pub achieved_digital_sic_db: f64,
    /// Set when the regressor matrix was rank-deficient and the solution
    /// fell back to a minimally damped (minimum-norm style) solve.
    pub rank_deficient: bool,
}

fn regressor(x: Complex64, order: usize) -> Complex64 {
    x * x.norm().powi(order as i32 - 1)
}

/// Complex Gaussian elimination with partial pivoting. Returns the
/// solution and whether the system looked rank-deficient.
fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> (Vec<Complex64>, bool) {
    let n = b.len();
    let mut deficient = false;
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.norm()))
        .fold(0.0, f64::max)
        .max(1e-300);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() < 1e-13 * scale {
            // Damp the diagonal instead of dividing by ~zero.
            a[col][col] += Complex64::new(1e-12 * scale, 0.0);
            deficient = true;
            continue;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] -= sub;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = if a[col][col].norm() > 0.0 {
            s / a[col][col]
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    (x, deficient)
}

fn power(samples: &[Complex64]) -> f64 {
    samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / samples.len().max(1) as f64
}

/// Fit the memory polynomial mapping tx to rx by least squares and report
/// the training-block digital SIC.
pub fn fit_digital_canceller(
    tx: &[Complex64],
    rx: &[Complex64],
    spec: &MemPolySpec,
) -> Result<DigitalCancellerFit> {
    spec.validate()?;
    if tx.len() != rx.len() {
        return Err(Error::invalid("tx and rx streams must have equal length"));
    }
    let n_coeff = spec.coefficient_count();
    if tx.len() < 10 * n_coeff {
        return Err(Error::invalid(format!(
            "training block of {} samples is shorter than 10x the {} coefficients",
            tx.len(),
            n_coeff
        )));
    }
    let orders = spec.orders();
    let depth = spec.memory_depth;
    let n = tx.len();

    // Normal equations A w = b with A = X^H X (+ ridge), b = X^H rx,
    // built row-by-row without materializing X.
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n_coeff]; n_coeff];
    let mut b = vec![Complex64::new(0.0, 0.0); n_coeff];
    let mut row = vec![Complex64::new(0.0, 0.0); n_coeff];
    for t in depth - 1..n {
        for (oi, &p) in orders.iter().enumerate() {
            for m in 0..depth {
                row[oi * depth + m] = regressor(tx[t - m], p);
            }
        }
        for i in 0..n_coeff {
            let ci = row[i].conj();
            b[i] += ci * rx[t];
            for j in i..n_coeff {
                let add = ci * row[j];
                a[i][j] += add;
            }
        }
    }
    for i in 0..n_coeff {
        for j in 0..i {
            a[i][j] = a[j][i].conj();
        }
        a[i][i] += Complex64::new(spec.regularization, 0.0);
    }

    let (w, rank_deficient) = solve_complex(a, b);

    // Residual on the training block.
    let mut resid = Vec::with_capacity(n - (depth - 1));
    let mut rx_used = Vec::with_capacity(n - (depth - 1));
    for t in depth - 1..n {
        let mut est = Complex64::new(0.0, 0.0);
        for (oi, &p) in orders.iter().enumerate() {
            for m in 0..depth {
                est += w[oi * depth + m] * regressor(tx[t - m], p);
            }
        }
        resid.push(rx[t] - est);
        rx_used.push(rx[t]);
    }
    let p_rx = power(&rx_used);
    let p_res = power(&resid);
    // Least squares cannot worsen; guard the pathological all-zero case.
    let achieved = if p_res > 0.0 && p_rx > 0.0 {
        10.0 * (p_rx / p_res).log10()
    } else {
        200.0
    };

    Ok(DigitalCancellerFit {
        coefficients: w.iter().map(|c| (c.re, c.im)).collect(),
        achieved_digital_sic_db: achieved.min(200.0),
        rank_deficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digsic::ofdm::{gen_ofdm, OfdmParams};

    fn tx_stream() -> Vec<Complex64> {
        gen_ofdm(&OfdmParams::default(), 50, 11).unwrap()
    }

    #[test]
    fn pure_scale_is_fit_exactly() {
        let tx = tx_stream();
        let rx: Vec<Complex64> = tx.iter().map(|v| v * Complex64::new(0.3, -0.1)).collect();
        let spec = MemPolySpec { max_odd_order: 1, memory_depth: 1, regularization: 0.0 };
        let fit = fit_digital_canceller(&tx, &rx, &spec).unwrap();
        assert!(fit.achieved_digital_sic_db >= 100.0, "{}", fit.achieved_digital_sic_db);
    }

    #[test]
    fn planted_linear_channel_recovered() {
        let tx = tx_stream();
        let taps = [
            Complex64::new(0.8, 0.1),
            Complex64::new(-0.2, 0.3),
            Complex64::new(0.05, -0.07),
        ];
        let mut rx = vec![Complex64::new(0.0, 0.0); tx.len()];
        for t in 0..tx.len() {
            for (m, &h) in taps.iter().enumerate() {
                if t >= m {
                    rx[t] += h * tx[t - m];
                }
            }
        }
        let spec = MemPolySpec { max_odd_order: 1, memory_depth: 3, regularization: 0.0 };
        let fit = fit_digital_canceller(&tx, &rx, &spec).unwrap();
        assert!(fit.achieved_digital_sic_db >= 80.0, "{}", fit.achieved_digital_sic_db);
    }

    #[test]
    fn scaling_rx_leaves_sic_unchanged() {
        let tx = tx_stream();
        let mut rx = vec![Complex64::new(0.0, 0.0); tx.len()];
        for t in 0..tx.len() {
            rx[t] = 0.5 * tx[t];
            if t >= 1 {
                rx[t] += Complex64::new(0.1, 0.2) * tx[t - 1];
            }
            // Mild cubic term so the fit is not exact.
            rx[t] += 0.01 * tx[t] * tx[t].norm_sqr();
        }
        let spec = MemPolySpec { max_odd_order: 1, memory_depth: 2, regularization: 0.0 };
        let a = fit_digital_canceller(&tx, &rx, &spec).unwrap();
        let scaled: Vec<Complex64> = rx.iter().map(|v| v * Complex64::new(-2.0, 5.0)).collect();
        let b = fit_digital_canceller(&tx, &scaled, &spec).unwrap();
        assert!(
            (a.achieved_digital_sic_db - b.achieved_digital_sic_db).abs() < 1e-6,
            "{} vs {}",
            a.achieved_digital_sic_db,
            b.achieved_digital_sic_db
        );
    }

    #[test]
    fn deeper_memory_never_hurts() {
        let tx = tx_stream();
        let mut rx = vec![Complex64::new(0.0, 0.0); tx.len()];
        for t in 0..tx.len() {
            rx[t] = tx[t] * 0.3;
            if t >= 2 {
                rx[t] += Complex64::new(0.0, 0.1) * tx[t - 2];
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for depth in 1..=4 {
            let spec = MemPolySpec { max_odd_order: 3, memory_depth: depth, regularization: 0.0 };
            let fit = fit_digital_canceller(&tx, &rx, &spec).unwrap();
            assert!(
                fit.achieved_digital_sic_db >= prev - 1e-6,
                "depth {depth}: {} < {prev}",
                fit.achieved_digital_sic_db
            );
            prev = fit.achieved_digital_sic_db;
        }
    }

    #[test]
    fn length_preconditions() {
        let tx = vec![Complex64::new(1.0, 0.0); 30];
        let rx = tx.clone();
        let spec = MemPolySpec { max_odd_order: 7, memory_depth: 8, regularization: 0.0 };
        assert!(fit_digital_canceller(&tx, &rx, &spec).is_err());
        let spec = MemPolySpec { max_odd_order: 2, memory_depth: 1, regularization: 0.0 };
        assert!(fit_digital_canceller(&tx, &rx, &spec).is_err());
    }

    #[test]
    fn rank_deficiency_flagged() {
        // Constant tx makes every lag column identical.
        let tx = vec![Complex64::new(1.0, 0.0); 400];
        let rx = tx.clone();
        let spec = MemPolySpec { max_odd_order: 1, memory_depth: 3, regularization: 0.0 };
        let fit = fit_digital_canceller(&tx, &rx, &spec).unwrap();
        assert!(fit.rank_deficient);
        // The damped solve still cancels the constant signal.
        assert!(fit.achieved_digital_sic_db >= 60.0);
    }
}

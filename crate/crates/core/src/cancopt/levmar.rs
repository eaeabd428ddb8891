//! Damped least-squares polish with finite-difference Jacobians.
//!
//! Used after the simplex search to drive a residual-vector objective the
//! last few orders of magnitude down. The residual function returns the
//! stacked real and imaginary parts of the frequency-domain residual.

/// Result of a damped least-squares run.
pub struct LevMarResult {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
}

pub struct LevMarOptions {
    pub max_iterations: usize,
    pub tol: f64,
    /// Finite-difference step as a fraction of each parameter scale.
    pub fd_step_frac: f64,
}

impl Default for LevMarOptions {
    fn default() -> Self {
        LevMarOptions {
            max_iterations: 100,
            tol: 1e-14,
            fd_step_frac: 1e-7,
        }
    }
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Solve the symmetric positive (semi)definite system `a x = b` in place
/// via Gaussian elimination with partial pivoting. Returns None when the
/// system is effectively singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Levenberg-Marquardt with box projection.
///
/// `residuals(x, out)` fills the residual vector; `scales` sets the
/// finite-difference step per dimension; `project` clamps/wraps candidates.
pub fn levenberg_marquardt(
    residuals: &mut dyn FnMut(&[f64], &mut Vec<f64>),
    x0: &[f64],
    n_residuals: usize,
    scales: &[f64],
    project: &dyn Fn(&mut [f64]),
    opts: &LevMarOptions,
) -> LevMarResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);

    let mut r = vec![0.0; n_residuals];
    residuals(&x, &mut r);
    let mut cost = cost_of(&r);

    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut r_pert = vec![0.0; n_residuals];

    while iterations < opts.max_iterations {
        iterations += 1;

        // Forward-difference Jacobian, column per parameter.
        let mut jac = vec![vec![0.0; n]; n_residuals];
        for j in 0..n {
            let h = (scales[j] * opts.fd_step_frac).max(1e-14);
            let mut xp = x.clone();
            xp[j] += h;
            project(&mut xp);
            let dh = xp[j] - x[j];
            if dh == 0.0 {
                // At the upper bound: step downward instead.
                xp[j] = x[j] - h;
                project(&mut xp);
            }
            let dh = xp[j] - x[j];
            if dh == 0.0 {
                continue;
            }
            residuals(&xp, &mut r_pert);
            for i in 0..n_residuals {
                jac[i][j] = (r_pert[i] - r[i]) / dh;
            }
        }

        // Normal equations with Levenberg damping on the diagonal.
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..n_residuals {
            for a in 0..n {
                jtr[a] += jac[i][a] * r[i];
                for b in a..n {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }

        let mut improved = false;
        for _ in 0..10 {
            let mut damped = jtj.clone();
            for (a, row) in damped.iter_mut().enumerate() {
                row[a] += lambda * (jtj[a][a].max(1e-12));
            }
            let Some(delta) = solve(damped, jtr.clone()) else {
                lambda *= 10.0;
                continue;
            };
            let mut x_new: Vec<f64> = x.iter().zip(&delta).map(|(xi, d)| xi - d).collect();
            project(&mut x_new);
            residuals(&x_new, &mut r_pert);
            let cost_new = cost_of(&r_pert);
            if cost_new < cost {
                x = x_new;
                std::mem::swap(&mut r, &mut r_pert);
                let rel_drop = (cost - cost_new) / (cost + 1e-300);
                cost = cost_new;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel_drop < opts.tol {
                    return LevMarResult { x, cost, iterations };
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }

    LevMarResult { x, cost, iterations }
}

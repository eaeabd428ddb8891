//! Box-projected Nelder-Mead simplex minimizer.

/// Outcome of one simplex run.
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Relative function-spread convergence threshold.
    pub tol: f64,
    /// Initial simplex step as a fraction of each parameter's scale.
    pub initial_step_frac: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iterations: 2000,
            tol: 1e-12,
            initial_step_frac: 0.10,
        }
    }
}

/// Minimize `f` starting from `x0`. `scales[i]` sets the initial simplex
/// extent per dimension; `project` maps any candidate back into the
/// feasible set (clamping boxes, wrapping circular parameters).
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    scales: &[f64],
    project: &dyn Fn(&mut [f64]),
    opts: &NelderMeadOptions,
) -> NelderMeadResult {
    let n = x0.len();
    assert_eq!(scales.len(), n);

    let eval = |f: &mut dyn FnMut(&[f64]) -> f64, x: &mut Vec<f64>| {
        project(x);
        f(x)
    };

    // Initial simplex: x0 plus one step along each axis.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x = x0.to_vec();
    let fx = eval(f, &mut x);
    simplex.push((x, fx));
    for i in 0..n {
        let mut xi = x0.to_vec();
        let step = scales[i] * opts.initial_step_frac;
        xi[i] += if step != 0.0 { step } else { 1e-6 };
        let fxi = eval(f, &mut xi);
        simplex.push((xi, fxi));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if (worst - best).abs() <= opts.tol * (best.abs() + 1e-300) {
            converged = true;
            break;
        }

        // Centroid of all but the worst point.
        let mut centroid = vec![0.0; n];
        for (xi, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(xi) {
                *c += v / n as f64;
            }
        }

        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (x - y)).collect()
        };

        let mut reflected = blend(&centroid, &simplex[n].0, alpha);
        let fr = eval(f, &mut reflected);

        if fr < simplex[0].1 {
            let mut expanded = blend(&centroid, &simplex[n].0, gamma);
            let fe = eval(f, &mut expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let mut contracted = blend(&centroid, &simplex[n].0, -rho);
            let fc = eval(f, &mut contracted);
            if fc < simplex[n].1 {
                simplex[n] = (contracted, fc);
            } else {
                // Shrink toward the best point.
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let mut xs: Vec<f64> = best_x
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, x)| b + sigma * (x - b))
                        .collect();
                    let fs = eval(f, &mut xs);
                    *entry = (xs, fs);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        fx,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2);
        let r = nelder_mead(
            &mut f,
            &[0.0, 0.0],
            &[1.0, 1.0],
            &|_x| {},
            &NelderMeadOptions::default(),
        );
        assert!((r.x[0] - 3.0).abs() < 1e-5, "{:?}", r.x);
        assert!((r.x[1] + 1.0).abs() < 1e-5);
        assert!(r.converged);
    }

    #[test]
    fn respects_box_projection() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2);
        let project = |x: &mut [f64]| x[0] = x[0].clamp(-1.0, 1.0);
        let r = nelder_mead(&mut f, &[0.0], &[1.0], &project, &NelderMeadOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-6, "constrained optimum at the bound");
    }

    #[test]
    fn rosenbrock_two_dims() {
        let mut f = |x: &[f64]| {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        };
        let opts = NelderMeadOptions {
            max_iterations: 10000,
            ..Default::default()
        };
        let r = nelder_mead(&mut f, &[-1.2, 1.0], &[1.0, 1.0], &|_x| {}, &opts);
        assert!(r.fx < 1e-8, "fx = {}", r.fx);
    }
}

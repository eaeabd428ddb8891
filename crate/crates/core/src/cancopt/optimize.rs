//! Multi-start canceller configuration fitting: minimize the summed squared
//! residual between the SI channel and the canceller model over the band,
//! subject to the family's box constraints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use super::levmar::{levenberg_marquardt, LevMarOptions};
use super::nelder_mead::{nelder_mead, NelderMeadOptions};
use super::param::{ConstraintSet, Family};
use crate::error::{Error, Result};
use crate::rfmodel::{canceller_response, linear_to_db, CancellerConfig, ComplexResponse};
use crate::sichan::{residual, sic_metrics, SicMetrics};

/// Solver knobs. Determinism is pinned by `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub tol: f64,
    /// Run the damped least-squares polish after the simplex search.
    pub polish: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            restarts: 16,
            max_iterations: 2000,
            seed: 0,
            tol: 1e-12,
            polish: true,
        }
    }
}

/// Configuration plus metrics for one pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub config: CancellerConfig,
    pub objective_value: f64,
    pub metrics: SicMetrics,
}

/// Output of an optimization run, with optional quantization stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub best_config: CancellerConfig,
    /// Sum over frequencies of |H_SI - H|^2 at the best configuration.
    pub objective_value: f64,
    pub metrics: SicMetrics,
    pub post_quantization: Option<StageResult>,
    pub post_local_search: Option<StageResult>,
    pub restarts_used: usize,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub converged: bool,
}

/// Summed squared residual of a parameter vector; +inf on model degeneracy.
pub fn objective(constraints: &ConstraintSet, x: &[f64], h_si: &ComplexResponse) -> f64 {
    match constraints
        .decode(x)
        .and_then(|cfg| canceller_response(&cfg, h_si.grid()))
    {
        Ok(h) => h_si
            .values()
            .iter()
            .zip(h.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum(),
        Err(_) => f64::INFINITY,
    }
}

/// Objective of a full configuration (used for report cross-checks).
pub fn config_objective(config: &CancellerConfig, h_si: &ComplexResponse) -> Result<f64> {
    let h = canceller_response(config, h_si.grid())?;
    Ok(h_si
        .values()
        .iter()
        .zip(h.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum())
}

fn stage_metrics(config: &CancellerConfig, h_si: &ComplexResponse) -> Result<SicMetrics> {
    let h = canceller_response(config, h_si.grid())?;
    Ok(sic_metrics(&residual(h_si, &h)?))
}

/// Heuristic initialization: partition the band into m sub-bands and aim
/// one tap at each center. For the RFIC family this is exactly the
/// published baseline ("Heur") stand-in; for the other families it is the
/// analogous placement.
pub fn heuristic_init(
    family: Family,
    m_taps: usize,
    h_si: &ComplexResponse,
    constraints: &ConstraintSet,
) -> Vec<f64> {
    let grid = h_si.grid();
    let band = grid.span_hz().max(1.0);
    let m = m_taps.max(1);
    let sub = band / m as f64;
    let centers: Vec<f64> = (0..m)
        .map(|i| grid.min_hz() + (i as f64 + 0.5) * sub)
        .collect();
    // Channel sample nearest each sub-band center.
    let sample = |fc: f64| {
        let idx = grid
            .freqs_hz()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - fc).abs().total_cmp(&(b.1 - fc).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        h_si.values()[idx]
    };
    let clamp_to = |p: usize, v: f64| v.clamp(constraints.params[p].min, constraints.params[p].max);

    let mut x = Vec::with_capacity(constraints.dims(m));
    match family {
        Family::Rfic => {
            for &fc in &centers {
                let h = sample(fc);
                let amp_db = clamp_to(0, linear_to_db(h.norm().max(1e-12)));
                let q = clamp_to(3, fc / sub);
                x.extend([amp_db, -h.arg(), clamp_to(2, fc), q]);
            }
        }
        Family::Pcb => {
            // Spread the frequency-tuning capacitor across its range and
            // split the channel amplitude across taps.
            let (cf_min, cf_max) = (constraints.params[2].min, constraints.params[2].max);
            for (i, &fc) in centers.iter().enumerate() {
                let h = sample(fc);
                let t = if m == 1 { 0.5 } else { i as f64 / (m - 1) as f64 };
                let cf = cf_min + t * (cf_max - cf_min);
                let cq = 0.5 * (constraints.params[3].min + constraints.params[3].max);
                let amp_db = clamp_to(0, linear_to_db(h.norm().max(1e-12) / m as f64) + 4.1);
                x.extend([amp_db, -h.arg(), cf, cq]);
            }
        }
        Family::DelayLine => {
            let (tau_min, tau_max) = (constraints.params[1].min, constraints.params[1].max);
            for (i, &fc) in centers.iter().enumerate() {
                let h = sample(fc);
                let t = (i as f64 + 0.5) / m as f64;
                let tau = tau_min + t * (tau_max - tau_min);
                let amp = clamp_to(0, h.norm() / m as f64);
                x.extend([amp, tau, -h.arg()]);
            }
        }
        Family::AmpPhase => {
            let h = sample(grid.center_hz());
            x.extend([clamp_to(0, h.norm()), -h.arg()]);
        }
    }
    x
}

/// Uniform random point inside the boxes (phases uniform on the circle).
fn random_init(constraints: &ConstraintSet, m_taps: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = constraints.dims_per_tap();
    let m = if constraints.family == Family::AmpPhase { 1 } else { m_taps };
    (0..d * m)
        .map(|i| {
            let p = &constraints.params[i % d];
            rng.gen_range(p.min..p.max)
        })
        .collect()
}

/// Solve the continuous relaxation of the configuration problem.
///
/// Restart 0 starts at the heuristic placement; later restarts draw
/// uniformly in the boxes; `extra_inits` (e.g. a warm start from a smaller
/// tap count) are appended as additional restarts. Deterministic per seed.
pub fn optimize_config(
    family: Family,
    m_taps: usize,
    h_si: &ComplexResponse,
    constraints: &ConstraintSet,
    solver_opts: &SolverOptions,
    extra_inits: &[Vec<f64>],
) -> Result<OptimizeReport> {
    constraints.validate()?;
    if constraints.family != family {
        return Err(Error::invalid("constraint set family does not match request"));
    }
    if m_taps == 0 {
        return Err(Error::invalid("need at least one tap"));
    }
    let started = Instant::now();
    let n = constraints.dims(m_taps);
    let d = constraints.dims_per_tap();

    let scales: Vec<f64> = (0..n)
        .map(|i| {
            let p = &constraints.params[i % d];
            p.max - p.min
        })
        .collect();
    // Clamp non-circular parameters only: phases stay free during the
    // search (decode wraps them) so finite differences never straddle a
    // wrap discontinuity.
    let project = |x: &mut [f64]| {
        for (i, v) in x.iter_mut().enumerate() {
            let p = &constraints.params[i % d];
            if !p.circular {
                *v = v.clamp(p.min, p.max);
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(solver_opts.seed);
    let mut inits: Vec<Vec<f64>> = Vec::new();
    inits.push(heuristic_init(family, m_taps, h_si, constraints));
    for _ in 1..solver_opts.restarts.max(1) {
        inits.push(random_init(constraints, m_taps, &mut rng));
    }
    inits.extend(extra_inits.iter().cloned());

    let nm_opts = NelderMeadOptions {
        max_iterations: solver_opts.max_iterations,
        tol: solver_opts.tol,
        ..Default::default()
    };

    let k = h_si.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut total_iterations = 0;
    let mut any_converged = false;

    for init in &inits {
        let mut f = |x: &[f64]| objective(constraints, x, h_si);
        let nm = nelder_mead(&mut f, init, &scales, &project, &nm_opts);
        total_iterations += nm.iterations;
        any_converged |= nm.converged;

        let (mut x, mut fx) = (nm.x, nm.fx);
        if solver_opts.polish && fx.is_finite() {
            let mut resid = |x: &[f64], out: &mut Vec<f64>| {
                match constraints
                    .decode(x)
                    .and_then(|cfg| canceller_response(&cfg, h_si.grid()))
                {
                    Ok(h) => {
                        for (i, (a, b)) in h_si.values().iter().zip(h.values()).enumerate() {
                            let diff = a - b;
                            out[2 * i] = diff.re;
                            out[2 * i + 1] = diff.im;
                        }
                    }
                    Err(_) => out.iter_mut().for_each(|v| *v = 1e154),
                }
            };
            let lm = levenberg_marquardt(
                &mut resid,
                &x,
                2 * k,
                &scales,
                &project,
                &LevMarOptions::default(),
            );
            total_iterations += lm.iterations;
            if lm.cost < fx {
                x = lm.x;
                fx = lm.cost;
            }
        }

        // Deterministic best-objective fold: strict improvement wins, so
        // earlier restarts win ties regardless of evaluation order.
        if best.as_ref().map_or(true, |(_, b)| fx < *b) {
            best = Some((x, fx));
        }
    }

    let (mut x_best, objective_value) = best.unwrap();
    project(&mut x_best);
    let best_config = constraints.decode(&x_best)?;
    let metrics = stage_metrics(&best_config, h_si)?;

    Ok(OptimizeReport {
        best_config,
        objective_value,
        metrics,
        post_quantization: None,
        post_local_search: None,
        restarts_used: inits.len(),
        iterations: total_iterations,
        wall_time_s: started.elapsed().as_secs_f64(),
        converged: any_converged,
    })
}

/// Snap every parameter of a configuration to its hardware lattice.
/// The configuration must already satisfy the boxes.
pub fn quantize_config(
    config: &CancellerConfig,
    constraints: &ConstraintSet,
) -> Result<CancellerConfig> {
    let x = constraints.encode(config)?;
    let d = constraints.dims_per_tap();
    let snapped: Result<Vec<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| constraints.params[i % d].snap(v))
        .collect();
    constraints.decode(&snapped?)
}

/// Cyclic coordinate descent over lattice neighbors (one step per
/// parameter at a time), accepting strict objective decreases only.
pub fn local_search(
    config_quantized: &CancellerConfig,
    h_si: &ComplexResponse,
    constraints: &ConstraintSet,
    max_rounds: usize,
) -> Result<StageResult> {
    let d = constraints.dims_per_tap();
    let x = constraints.encode(config_quantized)?;
    let mut idx: Vec<u64> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| constraints.params[i % d].lattice_index(v))
        .collect::<Result<_>>()?;
    let from_idx = |idx: &[u64]| -> Result<Vec<f64>> {
        idx.iter()
            .enumerate()
            .map(|(i, &k)| constraints.params[i % d].lattice_value(k))
            .collect()
    };

    let mut best_x = from_idx(&idx)?;
    let mut best_f = objective(constraints, &best_x, h_si);

    for _ in 0..max_rounds {
        let mut improved = false;
        for i in 0..idx.len() {
            let p = &constraints.params[i % d];
            let max_idx = p.max_lattice_index()?;
            let current = idx[i];
            let mut candidates = Vec::with_capacity(2);
            if p.circular {
                // The phase lattice wraps: stepping past an endpoint lands
                // on the other endpoint's neighbor.
                candidates.push(if current == 0 { max_idx } else { current - 1 });
                candidates.push(if current == max_idx { 0 } else { current + 1 });
            } else {
                if current > 0 {
                    candidates.push(current - 1);
                }
                if current < max_idx {
                    candidates.push(current + 1);
                }
            }
            for cand in candidates {
                let mut trial = idx.clone();
                trial[i] = cand;
                let tx = from_idx(&trial)?;
                let tf = objective(constraints, &tx, h_si);
                if tf < best_f {
                    best_f = tf;
                    best_x = tx;
                    idx = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }

    let config = constraints.decode(&best_x)?;
    let metrics = stage_metrics(&config, h_si)?;
    Ok(StageResult {
        config,
        objective_value: best_f,
        metrics,
    })
}

/// Full configuration pipeline: continuous optimization, then (optionally)
/// hardware rounding and the lattice local search.
pub fn optimize_pipeline(
    family: Family,
    m_taps: usize,
    h_si: &ComplexResponse,
    constraints: &ConstraintSet,
    solver_opts: &SolverOptions,
    quantized: bool,
    extra_inits: &[Vec<f64>],
    local_search_rounds: usize,
) -> Result<OptimizeReport> {
    let mut report = optimize_config(family, m_taps, h_si, constraints, solver_opts, extra_inits)?;
    if quantized {
        let rounded = quantize_config(&report.best_config, constraints)?;
        let rounded_obj = config_objective(&rounded, h_si)?;
        let rounded_metrics = stage_metrics(&rounded, h_si)?;
        report.post_quantization = Some(StageResult {
            config: rounded.clone(),
            objective_value: rounded_obj,
            metrics: rounded_metrics,
        });
        let searched = local_search(&rounded, h_si, constraints, local_search_rounds)?;
        report.post_local_search = Some(searched);
    }
    Ok(report)
}

/// Heuristic RFIC baseline configuration (the "Heur" comparison point).
pub fn heuristic_rfic_config(
    m_taps: usize,
    h_si: &ComplexResponse,
    constraints: &ConstraintSet,
) -> Result<CancellerConfig> {
    if m_taps == 0 {
        return Err(Error::invalid("need at least one tap"));
    }
    if constraints.family != Family::Rfic {
        return Err(Error::invalid("heuristic baseline is defined for the RFIC family"));
    }
    let x = heuristic_init(Family::Rfic, m_taps, h_si, constraints);
    constraints.decode(&x)
}

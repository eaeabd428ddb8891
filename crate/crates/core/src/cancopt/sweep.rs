//! Tap-count x bandwidth sweeps over canceller families, in ideal
//! (continuous) and quantized modes.

use serde::{Deserialize, Serialize};

use super::optimize::{optimize_pipeline, OptimizeReport, SolverOptions};
use super::param::{ConstraintSet, Family};
use crate::error::{Error, Result};
use crate::rfmodel::{ComplexResponse, FrequencyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ideal,
    Quantized,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Ideal => "ideal",
            Mode::Quantized => "quantized",
        }
    }
}

/// One sweep cell key, ordered (family, m, b, mode) for deterministic output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub family: Family,
    pub m_taps: usize,
    pub bandwidth_hz: f64,
    pub mode: Mode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: SweepCell,
    pub report: OptimizeReport,
}

/// Restrict a channel to the sub-band of width `bandwidth_hz` around the
/// grid center.
pub fn restrict_band(h: &ComplexResponse, bandwidth_hz: f64) -> Result<ComplexResponse> {
    let center = h.grid().center_hz();
    let (lo, hi) = (center - bandwidth_hz / 2.0, center + bandwidth_hz / 2.0);
    if lo < h.grid().min_hz() - 1e-6 || hi > h.grid().max_hz() + 1e-6 {
        return Err(Error::invalid(format!(
            "channel grid [{}, {}] does not cover the requested band [{lo}, {hi}]",
            h.grid().min_hz(),
            h.grid().max_hz()
        )));
    }
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    for (&f, &v) in h.grid().freqs_hz().iter().zip(h.values()) {
        if f >= lo - 1e-6 && f <= hi + 1e-6 {
            freqs.push(f);
            values.push(v);
        }
    }
    ComplexResponse::new(FrequencyGrid::new(freqs)?, values)
}

/// Run the full factorial sweep. Within a family and bandwidth, each tap
/// count M > 1 warm-starts from the best (M-1)-tap configuration with one
/// extra tap parked at its minimum amplitude, so added taps never hurt.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    families: &[Family],
    m_list: &[usize],
    b_list_hz: &[f64],
    h_si: &ComplexResponse,
    modes: &[Mode],
    solver_opts: &SolverOptions,
    local_search_rounds: usize,
    mut on_cell: impl FnMut(&SweepRow),
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &family in families {
        let constraints = ConstraintSet::defaults_for(family);
        for &b in b_list_hz {
            let h_band = restrict_band(h_si, b)?;
            // Warm-start chain across M, per mode.
            for &mode in modes {
                let mut prev_best: Option<Vec<f64>> = None;
                for &m in m_list {
                    let m_eff = if family == Family::AmpPhase { 1 } else { m };
                    let extra: Vec<Vec<f64>> = prev_best
                        .as_ref()
                        .map(|x| vec![extend_with_idle_tap(x, &constraints)])
                        .into_iter()
                        .flatten()
                        .filter(|x| x.len() == constraints.dims(m_eff))
                        .collect();
                    let report = optimize_pipeline(
                        family,
                        m_eff,
                        &h_band,
                        &constraints,
                        solver_opts,
                        mode == Mode::Quantized,
                        &extra,
                        local_search_rounds,
                    )?;
                    prev_best = constraints.encode(&report.best_config).ok();
                    let row = SweepRow {
                        cell: SweepCell {
                            family,
                            // Report the requested tap count even when the
                            // family coerces it (amp_phase always solves one
                            // tap), so callers see the full factorial.
                            m_taps: m,
                            bandwidth_hz: b,
                            mode,
                        },
                        report,
                    };
                    on_cell(&row);
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

/// Append one tap at its minimum amplitude (other parameters mid-box) to a
/// flat parameter vector, producing a warm start for M+1 taps.
fn extend_with_idle_tap(x: &[f64], constraints: &ConstraintSet) -> Vec<f64> {
    let mut out = x.to_vec();
    for p in &constraints.params {
        if p.name.starts_with("amp") {
            out.push(p.min);
        } else {
            out.push(0.5 * (p.min + p.max));
        }
    }
    out
}

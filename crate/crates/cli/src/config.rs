//! JSON run-configuration types. Every struct rejects unknown keys so a
//! typo'd field is a schema error (exit code 2), not a silent default.

use fde_sic_core::cancopt::{Family, Mode, SolverOptions};
use fde_sic_core::digsic::{Constellation, MemPolySpec, OfdmParams, PaModel};
use fde_sic_core::netgain::{AxisSpec, GainScenario};
use fde_sic_core::rfmodel::{CancellerConfig, FrequencyGrid};
use fde_sic_core::sichan::{
    benchmark_channel_spec_seeded, load_channel_csv, synth_si_channel, SiChannelSpec,
    BENCHMARK_SEED,
};
use fde_sic_core::{Error, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Frequency grid given either as a centered span or an explicit list.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum GridSpec {
    Centered {
        center_hz: f64,
        span_hz: f64,
        points: usize,
    },
    Explicit {
        freqs_hz: Vec<f64>,
    },
}

impl GridSpec {
    pub fn build(&self) -> Result<FrequencyGrid> {
        match self {
            GridSpec::Centered {
                center_hz,
                span_hz,
                points,
            } => FrequencyGrid::centered(*center_hz, *span_hz, *points),
            GridSpec::Explicit { freqs_hz } => FrequencyGrid::new(freqs_hz.clone()),
        }
    }
}

/// One synthetic multipath component: amplitude (linear), delay (s), phase (rad).
pub type PathTriple = (f64, f64, f64);

/// SI channel source: a stored CSV, the seeded benchmark recipe, or an
/// explicit multipath synthesis.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelCfg {
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub benchmark: Option<BenchmarkCfg>,
    #[serde(default)]
    pub synth: Option<SynthCfg>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkCfg {
    pub grid: GridSpec,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthCfg {
    pub paths: Vec<PathTriple>,
    pub target_isolation_db: f64,
    pub grid: GridSpec,
    #[serde(default)]
    pub rng_seed: u64,
}

impl ChannelCfg {
    /// Resolve the channel, with `base` as the directory for relative paths.
    pub fn load(&self, base: &Path) -> Result<fde_sic_core::rfmodel::ComplexResponse> {
        match (&self.file, &self.benchmark, &self.synth) {
            (Some(p), None, None) => {
                let path = if p.is_absolute() {
                    p.clone()
                } else {
                    base.join(p)
                };
                load_channel_csv(&path)
            }
            (None, Some(b), None) => {
                let grid = b.grid.build()?;
                let seed = b.seed.unwrap_or(BENCHMARK_SEED);
                synth_si_channel(&benchmark_channel_spec_seeded(grid, seed))
            }
            (None, None, Some(s)) => synth_si_channel(&SiChannelSpec {
                paths: s.paths.clone(),
                target_isolation_db: s.target_isolation_db,
                grid: s.grid.build()?,
                rng_seed: s.rng_seed,
            }),
            _ => Err(Error::invalid(
                "channel must set exactly one of `file`, `benchmark`, `synth`",
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverCfg {
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub polish: Option<bool>,
}

impl SolverCfg {
    /// Merge onto the defaults; `global_seed` applies only when the solver
    /// seed is not set explicitly.
    pub fn build(cfg: &Option<SolverCfg>, global_seed: Option<u64>) -> SolverOptions {
        let mut o = SolverOptions::default();
        if let Some(c) = cfg {
            if let Some(v) = c.restarts {
                o.restarts = v;
            }
            if let Some(v) = c.max_iterations {
                o.max_iterations = v;
            }
            if let Some(v) = c.seed {
                o.seed = v;
            }
            if let Some(v) = c.tol {
                o.tol = v;
            }
            if let Some(v) = c.polish {
                o.polish = v;
            }
        }
        if cfg.as_ref().and_then(|c| c.seed).is_none() {
            if let Some(s) = global_seed {
                o.seed = s;
            }
        }
        o
    }
}

pub fn parse_family(s: &str) -> Result<Family> {
    s.parse()
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "ideal" => Ok(Mode::Ideal),
        "quantized" => Ok(Mode::Quantized),
        other => Err(Error::invalid(format!(
            "unknown mode `{other}` (expected `ideal` or `quantized`)"
        ))),
    }
}

// ---------------------------------------------------------------- model ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Accepted for config uniformity; model evaluation is seed-free.
    #[serde(default)]
    #[allow(dead_code)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    #[serde(default)]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub label: String,
    pub config: CancellerConfig,
}

// ------------------------------------------------------------- optimize ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub family: String,
    pub m_taps: usize,
    /// `ideal` or `quantized`; quantized runs the full
    /// optimize -> quantize -> local-search pipeline.
    #[serde(default = "default_mode")]
    pub mode: String,
    pub channel: ChannelCfg,
    #[serde(default)]
    pub solver: Option<SolverCfg>,
    #[serde(default = "default_ls_rounds")]
    pub local_search_rounds: usize,
    /// `heur` adds a heuristic-baseline row (RFIC family only).
    #[serde(default)]
    pub baseline: Option<String>,
}

fn default_mode() -> String {
    "quantized".to_owned()
}

pub fn default_ls_rounds() -> usize {
    8
}

// ---------------------------------------------------------------- sweep ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    pub families: Vec<String>,
    pub m_list: Vec<usize>,
    pub bandwidths_hz: Vec<f64>,
    pub modes: Vec<String>,
    pub channel: ChannelCfg,
    #[serde(default)]
    pub solver: Option<SolverCfg>,
    #[serde(default = "default_ls_rounds")]
    pub local_search_rounds: usize,
}

// -------------------------------------------------------------- network ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Accepted for config uniformity; the analysis is closed-form.
    #[serde(default)]
    #[allow(dead_code)]
    pub seed: Option<u64>,
    pub analyses: Vec<AnalysisSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum AnalysisSpec {
    Uldl {
        scenario: ScenarioCfg,
    },
    ThreeNode {
        scenario: ScenarioCfg,
    },
    Tdma {
        scenario: ScenarioCfg,
    },
    Surface {
        surface: String,
        x_axis: AxisCfg,
        y_axis: AxisCfg,
        scenario: ScenarioCfg,
    },
}

/// Scenario with every ratio acceptable in linear form or (via the `_db`
/// suffix) in decibels. Setting both forms of one field is a config error.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioCfg {
    pub bandwidth_hz: f64,
    #[serde(default)]
    pub gamma_ul: Option<f64>,
    #[serde(default)]
    pub gamma_ul_db: Option<f64>,
    #[serde(default)]
    pub gamma_dl: Option<f64>,
    #[serde(default)]
    pub gamma_dl_db: Option<f64>,
    #[serde(default)]
    pub gamma_iui: Option<f64>,
    #[serde(default)]
    pub gamma_iui_db: Option<f64>,
    #[serde(default)]
    pub gamma_self: Option<f64>,
    #[serde(default)]
    pub gamma_self_db: Option<f64>,
    #[serde(default)]
    pub snrs: Option<Vec<f64>>,
    #[serde(default)]
    pub snrs_db: Option<Vec<f64>>,
    #[serde(default)]
    pub fd_mask: Vec<bool>,
}

fn ratio(
    name: &str,
    linear: Option<f64>,
    db: Option<f64>,
) -> Result<f64> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(Error::invalid(format!(
            "set `{name}` or `{name}_db`, not both"
        ))),
        (Some(v), None) => Ok(v),
        (None, Some(d)) => Ok(10f64.powf(d / 10.0)),
        (None, None) => Ok(0.0),
    }
}

impl ScenarioCfg {
    pub fn build(&self) -> Result<GainScenario> {
        let snrs = match (&self.snrs, &self.snrs_db) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid("set `snrs` or `snrs_db`, not both"))
            }
            (Some(v), None) => v.clone(),
            (None, Some(d)) => d.iter().map(|x| 10f64.powf(x / 10.0)).collect(),
            (None, None) => Vec::new(),
        };
        Ok(GainScenario {
            bandwidth_hz: self.bandwidth_hz,
            gamma_ul: ratio("gamma_ul", self.gamma_ul, self.gamma_ul_db)?,
            gamma_dl: ratio("gamma_dl", self.gamma_dl, self.gamma_dl_db)?,
            gamma_iui: ratio("gamma_iui", self.gamma_iui, self.gamma_iui_db)?,
            gamma_self: ratio("gamma_self", self.gamma_self, self.gamma_self_db)?,
            snrs,
            fd_mask: self.fd_mask.clone(),
        })
    }
}

/// Axis endpoints in linear or dB form.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisCfg {
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub start_db: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub stop_db: Option<f64>,
    pub steps: usize,
}

impl AxisCfg {
    pub fn build(&self) -> Result<AxisSpec> {
        let pick = |name: &str, lin: Option<f64>, db: Option<f64>| match (lin, db) {
            (Some(_), Some(_)) => Err(Error::invalid(format!(
                "set `{name}` or `{name}_db`, not both"
            ))),
            (Some(v), None) => Ok(v),
            (None, Some(d)) => Ok(10f64.powf(d / 10.0)),
            (None, None) => Err(Error::invalid(format!("axis needs `{name}` or `{name}_db`"))),
        };
        Ok(AxisSpec {
            start: pick("start", self.start, self.start_db)?,
            stop: pick("stop", self.stop, self.stop_db)?,
            steps: self.steps,
        })
    }
}

// --------------------------------------------------------------- digsic ----

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigsicConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    /// Antenna-interface SI channel seen by the RF canceller.
    pub channel: ChannelCfg,
    /// RF cancellation stage run before the digital stage; when omitted the
    /// channel itself is treated as the residual.
    #[serde(default)]
    pub rf: Option<RfStageCfg>,
    #[serde(default)]
    pub ofdm: Option<OfdmCfg>,
    #[serde(default)]
    pub pa: Option<PaCfg>,
    #[serde(default)]
    pub mempoly: Option<MemPolyCfg>,
    #[serde(default = "default_n_symbols")]
    pub n_symbols: usize,
    #[serde(default = "default_noise_floor")]
    pub noise_floor_db: f64,
    /// Write the training tx/rx streams alongside the report.
    #[serde(default)]
    pub save_iq: bool,
}

fn default_n_symbols() -> usize {
    50
}

fn default_noise_floor() -> f64 {
    -85.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfStageCfg {
    pub family: String,
    pub m_taps: usize,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub solver: Option<SolverCfg>,
    #[serde(default = "default_ls_rounds")]
    pub local_search_rounds: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmCfg {
    #[serde(default)]
    pub n_subcarriers: Option<usize>,
    #[serde(default)]
    pub cp_len: Option<usize>,
    #[serde(default)]
    pub n_active: Option<usize>,
    #[serde(default)]
    pub sample_rate_hz: Option<f64>,
    #[serde(default)]
    pub constellation: Option<Constellation>,
}

impl OfdmCfg {
    pub fn build(cfg: &Option<OfdmCfg>) -> OfdmParams {
        let mut p = OfdmParams::default();
        if let Some(c) = cfg {
            if let Some(v) = c.n_subcarriers {
                p.n_subcarriers = v;
            }
            if let Some(v) = c.cp_len {
                p.cp_len = v;
            }
            if let Some(v) = c.n_active {
                p.n_active = v;
            }
            if let Some(v) = c.sample_rate_hz {
                p.sample_rate_hz = v;
            }
            if let Some(v) = c.constellation {
                p.constellation = v;
            }
        }
        p
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaCfg {
    /// Odd-order complex coefficients as [re, im] pairs (orders 1,3,5,7).
    pub coeffs: Vec<(f64, f64)>,
}

impl PaCfg {
    pub fn build(cfg: &Option<PaCfg>) -> PaModel {
        match cfg {
            Some(c) => PaModel {
                coeffs: c.coeffs.clone(),
            },
            None => PaModel::linear(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemPolyCfg {
    #[serde(default)]
    pub max_odd_order: Option<usize>,
    #[serde(default)]
    pub memory_depth: Option<usize>,
    #[serde(default)]
    pub regularization: Option<f64>,
}

impl MemPolyCfg {
    pub fn build(cfg: &Option<MemPolyCfg>) -> MemPolySpec {
        let mut s = MemPolySpec {
            max_odd_order: 3,
            memory_depth: 8,
            regularization: 0.0,
        };
        if let Some(c) = cfg {
            if let Some(v) = c.max_odd_order {
                s.max_odd_order = v;
            }
            if let Some(v) = c.memory_depth {
                s.memory_depth = v;
            }
            if let Some(v) = c.regularization {
                s.regularization = v;
            }
        }
        s
    }
}

//! Flat parameter-vector view of each canceller family, with box
//! constraints and optional hardware quantization per parameter role.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rfmodel::{
    CancellerConfig, DelayLineTap, PcbCircuitConstants, PcbTapConfig, RficTapConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pcb,
    Rfic,
    DelayLine,
    AmpPhase,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Pcb => "pcb",
            Family::Rfic => "rfic",
            Family::DelayLine => "delay_line",
            Family::AmpPhase => "amp_phase",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcb" => Ok(Family::Pcb),
            "rfic" => Ok(Family::Rfic),
            "delay_line" | "delayline" => Ok(Family::DelayLine),
            "amp_phase" | "ampphase" => Ok(Family::AmpPhase),
            other => Err(Error::invalid(format!("unknown canceller family `{other}`"))),
        }
    }
}

/// Hardware resolution of one tunable parameter: a uniform step from the
/// box minimum, or 2^bits equally spaced values including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Step(f64),
    Bits(u32),
}

impl Resolution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Resolution::Step(s) if !(*s > 0.0) => {
                Err(Error::invalid(format!("quantization step must be > 0, got {s}")))
            }
            Resolution::Bits(b) if *b < 1 => Err(Error::invalid("bit depth must be >= 1")),
            _ => Ok(()),
        }
    }

    /// Lattice step inside [min, max].
    pub fn step(&self, min: f64, max: f64) -> f64 {
        match self {
            Resolution::Step(s) => *s,
            Resolution::Bits(b) => (max - min) / ((1u64 << b) - 1) as f64,
        }
    }

    /// Number of lattice points inside [min, max] (highest index + 1).
    pub fn levels(&self, min: f64, max: f64) -> u64 {
        match self {
            // Tiny slack so a range that is an exact multiple of the step
            // keeps its top lattice point despite rounding.
            Resolution::Step(s) => ((max - min) / s + 1e-9).floor() as u64 + 1,
            Resolution::Bits(b) => 1u64 << b,
        }
    }
}

/// Box and optional hardware lattice for one per-tap parameter role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamConstraint {
    pub name: String,
    pub min: f64,
    pub max: f64,
    /// Phase-like parameters are optimized on the circle, not the interval.
    pub circular: bool,
    pub resolution: Option<Resolution>,
}

impl ParamConstraint {
    fn new(name: &str, min: f64, max: f64) -> Self {
        ParamConstraint {
            name: name.to_string(),
            min,
            max,
            circular: false,
            resolution: None,
        }
    }

    fn circular(mut self) -> Self {
        self.circular = true;
        self
    }

    fn with_resolution(mut self, r: Resolution) -> Self {
        self.resolution = Some(r);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) {
            return Err(Error::invalid(format!(
                "infeasible box for {}: [{}, {}]",
                self.name, self.min, self.max
            )));
        }
        if let Some(r) = &self.resolution {
            r.validate()?;
        }
        Ok(())
    }

    /// Snap to the nearest lattice value; ties round toward the lower value.
    pub fn snap(&self, v: f64) -> Result<f64> {
        if v < self.min - 1e-12 * (self.max - self.min) || v > self.max + 1e-12 * (self.max - self.min) {
            return Err(Error::invalid(format!(
                "{} = {v} outside box [{}, {}]; refusing to clamp-and-snap",
                self.name, self.min, self.max
            )));
        }
        let r = self.resolution.as_ref().ok_or_else(|| {
            Error::invalid(format!("parameter {} has no quantization spec", self.name))
        })?;
        let step = r.step(self.min, self.max);
        let max_idx = r.levels(self.min, self.max) - 1;
        let t = (v - self.min) / step;
        let k = (t - 0.5).ceil().clamp(0.0, max_idx as f64);
        Ok(self.min + k * step)
    }

    /// Lattice index of a value already on the lattice.
    pub fn lattice_index(&self, v: f64) -> Result<u64> {
        let r = self.resolution.as_ref().ok_or_else(|| {
            Error::invalid(format!("parameter {} has no quantization spec", self.name))
        })?;
        let step = r.step(self.min, self.max);
        Ok(((v - self.min) / step).round() as u64)
    }

    pub fn lattice_value(&self, index: u64) -> Result<f64> {
        let r = self.resolution.as_ref().ok_or_else(|| {
            Error::invalid(format!("parameter {} has no quantization spec", self.name))
        })?;
        let step = r.step(self.min, self.max);
        Ok(self.min + index as f64 * step)
    }

    pub fn max_lattice_index(&self) -> Result<u64> {
        let r = self.resolution.as_ref().ok_or_else(|| {
            Error::invalid(format!("parameter {} has no quantization spec", self.name))
        })?;
        Ok(r.levels(self.min, self.max) - 1)
    }
}

/// Per-family boxes (replicated across taps) plus family-specific fixed data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub family: Family,
    /// Parameter roles of one tap, in the order the flat vector uses.
    pub params: Vec<ParamConstraint>,
    /// Circuit constants for the PCB family.
    pub pcb_constants: Option<PcbCircuitConstants>,
}

impl ConstraintSet {
    /// PCB canceller boxes: attenuator [-15.5, 0] dB, phase [-pi, pi],
    /// tunable C_F [0.6, 2.4] pF, C_Q [2, 14] pF; hardware lattice of
    /// 0.5 dB, 8-bit phase, 0.12 pF, 0.39 pF.
    pub fn pcb_default() -> Self {
        ConstraintSet {
            family: Family::Pcb,
            params: vec![
                ParamConstraint::new("amp_db", -15.5, 0.0)
                    .with_resolution(Resolution::Step(0.5)),
                ParamConstraint::new("phase_rad", -PI, PI)
                    .circular()
                    .with_resolution(Resolution::Bits(8)),
                ParamConstraint::new("c_f_farad", 0.6e-12, 2.4e-12)
                    .with_resolution(Resolution::Step(0.12e-12)),
                ParamConstraint::new("c_q_farad", 2.0e-12, 14.0e-12)
                    .with_resolution(Resolution::Step(0.39e-12)),
            ],
            pcb_constants: Some(PcbCircuitConstants::default()),
        }
    }

    /// RFIC canceller boxes: amplitude [-40, -10] dB with 0.25 dB steps,
    /// 8-bit phase, center frequency [875, 925] MHz and Q [1, 50], both 8-bit.
    pub fn rfic_default() -> Self {
        ConstraintSet {
            family: Family::Rfic,
            params: vec![
                ParamConstraint::new("amp_db", -40.0, -10.0)
                    .with_resolution(Resolution::Step(0.25)),
                ParamConstraint::new("phase_rad", -PI, PI)
                    .circular()
                    .with_resolution(Resolution::Bits(8)),
                ParamConstraint::new("fc_hz", 875e6, 925e6)
                    .with_resolution(Resolution::Bits(8)),
                ParamConstraint::new("q", 1.0, 50.0).with_resolution(Resolution::Bits(8)),
            ],
            pcb_constants: None,
        }
    }

    /// Delay-line boxes (no published hardware lattice; 8-bit lattice used
    /// when quantization is requested).
    pub fn delay_line_default() -> Self {
        ConstraintSet {
            family: Family::DelayLine,
            params: vec![
                ParamConstraint::new("amp_linear", 0.0, 1.0)
                    .with_resolution(Resolution::Bits(8)),
                ParamConstraint::new("tau_s", 0.0, 50e-9).with_resolution(Resolution::Bits(8)),
                ParamConstraint::new("phase_rad", -PI, PI)
                    .circular()
                    .with_resolution(Resolution::Bits(8)),
            ],
            pcb_constants: None,
        }
    }

    /// Single amplitude/phase tap.
    pub fn amp_phase_default() -> Self {
        ConstraintSet {
            family: Family::AmpPhase,
            params: vec![
                ParamConstraint::new("amp_linear", 0.0, 1.0)
                    .with_resolution(Resolution::Bits(8)),
                ParamConstraint::new("phase_rad", -PI, PI)
                    .circular()
                    .with_resolution(Resolution::Bits(8)),
            ],
            pcb_constants: None,
        }
    }

    pub fn defaults_for(family: Family) -> Self {
        match family {
            Family::Pcb => Self::pcb_default(),
            Family::Rfic => Self::rfic_default(),
            Family::DelayLine => Self::delay_line_default(),
            Family::AmpPhase => Self::amp_phase_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::invalid("constraint set has no parameters"));
        }
        self.params.iter().try_for_each(|p| p.validate())?;
        if self.family == Family::Pcb && self.pcb_constants.is_none() {
            return Err(Error::invalid("PCB constraints need circuit constants"));
        }
        Ok(())
    }

    pub fn dims_per_tap(&self) -> usize {
        self.params.len()
    }

    /// Effective tap count for a flat vector of length `n`.
    pub fn dims(&self, m_taps: usize) -> usize {
        match self.family {
            Family::AmpPhase => self.params.len(),
            _ => self.params.len() * m_taps,
        }
    }

    /// Wrap circular parameters into [-pi, pi] and clamp the rest into
    /// their boxes.
    pub fn project(&self, x: &mut [f64]) {
        let d = self.dims_per_tap();
        for (i, v) in x.iter_mut().enumerate() {
            let p = &self.params[i % d];
            if p.circular {
                *v = wrap_angle(*v);
            } else {
                *v = v.clamp(p.min, p.max);
            }
        }
    }

    /// Decode a flat parameter vector into a canceller configuration.
    pub fn decode(&self, x: &[f64]) -> Result<CancellerConfig> {
        let d = self.dims_per_tap();
        if x.len() % d != 0 || x.is_empty() {
            return Err(Error::invalid(format!(
                "parameter vector length {} is not a multiple of {d}",
                x.len()
            )));
        }
        let m = x.len() / d;
        match self.family {
            Family::Pcb => {
                let taps = (0..m)
                    .map(|i| PcbTapConfig {
                        amp_db: x[i * d],
                        phase_rad: wrap_angle(x[i * d + 1]),
                        c_f_farad: x[i * d + 2],
                        c_q_farad: x[i * d + 3],
                    })
                    .collect();
                Ok(CancellerConfig::Pcb {
                    taps,
                    constants: self.pcb_constants.clone().unwrap_or_default(),
                })
            }
            Family::Rfic => {
                let taps = (0..m)
                    .map(|i| RficTapConfig {
                        amp_db: x[i * d],
                        phase_rad: wrap_angle(x[i * d + 1]),
                        fc_hz: x[i * d + 2],
                        q: x[i * d + 3],
                    })
                    .collect();
                Ok(CancellerConfig::Rfic { taps })
            }
            Family::DelayLine => {
                let taps = (0..m)
                    .map(|i| DelayLineTap {
                        amp_linear: x[i * d],
                        tau_s: x[i * d + 1],
                        phase_rad: wrap_angle(x[i * d + 2]),
                    })
                    .collect();
                Ok(CancellerConfig::DelayLine { taps })
            }
            Family::AmpPhase => {
                if m != 1 {
                    return Err(Error::invalid("amp_phase family has exactly one tap"));
                }
                Ok(CancellerConfig::AmpPhase {
                    amp_linear: x[0],
                    phase_rad: wrap_angle(x[1]),
                })
            }
        }
    }

    /// Flatten a configuration of this family into the parameter vector.
    pub fn encode(&self, config: &CancellerConfig) -> Result<Vec<f64>> {
        match (self.family, config) {
            (Family::Pcb, CancellerConfig::Pcb { taps, .. }) => Ok(taps
                .iter()
                .flat_map(|t| [t.amp_db, t.phase_rad, t.c_f_farad, t.c_q_farad])
                .collect()),
            (Family::Rfic, CancellerConfig::Rfic { taps }) => Ok(taps
                .iter()
                .flat_map(|t| [t.amp_db, t.phase_rad, t.fc_hz, t.q])
                .collect()),
            (Family::DelayLine, CancellerConfig::DelayLine { taps }) => Ok(taps
                .iter()
                .flat_map(|t| [t.amp_linear, t.tau_s, t.phase_rad])
                .collect()),
            (
                Family::AmpPhase,
                CancellerConfig::AmpPhase {
                    amp_linear,
                    phase_rad,
                },
            ) => Ok(vec![*amp_linear, *phase_rad]),
            _ => Err(Error::invalid("configuration family does not match constraints")),
        }
    }

    /// True when every parameter lies inside its box (or on the circle).
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        let d = self.dims_per_tap();
        x.iter().enumerate().all(|(i, &v)| {
            let p = &self.params[i % d];
            p.circular || (v >= p.min - 1e-12 && v <= p.max + 1e-12)
        })
    }
}

/// Wrap an angle into [-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r < -PI {
        r = PI;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_examples() {
        let amp = ParamConstraint::new("amp_db", -15.5, 0.0).with_resolution(Resolution::Step(0.5));
        assert_eq!(amp.snap(-7.3).unwrap(), -7.5);
        assert_eq!(amp.snap(-7.25).unwrap(), -7.5); // tie rounds down
        let cf = ParamConstraint::new("c_f_farad", 0.6e-12, 2.4e-12)
            .with_resolution(Resolution::Step(0.12e-12));
        let snapped = cf.snap(1.0e-12).unwrap();
        assert!((snapped - 0.96e-12).abs() < 1e-27, "snapped = {snapped}");
    }

    #[test]
    fn snap_rejects_out_of_box() {
        let amp = ParamConstraint::new("amp_db", -15.5, 0.0).with_resolution(Resolution::Step(0.5));
        assert!(amp.snap(1.0).is_err());
        assert!(amp.snap(-20.0).is_err());
    }

    #[test]
    fn bits_lattice_includes_endpoints() {
        let p = ParamConstraint::new("fc_hz", 875e6, 925e6).with_resolution(Resolution::Bits(8));
        assert_eq!(p.max_lattice_index().unwrap(), 255);
        assert_eq!(p.lattice_value(0).unwrap(), 875e6);
        assert!((p.lattice_value(255).unwrap() - 925e6).abs() < 1e-3);
    }

    #[test]
    fn encode_decode_round_trip() {
        let cs = ConstraintSet::rfic_default();
        let cfg = CancellerConfig::Rfic {
            taps: vec![
                RficTapConfig { amp_db: -20.0, phase_rad: 0.5, fc_hz: 900e6, q: 10.0 },
                RficTapConfig { amp_db: -15.0, phase_rad: -1.0, fc_hz: 910e6, q: 20.0 },
            ],
        };
        let x = cs.encode(&cfg).unwrap();
        assert_eq!(x.len(), 8);
        assert_eq!(cs.decode(&x).unwrap(), cfg);
    }

    #[test]
    fn wrap_angle_range() {
        for a in [-10.0, -PI, 0.0, PI, 10.0, 123.456] {
            let w = wrap_angle(a);
            assert!((-PI..=PI).contains(&w), "{a} -> {w}");
        }
        assert!((wrap_angle(PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_box_rejected() {
        let mut cs = ConstraintSet::rfic_default();
        cs.params[0].min = 0.0;
        cs.params[0].max = -1.0;
        assert!(cs.validate().is_err());
    }
}

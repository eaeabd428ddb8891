//! Tunable canceller configurations and fixed circuit constants.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Fixed component values of the PCB canceller circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcbCircuitConstants {
    /// Resonance tank inductance (H).
    pub l_f_henry: f64,
    /// Impedance-transformation inductance (H).
    pub l_q_henry: f64,
    /// Tank parallel resistance (ohm). Not published as a component value;
    /// see [`calibrate_tank_resistance`].
    pub r_f_ohm: f64,
    /// Transformation-network resistance, equal to the source/load
    /// impedance R_S = R_L (ohm).
    pub r_q_ohm: f64,
    /// Electrical length of each T-line section (rad).
    pub beta_l_rad: f64,
    /// T-line characteristic impedance (ohm).
    pub z0_ohm: f64,
    /// Fixed implementation loss of the canceller path (dB, negative).
    pub a0_db: f64,
    /// Fixed group delay of the canceller path (s).
    pub tau0_s: f64,
    /// Fixed tank capacitor in parallel with the tunable portion (F).
    pub c_fixed_farad: f64,
}

/// Bare-tank quality factor the defaults are calibrated to.
pub const TANK_Q_TARGET: f64 = 2.7;

/// Midpoint of the tunable capacitor range used for the calibration.
pub const C_F_TUNABLE_MID_FARAD: f64 = 1.5e-12;

/// Solve `R * sqrt(C/L) = q_target` for the tank parallel resistance, with
/// `C` the effective (fixed + tunable) capacitance. The tank resistance is
/// not given as a component value anywhere, but the bare tank has a known
/// quality factor, which pins it.
pub fn calibrate_tank_resistance(
    q_target: f64,
    l_henry: f64,
    c_eff_farad: f64,
) -> Result<f64> {
    if !(q_target > 0.0 && l_henry > 0.0 && c_eff_farad > 0.0) {
        return Err(Error::invalid("calibration inputs must be positive"));
    }
    Ok(q_target * (l_henry / c_eff_farad).sqrt())
}

impl PcbCircuitConstants {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("l_f_henry", self.l_f_henry),
            ("l_q_henry", self.l_q_henry),
            ("r_f_ohm", self.r_f_ohm),
            ("r_q_ohm", self.r_q_ohm),
            ("z0_ohm", self.z0_ohm),
            ("c_fixed_farad", self.c_fixed_farad),
        ];
        for (name, v) in pos {
            if !(v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.tau0_s < 0.0 {
            return Err(Error::invalid("tau0_s must be non-negative"));
        }
        Ok(())
    }
}

impl Default for PcbCircuitConstants {
    fn default() -> Self {
        let c_eff = 8.2e-12 + C_F_TUNABLE_MID_FARAD;
        PcbCircuitConstants {
            l_f_henry: 1.65e-9,
            l_q_henry: 2.85e-9,
            r_f_ohm: calibrate_tank_resistance(TANK_Q_TARGET, 1.65e-9, c_eff).unwrap(),
            r_q_ohm: 50.0,
            beta_l_rad: 1.37,
            z0_ohm: 50.0,
            a0_db: -4.1,
            tau0_s: 4.2e-9,
            c_fixed_farad: 8.2e-12,
        }
    }
}

/// One PCB FDE tap: attenuator, phase shifter, and the two tunable capacitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcbTapConfig {
    /// Attenuator setting (dB, <= 0).
    pub amp_db: f64,
    /// Phase shifter setting (rad, in [-pi, pi]).
    pub phase_rad: f64,
    /// Tunable portion of the tank capacitor (F); the fixed portion lives in
    /// [`PcbCircuitConstants::c_fixed_farad`].
    pub c_f_farad: f64,
    /// Transformation-network capacitor (F).
    pub c_q_farad: f64,
}

impl PcbTapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_f_farad > 0.0 && self.c_q_farad > 0.0) {
            return Err(Error::invalid("tap capacitances must be positive"));
        }
        check_phase(self.phase_rad)?;
        if !self.amp_db.is_finite() {
            return Err(Error::invalid("amp_db must be finite"));
        }
        Ok(())
    }
}

/// One RFIC FDE tap: the ideal second-order BPF with four controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RficTapConfig {
    pub amp_db: f64,
    pub phase_rad: f64,
    pub fc_hz: f64,
    pub q: f64,
}

impl RficTapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fc_hz > 0.0) {
            return Err(Error::invalid("center frequency must be positive"));
        }
        if !(self.q > 0.0) {
            return Err(Error::invalid("quality factor must be positive"));
        }
        check_phase(self.phase_rad)?;
        Ok(())
    }
}

/// One delay-line tap (amplitude in linear volts, optional phase).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayLineTap {
    pub amp_linear: f64,
    pub tau_s: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

impl DelayLineTap {
    pub fn validate(&self) -> Result<()> {
        if self.amp_linear < 0.0 {
            return Err(Error::invalid("delay-line amplitude must be >= 0"));
        }
        if self.tau_s < 0.0 {
            return Err(Error::invalid("delay must be >= 0"));
        }
        Ok(())
    }
}

fn check_phase(phase_rad: f64) -> Result<()> {
    if !(-PI..=PI).contains(&phase_rad) {
        return Err(Error::invalid(format!(
            "phase {phase_rad} rad outside [-pi, pi]"
        )));
    }
    Ok(())
}

/// A complete canceller configuration, one variant per canceller family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CancellerConfig {
    Pcb {
        taps: Vec<PcbTapConfig>,
        #[serde(default)]
        constants: PcbCircuitConstants,
    },
    Rfic {
        taps: Vec<RficTapConfig>,
    },
    DelayLine {
        taps: Vec<DelayLineTap>,
    },
    AmpPhase {
        amp_linear: f64,
        phase_rad: f64,
    },
}

impl CancellerConfig {
    /// Number of taps M.
    pub fn tap_count(&self) -> usize {
        match self {
            CancellerConfig::Pcb { taps, .. } => taps.len(),
            CancellerConfig::Rfic { taps } => taps.len(),
            CancellerConfig::DelayLine { taps } => taps.len(),
            CancellerConfig::AmpPhase { .. } => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tap_count() == 0 {
            return Err(Error::invalid("canceller must have at least one tap"));
        }
        match self {
            CancellerConfig::Pcb { taps, constants } => {
                constants.validate()?;
                taps.iter().try_for_each(|t| t.validate())
            }
            CancellerConfig::Rfic { taps } => taps.iter().try_for_each(|t| t.validate()),
            CancellerConfig::DelayLine { taps } => taps.iter().try_for_each(|t| t.validate()),
            CancellerConfig::AmpPhase { amp_linear, .. } => {
                if *amp_linear < 0.0 {
                    return Err(Error::invalid("amplitude must be >= 0"));
                }
                Ok(())
            }
        }
    }
}

/// Voltage dB to linear: 10^(dB/20).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Linear voltage ratio to dB: 20 log10.
pub fn linear_to_db(linear: f64) -> f64 {
    20.0 * linear.log10()
}

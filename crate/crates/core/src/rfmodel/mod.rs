//! Frequency-response models of every canceller and filter family: the PCB
//! bandpass canceller (closed form and ABCD-cascade cross-check), the ideal
//! second-order RFIC canceller, delay-line banks, and the single
//! amplitude/phase tap. All evaluation is pure and pointwise in frequency.

mod abcd;
mod config;
mod extract;
mod pcb;
mod response;
mod taps;

pub use abcd::{abcd_cascade, shunt_abcd, tline_abcd, AbcdMatrix};
pub use config::{
    calibrate_tank_resistance, db_to_linear, linear_to_db, CancellerConfig, DelayLineTap,
    PcbCircuitConstants, PcbTapConfig, RficTapConfig, C_F_TUNABLE_MID_FARAD, TANK_Q_TARGET,
};
pub use extract::extract_center_and_q;
pub use pcb::{
    bpf_corner_presets, corner_extraction_grid, pcb_bpf_at, pcb_bpf_response,
    pcb_bpf_response_abcd, pcb_canceller_response, tank_admittance, BpfCorner,
    C_F_TUNABLE_MAX_FARAD, C_F_TUNABLE_MIN_FARAD, C_Q_MAX_FARAD, C_Q_MIN_FARAD,
};
pub use response::{residual, ComplexResponse, FrequencyGrid};
pub use taps::{amp_phase_response, delay_line_response, rfic_canceller_response, rfic_tap_at};

use crate::error::Result;

/// Evaluate any canceller configuration on a grid.
pub fn canceller_response(config: &CancellerConfig, grid: &FrequencyGrid) -> Result<ComplexResponse> {
    match config {
        CancellerConfig::Pcb { taps, constants } => pcb_canceller_response(taps, constants, grid),
        CancellerConfig::Rfic { taps } => rfic_canceller_response(taps, grid),
        CancellerConfig::DelayLine { taps } => delay_line_response(taps, grid),
        CancellerConfig::AmpPhase {
            amp_linear,
            phase_rad,
        } => amp_phase_response(*amp_linear, *phase_rad, grid),
    }
}

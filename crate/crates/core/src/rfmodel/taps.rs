//! Ideal second-order BPF (RFIC), delay-line, and single amplitude/phase
//! canceller responses.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::config::{db_to_linear, DelayLineTap, RficTapConfig};
use super::response::{ComplexResponse, FrequencyGrid};
use crate::error::{Error, Result};

const J: Complex64 = Complex64::new(0.0, 1.0);

/// One ideal second-order BPF tap evaluated at a single frequency:
/// A e^{-j phi} / (1 - jQ (fc/f - f/fc)).
pub fn rfic_tap_at(tap: &RficTapConfig, f_hz: f64) -> Complex64 {
    let a = db_to_linear(tap.amp_db);
    let detune = tap.fc_hz / f_hz - f_hz / tap.fc_hz;
    a * (-J * tap.phase_rad).exp() / (Complex64::new(1.0, 0.0) - J * tap.q * detune)
}

/// RFIC canceller response: sum of the per-tap BPF responses.
pub fn rfic_canceller_response(
    taps: &[RficTapConfig],
    grid: &FrequencyGrid,
) -> Result<ComplexResponse> {
    if taps.is_empty() {
        return Err(Error::invalid("RFIC canceller needs at least one tap"));
    }
    for t in taps {
        t.validate()?;
    }
    ComplexResponse::from_fn(grid.clone(), |f| {
        taps.iter().map(|t| rfic_tap_at(t, f)).sum()
    })
}

/// Delay-line canceller: sum of A_i e^{-j(2 pi f tau_i + phi_i)}.
pub fn delay_line_response(taps: &[DelayLineTap], grid: &FrequencyGrid) -> Result<ComplexResponse> {
    if taps.is_empty() {
        return Err(Error::invalid("delay-line canceller needs at least one tap"));
    }
    for t in taps {
        t.validate()?;
    }
    ComplexResponse::from_fn(grid.clone(), |f| {
        taps.iter()
            .map(|t| t.amp_linear * (-J * (2.0 * PI * f * t.tau_s + t.phase_rad)).exp())
            .sum()
    })
}

/// Frequency-flat single-tap canceller: A e^{-j phi} at every grid point.
pub fn amp_phase_response(
    amp_linear: f64,
    phase_rad: f64,
    grid: &FrequencyGrid,
) -> Result<ComplexResponse> {
    if amp_linear < 0.0 {
        return Err(Error::invalid("amplitude must be >= 0"));
    }
    let v = amp_linear * (-J * phase_rad).exp();
    ComplexResponse::from_fn(grid.clone(), |_| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rfic_tap_at_center_is_amp_phase() {
        let tap = RficTapConfig {
            amp_db: -12.0,
            phase_rad: 0.7,
            fc_hz: 900e6,
            q: 25.0,
        };
        let h = rfic_tap_at(&tap, 900e6);
        let a = db_to_linear(-12.0);
        assert_relative_eq!(h.norm(), a, max_relative = 1e-14);
        assert_relative_eq!(h.arg(), -0.7, max_relative = 1e-14);
    }

    #[test]
    fn rfic_tap_hand_value() {
        // (0 dB, 0 rad, 900 MHz, Q=10) at 910 MHz: 1/(1 + j*0.22099...)
        let tap = RficTapConfig {
            amp_db: 0.0,
            phase_rad: 0.0,
            fc_hz: 900e6,
            q: 10.0,
        };
        let h = rfic_tap_at(&tap, 910e6);
        assert!((h.re - 0.95343).abs() < 1e-4, "re = {}", h.re);
        assert!((h.im - -0.21071).abs() < 1e-4, "im = {}", h.im);
        assert!((h.norm() - 0.97642).abs() < 1e-4);
    }

    #[test]
    fn rfic_peak_is_nearest_grid_point_to_fc() {
        let tap = RficTapConfig {
            amp_db: 0.0,
            phase_rad: 0.0,
            fc_hz: 903.3e6,
            q: 10.0,
        };
        let grid = FrequencyGrid::centered(900e6, 20e6, 41).unwrap();
        let h = rfic_canceller_response(&[tap], &grid).unwrap();
        let peak = h
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        let nearest = grid
            .freqs_hz()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 903.3e6).abs().total_cmp(&(b.1 - 903.3e6).abs()))
            .unwrap()
            .0;
        assert_eq!(peak, nearest);
    }

    #[test]
    fn delay_line_pure_delay_phase_slope() {
        let tap = DelayLineTap {
            amp_linear: 1.0,
            tau_s: 50e-9,
            phase_rad: 0.0,
        };
        let grid = FrequencyGrid::new(vec![900e6, 900.1e6]).unwrap();
        let h = delay_line_response(&[tap], &grid).unwrap();
        let dphi = (h.values()[1] / h.values()[0]).arg();
        // phase advance over 100 kHz for a 50 ns delay: -2 pi * 1e5 * 50e-9
        assert_relative_eq!(dphi, -2.0 * PI * 1e5 * 50e-9, max_relative = 1e-9);
        assert_relative_eq!(h.values()[0].norm(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn delay_line_trivial_tap() {
        let tap = DelayLineTap {
            amp_linear: 1.0,
            tau_s: 0.0,
            phase_rad: 0.0,
        };
        let grid = FrequencyGrid::centered(900e6, 20e6, 5).unwrap();
        let h = delay_line_response(&[tap], &grid).unwrap();
        for v in h.values() {
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-14);
            assert_relative_eq!(v.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn two_tap_comb_nulls() {
        // Taps at 0 and 25 ns: nulls every 40 MHz at odd multiples of 20 MHz.
        let taps = [
            DelayLineTap { amp_linear: 1.0, tau_s: 0.0, phase_rad: 0.0 },
            DelayLineTap { amp_linear: 1.0, tau_s: 25e-9, phase_rad: 0.0 },
        ];
        // f * 25 ns = 0.5 (mod 1) at f = 20 MHz + n*40 MHz; 900.02e6 = 20e6 + 22.5*40e6?
        // Pick an exact null: f = (2n+1)/(2*25ns) = (2n+1)*20 MHz; n=22 -> 900 MHz.
        let grid = FrequencyGrid::new(vec![880e6, 900e6, 920e6]).unwrap();
        let h = delay_line_response(&taps, &grid).unwrap();
        assert!(h.values()[1].norm() < 1e-10);
        // 880 and 920 MHz are even multiples of 40 MHz away from 0: constructive.
        assert_relative_eq!(h.values()[0].norm(), 2.0, max_relative = 1e-9);
        assert_relative_eq!(h.values()[2].norm(), 2.0, max_relative = 1e-9);
    }

    #[test]
    fn amp_phase_is_flat() {
        let grid = FrequencyGrid::centered(900e6, 20e6, 7).unwrap();
        let h = amp_phase_response(0.5, PI / 2.0, &grid).unwrap();
        for v in h.values() {
            assert_relative_eq!(v.norm(), 0.5, max_relative = 1e-14);
            assert_relative_eq!(v.arg(), -PI / 2.0, max_relative = 1e-12);
        }
        let ones = amp_phase_response(1.0, 0.0, &grid).unwrap();
        for v in ones.values() {
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-14);
        }
    }
}

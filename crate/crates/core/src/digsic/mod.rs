//! Baseband digital SIC stage: synthetic OFDM traffic, residual-SI
//! synthesis after RF cancellation, and least-squares memory-polynomial
//! fitting of the digital canceller.

mod channel;
mod fit;
mod io;
mod ofdm;

pub use channel::{apply_residual_si, PaModel};
pub use fit::{fit_digital_canceller, DigitalCancellerFit, MemPolySpec};
pub use io::{load_iq, store_iq, IQ_MAGIC};
pub use ofdm::{gen_ofdm, mean_power, Constellation, OfdmParams};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rfmodel::ComplexResponse;
use crate::sichan::sic_metrics;

/// End-to-end result of the RF + digital cancellation pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigsicReport {
    pub rf_sic_db: f64,
    pub digital_sic_db: f64,
    /// Sum of the two stages (each is a power ratio in dB).
    pub overall_sic_db: f64,
    pub rank_deficient: bool,
    pub n_training_symbols: usize,
}

/// Run the digital stage against a residual channel: generate OFDM
/// traffic, push it through the residual SI path, fit the canceller, and
/// book both stages.
#[allow(clippy::too_many_arguments)]
pub fn run_digital_stage(
    h_res: &ComplexResponse,
    params: &OfdmParams,
    pa: &PaModel,
    spec: &MemPolySpec,
    n_symbols: usize,
    noise_floor_db: f64,
    seed: u64,
) -> Result<(DigsicReport, Vec<Complex64>, Vec<Complex64>)> {
    let tx = gen_ofdm(params, n_symbols, seed)?;
    let rx = apply_residual_si(&tx, h_res, params, pa, noise_floor_db, seed ^ 0x9e3779b97f4a7c15)?;
    let fit = fit_digital_canceller(&tx, &rx, spec)?;
    let rf_sic_db = sic_metrics(h_res).mean_rf_sic_db;
    let report = DigsicReport {
        rf_sic_db,
        digital_sic_db: fit.achieved_digital_sic_db,
        overall_sic_db: rf_sic_db + fit.achieved_digital_sic_db,
        rank_deficient: fit.rank_deficient,
        n_training_symbols: n_symbols,
    };
    Ok((report, tx, rx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfmodel::FrequencyGrid;

    #[test]
    fn noise_limited_digital_sic() {
        // Residual SI 33 dB above an -85 dB floor: digital SIC saturates
        // at the SI-to-noise ratio.
        let g = FrequencyGrid::centered(900e6, 20e6, 52).unwrap();
        let h_res =
            ComplexResponse::from_fn(g, |_| Complex64::new(10f64.powf(-52.0 / 20.0), 0.0))
                .unwrap();
        let (report, _, _) = run_digital_stage(
            &h_res,
            &OfdmParams::default(),
            &PaModel::linear(),
            &MemPolySpec { max_odd_order: 3, memory_depth: 4, regularization: 0.0 },
            50,
            -85.0,
            5,
        )
        .unwrap();
        assert!(
            (report.digital_sic_db - 33.0).abs() <= 1.0,
            "digital SIC {:.2} dB, expected ~33",
            report.digital_sic_db
        );
        assert!((report.rf_sic_db - 52.0).abs() < 0.01);
        assert_eq!(
            report.overall_sic_db,
            report.rf_sic_db + report.digital_sic_db
        );
    }

    #[test]
    fn zero_noise_linear_channel_is_fit_deeply() {
        let g = FrequencyGrid::centered(900e6, 20e6, 52).unwrap();
        let h_res = ComplexResponse::from_fn(g, |f| {
            // Smooth frequency-selective residual.
            let t = (f - 890e6) / 20e6;
            Complex64::from_polar(0.003 + 0.002 * t, 2.0 * t)
        })
        .unwrap();
        let (report, _, _) = run_digital_stage(
            &h_res,
            &OfdmParams::default(),
            &PaModel::linear(),
            &MemPolySpec { max_odd_order: 1, memory_depth: 64, regularization: 0.0 },
            50,
            f64::NEG_INFINITY,
            7,
        )
        .unwrap();
        assert!(
            report.digital_sic_db >= 80.0,
            "digital SIC {:.2} dB",
            report.digital_sic_db
        );
    }
}

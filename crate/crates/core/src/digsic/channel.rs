//! Residual-SI synthesis on baseband samples: the post-RF-cancellation
//! channel applied in the frequency domain, an odd-order static PA
//! nonlinearity, and receiver noise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::ofdm::OfdmParams;
use crate::error::{Error, Result};
use crate::rfmodel::ComplexResponse;

/// Static odd-order power-amplifier distortion:
/// y = sum over odd p of c_p * x |x|^(p-1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaModel {
    /// Coefficients for orders 1, 3, 5, 7 in that order; missing entries
    /// are zero. A linear PA is `coeffs = [1]`.
    pub coeffs: Vec<(f64, f64)>,
}

impl PaModel {
    pub fn linear() -> Self {
        PaModel { coeffs: vec![(1.0, 0.0)] }
    }

    pub fn apply(&self, x: Complex64) -> Complex64 {
        let mag = x.norm();
        let mut y = Complex64::new(0.0, 0.0);
        let mut mag_pow = 1.0; // |x|^(p-1) for p = 1, 3, 5, 7
        for &(re, im) in &self.coeffs {
            y += Complex64::new(re, im) * x * mag_pow;
            mag_pow *= mag * mag;
        }
        y
    }
}

/// Interpolate the residual channel onto the OFDM FFT bins and return the
/// time-domain impulse response (length = FFT size).
fn impulse_response(h_res: &ComplexResponse, params: &OfdmParams) -> Result<Vec<Complex64>> {
    let n = params.n_subcarriers;
    let center = h_res.grid().center_hz();
    // Every active bin must fall inside the channel's measured span.
    for &b in &params.active_bins() {
        let f = center + params.bin_offset_hz(b);
        if f < h_res.grid().min_hz() - 1e-6 || f > h_res.grid().max_hz() + 1e-6 {
            return Err(Error::invalid(format!(
                "channel grid is narrower than the signal band (bin at {f} Hz uncovered)"
            )));
        }
    }
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for (k, bin) in bins.iter_mut().enumerate() {
        let f = (center + params.bin_offset_hz(k))
            .clamp(h_res.grid().min_hz(), h_res.grid().max_hz());
        *bin = h_res.interp(f)?;
    }
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut bins);
    // rustfft's inverse is unnormalized.
    let scale = 1.0 / n as f64;
    bins.iter_mut().for_each(|v| *v *= scale);
    Ok(bins)
}

/// Overlap-save linear convolution with a fixed-length kernel.
fn overlap_save(x: &[Complex64], kernel: &[Complex64]) -> Vec<Complex64> {
    let m = kernel.len();
    let fft_len = (4 * m.next_power_of_two()).max(256);
    let hop = fft_len - (m - 1);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(fft_len);
    let ifft = planner.plan_fft_inverse(fft_len);

    let mut kernel_fd = vec![Complex64::new(0.0, 0.0); fft_len];
    kernel_fd[..m].copy_from_slice(kernel);
    fft.process(&mut kernel_fd);

    let mut out = Vec::with_capacity(x.len());
    let mut block = vec![Complex64::new(0.0, 0.0); fft_len];
    let mut pos = 0usize;
    while pos < x.len() {
        // Block = (m-1) history samples followed by `hop` new samples.
        for (i, b) in block.iter_mut().enumerate() {
            let idx = pos as isize + i as isize - (m as isize - 1);
            *b = if idx >= 0 && (idx as usize) < x.len() {
                x[idx as usize]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fft.process(&mut block);
        for (b, k) in block.iter_mut().zip(&kernel_fd) {
            *b *= k;
        }
        ifft.process(&mut block);
        let scale = 1.0 / fft_len as f64;
        let take = hop.min(x.len() - pos);
        out.extend(block[m - 1..m - 1 + take].iter().map(|v| v * scale));
        pos += hop;
    }
    out
}

/// Push a transmit stream through PA distortion, the residual-SI channel,
/// and additive receiver noise at `noise_floor_db` relative to unit TX
/// power. `noise_floor_db = f64::NEG_INFINITY` disables the noise.
pub fn apply_residual_si(
    tx: &[Complex64],
    h_res: &ComplexResponse,
    params: &OfdmParams,
    pa: &PaModel,
    noise_floor_db: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if tx.is_empty() {
        return Err(Error::invalid("empty transmit stream"));
    }
    let distorted: Vec<Complex64> = tx.iter().map(|&x| pa.apply(x)).collect();
    let kernel = impulse_response(h_res, params)?;
    let mut rx = overlap_save(&distorted, &kernel);

    if noise_floor_db.is_finite() {
        let sigma = (10f64.powf(noise_floor_db / 10.0) / 2.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).unwrap();
        for v in rx.iter_mut() {
            *v += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    Ok(rx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digsic::ofdm::{gen_ofdm, mean_power};
    use crate::rfmodel::FrequencyGrid;

    fn flat_channel(mag_db: f64) -> ComplexResponse {
        let g = FrequencyGrid::centered(900e6, 20e6, 52).unwrap();
        let a = 10f64.powf(mag_db / 20.0);
        ComplexResponse::from_fn(g, |_| Complex64::new(a, 0.0)).unwrap()
    }

    #[test]
    fn noise_only_power() {
        let params = OfdmParams::default();
        let tx = gen_ofdm(&params, 100, 1).unwrap();
        let h = flat_channel(-300.0); // effectively zero channel
        let rx = apply_residual_si(&tx, &h, &params, &PaModel::linear(), -85.0, 2).unwrap();
        let p_db = 10.0 * mean_power(&rx).log10();
        assert!((p_db - -85.0).abs() < 0.5, "noise power {p_db:.2} dB");
    }

    #[test]
    fn flat_channel_sets_si_power() {
        let params = OfdmParams::default();
        let tx = gen_ofdm(&params, 100, 1).unwrap();
        let h = flat_channel(-52.0);
        let rx =
            apply_residual_si(&tx, &h, &params, &PaModel::linear(), f64::NEG_INFINITY, 0).unwrap();
        let p_db = 10.0 * mean_power(&rx).log10();
        assert!((p_db - -52.0).abs() < 0.5, "SI power {p_db:.2} dB");
    }

    #[test]
    fn third_order_term_spreads_spectrum() {
        let params = OfdmParams::default();
        let tx = gen_ofdm(&params, 50, 1).unwrap();
        let h = flat_channel(0.0);
        let pa = PaModel { coeffs: vec![(1.0, 0.0), (0.2, 0.0)] };
        let rx = apply_residual_si(&tx, &h, &params, &pa, f64::NEG_INFINITY, 0).unwrap();
        // Compare out-of-band energy with and without the cubic term.
        let rx_lin =
            apply_residual_si(&tx, &h, &params, &PaModel::linear(), f64::NEG_INFINITY, 0).unwrap();
        let oob = |sig: &[Complex64]| {
            let n = params.n_subcarriers;
            let active = params.active_bins();
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_forward(n);
            let mut e = 0.0;
            for s in 1..40 {
                let start = s * params.symbol_len() + params.cp_len;
                let mut buf = sig[start..start + n].to_vec();
                fft.process(&mut buf);
                for (k, v) in buf.iter().enumerate() {
                    if !active.contains(&k) {
                        e += v.norm_sqr();
                    }
                }
            }
            e
        };
        assert!(
            oob(&rx) > 1e3 * oob(&rx_lin),
            "intermodulation energy should dominate: {} vs {}",
            oob(&rx),
            oob(&rx_lin)
        );
    }

    #[test]
    fn narrow_grid_rejected() {
        let params = OfdmParams::default();
        let tx = gen_ofdm(&params, 5, 1).unwrap();
        let g = FrequencyGrid::centered(900e6, 5e6, 11).unwrap();
        let h = ComplexResponse::from_fn(g, |_| Complex64::new(0.01, 0.0)).unwrap();
        assert!(apply_residual_si(&tx, &h, &params, &PaModel::linear(), -85.0, 0).is_err());
    }
}

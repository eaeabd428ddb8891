//! Synthetic OFDM baseband generation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Constellation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

/// OFDM PHY numerology: 64-point symbols with a 16-sample cyclic prefix
/// and 52 active subcarriers by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfdmParams {
    pub n_subcarriers: usize,
    pub cp_len: usize,
    pub n_active: usize,
    pub sample_rate_hz: f64,
    pub constellation: Constellation,
}

impl Default for OfdmParams {
    fn default() -> Self {
        OfdmParams {
            n_subcarriers: 64,
            cp_len: 16,
            n_active: 52,
            sample_rate_hz: 20e6,
            constellation: Constellation::Qpsk,
        }
    }
}

impl OfdmParams {
    pub fn validate(&self) -> Result<()> {
        if self.cp_len >= self.n_subcarriers {
            return Err(Error::invalid("cyclic prefix must be shorter than the symbol"));
        }
        if self.n_active > self.n_subcarriers - 1 {
            return Err(Error::invalid(
                "active subcarriers must leave the DC bin unused",
            ));
        }
        if self.n_active == 0 || self.n_subcarriers == 0 {
            return Err(Error::invalid("empty OFDM numerology"));
        }
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::invalid("sample rate must be positive"));
        }
        Ok(())
    }

    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    /// FFT bin indices of the active subcarriers: +/-1 .. +/-(n_active/2),
    /// skipping DC; an odd count gets its extra bin on the positive side.
    pub fn active_bins(&self) -> Vec<usize> {
        let n = self.n_subcarriers;
        let pos = self.n_active.div_ceil(2);
        let neg = self.n_active / 2;
        let mut bins: Vec<usize> = (1..=pos).collect();
        bins.extend((1..=neg).map(|k| n - k));
        bins.sort_unstable();
        bins
    }

    /// Baseband frequency offset of an FFT bin index.
    pub fn bin_offset_hz(&self, bin: usize) -> f64 {
        let n = self.n_subcarriers as isize;
        let k = bin as isize;
        let signed = if k <= n / 2 { k } else { k - n };
        signed as f64 * self.sample_rate_hz / self.n_subcarriers as f64
    }
}

fn draw_symbol(c: Constellation, rng: &mut ChaCha8Rng) -> Complex64 {
    match c {
        Constellation::Bpsk => Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0),
        Constellation::Qpsk => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Complex64::new(
                if rng.gen::<bool>() { s } else { -s },
                if rng.gen::<bool>() { s } else { -s },
            )
        }
        Constellation::Qam16 => {
            let levels = [-3.0, -1.0, 1.0, 3.0];
            let norm = 10f64.sqrt();
            Complex64::new(
                levels[rng.gen_range(0..4)] / norm,
                levels[rng.gen_range(0..4)] / norm,
            )
        }
        Constellation::Qam64 => {
            let levels = [-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0];
            let norm = 42f64.sqrt();
            Complex64::new(
                levels[rng.gen_range(0..8)] / norm,
                levels[rng.gen_range(0..8)] / norm,
            )
        }
    }
}

/// Generate `n_symbols` OFDM symbols of random data, normalized to exactly
/// unit average power over the stream. Deterministic per seed.
pub fn gen_ofdm(params: &OfdmParams, n_symbols: usize, seed: u64) -> Result<Vec<Complex64>> {
    params.validate()?;
    if n_symbols == 0 {
        return Err(Error::invalid("need at least one OFDM symbol"));
    }
    let n = params.n_subcarriers;
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bins = params.active_bins();

    let mut stream = Vec::with_capacity(n_symbols * params.symbol_len());
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..n_symbols {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for &b in &bins {
            buf[b] = draw_symbol(params.constellation, &mut rng);
        }
        ifft.process(&mut buf);
        // Cyclic prefix: last cp_len samples first.
        stream.extend_from_slice(&buf[n - params.cp_len..]);
        stream.extend_from_slice(&buf);
    }

    let power: f64 = stream.iter().map(|v| v.norm_sqr()).sum::<f64>() / stream.len() as f64;
    let scale = 1.0 / power.sqrt();
    stream.iter_mut().for_each(|v| *v *= scale);
    Ok(stream)
}

pub fn mean_power(samples: &[Complex64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / samples.len() as f64
}

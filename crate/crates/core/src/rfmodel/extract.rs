//! Measured-style BPF property extraction: the center frequency is the
//! grid point with the highest amplitude, and Q is the ratio of the center
//! frequency to the interpolated -3 dB bandwidth around it.

use super::response::ComplexResponse;
use crate::error::{Error, Result};

/// Extract (center frequency, quality factor) from a sampled response.
///
/// Ties in the peak amplitude go to the lowest frequency. The -3 dB
/// crossings are located by linear interpolation of |H| between grid
/// points; if either side never drops below the threshold the band is
/// too narrow to measure.
pub fn extract_center_and_q(response: &ComplexResponse) -> Result<(f64, f64)> {
    let freqs = response.grid().freqs_hz();
    if freqs.len() < 3 {
        return Err(Error::invalid(
            "peak/Q extraction needs at least 3 grid points",
        ));
    }
    let mags: Vec<f64> = response.values().iter().map(|v| v.norm()).collect();

    let mut peak_idx = 0;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[peak_idx] {
            peak_idx = i;
        }
    }
    let fc = freqs[peak_idx];
    let threshold = mags[peak_idx] * 10f64.powf(-3.0 / 20.0);

    // Walk outward from the peak to the first crossing on each side.
    let f_lo = crossing(freqs, &mags, peak_idx, threshold, false).ok_or(Error::BandTooNarrow {
        peak_hz: fc,
        side: "below",
    })?;
    let f_hi = crossing(freqs, &mags, peak_idx, threshold, true).ok_or(Error::BandTooNarrow {
        peak_hz: fc,
        side: "above",
    })?;

    Ok((fc, fc / (f_hi - f_lo)))
}

fn crossing(freqs: &[f64], mags: &[f64], peak: usize, threshold: f64, upward: bool) -> Option<f64> {
    let idx: Box<dyn Iterator<Item = usize>> = if upward {
        Box::new(peak..freqs.len() - 1)
    } else {
        Box::new((1..=peak).rev())
    };
    for i in idx {
        let (a, b) = if upward { (i, i + 1) } else { (i, i - 1) };
        if mags[b] <= threshold {
            let t = (mags[a] - threshold) / (mags[a] - mags[b]);
            return Some(freqs[a] + t * (freqs[b] - freqs[a]));
        }
    }
    None
}

//! FFT, windows, periodograms, peak picking and multirate processing.

mod fft;
mod multirate;
mod window;

pub use fft::{fft, fft_in_place, fft_real, zero_pad};
pub use multirate::{
    decimate, downsample, interpolate, qmf_analysis, qmf_synthesis, resampling_filter, upsample,
    QmfBank, RESAMPLING_ATTEN_DB,
};
pub use window::{make_window, WindowKind, WindowSpec};

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::signal::Signal;

/// How the bins of a [`Spectrum`] relate to the time-domain data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectrumNormalization {
    /// `X[k] = Σ x[n] e^{−2πi nk/N}`.
    UnnormalizedDft,
    /// Unit-norm QFT amplitudes of `x/‖x‖`; `norm` and `original_len`
    /// allow the inverse transform to restore the signal scale.
    UnitaryQft { norm: f64, original_len: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub sample_rate_hz: f64,
    pub normalization: SpectrumNormalization,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex64>, sample_rate_hz: f64, normalization: SpectrumNormalization) -> Result<Self> {
        if !bins.len().is_power_of_two() {
            return Err(DspError::NotPowerOfTwo(bins.len()));
        }
        Ok(Spectrum { bins, sample_rate_hz, normalization })
    }

    /// Unnormalized DFT of a signal zero-padded to `nfft` (next power of two when `None`).
    pub fn of_signal(x: &Signal, nfft: Option<usize>) -> Result<Self> {
        let n = nfft.unwrap_or_else(|| x.len().max(1).next_power_of_two());
        let padded = zero_pad(&x.samples, n)?;
        Ok(Spectrum {
            bins: fft_real(&padded)?,
            sample_rate_hz: x.sample_rate_hz,
            normalization: SpectrumNormalization::UnnormalizedDft,
        })
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.norm()).collect()
    }

    pub fn bin_frequency_hz(&self, k: usize) -> f64 {
        k as f64 * self.sample_rate_hz / self.bins.len() as f64
    }

    /// CSV with columns `bin,freq_hz,re,im,mag,mag_db`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,freq_hz,re,im,mag,mag_db\n");
        for (k, b) in self.bins.iter().enumerate() {
            let mag = b.norm();
            let _ = writeln!(
                out,
                "{k},{},{},{},{mag},{}",
                self.bin_frequency_hz(k),
                b.re,
                b.im,
                20.0 * mag.max(1e-300).log10()
            );
        }
        out
    }
}

/// One-sided periodogram `P[k] = |FFT(w·x)[k]|² / (N·U)`, `k = 0..=nfft/2`,
/// with `U = (1/N) Σ w²`.
pub fn periodogram(x: &Signal, window: WindowKind, beta: f64, nfft: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(DspError::InvalidSpec("periodogram of an empty signal".into()));
    }
    if !nfft.is_power_of_two() || nfft < n {
        return Err(DspError::InvalidSpec(format!(
            "nfft {nfft} must be a power of two >= signal length {n}"
        )));
    }
    let w = make_window(&WindowSpec { kind: window, length: n, beta })?;
    let u = w.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if u == 0.0 {
        return Err(DspError::InvalidSpec("window has zero power".into()));
    }
    let windowed: Vec<f64> = x.samples.iter().zip(&w).map(|(a, b)| a * b).collect();
    let spec = fft_real(&zero_pad(&windowed, nfft)?)?;
    let scale = 1.0 / (n as f64 * u);
    Ok(spec[..=nfft / 2].iter().map(|b| b.norm_sqr() * scale).collect())
}

/// Indices of the `count` largest local maxima of `mag`, ascending.
///
/// A plateau counts once, at its left edge; edges compare against their one
/// neighbour. Missing peaks are filled with the largest remaining bins. Ties
/// go to the lower index.
pub fn pick_peaks(mag: &[f64], count: usize) -> Result<Vec<usize>> {
    if mag.is_empty() {
        return Err(DspError::EmptyInput);
    }
    if count == 0 {
        return Err(DspError::InvalidSpec("peak count must be at least 1".into()));
    }
    let n = mag.len();
    let mut maxima = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && mag[end + 1] == mag[start] {
            end += 1;
        }
        let left_ok = start == 0 || mag[start - 1] < mag[start];
        let right_ok = end == n - 1 || mag[end + 1] < mag[start];
        if left_ok && right_ok {
            maxima.push(start);
        }
        start = end + 1;
    }
    let by_height = |a: &usize, b: &usize| mag[*b].total_cmp(&mag[*a]).then(a.cmp(b));
    maxima.sort_by(by_height);
    maxima.truncate(count);
    if maxima.len() < count {
        let mut chosen = vec![false; n];
        for &i in &maxima {
            chosen[i] = true;
        }
        let mut rest: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
        rest.sort_by(by_height);
        maxima.extend(rest.into_iter().take(count - maxima.len()));
    }
    maxima.sort_unstable();
    Ok(maxima)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_examples() {
        assert_eq!(pick_peaks(&[0.0, 5.0, 0.0, 3.0, 0.0], 2).unwrap(), vec![1, 3]);
        assert_eq!(pick_peaks(&[1.0, 2.0, 3.0, 4.0], 1).unwrap(), vec![3]);
        let filled = pick_peaks(&[0.0, 5.0, 0.0, 3.0, 1.0], 4).unwrap();
        assert_eq!(filled, vec![0, 1, 3, 4]);
        assert_eq!(pick_peaks(&[2.0, 2.0, 2.0], 1).unwrap(), vec![0]);
        assert_eq!(pick_peaks(&[1.0, 3.0, 3.0, 1.0], 1).unwrap(), vec![1]);
        assert_eq!(pick_peaks(&[1.0, 3.0, 3.0, 5.0], 1).unwrap(), vec![3]);
        assert_eq!(pick_peaks(&[1.0, 2.0], 5).unwrap(), vec![0, 1]);
        assert_eq!(pick_peaks(&[], 1), Err(DspError::EmptyInput));
    }

    #[test]
    fn periodogram_examples() {
        let zero = Signal::new(vec![0.0; 16], 8000.0).unwrap();
        assert!(periodogram(&zero, WindowKind::Hann, 0.0, 16).unwrap().iter().all(|&p| p == 0.0));
        let n = 64;
        let k0 = 5;
        let s: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * (k0 * i) as f64 / n as f64).sin())
            .collect();
        let p = periodogram(&Signal::new(s, 8000.0).unwrap(), WindowKind::Rectangular, 0.0, n).unwrap();
        assert_eq!(p.len(), n / 2 + 1);
        assert!((p[k0] - n as f64 / 4.0).abs() < 1e-9);
        assert!(periodogram(&zero, WindowKind::Hann, 0.0, 8).is_err());
        assert!(periodogram(&zero, WindowKind::Hann, 0.0, 24).is_err());
    }

    #[test]
    fn spectrum_csv_header() {
        let s = Spectrum::of_signal(&Signal::new(vec![1.0, 0.0], 8.0).unwrap(), None).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("bin,freq_hz,re,im,mag,mag_db\n0,0,1,0,1,0\n1,4,1,0,1,0\n"));
    }
}

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::design::{design_fir_kaiser, FirKind, FirSpec};
use crate::error::{DspError, Result};
use crate::filter::{filter_samples, TransferFunction};
use crate::signal::Signal;

/// Stopband attenuation of the anti-alias / anti-image filters.
pub const RESAMPLING_ATTEN_DB: f64 = 60.0;

/// `y[n] = x[Mn]`, no anti-alias filtering.
pub fn downsample(x: &Signal, factor: usize) -> Result<Signal> {
    if factor == 0 {
        return Err(DspError::InvalidFactor(factor));
    }
    Ok(Signal {
        samples: x.samples.iter().step_by(factor).copied().collect(),
        sample_rate_hz: x.sample_rate_hz / factor as f64,
    })
}

/// Zero insertion: `y[Ln] = x[n]`, zero elsewhere.
pub fn upsample(x: &Signal, factor: usize) -> Result<Signal> {
    if factor == 0 {
        return Err(DspError::InvalidFactor(factor));
    }
    let mut samples = vec![0.0; x.len() * factor];
    for (i, &v) in x.samples.iter().enumerate() {
        samples[i * factor] = v;
    }
    Ok(Signal { samples, sample_rate_hz: x.sample_rate_hz * factor as f64 })
}

/// Kaiser lowpass centred on `π/factor` with a `0.2π/factor` transition band.
pub fn resampling_filter(factor: usize) -> Result<TransferFunction> {
    let cutoff = PI / factor as f64;
    let half_width = 0.1 * PI / factor as f64;
    design_fir_kaiser(&FirSpec {
        passband_edge: cutoff - half_width,
        stopband_edge: cutoff + half_width,
        stopband_atten_db: RESAMPLING_ATTEN_DB,
        kind: FirKind::Lowpass,
    })
}

/// Anti-alias lowpass at `π/M`, then downsample.
pub fn decimate(x: &Signal, factor: usize) -> Result<Signal> {
    if factor == 0 {
        return Err(DspError::InvalidFactor(factor));
    }
    if factor == 1 {
        return Ok(x.clone());
    }
    let h = resampling_filter(factor)?;
    let filtered = Signal { samples: filter_samples(&h, &x.samples), sample_rate_hz: x.sample_rate_hz };
    downsample(&filtered, factor)
}

/// Upsample, then anti-image lowpass at `π/L` with passband gain `L`.
pub fn interpolate(x: &Signal, factor: usize) -> Result<Signal> {
    if factor == 0 {
        return Err(DspError::InvalidFactor(factor));
    }
    if factor == 1 {
        return Ok(x.clone());
    }
    let mut h = resampling_filter(factor)?;
    for v in h.b.iter_mut() {
        *v *= factor as f64;
    }
    let up = upsample(x, factor)?;
    Ok(Signal { samples: filter_samples(&h, &up.samples), sample_rate_hz: up.sample_rate_hz })
}

/// Two-channel QMF bank built from an analysis lowpass `h0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmfBank {
    h0: Vec<f64>,
}

impl QmfBank {
    pub fn new(h0: Vec<f64>) -> Result<Self> {
        if h0.is_empty() || h0.iter().any(|v| !v.is_finite()) {
            return Err(DspError::InvalidSpec("QMF prototype must be non-empty and finite".into()));
        }
        Ok(QmfBank { h0 })
    }

    pub fn haar() -> Self {
        QmfBank { h0: vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2] }
    }

    pub fn h0(&self) -> &[f64] {
        &self.h0
    }

    /// `h1[n] = (−1)^n h0[n]`.
    pub fn h1(&self) -> Vec<f64> {
        self.h0.iter().enumerate().map(|(n, &v)| if n % 2 == 0 { v } else { -v }).collect()
    }

    pub fn f0(&self) -> Vec<f64> {
        self.h0.clone()
    }

    /// `f1 = −h1`, which cancels the aliasing term.
    pub fn f1(&self) -> Vec<f64> {
        self.h1().into_iter().map(|v| -v).collect()
    }
}

/// Full linear convolution (length `len(x) + len(h) − 1`).
fn convolve(h: &[f64], x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut y = vec![0.0; x.len() + h.len() - 1];
    for (i, &xv) in x.iter().enumerate() {
        for (k, &hv) in h.iter().enumerate() {
            y[i + k] += hv * xv;
        }
    }
    y
}

/// Splits `x` into decimated low and high bands.
///
/// Each branch filters `x` over its full convolution support before keeping
/// the even-indexed samples, so no input energy is lost at the tail.
pub fn qmf_analysis(bank: &QmfBank, x: &Signal) -> Result<(Signal, Signal)> {
    let rate = x.sample_rate_hz / 2.0;
    let band = |h: &[f64]| Signal {
        samples: convolve(h, &x.samples).into_iter().step_by(2).collect(),
        sample_rate_hz: rate,
    };
    Ok((band(&bank.h0), band(&bank.h1())))
}

/// `x̂ = f0 * (↑2 low) + f1 * (↑2 high)`, zero-state, length `2·len(low)`.
pub fn qmf_synthesis(bank: &QmfBank, low: &Signal, high: &Signal) -> Result<Signal> {
    if low.len() != high.len() {
        return Err(DspError::LengthMismatch { expected: low.len(), actual: high.len() });
    }
    let up_low = upsample(low, 2)?;
    let up_high = upsample(high, 2)?;
    let f0 = TransferFunction::fir(bank.f0())?;
    let f1 = TransferFunction::fir(bank.f1())?;
    let a = filter_samples(&f0, &up_low.samples);
    let b = filter_samples(&f1, &up_high.samples);
    Ok(Signal {
        samples: a.iter().zip(&b).map(|(u, v)| u + v).collect(),
        sample_rate_hz: low.sample_rate_hz * 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec(), 8000.0).unwrap()
    }

    #[test]
    fn down_and_up_examples() {
        let d = downsample(&sig(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 2).unwrap();
        assert_eq!(d.samples, vec![1.0, 3.0, 5.0]);
        assert_eq!(d.sample_rate_hz, 4000.0);
        assert_eq!(downsample(&sig(&[1.0, 2.0]), 1).unwrap(), sig(&[1.0, 2.0]));
        assert_eq!(upsample(&sig(&[1.0, 2.0]), 2).unwrap().samples, vec![1.0, 0.0, 2.0, 0.0]);
        assert_eq!(upsample(&sig(&[1.0, 2.0]), 1).unwrap(), sig(&[1.0, 2.0]));
        assert_eq!(downsample(&sig(&[1.0]), 0), Err(DspError::InvalidFactor(0)));
        assert_eq!(upsample(&sig(&[1.0]), 0), Err(DspError::InvalidFactor(0)));
    }

    #[test]
    fn haar_constant_input_has_no_high_band() {
        let (low, high) = qmf_analysis(&QmfBank::haar(), &sig(&[1.0; 4])).unwrap();
        assert!(high.samples[1..high.len() - 1].iter().all(|v| v.abs() < 1e-12));
        assert!(low.samples[1] > 1.0);
    }

    #[test]
    fn zero_in_zero_out() {
        let (low, high) = qmf_analysis(&QmfBank::haar(), &sig(&[0.0; 8])).unwrap();
        assert!(low.samples.iter().chain(&high.samples).all(|&v| v == 0.0));
        let y = qmf_synthesis(&QmfBank::haar(), &low, &high).unwrap();
        assert!(y.samples.iter().all(|&v| v == 0.0));
        assert!(qmf_synthesis(&QmfBank::haar(), &sig(&[0.0; 2]), &sig(&[0.0; 3])).is_err());
    }

    #[test]
    fn decimate_and_interpolate_lengths() {
        let x = sig(&vec![1.0; 400]);
        let d = decimate(&x, 4).unwrap();
        assert_eq!(d.len(), 100);
        assert_eq!(d.sample_rate_hz, 2000.0);
        // DC passes with unit gain once the filter has filled
        assert!((d.samples[99] - 1.0).abs() < 1e-2);
        let i = interpolate(&sig(&vec![1.0; 100]), 2).unwrap();
        assert_eq!(i.len(), 200);
        assert!((i.samples[190] - 1.0).abs() < 1e-2);
    }
}

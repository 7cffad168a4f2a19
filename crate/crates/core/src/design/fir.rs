use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::filter::TransferFunction;
use crate::spectral::{make_window, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirKind {
    Lowpass,
    Highpass,
}

/// Edges in rad/sample; attenuation in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirSpec {
    pub passband_edge: f64,
    pub stopband_edge: f64,
    pub stopband_atten_db: f64,
    pub kind: FirKind,
}

impl FirSpec {
    pub fn validate(&self) -> Result<()> {
        let in_band = |w: f64| w.is_finite() && w > 0.0 && w < PI;
        if !in_band(self.passband_edge) || !in_band(self.stopband_edge) {
            return Err(DspError::InvalidSpec("band edges must lie in (0, π)".into()));
        }
        let ordered = match self.kind {
            FirKind::Lowpass => self.passband_edge < self.stopband_edge,
            FirKind::Highpass => self.stopband_edge < self.passband_edge,
        };
        if !ordered {
            return Err(DspError::InvalidSpec(format!(
                "band edges out of order for {:?}",
                self.kind
            )));
        }
        if !(self.stopband_atten_db.is_finite() && self.stopband_atten_db >= 0.0) {
            return Err(DspError::InvalidSpec("stopband attenuation must be >= 0 dB".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KaiserParams {
    pub beta: f64,
    /// Filter order; the filter has `order + 1` taps.
    pub order: usize,
}

/// Modified Bessel function of the first kind, order zero, by power series.
pub fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= (half / k) * (half / k);
        sum += term;
        if term / sum < 1e-14 {
            return sum;
        }
        k += 1.0;
    }
}

/// Kaiser's empirical β and order for attenuation `atten_db` over a
/// transition of `transition_width` rad/sample. The order is forced even.
pub fn kaiser_params(atten_db: f64, transition_width: f64) -> Result<KaiserParams> {
    if !(atten_db.is_finite() && atten_db >= 0.0) {
        return Err(DspError::InvalidSpec("attenuation must be >= 0 dB".into()));
    }
    if !(transition_width > 0.0 && transition_width < PI) {
        return Err(DspError::InvalidSpec("transition width must lie in (0, π)".into()));
    }
    let beta = if atten_db > 50.0 {
        0.1102 * (atten_db - 8.7)
    } else if atten_db >= 21.0 {
        0.5842 * (atten_db - 21.0).powf(0.4) + 0.07886 * (atten_db - 21.0)
    } else {
        0.0
    };
    let raw = ((atten_db - 7.95) / (2.285 * transition_width)).ceil();
    let mut order = if raw < 1.0 { 1 } else { raw as usize };
    if order % 2 == 1 {
        order += 1;
    }
    Ok(KaiserParams { beta, order })
}

/// Windowed-sinc lowpass/highpass with a Kaiser window.
pub fn design_fir_kaiser(spec: &FirSpec) -> Result<TransferFunction> {
    spec.validate()?;
    let width = (spec.stopband_edge - spec.passband_edge).abs();
    let params = kaiser_params(spec.stopband_atten_db, width)?;
    TransferFunction::fir(kaiser_taps(spec, params)?)
}

/// Taps for explicit Kaiser parameters (order must be even).
pub fn kaiser_taps(spec: &FirSpec, params: KaiserParams) -> Result<Vec<f64>> {
    if params.order == 0 || !params.order.is_multiple_of(2) {
        return Err(DspError::InvalidSpec("Kaiser design needs an even order >= 2".into()));
    }
    let m = params.order;
    let cutoff = (spec.passband_edge + spec.stopband_edge) / 2.0;
    let window = make_window(&WindowSpec::kaiser(m + 1, params.beta))?;
    let centre = (m / 2) as f64;
    let mut b: Vec<f64> = (0..=m)
        .map(|n| {
            let t = n as f64 - centre;
            let ideal = if t == 0.0 { cutoff / PI } else { (cutoff * t).sin() / (PI * t) };
            ideal * window[n]
        })
        .collect();
    // make the palindrome exact regardless of rounding in sin()
    for n in 0..m / 2 {
        let avg = 0.5 * (b[n] + b[m - n]);
        b[n] = avg;
        b[m - n] = avg;
    }
    if spec.kind == FirKind::Highpass {
        for v in b.iter_mut() {
            *v = -*v;
        }
        b[m / 2] += 1.0;
    }
    Ok(b)
}

/// Type-I frequency-sampling design from `N` (odd) magnitude samples at
/// `ω_k = 2πk/N`; only `k ≤ (N−1)/2` is read, the rest is mirrored.
pub fn design_fir_freq_sampling(desired_mag: &[f64]) -> Result<TransferFunction> {
    let n = desired_mag.len();
    if n == 0 || n.is_multiple_of(2) {
        return Err(DspError::InvalidSpec(format!("frequency sampling needs odd N, got {n}")));
    }
    let half = (n - 1) / 2;
    if desired_mag[..=half].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(DspError::InvalidSpec("desired magnitudes must be finite and >= 0".into()));
    }
    let nf = n as f64;
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..=half {
        h[k] = Complex64::from_polar(desired_mag[k], -PI * k as f64 * (nf - 1.0) / nf);
        if k > 0 {
            h[n - k] = h[k].conj();
        }
    }
    let mut b = Vec::with_capacity(n);
    for t in 0..n {
        let v: Complex64 = h
            .iter()
            .enumerate()
            .map(|(k, hk)| hk * Complex64::from_polar(1.0, 2.0 * PI * (k * t % n) as f64 / nf))
            .sum::<Complex64>()
            / nf;
        let scale = desired_mag[..=half].iter().fold(1.0f64, |m, v| m.max(*v));
        if v.im.abs() > 1e-10 * scale {
            return Err(DspError::NumericalFailure(format!("imaginary residue {} in tap {t}", v.im)));
        }
        b.push(v.re);
    }
    for t in 0..half {
        let avg = 0.5 * (b[t] + b[n - 1 - t]);
        b[t] = avg;
        b[n - 1 - t] = avg;
    }
    TransferFunction::fir(b)
}

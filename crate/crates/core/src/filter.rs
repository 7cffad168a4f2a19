//! Rational digital filters `H(z) = B(z)/A(z)`: simulation, responses and
//! pole-zero analysis.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::roots::{expand_roots, find_roots};
use crate::signal::Signal;

/// Pole magnitudes at or beyond `1 - STABILITY_MARGIN` count as unstable.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransferFunction")]
pub struct TransferFunction {
    /// Numerator, `b[0] + b[1] z⁻¹ + …`.
    pub b: Vec<f64>,
    /// Denominator with `a[0] == 1`.
    pub a: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransferFunction {
    b: Vec<f64>,
    a: Vec<f64>,
}

impl TryFrom<RawTransferFunction> for TransferFunction {
    type Error = DspError;

    fn try_from(raw: RawTransferFunction) -> Result<Self> {
        TransferFunction::new(raw.b, raw.a)
    }
}

impl TransferFunction {
    pub fn new(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if b.is_empty() || a.is_empty() {
            return Err(DspError::InvalidSpec("b and a must be non-empty".into()));
        }
        if a[0] != 1.0 {
            return Err(DspError::InvalidSpec(format!("a[0] must be exactly 1, got {}", a[0])));
        }
        if b.iter().chain(a.iter()).any(|v| !v.is_finite()) {
            return Err(DspError::InvalidSpec("coefficients must be finite".into()));
        }
        Ok(TransferFunction { b, a })
    }

    /// Scales both polynomials so that `a[0] == 1`.
    pub fn normalized(b: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let a0 = *a.first().ok_or_else(|| DspError::InvalidSpec("a must be non-empty".into()))?;
        if a0 == 0.0 || !a0.is_finite() {
            return Err(DspError::InvalidSpec("a[0] must be non-zero".into()));
        }
        let b = b.into_iter().map(|v| v / a0).collect();
        let mut a: Vec<f64> = a.into_iter().map(|v| v / a0).collect();
        a[0] = 1.0;
        TransferFunction::new(b, a)
    }

    pub fn fir(b: Vec<f64>) -> Result<Self> {
        TransferFunction::new(b, vec![1.0])
    }

    pub fn identity() -> Self {
        TransferFunction { b: vec![1.0], a: vec![1.0] }
    }

    pub fn is_fir(&self) -> bool {
        self.a[1..].iter().all(|&v| v == 0.0)
    }

    pub fn order(&self) -> usize {
        self.b.len().max(self.a.len()) - 1
    }

    /// `H(e^{jω})` by Horner evaluation in `z⁻¹`.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        let w = Complex64::from_polar(1.0, -omega);
        let num = poly_in_zinv(&self.b, w);
        let den = poly_in_zinv(&self.a, w);
        if den.norm() < 1e-300 {
            return Err(DspError::DivisionNearZero { omega });
        }
        Ok(num / den)
    }

    pub fn pole_zero(&self) -> Result<PoleZeroSet> {
        let len = self.b.len().max(self.a.len());
        let mut num = self.b.clone();
        num.resize(len, 0.0);
        let mut den = self.a.clone();
        den.resize(len, 0.0);
        let gain = self.b.iter().copied().find(|&v| v != 0.0).unwrap_or(0.0);
        let zeros = if gain == 0.0 { Vec::new() } else { find_roots(&num)? };
        let poles = find_roots(&den)?;
        Ok(PoleZeroSet { zeros, poles, gain })
    }
}

/// `Σ c[k] w^k` evaluated by Horner from the highest index.
fn poly_in_zinv(c: &[f64], w: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * w + ck)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleZeroSet {
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub gain: f64,
}

impl PoleZeroSet {
    /// Rebuilds `b` (gain-scaled) and monic `a`, both in powers of `z⁻¹`.
    pub fn to_transfer_function(&self) -> Result<TransferFunction> {
        let mut b = expand_roots(&self.zeros, self.gain)?;
        let mut a = expand_roots(&self.poles, 1.0)?;
        let len = b.len().max(a.len());
        // align degrees: H(z) = z^{-(len-1)} (z^k B) / (z^k A)
        b.resize(len, 0.0);
        a.resize(len, 0.0);
        while b.len() > 1 && a.len() > 1 && b.last() == Some(&0.0) && a.last() == Some(&0.0) {
            b.pop();
            a.pop();
        }
        while b.len() > 1 && b.last() == Some(&0.0) {
            b.pop();
        }
        while a.len() > 1 && a.last() == Some(&0.0) {
            a.pop();
        }
        TransferFunction::new(b, a)
    }

    /// CSV with columns `kind,re,im`, poles first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,re,im\n");
        for p in &self.poles {
            let _ = writeln!(out, "pole,{},{}", p.re, p.im);
        }
        for z in &self.zeros {
            let _ = writeln!(out, "zero,{},{}", z.re, z.im);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse {
    pub omega: Vec<f64>,
    pub h: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn magnitude(&self) -> Vec<f64> {
        self.h.iter().map(|h| h.norm()).collect()
    }

    pub fn magnitude_db(&self) -> Vec<f64> {
        self.h.iter().map(|h| 20.0 * h.norm().max(1e-300).log10()).collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.h.iter().map(|h| h.arg()).collect()
    }
}

/// Zero-state direct-form II transposed filtering; output length equals input length.
pub fn filter_samples(tf: &TransferFunction, x: &[f64]) -> Vec<f64> {
    let len = tf.b.len().max(tf.a.len());
    let coef = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let mut state = vec![0.0; len - 1];
    let mut y = Vec::with_capacity(x.len());
    for &xn in x {
        let yn = tf.b[0] * xn + state.first().copied().unwrap_or(0.0);
        for k in 0..len - 1 {
            let next = if k + 1 < len - 1 { state[k + 1] } else { 0.0 };
            state[k] = coef(&tf.b, k + 1) * xn - coef(&tf.a, k + 1) * yn + next;
        }
        y.push(yn);
    }
    y
}

pub fn filter_signal(tf: &TransferFunction, x: &Signal) -> Signal {
    Signal {
        samples: filter_samples(tf, &x.samples),
        sample_rate_hz: x.sample_rate_hz,
    }
}

pub fn impulse_response(tf: &TransferFunction, length: usize) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(DspError::InvalidLength("impulse response length must be at least 1".into()));
    }
    let mut delta = vec![0.0; length];
    delta[0] = 1.0;
    Ok(filter_samples(tf, &delta))
}

/// Response on `ω_k = kπ/(n−1)`, `k = 0..n`.
pub fn frequency_response(tf: &TransferFunction, n_points: usize) -> Result<FrequencyResponse> {
    if n_points < 2 {
        return Err(DspError::InvalidLength("frequency grid needs at least 2 points".into()));
    }
    let omega: Vec<f64> = (0..n_points).map(|k| k as f64 * PI / (n_points - 1) as f64).collect();
    let h = omega.iter().map(|&w| tf.eval(w)).collect::<Result<Vec<_>>>()?;
    Ok(FrequencyResponse { omega, h })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub stable: bool,
    pub max_pole_magnitude: f64,
}

pub fn is_stable(tf: &TransferFunction) -> Result<Stability> {
    let max_pole_magnitude = if tf.is_fir() {
        0.0
    } else {
        find_roots(&tf.a)?.iter().map(|p| p.norm()).fold(0.0, f64::max)
    };
    Ok(Stability {
        stable: max_pole_magnitude < 1.0 - STABILITY_MARGIN,
        max_pole_magnitude,
    })
}

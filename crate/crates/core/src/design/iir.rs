//! Classical IIR design: analog lowpass prototype, frequency transformation,
//! bilinear transform with prewarping.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::elliptic::{degree_equation, Modulus};
use super::fir::FirKind;
use crate::error::{DspError, Result};
use crate::filter::TransferFunction;
use crate::roots::expand_roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IirFamily {
    Butterworth,
    #[serde(alias = "cheby1")]
    Chebyshev1,
    #[serde(alias = "cheby2")]
    Chebyshev2,
    Elliptic,
}

impl IirFamily {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "butterworth" => Some(IirFamily::Butterworth),
            "chebyshev1" | "cheby1" => Some(IirFamily::Chebyshev1),
            "chebyshev2" | "cheby2" => Some(IirFamily::Chebyshev2),
            "elliptic" => Some(IirFamily::Elliptic),
            _ => None,
        }
    }
}

/// `cutoff` (rad/sample) is the −3 dB point for Butterworth, the passband
/// ripple edge for Chebyshev I and elliptic, and the stopband edge for
/// Chebyshev II.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IirSpec {
    pub family: IirFamily,
    pub kind: FirKind,
    pub order: usize,
    pub cutoff: f64,
    #[serde(default)]
    pub passband_ripple_db: Option<f64>,
    #[serde(default)]
    pub stopband_atten_db: Option<f64>,
}

/// Analog zeros, poles and gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zpk {
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    pub gain: f64,
}

impl Zpk {
    /// `H(s)` of an analog system.
    pub fn eval_s(&self, s: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|z| s - z).product();
        let den: Complex64 = self.poles.iter().map(|p| s - p).product();
        self.gain * num / den
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IirDesign {
    pub tf: TransferFunction,
    /// The frequency-scaled analog filter that was bilinear-transformed.
    pub analog: Zpk,
    /// Stopband edge in rad/sample (elliptic only).
    pub stopband_edge: Option<f64>,
}

impl IirSpec {
    fn ripple(&self) -> Result<f64> {
        match self.passband_ripple_db {
            Some(r) if r.is_finite() && r > 0.0 => Ok(r),
            _ => Err(DspError::InvalidSpec(format!("{:?} needs passband_ripple_db > 0", self.family))),
        }
    }

    fn atten(&self) -> Result<f64> {
        match self.stopband_atten_db {
            Some(a) if a.is_finite() && a > 0.0 => Ok(a),
            _ => Err(DspError::InvalidSpec(format!("{:?} needs stopband_atten_db > 0", self.family))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.order > 64 {
            return Err(DspError::InvalidSpec(format!("order must be in 1..=64, got {}", self.order)));
        }
        if !(self.cutoff > 0.0 && self.cutoff < PI) {
            return Err(DspError::InvalidSpec("cutoff must lie in (0, π)".into()));
        }
        match self.family {
            IirFamily::Butterworth => {}
            IirFamily::Chebyshev1 => {
                self.ripple()?;
            }
            IirFamily::Chebyshev2 => {
                self.atten()?;
            }
            IirFamily::Elliptic => {
                let (rp, a) = (self.ripple()?, self.atten()?);
                if a <= rp {
                    return Err(DspError::InvalidSpec("stopband attenuation must exceed passband ripple".into()));
                }
            }
        }
        Ok(())
    }
}

fn dc_gain(zeros: &[Complex64], poles: &[Complex64]) -> f64 {
    let p: Complex64 = poles.iter().map(|p| -p).product();
    let z: Complex64 = zeros.iter().map(|z| -z).product();
    (p / z).re
}

/// Butterworth poles `exp(jπ(2k+n−1)/(2n))`, unit −3 dB frequency.
pub fn butterworth_prototype(n: usize) -> Zpk {
    let poles = (1..=n)
        .map(|k| Complex64::from_polar(1.0, PI * (2 * k + n - 1) as f64 / (2 * n) as f64))
        .collect::<Vec<_>>();
    let gain = dc_gain(&[], &poles);
    Zpk { zeros: Vec::new(), poles, gain }
}

/// Chebyshev I with equiripple passband on `[0, 1]`; crest gain 1.
pub fn chebyshev1_prototype(n: usize, ripple_db: f64) -> Zpk {
    let eps = (10f64.powf(ripple_db / 10.0) - 1.0).sqrt();
    let mu = (1.0 / eps).asinh() / n as f64;
    let poles: Vec<Complex64> = (1..=n)
        .map(|k| {
            let theta = PI * (2 * k - 1) as f64 / (2 * n) as f64;
            Complex64::new(-mu.sinh() * theta.sin(), mu.cosh() * theta.cos())
        })
        .collect();
    let mut gain = dc_gain(&[], &poles);
    if n.is_multiple_of(2) {
        gain /= (1.0 + eps * eps).sqrt();
    }
    Zpk { zeros: Vec::new(), poles, gain }
}

/// Chebyshev II (inverse Chebyshev), stopband edge at 1; unit DC gain.
pub fn chebyshev2_prototype(n: usize, atten_db: f64) -> Zpk {
    let eps = 1.0 / (10f64.powf(atten_db / 10.0) - 1.0).sqrt();
    let mu = (1.0 / eps).asinh() / n as f64;
    let mut zeros = Vec::new();
    let mut poles = Vec::new();
    for k in 1..=n {
        let theta = PI * (2 * k - 1) as f64 / (2 * n) as f64;
        if 2 * k - 1 != n {
            zeros.push(Complex64::new(0.0, 1.0 / theta.cos()));
        }
        let p = Complex64::new(-mu.sinh() * theta.sin(), mu.cosh() * theta.cos());
        poles.push(p.inv());
    }
    let gain = dc_gain(&zeros, &poles);
    Zpk { zeros, poles, gain }
}

/// Elliptic prototype with passband edge 1. Returns the prototype and the
/// selectivity `k`; the stopband edge is `1/k`.
pub fn elliptic_prototype(n: usize, ripple_db: f64, atten_db: f64) -> Result<(Zpk, f64)> {
    let ep = (10f64.powf(ripple_db / 10.0) - 1.0).sqrt();
    let es = (10f64.powf(atten_db / 10.0) - 1.0).sqrt();
    let k1 = ep / es;
    let (k, kp) = degree_equation(n, k1);
    if !(k > 0.0 && k < 1.0 && k.is_finite()) {
        return Err(DspError::NumericalFailure(format!("degree equation gave k = {k}")));
    }
    let modk = Modulus::with_complement(k, kp);
    let modk1 = Modulus::new(k1);
    let j = Complex64::new(0.0, 1.0);
    let v0 = -j * modk1.asne(j / ep) / n as f64;
    let mut zeros = Vec::new();
    let mut poles = Vec::new();
    for i in 1..=n / 2 {
        let u = (2 * i - 1) as f64 / n as f64;
        let zeta = modk.cde(Complex64::new(u, 0.0));
        let z = j / (k * zeta);
        zeros.push(Complex64::new(0.0, z.im));
        zeros.push(Complex64::new(0.0, -z.im));
        let p = j * modk.cde(u - j * v0);
        poles.push(p);
        poles.push(p.conj());
    }
    if n % 2 == 1 {
        let p0 = j * modk.sne(j * v0);
        poles.push(Complex64::new(p0.re, 0.0));
    }
    if poles.iter().any(|p| !(p.re < 0.0) || !p.is_finite()) {
        return Err(DspError::NumericalFailure("elliptic poles not in the left half-plane".into()));
    }
    let mut gain = dc_gain(&zeros, &poles);
    if n.is_multiple_of(2) {
        gain /= (1.0 + ep * ep).sqrt();
    }
    Ok((Zpk { zeros, poles, gain }, k))
}

fn prototype(spec: &IirSpec) -> Result<(Zpk, Option<f64>)> {
    let n = spec.order;
    Ok(match spec.family {
        IirFamily::Butterworth => (butterworth_prototype(n), None),
        IirFamily::Chebyshev1 => (chebyshev1_prototype(n, spec.ripple()?), None),
        IirFamily::Chebyshev2 => (chebyshev2_prototype(n, spec.atten()?), None),
        IirFamily::Elliptic => {
            let (zpk, k) = elliptic_prototype(n, spec.ripple()?, spec.atten()?)?;
            (zpk, Some(k))
        }
    })
}

/// `s → s/Ω`.
fn lowpass_scale(p: &Zpk, omega: f64) -> Zpk {
    let excess = p.poles.len() as i32 - p.zeros.len() as i32;
    Zpk {
        zeros: p.zeros.iter().map(|z| z * omega).collect(),
        poles: p.poles.iter().map(|q| q * omega).collect(),
        gain: p.gain * omega.powi(excess),
    }
}

/// `s → Ω/s`.
fn highpass_scale(p: &Zpk, omega: f64) -> Zpk {
    let excess = p.poles.len() - p.zeros.len();
    let mut zeros: Vec<Complex64> = p.zeros.iter().map(|z| omega / z).collect();
    zeros.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), excess));
    let num: Complex64 = p.zeros.iter().map(|z| -z).product();
    let den: Complex64 = p.poles.iter().map(|q| -q).product();
    Zpk {
        zeros,
        poles: p.poles.iter().map(|q| omega / q).collect(),
        gain: p.gain * (num / den).re,
    }
}

/// `s = 2(1 − z⁻¹)/(1 + z⁻¹)`; returns digital zeros, poles and gain.
fn bilinear(p: &Zpk) -> Zpk {
    let two = Complex64::new(2.0, 0.0);
    let map = |s: &Complex64| (two + s) / (two - s);
    let mut zeros: Vec<Complex64> = p.zeros.iter().map(map).collect();
    zeros.extend(std::iter::repeat_n(Complex64::new(-1.0, 0.0), p.poles.len() - p.zeros.len()));
    let num: Complex64 = p.zeros.iter().map(|z| two - z).product();
    let den: Complex64 = p.poles.iter().map(|q| two - q).product();
    Zpk { zeros, poles: p.poles.iter().map(map).collect(), gain: p.gain * (num / den).re }
}

pub fn design_iir_detailed(spec: &IirSpec) -> Result<IirDesign> {
    spec.validate()?;
    let (proto, selectivity) = prototype(spec)?;
    let warped = 2.0 * (spec.cutoff / 2.0).tan();
    let analog = match spec.kind {
        FirKind::Lowpass => lowpass_scale(&proto, warped),
        FirKind::Highpass => highpass_scale(&proto, warped),
    };
    let digital = bilinear(&analog);
    let b = expand_roots(&digital.zeros, digital.gain)?;
    let a = expand_roots(&digital.poles, 1.0)?;
    let mut tf = TransferFunction::normalized(b, a)?;

    let crest_ratio = match spec.family {
        IirFamily::Chebyshev1 | IirFamily::Elliptic if spec.order.is_multiple_of(2) => {
            let eps2 = 10f64.powf(spec.ripple()? / 10.0) - 1.0;
            1.0 / (1.0 + eps2).sqrt()
        }
        _ => 1.0,
    };
    let reference = match spec.kind {
        FirKind::Lowpass => 0.0,
        FirKind::Highpass => PI,
    };
    let actual = tf.eval(reference)?.norm();
    if !(actual > 0.0 && actual.is_finite()) {
        return Err(DspError::NumericalFailure("reference gain vanished".into()));
    }
    let scale = crest_ratio / actual;
    for v in tf.b.iter_mut() {
        *v *= scale;
    }
    let analog = Zpk { gain: analog.gain * scale, ..analog };

    let stopband_edge = selectivity.map(|k| match spec.kind {
        FirKind::Lowpass => 2.0 * (warped / k / 2.0).atan(),
        FirKind::Highpass => 2.0 * (warped * k / 2.0).atan(),
    });
    Ok(IirDesign { tf, analog, stopband_edge })
}

pub fn design_iir(spec: &IirSpec) -> Result<TransferFunction> {
    design_iir_detailed(spec).map(|d| d.tf)
}

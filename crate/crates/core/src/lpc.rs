//! Linear prediction: autocorrelation, Levinson-Durbin, spectral envelope,
//! formant extraction and frame-wise analysis-synthesis.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::filter::{frequency_response, TransferFunction};
use crate::roots::find_roots;
use crate::signal::Signal;
use crate::spectral::{make_window, WindowKind, WindowSpec};

/// Default prediction order at 8 kHz (`fs/1000 + 2`).
pub const DEFAULT_ORDER: usize = 10;
pub const MAX_ORDER: usize = 30;
pub const MIN_FRAME_LEN: usize = 64;
pub const MAX_FRAME_LEN: usize = 1024;

pub const MAX_FORMANT_BANDWIDTH_HZ: f64 = 500.0;
pub const FORMANT_GUARD_HZ: f64 = 90.0;

/// Unnormalized autocorrelation `r[m] = Σ x[n]·x[n+m]` for `m = 0..=max_lag`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= x.len() {
        return Err(DspError::InvalidLag { lag: max_lag, len: x.len() });
    }
    Ok((0..=max_lag)
        .map(|m| x[..x.len() - m].iter().zip(&x[m..]).map(|(a, b)| a * b).sum())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpcModel {
    /// Prediction polynomial `A(z)`, `a[0] = 1`.
    pub a: Vec<f64>,
    /// Reflection coefficients, `k[i]` produced at stage `i + 1`.
    pub k: Vec<f64>,
    pub error: f64,
}

impl LpcModel {
    pub fn identity(error: f64) -> Self {
        LpcModel { a: vec![1.0], k: Vec::new(), error }
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// `{"a":[...],"k":[...],"error":E}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn inverse_filter(&self) -> TransferFunction {
        TransferFunction { b: self.a.clone(), a: vec![1.0] }
    }

    pub fn synthesis_filter(&self, gain: f64) -> TransferFunction {
        TransferFunction { b: vec![gain], a: self.a.clone() }
    }
}

/// Solves the order-`p` normal equations from `r[0..=p]`.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<LpcModel> {
    if r.len() <= order {
        return Err(DspError::InvalidLag { lag: order, len: r.len() });
    }
    if !(r[0] > 0.0) || !r[0].is_finite() {
        return Err(DspError::SingularError { order: 0, error: r[0] });
    }
    // alpha holds predictor coefficients: x̂[n] = Σ alpha[j] x[n−1−j]
    let mut alpha: Vec<f64> = Vec::with_capacity(order);
    let mut k = Vec::with_capacity(order);
    let mut err = r[0];
    for i in 1..=order {
        let acc: f64 = alpha.iter().enumerate().map(|(j, aj)| aj * r[i - 1 - j]).sum();
        let ki = (r[i] - acc) / err;
        let prev = alpha.clone();
        for j in 0..prev.len() {
            alpha[j] = prev[j] - ki * prev[prev.len() - 1 - j];
        }
        alpha.push(ki);
        k.push(ki);
        err *= 1.0 - ki * ki;
        if !(err > 1e-300) {
            return Err(DspError::SingularError { order: i, error: err });
        }
    }
    let mut a = Vec::with_capacity(order + 1);
    a.push(1.0);
    a.extend(alpha.iter().map(|v| -v));
    Ok(LpcModel { a, k, error: err })
}

/// `g/|A(e^{jω})|` on the `[0, π]` grid of [`frequency_response`];
/// `g = √E` when `gain` is `None`.
pub fn lpc_envelope(model: &LpcModel, gain: Option<f64>, n_points: usize) -> Result<Vec<f64>> {
    let g = gain.unwrap_or_else(|| model.error.sqrt());
    if !(g > 0.0 && g.is_finite()) {
        return Err(DspError::InvalidSpec(format!("envelope gain must be > 0, got {g}")));
    }
    let resp = frequency_response(&model.synthesis_filter(g), n_points)?;
    Ok(resp.magnitude())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
}

pub fn pole_to_formant(radius: f64, angle: f64, fs: f64) -> Formant {
    Formant { frequency_hz: angle * fs / (2.0 * PI), bandwidth_hz: -(fs / PI) * radius.ln() }
}

pub fn bandwidth_to_radius(bandwidth_hz: f64, fs: f64) -> f64 {
    (-PI * bandwidth_hz / fs).exp()
}

/// Resonances from the upper-half-plane roots of `A(z)` inside the unit
/// circle, gated by bandwidth and guard bands, sorted by frequency.
pub fn formants_from_lpc(model: &LpcModel, fs: f64) -> Result<Vec<Formant>> {
    if model.a.len() < 2 {
        return Ok(Vec::new());
    }
    let mut out: Vec<Formant> = find_roots(&model.a)?
        .into_iter()
        .filter(|z| z.im > 0.0 && z.norm() < 1.0)
        .map(|z| pole_to_formant(z.norm(), z.arg(), fs))
        .filter(|f| {
            f.bandwidth_hz < MAX_FORMANT_BANDWIDTH_HZ
                && f.frequency_hz > FORMANT_GUARD_HZ
                && f.frequency_hz < fs / 2.0 - FORMANT_GUARD_HZ
        })
        .collect();
    out.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub frame_len: usize,
    pub hop: usize,
    pub window: WindowSpec,
}

impl FrameSpec {
    pub fn new(frame_len: usize, hop: usize, window: WindowKind) -> Self {
        FrameSpec { frame_len, hop, window: WindowSpec::new(window, frame_len) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_len == 0 || self.hop == 0 || self.hop > self.frame_len {
            return Err(DspError::InvalidSpec(format!(
                "need 1 <= hop <= frame_len, got hop {} frame_len {}",
                self.hop, self.frame_len
            )));
        }
        if self.window.length != self.frame_len {
            return Err(DspError::InvalidSpec("window length must equal frame_len".into()));
        }
        Ok(())
    }
}

/// Windowed frames starting at `0, hop, 2·hop, …`.
pub fn frame_signal(x: &Signal, spec: &FrameSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if spec.frame_len > x.len() {
        return Err(DspError::InvalidSpec(format!(
            "frame_len {} exceeds signal length {}",
            spec.frame_len,
            x.len()
        )));
    }
    let w = make_window(&spec.window)?;
    let count = (x.len() - spec.frame_len) / spec.hop + 1;
    Ok((0..count)
        .map(|f| {
            let start = f * spec.hop;
            x.samples[start..start + spec.frame_len].iter().zip(&w).map(|(s, w)| s * w).collect()
        })
        .collect())
}

/// Fits one frame; silent frames get the identity model.
pub fn fit_frame(frame: &[f64], order: usize) -> Result<LpcModel> {
    let r = autocorrelation(frame, order)?;
    if r[0] == 0.0 || order == 0 {
        return Ok(LpcModel::identity(r[0]));
    }
    levinson_durbin(&r, order)
}

/// Per-frame formants of `x`.
pub fn formant_track(x: &Signal, order: usize, spec: &FrameSpec) -> Result<Vec<Vec<Formant>>> {
    frame_signal(x, spec)?
        .iter()
        .map(|f| fit_frame(f, order).and_then(|m| formants_from_lpc(&m, x.sample_rate_hz)))
        .collect()
}

/// `frame_index,f1,b1,f2,b2,f3,b3`, with empty cells for missing formants.
pub fn formants_csv(track: &[Vec<Formant>]) -> String {
    let mut out = String::from("frame_index,f1,b1,f2,b2,f3,b3\n");
    for (i, frame) in track.iter().enumerate() {
        let _ = write!(out, "{i}");
        for j in 0..3 {
            match frame.get(j) {
                Some(f) => {
                    let _ = write!(out, ",{},{}", f.frequency_hz, f.bandwidth_hz);
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSynthesis {
    pub reconstructed: Signal,
    pub residual: Signal,
    pub models: Vec<LpcModel>,
}

/// Non-overlapping frame-wise LPC. The residual `e = A(z)x` and the
/// resynthesis `1/A(z)` both run with history carried across frame
/// boundaries; samples after the last full frame reuse the last model.
pub fn lpc_analysis_synthesis(x: &Signal, order: usize, spec: &FrameSpec) -> Result<AnalysisSynthesis> {
    if spec.hop != spec.frame_len {
        return Err(DspError::InvalidSpec("analysis-synthesis requires hop == frame_len".into()));
    }
    let frames = frame_signal(x, spec)?;
    let models = frames.iter().map(|f| fit_frame(f, order)).collect::<Result<Vec<_>>>()?;
    let n = x.len();
    let mut residual = vec![0.0; n];
    let mut y = vec![0.0; n];
    for t in 0..n {
        let model = &models[(t / spec.frame_len).min(models.len() - 1)];
        let mut e = x.samples[t];
        for (j, aj) in model.a.iter().enumerate().skip(1).take(t) {
            e += aj * x.samples[t - j];
        }
        residual[t] = e;
        let mut v = e;
        for (j, aj) in model.a.iter().enumerate().skip(1).take(t) {
            v -= aj * y[t - j];
        }
        y[t] = v;
    }
    let fs = x.sample_rate_hz;
    Ok(AnalysisSynthesis {
        reconstructed: Signal { samples: y, sample_rate_hz: fs },
        residual: Signal { samples: residual, sample_rate_hz: fs },
        models,
    })
}

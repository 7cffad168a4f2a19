use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::value::ValueKind;
use crate::signal::{WaveformKind, DTMF_DIGITS};
use crate::spectral::WindowKind;

/// Largest series any block may produce or request.
pub const MAX_SERIES_LEN: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    Int,
    Real,
    String,
    Enum,
    RealArray,
    Bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
    RealArray(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub default: ParamValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enum_values: Option<Vec<String>>,
}

impl ParamSpec {
    fn in_bounds(&self, v: f64) -> bool {
        v.is_finite() && self.min.is_none_or(|m| v >= m) && self.max.is_none_or(|m| v <= m)
    }

    fn bounds_text(&self) -> String {
        match (self.min, self.max) {
            (Some(a), Some(b)) => format!("[{a}, {b}]"),
            (Some(a), None) => format!(">= {a}"),
            (None, Some(b)) => format!("<= {b}"),
            (None, None) => "finite".into(),
        }
    }

    /// Converts a JSON parameter to a typed value and checks its bounds.
    pub fn resolve(&self, raw: &serde_json::Value) -> Result<ParamValue, String> {
        use serde_json::Value as J;
        let value = match (self.kind, raw) {
            (ParamKind::Bool, J::Bool(b)) => ParamValue::Bool(*b),
            (ParamKind::Int, J::Number(n)) => match n.as_i64() {
                Some(i) => ParamValue::Int(i),
                None => match n.as_f64() {
                    Some(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => ParamValue::Int(f as i64),
                    _ => return Err(format!("expected an integer, got {n}")),
                },
            },
            (ParamKind::Real, J::Number(n)) => ParamValue::Real(n.as_f64().unwrap_or(f64::NAN)),
            (ParamKind::String | ParamKind::Enum, J::String(s)) => ParamValue::Text(s.clone()),
            (ParamKind::RealArray, J::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item.as_f64() {
                        Some(v) => out.push(v),
                        None => return Err(format!("array element {item} is not a number")),
                    }
                }
                ParamValue::RealArray(out)
            }
            (kind, other) => return Err(format!("expected {kind:?}, got {other}").to_lowercase()),
        };
        self.check(&value)?;
        Ok(value)
    }

    pub fn check(&self, value: &ParamValue) -> Result<(), String> {
        match (self.kind, value) {
            (ParamKind::Bool, ParamValue::Bool(_)) | (ParamKind::String, ParamValue::Text(_)) => Ok(()),
            (ParamKind::Int, ParamValue::Int(i)) => {
                if self.in_bounds(*i as f64) {
                    Ok(())
                } else {
                    Err(format!("{i} outside {}", self.bounds_text()))
                }
            }
            (ParamKind::Real, ParamValue::Real(v)) => {
                if self.in_bounds(*v) {
                    Ok(())
                } else {
                    Err(format!("{v} outside {}", self.bounds_text()))
                }
            }
            (ParamKind::Enum, ParamValue::Text(s)) => {
                let allowed = self.enum_values.as_deref().unwrap_or(&[]);
                if allowed.iter().any(|a| a == s) {
                    Ok(())
                } else {
                    Err(format!("{s:?} not one of {}", allowed.join("|")))
                }
            }
            (ParamKind::RealArray, ParamValue::RealArray(v)) => {
                if v.len() > MAX_SERIES_LEN {
                    return Err(format!("array of {} elements exceeds {MAX_SERIES_LEN}", v.len()));
                }
                match v.iter().find(|x| !self.in_bounds(**x)) {
                    Some(bad) => Err(format!("element {bad} outside {}", self.bounds_text())),
                    None => Ok(()),
                }
            }
            _ => Err(format!("value {value:?} does not match kind {:?}", self.kind)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortSpec {
    pub name: String,
    pub kind: ValueKind,
    #[serde(default)]
    pub optional: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDescriptor {
    pub type_name: String,
    pub description: String,
    pub params: Vec<ParamSpec>,
    pub inputs: Vec<PortSpec>,
    pub outputs: Vec<PortSpec>,
    /// Draws from the per-block random stream.
    pub stochastic: bool,
}

impl BlockDescriptor {
    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn input(&self, name: &str) -> Option<&PortSpec> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&PortSpec> {
        self.outputs.iter().find(|p| p.name == name)
    }
}

fn p(name: &str, kind: ParamKind, default: ParamValue, min: Option<f64>, max: Option<f64>) -> ParamSpec {
    ParamSpec { name: name.into(), kind, default, min, max, enum_values: None }
}

fn int(name: &str, default: i64, min: i64, max: i64) -> ParamSpec {
    p(name, ParamKind::Int, ParamValue::Int(default), Some(min as f64), Some(max as f64))
}

fn real(name: &str, default: f64, min: f64, max: f64) -> ParamSpec {
    p(name, ParamKind::Real, ParamValue::Real(default), Some(min), Some(max))
}

fn boolean(name: &str, default: bool) -> ParamSpec {
    p(name, ParamKind::Bool, ParamValue::Bool(default), None, None)
}

fn array(name: &str, default: &[f64]) -> ParamSpec {
    p(name, ParamKind::RealArray, ParamValue::RealArray(default.to_vec()), None, None)
}

fn choice(name: &str, default: &str, values: &[&str]) -> ParamSpec {
    ParamSpec {
        name: name.into(),
        kind: ParamKind::Enum,
        default: ParamValue::Text(default.into()),
        min: None,
        max: None,
        enum_values: Some(values.iter().map(|s| s.to_string()).collect()),
    }
}

fn port(name: &str, kind: ValueKind) -> PortSpec {
    PortSpec { name: name.into(), kind, optional: false }
}

fn optional(name: &str, kind: ValueKind) -> PortSpec {
    PortSpec { name: name.into(), kind, optional: true }
}

fn block(
    type_name: &str,
    description: &str,
    params: Vec<ParamSpec>,
    inputs: Vec<PortSpec>,
    outputs: Vec<PortSpec>,
) -> BlockDescriptor {
    BlockDescriptor {
        type_name: type_name.into(),
        description: description.into(),
        params,
        inputs,
        outputs,
        stochastic: false,
    }
}

fn stochastic(mut d: BlockDescriptor) -> BlockDescriptor {
    d.stochastic = true;
    d
}

const MAX_LEN: i64 = MAX_SERIES_LEN as i64;

fn window_names() -> Vec<&'static str> {
    WindowKind::ALL.iter().map(|w| w.name()).collect()
}

fn sample_rate() -> ParamSpec {
    real("sample_rate_hz", 8000.0, 1.0, 1.0e6)
}

/// Every block type, sorted by `type_name`.
pub fn block_catalog() -> Vec<BlockDescriptor> {
    use ValueKind as K;
    let waveforms: Vec<&str> = WaveformKind::ALL.iter().map(|w| w.name()).collect();
    let digits: Vec<String> = DTMF_DIGITS.iter().map(|c| c.to_string()).collect();
    let digit_refs: Vec<&str> = digits.iter().map(String::as_str).collect();
    let haar = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let windows = window_names();

    let mut all = vec![
        block(
            "Autocorrelation",
            "Unnormalized autocorrelation r[m] for lags 0..=max_lag",
            vec![int("max_lag", 20, 0, MAX_LEN)],
            vec![port("in", K::Signal)],
            vec![port("r", K::Series)],
        ),
        stochastic(block(
            "AwgnChannel",
            "Adds white Gaussian noise at the given SNR",
            vec![real("snr_db", 20.0, -100.0, 300.0)],
            vec![port("in", K::Signal)],
            vec![port("out", K::Signal)],
        )),
        block(
            "Downsampler",
            "Keeps every factor-th sample, optionally after a Kaiser anti-aliasing filter",
            vec![int("factor", 2, 1, 64), boolean("antialias", false)],
            vec![port("in", K::Signal)],
            vec![port("out", K::Signal)],
        ),
        block(
            "FeatureMerge",
            "Stacks the rows of two labeled feature matrices",
            vec![],
            vec![port("a", K::FeatureMatrix), optional("b", K::FeatureMatrix)],
            vec![port("out", K::FeatureMatrix)],
        ),
        block(
            "Fft",
            "Radix-2 DFT; nfft = 0 pads to the next power of two",
            vec![int("nfft", 0, 0, MAX_LEN)],
            vec![port("in", K::Signal)],
            vec![port("out", K::Spectrum)],
        ),
        block(
            "FilterDesigner",
            "FIR (kaiser, equiripple, sampling) or IIR (butterworth, cheby1, cheby2, elliptic) design",
            vec![
                choice(
                    "method",
                    "kaiser",
                    &["kaiser", "equiripple", "sampling", "butterworth", "cheby1", "cheby2", "elliptic"],
                ),
                choice("kind", "lowpass", &["lowpass", "highpass"]),
                real("passband_edge", 0.2 * PI, 1e-6, PI),
                real("stopband_edge", 0.3 * PI, 1e-6, PI),
                real("stopband_atten_db", 60.0, 0.0, 300.0),
                real("passband_ripple_db", 1.0, 1e-4, 40.0),
                int("numtaps", 31, 3, 1025),
                int("order", 4, 1, 64),
                real("cutoff", 0.5 * PI, 1e-6, PI),
                array("desired_mag", &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ],
            vec![],
            vec![port("tf", K::TransferFunction)],
        ),
        block(
            "FirIirFilter",
            "Direct-form II transposed filtering by the wired transfer function, or by b/a",
            vec![array("b", &[1.0]), array("a", &[1.0]), boolean("halt_on_unstable", false)],
            vec![port("in", K::Signal), optional("tf", K::TransferFunction)],
            vec![port("out", K::Signal)],
        ),
        block(
            "FrequencyResponse",
            "H(e^jw) on n_points frequencies over [0, pi]",
            vec![int("n_points", 512, 2, 1 << 16)],
            vec![port("tf", K::TransferFunction)],
            vec![port("response", K::FrequencyResponse)],
        ),
        block(
            "Ifft",
            "Inverse transform of a spectrum, real part",
            vec![],
            vec![port("in", K::Spectrum)],
            vec![port("out", K::Signal)],
        ),
        block(
            "ImpulseResponse",
            "First length samples of the impulse response",
            vec![int("length", 64, 1, MAX_LEN), sample_rate()],
            vec![port("tf", K::TransferFunction)],
            vec![port("out", K::Signal)],
        ),
        block(
            "Iqft",
            "Inverse quantum Fourier transform circuit, real part rescaled to signal units",
            vec![],
            vec![port("in", K::Spectrum)],
            vec![port("out", K::Signal)],
        ),
        stochastic(block(
            "KMeans",
            "k-means++ seeded Lloyd clustering",
            vec![int("k", 2, 1, 64), int("max_iter", 300, 0, 100_000), real("tol", 1e-6, 0.0, 1.0)],
            vec![port("features", K::FeatureMatrix)],
            vec![
                port("assignments", K::LabelVector),
                port("centroids", K::FeatureMatrix),
                port("inertia", K::Scalar),
            ],
        )),
        block(
            "LpcAnalyzer",
            "Frame-wise linear prediction: residual, resynthesis, formants and envelope",
            vec![
                int("order", 10, 1, 30),
                int("frame_len", 256, 64, 1024),
                choice("window", "hamming", &windows),
                boolean("use_f3", false),
                int("label", 0, 0, 1000),
            ],
            vec![port("in", K::Signal)],
            vec![
                port("envelope", K::Series),
                port("formants", K::FeatureMatrix),
                port("model", K::TransferFunction),
                port("reconstructed", K::Signal),
                port("residual", K::Signal),
            ],
        ),
        block(
            "PeakPicker",
            "Keeps the strongest conjugate bin pairs of a spectrum",
            vec![int("count", 4, 1, MAX_LEN)],
            vec![port("in", K::Spectrum)],
            vec![port("out", K::Spectrum)],
        ),
        block(
            "Periodogram",
            "Windowed periodogram for bins 0..=nfft/2",
            vec![choice("window", "rectangular", &windows), real("beta", 0.0, 0.0, 50.0), int("nfft", 0, 0, MAX_LEN)],
            vec![port("in", K::Signal)],
            vec![port("psd", K::Series)],
        ),
        stochastic(block(
            "PhonemeClassifier",
            "70/30 split, k-means on the training rows, confusion matrix on the test rows",
            vec![int("k", 2, 1, 64)],
            vec![port("features", K::FeatureMatrix)],
            vec![port("accuracy", K::Scalar), port("confusion", K::ConfusionMatrix)],
        )),
        block(
            "PoleZero",
            "Roots of the numerator and denominator",
            vec![],
            vec![port("tf", K::TransferFunction)],
            vec![port("pz", K::PoleZero)],
        ),
        block(
            "QmfAnalysis",
            "Two-band analysis with h1[n] = (-1)^n h0[n]",
            vec![array("h0", &haar)],
            vec![port("in", K::Signal)],
            vec![port("high", K::Signal), port("low", K::Signal)],
        ),
        block(
            "QmfSynthesis",
            "Two-band synthesis with f0 = h0, f1 = -h1",
            vec![array("h0", &haar)],
            vec![port("high", K::Signal), port("low", K::Signal)],
            vec![port("out", K::Signal)],
        ),
        stochastic(block(
            "Qft",
            "Amplitude encoding followed by the QFT circuit; n_qubits = 0 picks the smallest fit",
            vec![int("n_qubits", 0, 0, 14), real("depolarizing_p", 0.0, 0.0, 1.0), int("shots", 0, 0, 100_000_000)],
            vec![port("in", K::Signal)],
            vec![port("out", K::Spectrum)],
        )),
        stochastic(block(
            "QftCodec",
            "QFT analysis, conjugate-pair peak retention, IQFT synthesis and SNR",
            vec![
                int("n_qubits", 0, 0, 14),
                int("peaks", 4, 1, 1 << 14),
                real("depolarizing_p", 0.0, 0.0, 1.0),
                int("shots", 0, 0, 100_000_000),
            ],
            vec![port("in", K::Signal)],
            vec![
                port("reconstructed", K::Signal),
                port("report", K::CodecReport),
                port("snr", K::Scalar),
                port("spectrum", K::Spectrum),
            ],
        )),
        block(
            "SampleSource",
            "Literal samples",
            vec![array("samples", &[1.0]), sample_rate()],
            vec![],
            vec![port("out", K::Signal)],
        ),
        stochastic(block(
            "SignalGenerator",
            "Sine, square, triangle, impulse, step, white noise or DTMF tone",
            vec![
                choice("kind", "sine", &waveforms),
                real("freq_hz", 1000.0, 0.0, 1.0e6),
                real("amplitude", 1.0, 0.0, 1.0e6),
                int("length", 256, 1, MAX_LEN),
                sample_rate(),
                real("phase_rad", 0.0, -1.0e3, 1.0e3),
                choice("dtmf_digit", "1", &digit_refs),
            ],
            vec![],
            vec![port("out", K::Signal)],
        )),
        block(
            "SnrMeter",
            "10 log10 of reference energy over error energy",
            vec![],
            vec![port("estimate", K::Signal), port("reference", K::Signal)],
            vec![port("snr", K::Scalar)],
        ),
        block(
            "Upsampler",
            "Inserts factor-1 zeros between samples, optionally followed by a Kaiser interpolation filter",
            vec![int("factor", 2, 1, 64), boolean("antialias", false)],
            vec![port("in", K::Signal)],
            vec![port("out", K::Signal)],
        ),
        block(
            "Window",
            "Multiplies by a symmetric window",
            vec![choice("window", "hamming", &windows), real("beta", 0.0, 0.0, 50.0)],
            vec![port("in", K::Signal)],
            vec![port("out", K::Signal)],
        ),
    ];
    all.sort_by(|a, b| a.type_name.cmp(&b.type_name));
    all
}

pub fn find_block(type_name: &str) -> Option<BlockDescriptor> {
    block_catalog().into_iter().find(|b| b.type_name == type_name)
}

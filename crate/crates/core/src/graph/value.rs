use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::filter::{FrequencyResponse, PoleZeroSet, TransferFunction};
use crate::ml::{ConfusionMatrix, FeatureMatrix};
use crate::quantum::{snr_serde, CodecReport};
use crate::signal::{export_series_csv, Signal};
use crate::spectral::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Signal,
    Spectrum,
    TransferFunction,
    FeatureMatrix,
    Scalar,
    LabelVector,
    Series,
    FrequencyResponse,
    PoleZero,
    ConfusionMatrix,
    CodecReport,
}

impl ValueKind {
    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Signal => "signal",
            ValueKind::Spectrum => "spectrum",
            ValueKind::TransferFunction => "transfer_function",
            ValueKind::FeatureMatrix => "feature_matrix",
            ValueKind::Scalar => "scalar",
            ValueKind::LabelVector => "label_vector",
            ValueKind::Series => "series",
            ValueKind::FrequencyResponse => "frequency_response",
            ValueKind::PoleZero => "pole_zero",
            ValueKind::ConfusionMatrix => "confusion_matrix",
            ValueKind::CodecReport => "codec_report",
        }
    }
}

/// A real-valued curve for plotting (periodograms, envelopes, correlations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelVector {
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    #[serde(with = "snr_serde")]
    pub value: f64,
}

/// A value travelling along a wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Value {
    Signal(Signal),
    Spectrum(Spectrum),
    TransferFunction(TransferFunction),
    FeatureMatrix(FeatureMatrix),
    Scalar(Scalar),
    LabelVector(LabelVector),
    Series(Series),
    FrequencyResponse(FrequencyResponse),
    PoleZero(PoleZeroSet),
    ConfusionMatrix(ConfusionMatrix),
    CodecReport(CodecReport),
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Signal(_) => ValueKind::Signal,
            Value::Spectrum(_) => ValueKind::Spectrum,
            Value::TransferFunction(_) => ValueKind::TransferFunction,
            Value::FeatureMatrix(_) => ValueKind::FeatureMatrix,
            Value::Scalar(_) => ValueKind::Scalar,
            Value::LabelVector(_) => ValueKind::LabelVector,
            Value::Series(_) => ValueKind::Series,
            Value::FrequencyResponse(_) => ValueKind::FrequencyResponse,
            Value::PoleZero(_) => ValueKind::PoleZero,
            Value::ConfusionMatrix(_) => ValueKind::ConfusionMatrix,
            Value::CodecReport(_) => ValueKind::CodecReport,
        }
    }

    pub fn scalar(value: f64) -> Value {
        Value::Scalar(Scalar { value })
    }

    /// Longest series carried, used for the response size guard.
    pub fn series_len(&self) -> usize {
        match self {
            Value::Signal(s) => s.len(),
            Value::Spectrum(s) => s.len(),
            Value::TransferFunction(tf) => tf.b.len().max(tf.a.len()),
            Value::FeatureMatrix(m) => m.data.len(),
            Value::Scalar(_) => 1,
            Value::LabelVector(l) => l.labels.len(),
            Value::Series(s) => s.x.len(),
            Value::FrequencyResponse(r) => r.h.len(),
            Value::PoleZero(pz) => pz.zeros.len().max(pz.poles.len()),
            Value::ConfusionMatrix(c) => c.counts.len() * c.counts.len(),
            Value::CodecReport(r) => r.retained_bins.len(),
        }
    }

    /// False when any sample is NaN or infinite (scalars may be `+∞`).
    pub fn is_finite(&self) -> bool {
        let all = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Value::Signal(s) => all(&s.samples),
            Value::Spectrum(s) => s.bins.iter().all(|b| b.is_finite()),
            Value::TransferFunction(tf) => all(&tf.b) && all(&tf.a),
            Value::FeatureMatrix(m) => all(&m.data),
            Value::Scalar(s) => !s.value.is_nan(),
            Value::LabelVector(_) | Value::ConfusionMatrix(_) => true,
            Value::Series(s) => all(&s.x) && all(&s.y),
            Value::FrequencyResponse(r) => r.h.iter().all(|h| h.is_finite()),
            Value::PoleZero(pz) => pz.zeros.iter().chain(&pz.poles).all(|z| z.is_finite()),
            Value::CodecReport(r) => !r.snr_db.is_nan(),
        }
    }

    /// File extension used when the value is written to disk.
    pub fn extension(&self) -> &'static str {
        match self {
            Value::TransferFunction(_) | Value::Scalar(_) | Value::CodecReport(_) => "json",
            _ => "csv",
        }
    }

    /// Text rendering for file output: CSV for tabular values, JSON otherwise.
    pub fn render(&self) -> String {
        match self {
            Value::Signal(s) => {
                let t: Vec<f64> = (0..s.len()).map(|n| n as f64 / s.sample_rate_hz).collect();
                export_series_csv(&t, &[("value", &s.samples)]).expect("equal lengths")
            }
            Value::Spectrum(s) => s.to_csv(),
            Value::Series(s) => {
                let mut out = format!("{},{}\n", s.x_label, s.y_label);
                for (x, y) in s.x.iter().zip(&s.y) {
                    let _ = writeln!(out, "{x},{y}");
                }
                out
            }
            Value::FrequencyResponse(r) => {
                let mut out = String::from("omega,mag,mag_db,phase\n");
                for ((w, m), (db, ph)) in r.omega.iter().zip(r.magnitude()).zip(r.magnitude_db().into_iter().zip(r.phase())) {
                    let _ = writeln!(out, "{w},{m},{db},{ph}");
                }
                out
            }
            Value::PoleZero(pz) => pz.to_csv(),
            Value::FeatureMatrix(m) => {
                let mut out = String::new();
                if m.labels.is_some() {
                    out.push_str("label,");
                }
                out.push_str(&m.column_names.join(","));
                out.push('\n');
                for i in 0..m.n_points {
                    let mut cells: Vec<String> = Vec::new();
                    if let Some(l) = &m.labels {
                        cells.push(m.class_names.get(l[i]).cloned().unwrap_or_else(|| l[i].to_string()));
                    }
                    cells.extend(m.row(i).iter().map(|v| v.to_string()));
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Value::LabelVector(l) => {
                let mut out = String::from("index,label\n");
                for (i, v) in l.labels.iter().enumerate() {
                    let _ = writeln!(out, "{i},{v}");
                }
                out
            }
            Value::ConfusionMatrix(c) => c.to_csv(),
            Value::TransferFunction(_) | Value::Scalar(_) | Value::CodecReport(_) => {
                let mut s = serde_json::to_string_pretty(self).expect("value serializes");
                s.push('\n');
                s
            }
        }
    }
}

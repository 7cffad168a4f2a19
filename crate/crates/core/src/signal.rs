//! Signal generation, 16-bit PCM WAV I/O and CSV export of plot series.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::rng;

/// Sampled time-domain data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(DspError::InvalidSpec(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(DspError::InvalidSpec(format!("non-finite sample at index {i}")));
        }
        Ok(Signal { samples, sample_rate_hz })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformKind {
    Sine,
    Square,
    Triangle,
    Impulse,
    Step,
    WhiteNoise,
    Dtmf,
}

impl WaveformKind {
    pub const ALL: [WaveformKind; 7] = [
        WaveformKind::Sine,
        WaveformKind::Square,
        WaveformKind::Triangle,
        WaveformKind::Impulse,
        WaveformKind::Step,
        WaveformKind::WhiteNoise,
        WaveformKind::Dtmf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WaveformKind::Sine => "sine",
            WaveformKind::Square => "square",
            WaveformKind::Triangle => "triangle",
            WaveformKind::Impulse => "impulse",
            WaveformKind::Step => "step",
            WaveformKind::WhiteNoise => "white_noise",
            WaveformKind::Dtmf => "dtmf",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn is_periodic(self) -> bool {
        matches!(self, WaveformKind::Sine | WaveformKind::Square | WaveformKind::Triangle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: WaveformKind,
    pub freq_hz: f64,
    pub amplitude: f64,
    pub length: usize,
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub phase_rad: f64,
    #[serde(default = "default_digit")]
    pub dtmf_digit: char,
    #[serde(default)]
    pub seed: u64,
}

fn default_digit() -> char {
    '1'
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            kind: WaveformKind::Sine,
            freq_hz: 1000.0,
            amplitude: 1.0,
            length: 256,
            sample_rate_hz: 8000.0,
            phase_rad: 0.0,
            dtmf_digit: '1',
            seed: 0,
        }
    }
}

pub const DTMF_ROWS_HZ: [f64; 4] = [697.0, 770.0, 852.0, 941.0];
pub const DTMF_COLS_HZ: [f64; 4] = [1209.0, 1336.0, 1477.0, 1633.0];
pub const DTMF_DIGITS: [char; 16] = [
    '1', '2', '3', 'A', '4', '5', '6', 'B', '7', '8', '9', 'C', '*', '0', '#', 'D',
];

/// Row and column tone frequencies of a keypad digit.
pub fn dtmf_tones(digit: char) -> Option<(f64, f64)> {
    let idx = DTMF_DIGITS.iter().position(|&d| d == digit.to_ascii_uppercase())?;
    Some((DTMF_ROWS_HZ[idx / 4], DTMF_COLS_HZ[idx % 4]))
}

pub fn generate_signal(spec: &GeneratorSpec) -> Result<Signal> {
    let fs = spec.sample_rate_hz;
    if !(fs.is_finite() && fs > 0.0) {
        return Err(DspError::InvalidSpec(format!("sample rate must be positive, got {fs}")));
    }
    if spec.length == 0 {
        return Err(DspError::InvalidSpec("length must be at least 1".into()));
    }
    if !spec.amplitude.is_finite() || !spec.phase_rad.is_finite() {
        return Err(DspError::InvalidSpec("amplitude and phase must be finite".into()));
    }
    let nyquist = fs / 2.0;
    if spec.kind.is_periodic() && !(spec.freq_hz > 0.0 && spec.freq_hz < nyquist) {
        return Err(DspError::InvalidSpec(format!(
            "frequency {} Hz outside (0, {nyquist}) Hz",
            spec.freq_hz
        )));
    }
    let amp = spec.amplitude;
    let n = spec.length;
    let cycle = |i: usize| -> f64 {
        let c = spec.freq_hz * i as f64 / fs + spec.phase_rad / (2.0 * PI);
        c - c.floor()
    };
    let samples: Vec<f64> = match spec.kind {
        WaveformKind::Sine => (0..n)
            .map(|i| amp * (2.0 * PI * spec.freq_hz * i as f64 / fs + spec.phase_rad).sin())
            .collect(),
        WaveformKind::Square => {
            (0..n).map(|i| if cycle(i) < 0.5 { amp } else { -amp }).collect()
        }
        WaveformKind::Triangle => (0..n)
            .map(|i| {
                let c = cycle(i);
                let v = if c < 0.25 {
                    4.0 * c
                } else if c < 0.75 {
                    2.0 - 4.0 * c
                } else {
                    4.0 * c - 4.0
                };
                amp * v
            })
            .collect(),
        WaveformKind::Impulse => {
            let mut v = vec![0.0; n];
            v[0] = amp;
            v
        }
        WaveformKind::Step => vec![amp; n],
        WaveformKind::WhiteNoise => {
            let mut g = rng::seeded(spec.seed);
            (0..n).map(|_| amp * g.random_range(-1.0..=1.0)).collect()
        }
        WaveformKind::Dtmf => {
            let (row, col) = dtmf_tones(spec.dtmf_digit).ok_or_else(|| {
                DspError::InvalidSpec(format!("unknown DTMF digit {:?}", spec.dtmf_digit))
            })?;
            if col >= nyquist {
                return Err(DspError::InvalidSpec(format!(
                    "DTMF tone {col} Hz above Nyquist {nyquist} Hz"
                )));
            }
            (0..n)
                .map(|i| {
                    let t = i as f64 / fs;
                    0.5 * amp
                        * ((2.0 * PI * row * t + spec.phase_rad).sin()
                            + (2.0 * PI * col * t + spec.phase_rad).sin())
                })
                .collect()
        }
    };
    Signal::new(samples, fs)
}

fn read_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Parses a RIFF/WAVE file holding mono 16-bit PCM.
pub fn read_wav(bytes: &[u8]) -> Result<Signal> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(DspError::CorruptHeader("missing RIFF/WAVE signature".into()));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| DspError::CorruptHeader(format!("chunk {:?} overruns file", String::from_utf8_lossy(id))))?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(DspError::CorruptHeader("fmt chunk too short".into()));
                }
                fmt = Some((
                    read_u16(body, 0),
                    read_u16(body, 2),
                    read_u32(body, 4),
                    read_u16(body, 14),
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        pos = body_end + (size & 1);
    }
    let (format, channels, rate, bits) =
        fmt.ok_or_else(|| DspError::CorruptHeader("missing fmt chunk".into()))?;
    if format != 1 {
        return Err(DspError::UnsupportedFormat(format!("audio format tag {format} (PCM only)")));
    }
    if channels != 1 {
        return Err(DspError::UnsupportedFormat(format!("{channels} channels (mono only)")));
    }
    if bits != 16 {
        return Err(DspError::UnsupportedFormat(format!("{bits}-bit samples (16-bit only)")));
    }
    if rate == 0 {
        return Err(DspError::CorruptHeader("zero sample rate".into()));
    }
    let data = data.ok_or_else(|| DspError::CorruptHeader("missing data chunk".into()))?;
    if data.len() % 2 != 0 {
        return Err(DspError::CorruptHeader("odd data chunk length".into()));
    }
    let samples = data
        .chunks_exact(2)
        .map(|c| f64::from(i16::from_le_bytes([c[0], c[1]])) / 32768.0)
        .collect();
    Signal::new(samples, f64::from(rate))
}

/// Encodes a signal as mono 16-bit PCM (round half away from zero, clamp to ±32767).
pub fn write_wav(signal: &Signal) -> Result<Vec<u8>> {
    if let Some((index, &value)) =
        signal.samples.iter().enumerate().find(|(_, v)| v.abs() > 1.0 + 1e-9)
    {
        return Err(DspError::OutOfRange { index, value });
    }
    let rate = signal.sample_rate_hz.round();
    if !(rate >= 1.0 && rate <= f64::from(u32::MAX)) {
        return Err(DspError::InvalidSpec(format!("sample rate {rate} not representable")));
    }
    let rate = rate as u32;
    let data_len = signal.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &signal.samples {
        // f64::round rounds half away from zero
        let word = (s * 32768.0).round().clamp(-32767.0, 32767.0) as i16;
        out.extend_from_slice(&word.to_le_bytes());
    }
    Ok(out)
}

/// Renders `x` and labelled columns as CSV: header `x,label1,...`, one row per index.
///
/// Values use Rust's shortest round-trip formatting, which keeps every
/// significant digit of the `f64`.
pub fn export_series_csv(x: &[f64], columns: &[(&str, &[f64])]) -> Result<String> {
    for (_, col) in columns {
        if col.len() != x.len() {
            return Err(DspError::LengthMismatch { expected: x.len(), actual: col.len() });
        }
    }
    let mut out = String::from("x");
    for (label, _) in columns {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, xv) in x.iter().enumerate() {
        let _ = write!(out, "{xv}");
        for (_, col) in columns {
            let _ = write!(out, ",{}", col[i]);
        }
        out.push('\n');
    }
    Ok(out)
}

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::catalog::ParamValue;
use super::value::{LabelVector, Series, Value};
use super::ResolvedParams;
use crate::design::{
    design_fir_equiripple, design_fir_freq_sampling, design_fir_kaiser, design_iir, EquirippleSpec, FirKind,
    FirSpec, IirFamily, IirSpec,
};
use crate::error::{DspError, Result};
use crate::filter::{filter_signal, frequency_response, impulse_response, is_stable, TransferFunction};
use crate::lpc::{autocorrelation, fit_frame, formant_track, lpc_analysis_synthesis, lpc_envelope, FrameSpec};
use crate::ml::{add_noise, classify_features, kmeans, FeatureMatrix};
use crate::quantum::{
    amplitude_encode, apply_circuit, build_qft_circuit, inverse_circuit, noisy_spectrum_estimate, qft_codec,
    qubits_for, select_conjugate_peaks, snr_db, CodecConfig, NoiseModel, StateVector,
};
use crate::signal::{generate_signal, GeneratorSpec, Signal, WaveformKind};
use crate::spectral::{
    decimate, downsample, fft, interpolate, make_window, periodogram, qmf_analysis, qmf_synthesis, upsample,
    QmfBank, Spectrum, SpectrumNormalization, WindowKind, WindowSpec,
};

struct Params<'a>(&'a ResolvedParams);

impl Params<'_> {
    fn get(&self, name: &str) -> Result<&ParamValue> {
        self.0.get(name).ok_or_else(|| DspError::InvalidSpec(format!("missing parameter {name}")))
    }

    fn int(&self, name: &str) -> Result<i64> {
        match self.get(name)? {
            ParamValue::Int(v) => Ok(*v),
            other => Err(DspError::InvalidSpec(format!("{name}: expected int, got {other:?}"))),
        }
    }

    fn usize(&self, name: &str) -> Result<usize> {
        usize::try_from(self.int(name)?).map_err(|_| DspError::InvalidSpec(format!("{name} must be >= 0")))
    }

    fn real(&self, name: &str) -> Result<f64> {
        match self.get(name)? {
            ParamValue::Real(v) => Ok(*v),
            ParamValue::Int(v) => Ok(*v as f64),
            other => Err(DspError::InvalidSpec(format!("{name}: expected real, got {other:?}"))),
        }
    }

    fn text(&self, name: &str) -> Result<&str> {
        match self.get(name)? {
            ParamValue::Text(v) => Ok(v),
            other => Err(DspError::InvalidSpec(format!("{name}: expected string, got {other:?}"))),
        }
    }

    fn flag(&self, name: &str) -> Result<bool> {
        match self.get(name)? {
            ParamValue::Bool(v) => Ok(*v),
            other => Err(DspError::InvalidSpec(format!("{name}: expected bool, got {other:?}"))),
        }
    }

    fn array(&self, name: &str) -> Result<&[f64]> {
        match self.get(name)? {
            ParamValue::RealArray(v) => Ok(v),
            other => Err(DspError::InvalidSpec(format!("{name}: expected array, got {other:?}"))),
        }
    }

    fn window(&self, name: &str) -> Result<WindowKind> {
        let w = self.text(name)?;
        WindowKind::from_name(w).ok_or_else(|| DspError::InvalidSpec(format!("unknown window {w:?}")))
    }
}

struct Inputs<'a>(&'a BTreeMap<String, Value>);

impl Inputs<'_> {
    fn signal(&self, port: &str) -> Result<&Signal> {
        match self.0.get(port) {
            Some(Value::Signal(s)) => Ok(s),
            _ => Err(DspError::InvalidSpec(format!("input {port} must be a signal"))),
        }
    }

    fn spectrum(&self, port: &str) -> Result<&Spectrum> {
        match self.0.get(port) {
            Some(Value::Spectrum(s)) => Ok(s),
            _ => Err(DspError::InvalidSpec(format!("input {port} must be a spectrum"))),
        }
    }

    fn tf(&self, port: &str) -> Result<Option<&TransferFunction>> {
        match self.0.get(port) {
            Some(Value::TransferFunction(t)) => Ok(Some(t)),
            None => Ok(None),
            _ => Err(DspError::InvalidSpec(format!("input {port} must be a transfer function"))),
        }
    }

    fn features(&self, port: &str) -> Result<Option<&FeatureMatrix>> {
        match self.0.get(port) {
            Some(Value::FeatureMatrix(m)) => Ok(Some(m)),
            None => Ok(None),
            _ => Err(DspError::InvalidSpec(format!("input {port} must be a feature matrix"))),
        }
    }
}

fn outputs(pairs: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn one(port: &str, v: Value) -> Result<BTreeMap<String, Value>> {
    Ok(outputs(vec![(port, v)]))
}

/// Inverse of a spectrum to a real signal. DFT spectra use the inverse FFT;
/// QFT spectra run the inverse circuit and restore the stored scale.
fn spectrum_to_signal(s: &Spectrum, via_circuit: bool) -> Result<Signal> {
    let n = s.len();
    let (amps, norm, len) = match s.normalization {
        SpectrumNormalization::UnitaryQft { norm, original_len } => (s.bins.clone(), norm, original_len),
        SpectrumNormalization::UnnormalizedDft => {
            if !via_circuit {
                let x = fft(&s.bins, true)?;
                return Signal::new(x.iter().map(|c| c.re).collect(), s.sample_rate_hz);
            }
            // conj(X)/‖X‖ is the QFT of x/‖x‖, and ‖x‖ = ‖X‖/√N
            let total = s.bins.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
            if total == 0.0 {
                return Signal::new(vec![0.0; n], s.sample_rate_hz);
            }
            let amps = s.bins.iter().map(|b| b.conj() / total).collect();
            (amps, total / (n as f64).sqrt(), n)
        }
    };
    if n < 2 {
        return Err(DspError::InvalidLength("quantum spectra need at least 2 bins".into()));
    }
    let out: Vec<Complex64> = if via_circuit {
        let total = amps.iter().map(|a: &Complex64| a.norm_sqr()).sum::<f64>().sqrt();
        let unit: Vec<Complex64> = amps.iter().map(|a| a / total).collect();
        let state = StateVector { n_qubits: n.trailing_zeros() as usize, amplitudes: unit };
        let circuit = inverse_circuit(&build_qft_circuit(state.n_qubits)?);
        apply_circuit(&state, &circuit, None)?.amplitudes.iter().map(|a| a * total).collect()
    } else {
        // the IQFT is the unnormalized forward DFT scaled by 1/√N
        let scale = 1.0 / (n as f64).sqrt();
        fft(&amps, false)?.iter().map(|c| c * scale).collect()
    };
    Signal::new(out[..len.min(n)].iter().map(|a| a.re * norm).collect(), s.sample_rate_hz)
}

fn qubits_param(p: &Params, len: usize) -> Result<usize> {
    match p.usize("n_qubits")? {
        0 => qubits_for(len),
        n => Ok(n),
    }
}

fn design(p: &Params) -> Result<TransferFunction> {
    let kind = match p.text("kind")? {
        "highpass" => FirKind::Highpass,
        _ => FirKind::Lowpass,
    };
    let (wp, ws) = (p.real("passband_edge")?, p.real("stopband_edge")?);
    let method = p.text("method")?;
    match method {
        "kaiser" => design_fir_kaiser(&FirSpec {
            passband_edge: wp,
            stopband_edge: ws,
            stopband_atten_db: p.real("stopband_atten_db")?,
            kind,
        }),
        "equiripple" => {
            let spec = EquirippleSpec::two_band(p.usize("numtaps")?, kind, wp, ws);
            design_fir_equiripple(&spec).map(|r| r.tf)
        }
        "sampling" => design_fir_freq_sampling(p.array("desired_mag")?),
        family => {
            let family = IirFamily::from_name(family)
                .ok_or_else(|| DspError::InvalidSpec(format!("unknown design method {family:?}")))?;
            design_iir(&IirSpec {
                family,
                kind,
                order: p.usize("order")?,
                cutoff: p.real("cutoff")?,
                passband_ripple_db: Some(p.real("passband_ripple_db")?),
                stopband_atten_db: Some(p.real("stopband_atten_db")?),
            })
        }
    }
}

fn merge_features(a: &FeatureMatrix, b: Option<&FeatureMatrix>) -> Result<FeatureMatrix> {
    let Some(b) = b else { return Ok(a.clone()) };
    if a.n_points > 0 && b.n_points > 0 && a.dim != b.dim {
        return Err(DspError::DimensionMismatch { expected: a.dim, actual: b.dim });
    }
    let dim = if a.n_points > 0 { a.dim } else { b.dim };
    let mut labels = a.labels.clone().unwrap_or_else(|| vec![0; a.n_points]);
    labels.extend(b.labels.clone().unwrap_or_else(|| vec![0; b.n_points]));
    let mut names = if a.class_names.len() >= b.class_names.len() { a.class_names.clone() } else { b.class_names.clone() };
    let needed = labels.iter().max().map_or(0, |m| m + 1);
    while names.len() < needed {
        names.push(names.len().to_string());
    }
    Ok(FeatureMatrix {
        n_points: a.n_points + b.n_points,
        dim,
        data: [a.data.as_slice(), b.data.as_slice()].concat(),
        column_names: if a.n_points > 0 { a.column_names.clone() } else { b.column_names.clone() },
        labels: Some(labels),
        class_names: names,
    })
}

pub(super) fn run(
    type_name: &str,
    params: &ResolvedParams,
    inputs: &BTreeMap<String, Value>,
    seed: u64,
) -> Result<BTreeMap<String, Value>> {
    let p = Params(params);
    let i = Inputs(inputs);
    match type_name {
        "Autocorrelation" => {
            let x = i.signal("in")?;
            let r = autocorrelation(&x.samples, p.usize("max_lag")?)?;
            let lags = (0..r.len()).map(|m| m as f64).collect();
            one("r", Value::Series(Series { x_label: "lag".into(), y_label: "r".into(), x: lags, y: r }))
        }
        "AwgnChannel" => one("out", Value::Signal(add_noise(i.signal("in")?, p.real("snr_db")?, seed)?)),
        "Downsampler" => {
            let (x, m) = (i.signal("in")?, p.usize("factor")?);
            let y = if p.flag("antialias")? { decimate(x, m)? } else { downsample(x, m)? };
            one("out", Value::Signal(y))
        }
        "Upsampler" => {
            let (x, l) = (i.signal("in")?, p.usize("factor")?);
            let y = if p.flag("antialias")? { interpolate(x, l)? } else { upsample(x, l)? };
            one("out", Value::Signal(y))
        }
        "FeatureMerge" => {
            let a = i.features("a")?.ok_or(DspError::EmptyData)?;
            one("out", Value::FeatureMatrix(merge_features(a, i.features("b")?)?))
        }
        "Fft" => {
            let x = i.signal("in")?;
            let nfft = match p.usize("nfft")? {
                0 => None,
                n => Some(n),
            };
            one("out", Value::Spectrum(Spectrum::of_signal(x, nfft)?))
        }
        "Ifft" => one("out", Value::Signal(spectrum_to_signal(i.spectrum("in")?, false)?)),
        "Iqft" => one("out", Value::Signal(spectrum_to_signal(i.spectrum("in")?, true)?)),
        "FilterDesigner" => one("tf", Value::TransferFunction(design(&p)?)),
        "FirIirFilter" => {
            let x = i.signal("in")?;
            let tf = match i.tf("tf")? {
                Some(tf) => tf.clone(),
                None => TransferFunction::normalized(p.array("b")?.to_vec(), p.array("a")?.to_vec())?,
            };
            if p.flag("halt_on_unstable")? {
                let s = is_stable(&tf)?;
                if !s.stable {
                    return Err(DspError::UnstableFilter { max_pole_magnitude: s.max_pole_magnitude });
                }
            }
            one("out", Value::Signal(filter_signal(&tf, x)))
        }
        "FrequencyResponse" => {
            let tf = i.tf("tf")?.ok_or(DspError::EmptyInput)?;
            one("response", Value::FrequencyResponse(frequency_response(tf, p.usize("n_points")?)?))
        }
        "ImpulseResponse" => {
            let tf = i.tf("tf")?.ok_or(DspError::EmptyInput)?;
            let h = impulse_response(tf, p.usize("length")?)?;
            one("out", Value::Signal(Signal::new(h, p.real("sample_rate_hz")?)?))
        }
        "PoleZero" => {
            let tf = i.tf("tf")?.ok_or(DspError::EmptyInput)?;
            one("pz", Value::PoleZero(tf.pole_zero()?))
        }
        "KMeans" => {
            let data = i.features("features")?.ok_or(DspError::EmptyData)?;
            let model = kmeans(data, p.usize("k")?, seed, p.usize("max_iter")?, p.real("tol")?)?;
            let centroids = FeatureMatrix::from_rows(&model.centroids)?;
            let centroids = FeatureMatrix { column_names: data.column_names.clone(), ..centroids };
            Ok(outputs(vec![
                ("assignments", Value::LabelVector(LabelVector { labels: model.assignments.clone() })),
                ("centroids", Value::FeatureMatrix(centroids)),
                ("inertia", Value::scalar(model.inertia)),
            ]))
        }
        "PhonemeClassifier" => {
            let data = i.features("features")?.ok_or(DspError::EmptyData)?;
            let r = classify_features(data, p.usize("k")?, seed)?;
            Ok(outputs(vec![
                ("accuracy", Value::scalar(r.confusion.accuracy)),
                ("confusion", Value::ConfusionMatrix(r.confusion)),
            ]))
        }
        "LpcAnalyzer" => {
            let x = i.signal("in")?;
            let order = p.usize("order")?;
            let frame_len = p.usize("frame_len")?;
            let window = p.window("window")?;
            let frames = FrameSpec::new(frame_len, frame_len, window);
            let synth = lpc_analysis_synthesis(x, order, &FrameSpec::new(frame_len, frame_len, WindowKind::Rectangular))?;
            let want = if p.flag("use_f3")? { 3 } else { 2 };
            let rows: Vec<Vec<f64>> = formant_track(x, order, &frames)?
                .into_iter()
                .filter(|f| f.len() >= want)
                .map(|f| f[..want].iter().map(|v| v.frequency_hz).collect())
                .collect();
            let label = p.usize("label")?;
            let names: Vec<String> = (0..=label).map(|c| c.to_string()).collect();
            let mut formants = if rows.is_empty() {
                FeatureMatrix { n_points: 0, dim: want, data: vec![], column_names: vec![], labels: None, class_names: vec![] }
            } else {
                FeatureMatrix::from_rows(&rows)?
            };
            formants.column_names = ["f1", "f2", "f3"][..want].iter().map(|s| s.to_string()).collect();
            let formants = formants.with_labels(vec![label; rows.len()], names)?;
            let w = make_window(&WindowSpec::new(window, x.len()))?;
            let windowed: Vec<f64> = x.samples.iter().zip(&w).map(|(a, b)| a * b).collect();
            let model = fit_frame(&windowed, order.min(x.len().saturating_sub(1)))?;
            let gain = model.error.sqrt();
            let (envelope, tf) = if gain > 0.0 {
                let n_points = 512;
                let env = lpc_envelope(&model, Some(gain), n_points)?;
                let freqs = (0..n_points).map(|k| k as f64 * x.sample_rate_hz / 2.0 / (n_points - 1) as f64).collect();
                (
                    Series { x_label: "freq_hz".into(), y_label: "envelope".into(), x: freqs, y: env },
                    model.synthesis_filter(gain),
                )
            } else {
                (Series { x_label: "freq_hz".into(), y_label: "envelope".into(), x: vec![], y: vec![] }, TransferFunction::identity())
            };
            Ok(outputs(vec![
                ("envelope", Value::Series(envelope)),
                ("formants", Value::FeatureMatrix(formants)),
                ("model", Value::TransferFunction(tf)),
                ("reconstructed", Value::Signal(synth.reconstructed)),
                ("residual", Value::Signal(synth.residual)),
            ]))
        }
        "PeakPicker" => {
            let s = i.spectrum("in")?;
            let keep = select_conjugate_peaks(&s.bins, p.usize("count")?)?;
            let mut bins = vec![Complex64::new(0.0, 0.0); s.len()];
            for k in keep {
                bins[k] = s.bins[k];
            }
            one("out", Value::Spectrum(Spectrum { bins, ..s.clone() }))
        }
        "Periodogram" => {
            let x = i.signal("in")?;
            let nfft = match p.usize("nfft")? {
                0 => x.len().max(1).next_power_of_two(),
                n => n,
            };
            let psd = periodogram(x, p.window("window")?, p.real("beta")?, nfft)?;
            let freqs = (0..psd.len()).map(|k| k as f64 * x.sample_rate_hz / nfft as f64).collect();
            one("psd", Value::Series(Series { x_label: "freq_hz".into(), y_label: "psd".into(), x: freqs, y: psd }))
        }
        "QmfAnalysis" => {
            let bank = QmfBank::new(p.array("h0")?.to_vec())?;
            let (low, high) = qmf_analysis(&bank, i.signal("in")?)?;
            Ok(outputs(vec![("high", Value::Signal(high)), ("low", Value::Signal(low))]))
        }
        "QmfSynthesis" => {
            let bank = QmfBank::new(p.array("h0")?.to_vec())?;
            one("out", Value::Signal(qmf_synthesis(&bank, i.signal("low")?, i.signal("high")?)?))
        }
        "Qft" => {
            let x = i.signal("in")?;
            let n = qubits_param(&p, x.len())?;
            let noise = NoiseModel { depolarizing_p: p.real("depolarizing_p")?, shots: p.usize("shots")?, seed };
            let enc = amplitude_encode(&x.samples, n)?;
            let state = apply_circuit(&enc.state, &build_qft_circuit(n)?, Some(&noise))?;
            let bins = noisy_spectrum_estimate(&state, &noise)?;
            let norm = SpectrumNormalization::UnitaryQft { norm: enc.norm, original_len: enc.original_len };
            one("out", Value::Spectrum(Spectrum::new(bins, x.sample_rate_hz, norm)?))
        }
        "QftCodec" => {
            let x = i.signal("in")?;
            let cfg = CodecConfig {
                n_qubits: qubits_param(&p, x.len())?,
                peaks: p.usize("peaks")?,
                noise: NoiseModel { depolarizing_p: p.real("depolarizing_p")?, shots: p.usize("shots")?, seed },
            };
            let out = qft_codec(&x.samples, &cfg)?;
            let norm = SpectrumNormalization::UnitaryQft { norm: out.norm, original_len: x.len() };
            Ok(outputs(vec![
                ("reconstructed", Value::Signal(Signal::new(out.reconstructed.clone(), x.sample_rate_hz)?)),
                ("report", Value::CodecReport(out.report(&cfg))),
                ("snr", Value::scalar(out.snr_db)),
                ("spectrum", Value::Spectrum(Spectrum::new(out.spectrum, x.sample_rate_hz, norm)?)),
            ]))
        }
        "SampleSource" => one("out", Value::Signal(Signal::new(p.array("samples")?.to_vec(), p.real("sample_rate_hz")?)?)),
        "SignalGenerator" => {
            let kind_name = p.text("kind")?;
            let kind = WaveformKind::from_name(kind_name)
                .ok_or_else(|| DspError::InvalidSpec(format!("unknown waveform {kind_name:?}")))?;
            let spec = GeneratorSpec {
                kind,
                freq_hz: p.real("freq_hz")?,
                amplitude: p.real("amplitude")?,
                length: p.usize("length")?,
                sample_rate_hz: p.real("sample_rate_hz")?,
                phase_rad: p.real("phase_rad")?,
                dtmf_digit: p.text("dtmf_digit")?.chars().next().unwrap_or('1'),
                seed,
            };
            one("out", Value::Signal(generate_signal(&spec)?))
        }
        "SnrMeter" => {
            let snr = snr_db(&i.signal("reference")?.samples, &i.signal("estimate")?.samples)?;
            one("snr", Value::scalar(snr))
        }
        "Window" => {
            let x = i.signal("in")?;
            let w = make_window(&WindowSpec { kind: p.window("window")?, length: x.len(), beta: p.real("beta")? })?;
            let y = x.samples.iter().zip(&w).map(|(a, b)| a * b).collect();
            one("out", Value::Signal(Signal { samples: y, sample_rate_hz: x.sample_rate_hz }))
        }
        other => Err(DspError::InvalidSpec(format!("no implementation for block type {other:?}"))),
    }
}

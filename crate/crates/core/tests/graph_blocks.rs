use std::collections::BTreeSet;

use jdsp_core::graph::{block_catalog, parse_graph, run_graph, Value};
use serde_json::json;

fn two_pole(freq_hz: f64) -> serde_json::Value {
    let (r, th) = (0.97f64, 2.0 * std::f64::consts::PI * freq_hz / 8000.0);
    json!([1.0, -2.0 * r * th.cos(), r * r])
}

fn everything_graph() -> serde_json::Value {
    json!({
        "version": 1,
        "blocks": [
            {"id": "tone", "type": "SignalGenerator", "params": {"kind": "sine", "freq_hz": 500, "length": 64}},
            {"id": "noise_a", "type": "SignalGenerator", "params": {"kind": "white_noise", "length": 4096}},
            {"id": "noise_b", "type": "SignalGenerator", "params": {"kind": "white_noise", "length": 4096}},
            {"id": "ra1", "type": "FirIirFilter", "params": {"a": two_pole(700.0)}},
            {"id": "ra2", "type": "FirIirFilter", "params": {"a": two_pole(1200.0)}},
            {"id": "rb1", "type": "FirIirFilter", "params": {"a": two_pole(300.0)}},
            {"id": "rb2", "type": "FirIirFilter", "params": {"a": two_pole(2300.0)}},
            {"id": "lpc_a", "type": "LpcAnalyzer", "params": {"label": 0}},
            {"id": "lpc_b", "type": "LpcAnalyzer", "params": {"label": 1}},
            {"id": "merge", "type": "FeatureMerge"},
            {"id": "km", "type": "KMeans"},
            {"id": "cls", "type": "PhonemeClassifier"},
            {"id": "src", "type": "SampleSource", "params": {"samples": [1.0, -0.5, 0.25, 0.0, 0.75, -1.0]}},
            {"id": "acf", "type": "Autocorrelation", "params": {"max_lag": 4}},
            {"id": "awgn", "type": "AwgnChannel"},
            {"id": "down", "type": "Downsampler", "params": {"antialias": true}},
            {"id": "up", "type": "Upsampler", "params": {"antialias": true}},
            {"id": "win", "type": "Window", "params": {"window": "kaiser", "beta": 5.0}},
            {"id": "psd", "type": "Periodogram", "params": {"window": "hann"}},
            {"id": "fft", "type": "Fft"},
            {"id": "ifft", "type": "Ifft"},
            {"id": "iqft_of_fft", "type": "Iqft"},
            {"id": "qft", "type": "Qft"},
            {"id": "iqft", "type": "Iqft"},
            {"id": "ifft_of_qft", "type": "Ifft"},
            {"id": "peaks", "type": "PeakPicker", "params": {"count": 1}},
            {"id": "ifft_peaks", "type": "Ifft"},
            {"id": "snr_fft", "type": "SnrMeter"},
            {"id": "snr_iqft", "type": "SnrMeter"},
            {"id": "snr_qft", "type": "SnrMeter"},
            {"id": "snr_cross", "type": "SnrMeter"},
            {"id": "snr_peaks", "type": "SnrMeter"},
            {"id": "codec", "type": "QftCodec", "params": {"peaks": 1}},
            {"id": "qa", "type": "QmfAnalysis"},
            {"id": "qs", "type": "QmfSynthesis"},
            {"id": "design", "type": "FilterDesigner", "params": {"method": "elliptic", "order": 4, "stopband_atten_db": 40}},
            {"id": "eq", "type": "FilterDesigner", "params": {"method": "equiripple", "numtaps": 15}},
            {"id": "fr", "type": "FrequencyResponse"},
            {"id": "pz", "type": "PoleZero"},
            {"id": "ir", "type": "ImpulseResponse"},
            {"id": "ir_eq", "type": "ImpulseResponse", "params": {"length": 15}},
            {"id": "filt", "type": "FirIirFilter"}
        ],
        "wires": [
            {"from": "noise_a.out", "to": "ra1.in"}, {"from": "ra1.out", "to": "ra2.in"}, {"from": "ra2.out", "to": "lpc_a.in"},
            {"from": "noise_b.out", "to": "rb1.in"}, {"from": "rb1.out", "to": "rb2.in"}, {"from": "rb2.out", "to": "lpc_b.in"},
            {"from": "lpc_a.formants", "to": "merge.a"}, {"from": "lpc_b.formants", "to": "merge.b"},
            {"from": "merge.out", "to": "km.features"}, {"from": "merge.out", "to": "cls.features"},
            {"from": "src.out", "to": "acf.in"},
            {"from": "tone.out", "to": "awgn.in"}, {"from": "tone.out", "to": "down.in"}, {"from": "down.out", "to": "up.in"},
            {"from": "tone.out", "to": "win.in"}, {"from": "win.out", "to": "psd.in"},
            {"from": "tone.out", "to": "fft.in"}, {"from": "fft.out", "to": "ifft.in"}, {"from": "fft.out", "to": "iqft_of_fft.in"},
            {"from": "tone.out", "to": "qft.in"}, {"from": "qft.out", "to": "iqft.in"}, {"from": "qft.out", "to": "ifft_of_qft.in"},
            {"from": "fft.out", "to": "peaks.in"}, {"from": "peaks.out", "to": "ifft_peaks.in"},
            {"from": "tone.out", "to": "snr_fft.reference"}, {"from": "ifft.out", "to": "snr_fft.estimate"},
            {"from": "tone.out", "to": "snr_iqft.reference"}, {"from": "iqft_of_fft.out", "to": "snr_iqft.estimate"},
            {"from": "tone.out", "to": "snr_qft.reference"}, {"from": "iqft.out", "to": "snr_qft.estimate"},
            {"from": "tone.out", "to": "snr_cross.reference"}, {"from": "ifft_of_qft.out", "to": "snr_cross.estimate"},
            {"from": "tone.out", "to": "snr_peaks.reference"}, {"from": "ifft_peaks.out", "to": "snr_peaks.estimate"},
            {"from": "tone.out", "to": "codec.in"},
            {"from": "tone.out", "to": "qa.in"}, {"from": "qa.low", "to": "qs.low"}, {"from": "qa.high", "to": "qs.high"},
            {"from": "design.tf", "to": "fr.tf"}, {"from": "design.tf", "to": "pz.tf"}, {"from": "design.tf", "to": "ir.tf"},
            {"from": "eq.tf", "to": "ir_eq.tf"},
            {"from": "tone.out", "to": "filt.in"}, {"from": "design.tf", "to": "filt.tf"}
        ]
    })
}

fn scalar(v: &Value) -> f64 {
    match v {
        Value::Scalar(s) => s.value,
        other => panic!("not a scalar: {other:?}"),
    }
}

#[test]
fn every_catalog_block_runs() {
    let g = parse_graph(&everything_graph().to_string()).unwrap();
    let used: BTreeSet<&str> = g.blocks.iter().map(|b| b.type_name.as_str()).collect();
    let catalog: BTreeSet<String> = block_catalog().into_iter().map(|d| d.type_name).collect();
    assert_eq!(used, catalog.iter().map(String::as_str).collect());

    let out = run_graph(&g, 7).unwrap();
    for id in ["snr_fft", "snr_iqft", "snr_qft", "snr_cross"] {
        assert!(scalar(&out[id]["snr"]) > 200.0, "{id}: {}", scalar(&out[id]["snr"]));
    }
    // 500 Hz at 8 kHz over 64 samples sits exactly on bin 4
    assert!(scalar(&out["snr_peaks"]["snr"]) > 200.0);
    assert!(scalar(&out["codec"]["snr"]) > 120.0);

    let Value::Signal(tone) = &out["tone"]["out"] else { panic!() };
    let Value::Signal(rebuilt) = &out["qs"]["out"] else { panic!() };
    for n in 1..tone.len() {
        assert!((rebuilt.samples[n] - tone.samples[n - 1]).abs() < 1e-12);
    }
    let Value::Signal(up) = &out["up"]["out"] else { panic!() };
    assert_eq!(up.len(), 64);
    let Value::Series(r) = &out["acf"]["r"] else { panic!() };
    assert_eq!(r.y.len(), 5);
    assert!((r.y[0] - (1.0 + 0.25 + 0.0625 + 0.5625 + 1.0)).abs() < 1e-12);

    let Value::ConfusionMatrix(cm) = &out["cls"]["confusion"] else { panic!() };
    assert!(cm.total > 0);
    assert!(cm.accuracy >= 0.9, "{cm:?}");
    let Value::FeatureMatrix(merged) = &out["merge"]["out"] else { panic!() };
    assert_eq!(merged.class_names, vec!["0", "1"]);
}

#[test]
fn seeds_only_change_noise() {
    let g = parse_graph(&everything_graph().to_string()).unwrap();
    let a = run_graph(&g, 1).unwrap();
    let b = run_graph(&g, 2).unwrap();
    assert_eq!(a["tone"], b["tone"]);
    assert_eq!(a["fr"], b["fr"]);
    assert_ne!(a["awgn"], b["awgn"]);
    assert_ne!(a["noise_a"], b["noise_a"]);
}

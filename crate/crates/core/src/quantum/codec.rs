use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    amplitude_encode, apply_circuit, build_qft_circuit, inverse_circuit, noisy_spectrum_estimate,
    snr_db, snr_serde, NoiseModel, StateVector,
};
use crate::error::{DspError, Result};
use crate::spectral::pick_peaks;

/// Imaginary residue tolerated after the inverse transform of a noiseless run.
pub const IMAG_RESIDUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecConfig {
    pub n_qubits: usize,
    /// Conjugate pairs kept; `k = 0` and `k = N/2` count as one each.
    pub peaks: usize,
    #[serde(default = "NoiseModel::noiseless")]
    pub noise: NoiseModel,
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        build_qft_circuit(self.n_qubits)?;
        if self.peaks == 0 || self.peaks > 1 << self.n_qubits {
            return Err(DspError::InvalidSpec(format!(
                "peaks must lie in 1..={}, got {}",
                1usize << self.n_qubits,
                self.peaks
            )));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecOutput {
    pub reconstructed: Vec<f64>,
    pub snr_db: f64,
    /// Estimated QFT spectrum of the encoded signal before peak selection.
    pub spectrum: Vec<Complex64>,
    pub retained_bins: Vec<usize>,
    pub norm: f64,
}

impl CodecOutput {
    pub fn report(&self, cfg: &CodecConfig) -> CodecReport {
        CodecReport {
            n_qubits: cfg.n_qubits,
            peaks: cfg.peaks,
            depolarizing_p: cfg.noise.depolarizing_p,
            shots: cfg.noise.shots,
            seed: cfg.noise.seed,
            snr_db: self.snr_db,
            retained_bins: self.retained_bins.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodecReport {
    pub n_qubits: usize,
    pub peaks: usize,
    pub depolarizing_p: f64,
    pub shots: usize,
    pub seed: u64,
    #[serde(with = "snr_serde")]
    pub snr_db: f64,
    pub retained_bins: Vec<usize>,
}

/// Picks `peaks` groups `{k, N−k}` by group energy and returns the bins kept,
/// ascending.
pub fn select_conjugate_peaks(spectrum: &[Complex64], peaks: usize) -> Result<Vec<usize>> {
    let n = spectrum.len();
    if n == 0 {
        return Err(DspError::EmptyInput);
    }
    let groups = n / 2 + 1;
    let energy: Vec<f64> = (0..groups)
        .map(|k| {
            let partner = (n - k) % n;
            let mut e = spectrum[k].norm_sqr();
            if partner != k {
                e += spectrum[partner].norm_sqr();
            }
            e.sqrt()
        })
        .collect();
    let mut bins = Vec::new();
    for k in pick_peaks(&energy, peaks.min(groups))? {
        bins.push(k);
        let partner = (n - k) % n;
        if partner != k {
            bins.push(partner);
        }
    }
    bins.sort_unstable();
    Ok(bins)
}

/// Encode, QFT (noisy), estimate, keep the strongest conjugate pairs,
/// renormalize, IQFT, take the real part, rescale and score.
pub fn qft_codec(x: &[f64], cfg: &CodecConfig) -> Result<CodecOutput> {
    cfg.validate()?;
    let enc = amplitude_encode(x, cfg.n_qubits)?;
    let qft = build_qft_circuit(cfg.n_qubits)?;
    let transformed = apply_circuit(&enc.state, &qft, Some(&cfg.noise))?;
    let spectrum = noisy_spectrum_estimate(&transformed, &cfg.noise)?;
    let retained_bins = select_conjugate_peaks(&spectrum, cfg.peaks)?;

    let mut kept = vec![Complex64::new(0.0, 0.0); spectrum.len()];
    for &k in &retained_bins {
        kept[k] = spectrum[k];
    }
    let kept_norm = kept.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(kept_norm > 0.0) {
        return Err(DspError::ZeroSignal);
    }
    for a in kept.iter_mut() {
        *a /= kept_norm;
    }
    let state = StateVector { n_qubits: cfg.n_qubits, amplitudes: kept };
    let back = apply_circuit(&state, &inverse_circuit(&qft), None)?;
    if cfg.noise.is_noiseless() {
        let residue = back.amplitudes.iter().map(|a| a.im.abs()).fold(0.0, f64::max);
        if residue > IMAG_RESIDUE_TOL {
            return Err(DspError::NumericalFailure(format!("imaginary residue {residue} after inverse transform")));
        }
    }
    let reconstructed: Vec<f64> = back.amplitudes[..enc.original_len].iter().map(|a| a.re * enc.norm).collect();
    let snr = snr_db(x, &reconstructed)?;
    Ok(CodecOutput { reconstructed, snr_db: snr, spectrum, retained_bins, norm: enc.norm })
}

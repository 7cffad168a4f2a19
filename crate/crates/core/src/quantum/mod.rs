//! Statevector simulation of the quantum Fourier transform with Pauli-trajectory
//! depolarizing noise and finite-shot measurement.
//!
//! Qubit 0 is the most significant bit of a basis-state index.

mod codec;

pub use codec::{qft_codec, select_conjugate_peaks, CodecConfig, CodecOutput, CodecReport};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::rng::{derive_seed, seeded};

pub const MAX_QUBITS: usize = 14;
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(DspError::InvalidQubits(n));
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(DspError::OutOfRange { index, value: dim as f64 });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Wraps amplitudes of length `2^n` with unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(DspError::NotPowerOfTwo(dim));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let s = StateVector { n_qubits, amplitudes };
        if (s.norm() - 1.0).abs() > NORM_TOL {
            return Err(DspError::InvalidSpec(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn hadamard(&mut self, q: usize) {
        let m = self.mask(q);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.dim() {
            if i & m == 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i | m]);
                self.amplitudes[i] = (a + b) * s;
                self.amplitudes[i | m] = (a - b) * s;
            }
        }
    }

    fn cphase(&mut self, c: usize, t: usize, theta: f64) {
        let both = self.mask(c) | self.mask(t);
        let phase = Complex64::from_polar(1.0, theta);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & both == both {
                *a *= phase;
            }
        }
    }

    fn swap(&mut self, q1: usize, q2: usize) {
        let (m1, m2) = (self.mask(q1), self.mask(q2));
        for i in 0..self.dim() {
            if i & m1 != 0 && i & m2 == 0 {
                self.amplitudes.swap(i, (i & !m1) | m2);
            }
        }
    }

    fn pauli(&mut self, p: Pauli, q: usize) {
        let m = self.mask(q);
        let i_unit = Complex64::new(0.0, 1.0);
        match p {
            Pauli::X => {
                for i in 0..self.dim() {
                    if i & m == 0 {
                        self.amplitudes.swap(i, i | m);
                    }
                }
            }
            Pauli::Y => {
                for i in 0..self.dim() {
                    if i & m == 0 {
                        let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | m]);
                        self.amplitudes[i] = -i_unit * a1;
                        self.amplitudes[i | m] = i_unit * a0;
                    }
                }
            }
            Pauli::Z => {
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H { q: usize },
    CPhase { control: usize, target: usize, theta: f64 },
    Swap { q1: usize, q2: usize },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { q } => vec![q],
            Gate::CPhase { control, target, .. } => vec![control, target],
            Gate::Swap { q1, q2 } => vec![q1, q2],
        }
    }

    fn inverse(&self) -> Gate {
        match *self {
            Gate::CPhase { control, target, theta } => Gate::CPhase { control, target, theta: -theta },
            g => g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QftCircuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl QftCircuit {
    pub fn count(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for g in &self.gates {
            match g {
                Gate::H { .. } => c.0 += 1,
                Gate::CPhase { .. } => c.1 += 1,
                Gate::Swap { .. } => c.2 += 1,
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n_qubits) {
                return Err(DspError::OutOfRange { index: q, value: self.n_qubits as f64 });
            }
            if let Gate::CPhase { theta, .. } = g {
                if !theta.is_finite() {
                    return Err(DspError::InvalidSpec("phase angle must be finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// `H(j)` followed by `CPhase(k, j, 2π/2^{k−j+1})` for each `k > j`, then the
/// bit-reversal swaps. Realizes `y_k = N^{-1/2} Σ_j x_j e^{+2πi jk/N}`.
pub fn build_qft_circuit(n: usize) -> Result<QftCircuit> {
    check_qubits(n)?;
    let mut gates = Vec::new();
    for j in 0..n {
        gates.push(Gate::H { q: j });
        for k in j + 1..n {
            let theta = 2.0 * PI / (1u64 << (k - j + 1)) as f64;
            gates.push(Gate::CPhase { control: k, target: j, theta });
        }
    }
    for q in 0..n / 2 {
        gates.push(Gate::Swap { q1: q, q2: n - 1 - q });
    }
    Ok(QftCircuit { n_qubits: n, gates })
}

pub fn inverse_circuit(circuit: &QftCircuit) -> QftCircuit {
    QftCircuit {
        n_qubits: circuit.n_qubits,
        gates: circuit.gates.iter().rev().map(Gate::inverse).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub depolarizing_p: f64,
    /// Measurement shots; 0 means exact amplitudes.
    #[serde(default)]
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { depolarizing_p: 0.0, shots: 0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.depolarizing_p) {
            return Err(DspError::InvalidSpec(format!(
                "depolarizing_p must lie in [0, 1], got {}",
                self.depolarizing_p
            )));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_p == 0.0 && self.shots == 0
    }
}

/// Applies gates in order. With depolarizing noise, after each gate a
/// random Pauli hits one of the gate's qubits with probability `p`.
pub fn apply_circuit(state: &StateVector, circuit: &QftCircuit, noise: Option<&NoiseModel>) -> Result<StateVector> {
    if state.n_qubits != circuit.n_qubits {
        return Err(DspError::DimensionMismatch { expected: circuit.n_qubits, actual: state.n_qubits });
    }
    circuit.validate()?;
    let p = noise.map_or(0.0, |n| n.depolarizing_p);
    if let Some(n) = noise {
        n.validate()?;
    }
    let mut rng = (p > 0.0).then(|| seeded(derive_seed(noise.map_or(0, |n| n.seed), "depolarizing")));
    let mut out = state.clone();
    for g in &circuit.gates {
        match *g {
            Gate::H { q } => out.hadamard(q),
            Gate::CPhase { control, target, theta } => out.cphase(control, target, theta),
            Gate::Swap { q1, q2 } => out.swap(q1, q2),
        }
        if let Some(rng) = rng.as_mut() {
            if rng.random::<f64>() < p {
                let qs = g.qubits();
                let q = qs[rng.random_range(0..qs.len())];
                let pauli = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
                out.pauli(pauli, q);
            }
        }
    }
    let norm = out.norm();
    if (norm - 1.0).abs() > NORM_TOL * 10.0 {
        return Err(DspError::NumericalFailure(format!("norm drifted to {norm}")));
    }
    Ok(out)
}

/// `shots` independent draws of the basis index; counts sum to `shots`.
pub fn measure_counts(state: &StateVector, shots: usize, seed: u64) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(DspError::InvalidShots(shots));
    }
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for p in state.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seeded(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let mut idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        // never land on a zero-probability index through rounding
        while idx > 0 && cdf[idx] == cdf[idx - 1] {
            idx -= 1;
        }
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Exact amplitudes when `shots == 0`; otherwise magnitudes `√(count/M)`
/// with phases taken from the statevector (a classroom emulation, since
/// measurement yields no phase). Not renormalized.
pub fn noisy_spectrum_estimate(state: &StateVector, noise: &NoiseModel) -> Result<Vec<Complex64>> {
    noise.validate()?;
    if noise.shots == 0 {
        return Ok(state.amplitudes.clone());
    }
    let counts = measure_counts(state, noise.shots, derive_seed(noise.seed, "shots"))?;
    let m = noise.shots as f64;
    Ok(state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mag = (counts.get(&i).copied().unwrap_or(0) as f64 / m).sqrt();
            let unit = if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) };
            unit * mag
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedSignal {
    pub state: StateVector,
    pub norm: f64,
    pub original_len: usize,
}

/// Zero-pads to `2^n` and normalizes to unit norm.
pub fn amplitude_encode(x: &[f64], n: usize) -> Result<EncodedSignal> {
    check_qubits(n)?;
    let dim = 1usize << n;
    if x.len() > dim {
        return Err(DspError::TooLong { len: x.len(), capacity: dim });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(DspError::ZeroSignal);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (a, v) in amplitudes.iter_mut().zip(x) {
        *a = Complex64::new(v / norm, 0.0);
    }
    Ok(EncodedSignal { state: StateVector { n_qubits: n, amplitudes }, norm, original_len: x.len() })
}

/// Real parts of the amplitudes times the stored norm, truncated.
pub fn amplitude_decode(enc: &EncodedSignal) -> Vec<f64> {
    enc.state.amplitudes[..enc.original_len].iter().map(|a| a.re * enc.norm).collect()
}

/// Smallest qubit count whose dimension holds `len` samples.
pub fn qubits_for(len: usize) -> Result<usize> {
    let n = len.max(2).next_power_of_two().trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

/// `10·log₁₀(Σx²/Σ(x−x̂)²)`; `+∞` when the estimate is exact.
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(DspError::LengthMismatch { expected: reference.len(), actual: estimate.len() });
    }
    let signal: f64 = reference.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(DspError::ZeroReference);
    }
    let err: f64 = reference.iter().zip(estimate).map(|(a, b)| (a - b) * (a - b)).sum();
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / err).log10())
}

/// Serde helpers writing `+∞` as the string `"inf"`.
pub mod snr_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad SNR value {t:?}"))),
        }
    }
}

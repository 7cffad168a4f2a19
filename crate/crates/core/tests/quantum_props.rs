use std::f64::consts::PI;

use jdsp_core::quantum::{
    amplitude_encode, apply_circuit, build_qft_circuit, inverse_circuit, qft_codec, CodecConfig, NoiseModel,
    StateVector,
};
use jdsp_core::spectral::fft_real;
use jdsp_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = jdsp_core::rng::seeded(seed);
    let raw: Vec<Complex64> =
        (0..1usize << n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn dense_qft(amps: &[Complex64]) -> Vec<Complex64> {
    let n = amps.len();
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            amps.iter()
                .enumerate()
                .map(|(j, a)| a * Complex64::from_polar(s, 2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn qft_matches_dense_matrix(n in 1usize..9, seed in any::<u64>()) {
        let psi = random_state(n, seed);
        let out = apply_circuit(&psi, &build_qft_circuit(n).unwrap(), None).unwrap();
        prop_assert!(max_gap(&out.amplitudes, &dense_qft(&psi.amplitudes)) <= 1e-10);
    }

    #[test]
    fn circuits_are_unitary(n in 1usize..11, seed in any::<u64>(), inverse in prop::bool::ANY) {
        let psi = random_state(n, seed);
        let qft = build_qft_circuit(n).unwrap();
        let c = if inverse { inverse_circuit(&qft) } else { qft.clone() };
        let out = apply_circuit(&psi, &c, None).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
        let back = apply_circuit(&apply_circuit(&psi, &qft, None).unwrap(), &inverse_circuit(&qft), None).unwrap();
        prop_assert!(max_gap(&back.amplitudes, &psi.amplitudes) <= 1e-10);
    }

    #[test]
    fn noise_trajectories_keep_unit_norm(n in 1usize..8, seed in any::<u64>(), p in 0.0..1.0f64) {
        let psi = random_state(n, seed);
        let noise = NoiseModel { depolarizing_p: p, shots: 0, seed };
        let out = apply_circuit(&psi, &build_qft_circuit(n).unwrap(), Some(&noise)).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn qft_is_conjugate_dft(x in prop::collection::vec(-1.0..1.0f64, 1..=256)) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let n = x.len().next_power_of_two().max(2);
        let enc = amplitude_encode(&x, n.trailing_zeros() as usize).unwrap();
        let out = apply_circuit(&enc.state, &build_qft_circuit(enc.state.n_qubits).unwrap(), None).unwrap();
        let mut unit: Vec<f64> = x.iter().map(|v| v / enc.norm).collect();
        unit.resize(n, 0.0);
        let dft = fft_real(&unit).unwrap();
        let scaled: Vec<Complex64> = out.amplitudes.iter().map(|a| a * (n as f64).sqrt()).collect();
        let conj: Vec<Complex64> = dft.iter().map(|c| c.conj()).collect();
        prop_assert!(max_gap(&scaled, &conj) <= 1e-9);
    }

    #[test]
    fn codec_is_reproducible(x in prop::collection::vec(-1.0..1.0f64, 16..=64), peaks in 1usize..8, seed in any::<u64>(),
                             p in 0.0..0.05f64, shots in 0usize..2000) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let cfg = CodecConfig { n_qubits: 6, peaks, noise: NoiseModel { depolarizing_p: p, shots, seed } };
        let a = qft_codec(&x, &cfg).unwrap();
        let b = qft_codec(&x, &cfg).unwrap();
        prop_assert_eq!(a.reconstructed.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        b.reconstructed.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert_eq!(a.snr_db.to_bits(), b.snr_db.to_bits());
    }
}

#[test]
fn fewer_peaks_never_help_on_average() {
    let n_qubits = 6;
    let n = 1usize << n_qubits;
    let mut means = Vec::new();
    for peaks in [n, n / 2, n / 4, n / 8] {
        let mut total = 0.0;
        for seed in 0..20u64 {
            let mut rng = jdsp_core::rng::seeded(seed);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cfg = CodecConfig { n_qubits, peaks, noise: NoiseModel::noiseless() };
            // cap the lossless case so the mean stays finite
            total += qft_codec(&x, &cfg).unwrap().snr_db.min(300.0);
        }
        means.push(total / 20.0);
    }
    for w in means.windows(2) {
        assert!(w[1] <= w[0], "{means:?}");
    }
}

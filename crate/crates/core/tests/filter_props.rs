use jdsp_core::filter::{filter_samples, frequency_response, impulse_response, is_stable, TransferFunction};
use jdsp_core::roots::{expand_roots, find_roots};
use jdsp_core::spectral::fft;
use jdsp_core::Complex64;
use proptest::prelude::*;

/// Stable denominators from random poles inside radius 0.95.
fn stable_tf() -> impl Strategy<Value = TransferFunction> {
    (prop::collection::vec(-1.0..1.0f64, 1..6), prop::collection::vec((0.0..0.95f64, 0.0..3.1f64), 0..5))
        .prop_map(|(b, poles)| {
            let mut roots = Vec::new();
            for (r, th) in poles {
                let z = Complex64::from_polar(r, th);
                roots.push(z);
                roots.push(z.conj());
            }
            let a = expand_roots(&roots, 1.0).unwrap();
            TransferFunction::new(b, a).unwrap()
        })
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Matches a conjugate-closed root set greedily and returns the worst gap.
fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut left: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for z in a {
        let (i, d) = left
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(d);
        left.swap_remove(i);
    }
    worst
}

fn conjugate_roots() -> impl Strategy<Value = Vec<Complex64>> {
    (prop::collection::vec((0.1..2.0f64, 0.05..3.09f64), 0..6), prop::collection::vec(-2.0..2.0f64, 0..3)).prop_map(
        |(pairs, reals)| {
            let mut out: Vec<Complex64> = reals.into_iter().map(|r| Complex64::new(r, 0.0)).collect();
            for (r, th) in pairs {
                let z = Complex64::from_polar(r, th);
                out.push(z);
                out.push(z.conj());
            }
            out
        },
    )
}

proptest! {
    #[test]
    fn filtering_is_linear(tf in stable_tf(), x in prop::collection::vec(-1.0..1.0f64, 64), y in prop::collection::vec(-1.0..1.0f64, 64),
                           alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = filter_samples(&tf, &mix);
        let (fx, fy) = (filter_samples(&tf, &x), filter_samples(&tf, &y));
        let rhs: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| alpha * a + beta * b).collect();
        prop_assert!(rel_close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn shifted_impulse_shifts_response(tf in stable_tf(), shift in 0usize..20) {
        let len = 80;
        let h = impulse_response(&tf, len).unwrap();
        let mut delta = vec![0.0; len];
        delta[shift] = 1.0;
        let y = filter_samples(&tf, &delta);
        prop_assert!(y[..shift].iter().all(|v| *v == 0.0));
        prop_assert!(rel_close(&y[shift..], &h[..len - shift], 1e-10));
    }

    #[test]
    fn fir_response_matches_padded_dft(b in prop::collection::vec(-1.0..1.0f64, 1..32)) {
        let tf = TransferFunction::fir(b.clone()).unwrap();
        // grid ω_k = kπ/(n−1) with n−1 = 64 lands on every other bin of a 128-point DFT
        let resp = frequency_response(&tf, 65).unwrap();
        let mut padded: Vec<Complex64> = b.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        padded.resize(128, Complex64::new(0.0, 0.0));
        let big = fft(&padded, false).unwrap();
        for k in 0..65 {
            prop_assert!((resp.h[k] - big[k]).norm() <= 1e-10 * (1.0 + big[k].norm()));
        }
    }

    #[test]
    fn stable_responses_decay(tf in stable_tf()) {
        let st = is_stable(&tf).unwrap();
        prop_assert!(st.stable);
        let start = 5 * tf.order().max(1);
        let h = impulse_response(&tf, start + 200).unwrap();
        // log domain: tiny poles underflow r^n long before the loop ends
        let ln_r = (st.max_pole_magnitude + 1e-6).ln();
        let ln_c = h[..start]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(n, v)| v.abs().ln() - n as f64 * ln_r)
            .fold(0.0, f64::max)
            + 3.0;
        for (n, v) in h.iter().enumerate().skip(start).filter(|(_, v)| **v != 0.0) {
            // repeated poles contribute polynomial factors up to n^order
            let poly = tf.order() as f64 * (n as f64 + 1.0).ln();
            prop_assert!(v.abs().ln() <= ln_c + n as f64 * ln_r + poly);
        }
    }

    #[test]
    fn roots_round_trip(roots in conjugate_roots(), gain in 0.5..2.0f64) {
        prop_assume!(!roots.is_empty());
        let poly = expand_roots(&roots, gain).unwrap();
        let found = find_roots(&poly).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        prop_assert!(set_distance(&roots, &found) <= 1e-8, "{:?} vs {:?}", roots, found);
    }
}

#[test]
fn one_pole_impulse_response() {
    let tf = TransferFunction::new(vec![1.0], vec![1.0, -0.9]).unwrap();
    let h = impulse_response(&tf, 51).unwrap();
    for (n, v) in h.iter().enumerate() {
        assert!((v - 0.9f64.powi(n as i32)).abs() <= 1e-12);
    }
}

use jdsp_core::lpc::FrameSpec;
use jdsp_core::ml::{phoneme_experiment, synthetic_vowel_corpus, PhonemeConfig};
use jdsp_core::spectral::WindowKind;

fn config(order: usize, seed: u64) -> PhonemeConfig {
    PhonemeConfig { order, frame: FrameSpec::new(256, 256, WindowKind::Hamming), ..PhonemeConfig::new(2, seed) }
}

#[test]
fn noiseless_vowels_separate() {
    let (corpus, names) = synthetic_vowel_corpus(10, 2048, 8000.0, 1).unwrap();
    for order in [4, 10] {
        let r = phoneme_experiment(&corpus, &names, &config(order, 42)).unwrap();
        println!("order {order}: acc {} ({} test)", r.confusion.accuracy, r.n_test);
        assert!(r.confusion.accuracy >= 0.95);
    }
}

#[test]
fn noise_does_not_help() {
    let (corpus, names) = synthetic_vowel_corpus(10, 2048, 8000.0, 1).unwrap();
    for seed in [1, 2, 3] {
        let clean = phoneme_experiment(&corpus, &names, &config(10, seed)).unwrap();
        let noisy = phoneme_experiment(&corpus, &names, &PhonemeConfig { noise_snr_db: Some(0.0), ..config(10, seed) }).unwrap();
        println!("seed {seed}: clean {} noisy {} ({} test)", clean.confusion.accuracy, noisy.confusion.accuracy, noisy.n_test);
        assert!(noisy.confusion.accuracy <= clean.confusion.accuracy);
    }
}

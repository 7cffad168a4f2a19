use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::design::bessel_i0;
use crate::error::{DspError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Bartlett,
    Hann,
    Hamming,
    Blackman,
    Kaiser,
}

impl WindowKind {
    pub const ALL: [WindowKind; 6] = [
        WindowKind::Rectangular,
        WindowKind::Bartlett,
        WindowKind::Hann,
        WindowKind::Hamming,
        WindowKind::Blackman,
        WindowKind::Kaiser,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Bartlett => "bartlett",
            WindowKind::Hann => "hann",
            WindowKind::Hamming => "hamming",
            WindowKind::Blackman => "blackman",
            WindowKind::Kaiser => "kaiser",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length: usize,
    #[serde(default)]
    pub beta: f64,
}

impl WindowSpec {
    pub fn new(kind: WindowKind, length: usize) -> Self {
        WindowSpec { kind, length, beta: 0.0 }
    }

    pub fn kaiser(length: usize, beta: f64) -> Self {
        WindowSpec { kind: WindowKind::Kaiser, length, beta }
    }
}

/// Symmetric window of the given length (denominator `N − 1`).
pub fn make_window(spec: &WindowSpec) -> Result<Vec<f64>> {
    let n = spec.length;
    if n == 0 {
        return Err(DspError::InvalidSpec("window length must be at least 1".into()));
    }
    if spec.kind == WindowKind::Kaiser && !(spec.beta.is_finite() && spec.beta >= 0.0) {
        return Err(DspError::InvalidSpec(format!("kaiser beta must be >= 0, got {}", spec.beta)));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let m = (n - 1) as f64;
    let w = (0..n).map(|i| {
        let i = i as f64;
        match spec.kind {
            WindowKind::Rectangular => 1.0,
            WindowKind::Bartlett => 1.0 - (2.0 * i / m - 1.0).abs(),
            WindowKind::Hann => 0.5 - 0.5 * (2.0 * PI * i / m).cos(),
            WindowKind::Hamming => 0.54 - 0.46 * (2.0 * PI * i / m).cos(),
            WindowKind::Blackman => {
                0.42 - 0.5 * (2.0 * PI * i / m).cos() + 0.08 * (4.0 * PI * i / m).cos()
            }
            WindowKind::Kaiser => {
                let r = 2.0 * i / m - 1.0;
                bessel_i0(spec.beta * (1.0 - r * r).max(0.0).sqrt()) / bessel_i0(spec.beta)
            }
        }
    });
    Ok(w.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_and_shape_examples() {
        for n in [2, 7, 64] {
            let w = make_window(&WindowSpec::new(WindowKind::Hamming, n)).unwrap();
            assert!((w[0] - 0.08).abs() < 1e-12);
            assert!((w[n - 1] - 0.08).abs() < 1e-12);
        }
        let hann = make_window(&WindowSpec::new(WindowKind::Hann, 5)).unwrap();
        for (a, b) in hann.iter().zip([0.0, 0.5, 1.0, 0.5, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(make_window(&WindowSpec::new(WindowKind::Rectangular, 8)).unwrap(), vec![1.0; 8]);
        let bart = make_window(&WindowSpec::new(WindowKind::Bartlett, 5)).unwrap();
        assert_eq!(bart, vec![0.0, 0.5, 1.0, 0.5, 0.0]);
    }

    #[test]
    fn kaiser_window() {
        let rect = make_window(&WindowSpec::kaiser(9, 0.0)).unwrap();
        assert_eq!(rect, vec![1.0; 9]);
        let k = make_window(&WindowSpec::kaiser(9, 5.0)).unwrap();
        assert!((k[4] - 1.0).abs() < 1e-15);
        assert!((k[0] - k[8]).abs() < 1e-15);
        assert!((k[0] - 1.0 / bessel_i0(5.0)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_lengths() {
        for kind in WindowKind::ALL {
            assert_eq!(make_window(&WindowSpec::new(kind, 1)).unwrap(), vec![1.0]);
            assert!(make_window(&WindowSpec::new(kind, 0)).is_err());
        }
        assert!(make_window(&WindowSpec::kaiser(4, -1.0)).is_err());
    }
}

//! Jacobi elliptic functions of complex argument via descending Landen
//! transformations, in the normalized form `sn(uK, k)`, `cd(uK, k)` used for
//! elliptic filter prototypes.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

pub const LANDEN_TOL: f64 = 1e-14;

/// A modulus together with its complement and Landen sequence.
#[derive(Debug, Clone)]
pub struct Modulus {
    pub k: f64,
    pub kp: f64,
    seq: Vec<f64>,
}

impl Modulus {
    pub fn new(k: f64) -> Self {
        Self::with_complement(k, (1.0 - k * k).sqrt())
    }

    /// Builds from an accurately known complement `kp = √(1 − k²)`.
    pub fn from_complement(kp: f64) -> Self {
        Self::with_complement((1.0 - kp * kp).sqrt(), kp)
    }

    pub fn with_complement(k: f64, kp: f64) -> Self {
        let mut seq = Vec::new();
        let (mut kn, mut kpn) = (k, kp);
        while kn > LANDEN_TOL && seq.len() < 64 {
            // k_{n+1} = (1 − k'_n)/(1 + k'_n), k'_{n+1} = 2√k'_n/(1 + k'_n)
            let next = (1.0 - kpn) / (1.0 + kpn);
            kpn = 2.0 * kpn.sqrt() / (1.0 + kpn);
            kn = next;
            seq.push(kn);
        }
        Modulus { k, kp, seq }
    }

    /// Complete elliptic integral of the first kind.
    pub fn complete_integral(&self) -> f64 {
        FRAC_PI_2 * self.seq.iter().map(|v| 1.0 + v).product::<f64>()
    }

    fn ascend(&self, mut w: Complex64) -> Complex64 {
        for &v in self.seq.iter().rev() {
            w = (1.0 + v) * w / (1.0 + v * w * w);
        }
        w
    }

    /// `cd(uK, k)`.
    pub fn cde(&self, u: Complex64) -> Complex64 {
        self.ascend((u * FRAC_PI_2).cos())
    }

    /// `sn(uK, k)`.
    pub fn sne(&self, u: Complex64) -> Complex64 {
        self.ascend((u * FRAC_PI_2).sin())
    }

    /// Inverse of [`Modulus::cde`].
    pub fn acde(&self, mut w: Complex64) -> Complex64 {
        let mut prev = self.k;
        for &v in &self.seq {
            w = w / (1.0 + (1.0 - w * w * prev * prev).sqrt()) * 2.0 / (1.0 + v);
            prev = v;
        }
        w.acos() / FRAC_PI_2
    }

    /// Inverse of [`Modulus::sne`].
    pub fn asne(&self, w: Complex64) -> Complex64 {
        1.0 - self.acde(w)
    }
}

/// Solves the degree equation: the selectivity modulus `k` of an order-`n`
/// elliptic response with discrimination modulus `k1`. Returns `(k, k')`.
pub fn degree_equation(n: usize, k1: f64) -> (f64, f64) {
    let k1p = Modulus::from_complement(k1);
    let l = n / 2;
    let mut kp = k1p.k.powi(n as i32);
    for i in 1..=l {
        let u = (2 * i - 1) as f64 / n as f64;
        kp *= k1p.sne(Complex64::new(u, 0.0)).re.powi(4);
    }
    ((1.0 - kp * kp).sqrt(), kp)
}

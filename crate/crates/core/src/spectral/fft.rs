use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DspError, Result};

/// Iterative radix-2 FFT with bit-reversed input ordering.
///
/// Forward: `X[k] = Σ x[n] e^{−2πi nk/N}` (unnormalized). Inverse applies `1/N`.
pub fn fft(x: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    let mut data = x.to_vec();
    fft_in_place(&mut data, inverse)?;
    Ok(data)
}

pub fn fft_in_place(data: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = data.len();
    if !n.is_power_of_two() {
        return Err(DspError::NotPowerOfTwo(n));
    }
    if n == 1 {
        return Ok(());
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        // twiddles computed directly per index to avoid recurrence drift
        let twiddles: Vec<Complex64> =
            (0..half).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half] * twiddles[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
    Ok(())
}

/// Forward FFT of a real sequence.
pub fn fft_real(x: &[f64]) -> Result<Vec<Complex64>> {
    let mut data: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut data, false)?;
    Ok(data)
}

pub fn zero_pad<T: Clone + Default>(x: &[T], target_len: usize) -> Result<Vec<T>> {
    if target_len < x.len() {
        return Err(DspError::InvalidLength(format!(
            "target length {target_len} shorter than input {}",
            x.len()
        )));
    }
    if !target_len.is_power_of_two() {
        return Err(DspError::InvalidLength(format!("target length {target_len} is not a power of two")));
    }
    let mut out = x.to_vec();
    out.resize(target_len, T::default());
    Ok(out)
}

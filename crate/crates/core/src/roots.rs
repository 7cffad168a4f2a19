//! Polynomial roots by simultaneous Aberth–Ehrlich iteration.
//!
//! Coefficients are ordered from the highest power down, so `[1, -1.5, 0.56]`
//! is `z² − 1.5z + 0.56`. A denominator `a` of a transfer function in `z⁻¹`
//! can be passed as-is to obtain its poles.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DspError, Result};

pub const MAX_ITERATIONS: usize = 200;
/// Acceptance bound on `|p(r)| / Σ|c_k||r|^k` for every returned root.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Returns `p(z)`, `p'(z)` and the running bound `Σ|c_k||z|^(n-k)`.
fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let az = z.norm();
    let mut p = Complex64::new(c[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut bound = c[0].abs();
    for &ck in &c[1..] {
        dp = dp * z + p;
        p = p * z + ck;
        bound = bound * az + ck.abs();
    }
    (p, dp, bound)
}

/// Relative backward error of `z` as a root of `c`.
pub fn backward_error(c: &[f64], z: Complex64) -> f64 {
    let (p, _, bound) = horner(c, z);
    if bound == 0.0 {
        0.0
    } else {
        p.norm() / bound
    }
}

pub fn find_roots(poly: &[f64]) -> Result<Vec<Complex64>> {
    if poly.iter().any(|c| !c.is_finite()) {
        return Err(DspError::InvalidSpec("polynomial has non-finite coefficients".into()));
    }
    let first = poly
        .iter()
        .position(|&c| c != 0.0)
        .ok_or_else(|| DspError::InvalidSpec("polynomial is identically zero".into()))?;
    let last = poly.iter().rposition(|&c| c != 0.0).unwrap_or(first);
    let at_origin = poly.len() - 1 - last;
    let c = &poly[first..=last];

    let mut roots = aberth(c)?;
    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), at_origin));
    Ok(roots)
}

fn aberth(c: &[f64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![Complex64::new(-c[1] / c[0], 0.0)]),
        _ => {}
    }
    // The product of the root moduli is |c_n / c_0|; its n-th root puts the
    // starting circle among the roots rather than at the Cauchy bound.
    let geometric = (c[n] / c[0]).abs().powf(1.0 / n as f64);
    let cauchy = 1.0 + c[1..].iter().fold(0.0f64, |m, v| m.max(v.abs())) / c[0].abs();
    match iterate(c, geometric) {
        Ok(r) => Ok(r),
        Err(_) => iterate(c, cauchy),
    }
}

fn iterate(c: &[f64], radius: f64) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    let settle = 4.0 * (n as f64 + 1.0) * eps;

    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = horner(c, z[i]);
            if p.norm() <= settle * bound {
                done[i] = true;
                continue;
            }
            let ratio = if dp.norm() == 0.0 {
                // stationary point: nudge off it
                Complex64::new(1e-8 * (1.0 + z[i].norm()), 0.0)
            } else {
                p / dp
            };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= w;
            if w.norm() <= eps * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    polish(c, &mut z);
    let worst = z.iter().map(|&r| backward_error(c, r)).fold(0.0f64, f64::max);
    if !(worst <= RESIDUAL_TOL) {
        return Err(DspError::NoConvergence {
            iterations: MAX_ITERATIONS,
            detail: format!("degree {n}, worst relative residual {worst:e}"),
        });
    }
    Ok(pair_conjugates(z))
}

/// A few extra Aberth sweeps past the backward-error stop. The stop fires as
/// soon as a residual reaches rounding level, which can leave clustered roots
/// short of their attainable accuracy. A step is kept only if it does not
/// raise the residual.
fn polish(c: &[f64], z: &mut [Complex64]) {
    let n = z.len();
    for _ in 0..3 {
        for i in 0..n {
            let (p, dp, _) = horner(c, z[i]);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i && z[j] != z[i])
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let candidate = z[i] - ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if candidate.is_finite() && horner(c, candidate).0.norm() <= p.norm() {
                z[i] = candidate;
            }
        }
    }
}

/// Snaps the roots of a real polynomial into exact conjugate pairs; a root
/// with no plausible partner is projected onto the real axis.
fn pair_conjugates(mut remaining: Vec<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let (idx, _) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.im.abs().total_cmp(&b.1.im.abs()))
            .expect("non-empty");
        let r = remaining.swap_remove(idx);
        if r.im == 0.0 {
            out.push(r);
            continue;
        }
        let target = r.conj();
        let partner = remaining
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
            .map(|(j, s)| (j, *s));
        match partner {
            Some((j, s)) if (s - target).norm() < r.im.abs() => {
                remaining.swap_remove(j);
                let upper = if r.im > 0.0 { (r + s.conj()) * 0.5 } else { (r.conj() + s) * 0.5 };
                out.push(upper);
                out.push(upper.conj());
            }
            _ => out.push(Complex64::new(r.re, 0.0)),
        }
    }
    out
}

/// Multiplies out `gain · Π (z − r)` for a conjugate-closed root set.
pub fn expand_roots(roots: &[Complex64], gain: f64) -> Result<Vec<f64>> {
    check_conjugate_closed(roots)?;
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        coeffs.push(Complex64::new(0.0, 0.0));
        for k in (1..coeffs.len()).rev() {
            let prev = coeffs[k - 1];
            coeffs[k] -= r * prev;
        }
    }
    let scale = coeffs.iter().fold(1.0f64, |m, c| m.max(c.re.abs()));
    let residue = coeffs.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if residue >= 1e-9 * scale {
        return Err(DspError::NonConjugateRoots(format!(
            "imaginary coefficient residue {residue:e}"
        )));
    }
    Ok(coeffs.into_iter().map(|c| c.re * gain).collect())
}

fn check_conjugate_closed(roots: &[Complex64]) -> Result<()> {
    const TOL: f64 = 1e-9;
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        let r = roots[i];
        if used[i] || r.im.abs() <= TOL {
            continue;
        }
        used[i] = true;
        let target = r.conj();
        let best = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()));
        match best {
            Some(j) if (roots[j] - target).norm() <= TOL * r.norm().max(1.0) => used[j] = true,
            _ => {
                return Err(DspError::NonConjugateRoots(format!(
                    "root {r} has no conjugate partner"
                )))
            }
        }
    }
    Ok(())
}

//! Parks–McClellan equiripple design of odd-length linear-phase (type I) FIR
//! filters by Remez exchange.
//!
//! The amplitude response is `A(ω) = Σ_{k<r} c_k cos(kω)` with
//! `r = (numtaps − 1)/2 + 1`. Each iteration interpolates `A` through `r + 1`
//! trial extremal frequencies (barycentric form in `x = cos ω`) so that the
//! weighted error alternates as `±δ`, then moves the trial set to the local
//! extrema of the weighted error.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fir::FirKind;
use crate::error::{DspError, Result};
use crate::filter::TransferFunction;

pub const GRID_DENSITY: usize = 16;
pub const MAX_ITERATIONS: usize = 40;
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquirippleSpec {
    pub numtaps: usize,
    /// `(ω_lo, ω_hi)` in rad/sample, ascending and disjoint within `[0, π]`.
    pub bands: Vec<(f64, f64)>,
    pub desired: Vec<f64>,
    pub weight: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquirippleResult {
    pub tf: TransferFunction,
    /// Achieved weighted ripple.
    pub delta: f64,
    /// Final extremal frequencies (rad/sample), `r + 1` of them.
    pub extrema: Vec<f64>,
    pub iterations: usize,
}

impl EquirippleSpec {
    /// Unit-weight lowpass or highpass with the passband at gain 1.
    pub fn two_band(numtaps: usize, kind: FirKind, passband_edge: f64, stopband_edge: f64) -> Self {
        let (bands, desired) = match kind {
            FirKind::Lowpass => (vec![(0.0, passband_edge), (stopband_edge, PI)], vec![1.0, 0.0]),
            FirKind::Highpass => (vec![(0.0, stopband_edge), (passband_edge, PI)], vec![0.0, 1.0]),
        };
        EquirippleSpec { numtaps, bands, desired, weight: vec![1.0, 1.0] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DspError::InvalidSpec(m));
        if self.numtaps < 3 || self.numtaps.is_multiple_of(2) {
            return bad(format!("numtaps must be odd and >= 3, got {}", self.numtaps));
        }
        if self.bands.is_empty() {
            return bad("at least one band is required".into());
        }
        if self.desired.len() != self.bands.len() || self.weight.len() != self.bands.len() {
            return bad("desired and weight need one entry per band".into());
        }
        let mut prev_hi = f64::NEG_INFINITY;
        for &(lo, hi) in &self.bands {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= PI) {
                return bad(format!("band ({lo}, {hi}) outside [0, π] or reversed"));
            }
            if lo <= prev_hi {
                return bad("bands must be ascending and non-overlapping".into());
            }
            prev_hi = hi;
        }
        if self.desired.iter().any(|d| !d.is_finite()) {
            return bad("desired values must be finite".into());
        }
        if self.weight.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return bad("weights must be positive".into());
        }
        if self.bands.iter().map(|(lo, hi)| hi - lo).sum::<f64>() <= 0.0 {
            return bad("total band measure must be positive".into());
        }
        Ok(())
    }
}

struct Grid {
    omega: Vec<f64>,
    desired: Vec<f64>,
    weight: Vec<f64>,
    band: Vec<usize>,
}

fn dense_grid(spec: &EquirippleSpec) -> Grid {
    let step = PI / (GRID_DENSITY * spec.numtaps) as f64;
    let mut g = Grid { omega: Vec::new(), desired: Vec::new(), weight: Vec::new(), band: Vec::new() };
    for (b, &(lo, hi)) in spec.bands.iter().enumerate() {
        let points = (((hi - lo) / step).ceil() as usize + 1).max(if hi > lo { 2 } else { 1 });
        for i in 0..points {
            let w = if points == 1 { lo } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 };
            g.omega.push(w);
            g.desired.push(spec.desired[b]);
            g.weight.push(spec.weight[b]);
            g.band.push(b);
        }
    }
    g
}

/// Barycentric interpolant through `(x_i, y_i)` in `x = cos ω`.
struct Barycentric {
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let p: f64 = (0..x.len()).filter(|&j| j != i).map(|j| 2.0 * (x[i] - x[j])).product();
            1.0 / p
        })
        .collect()
}

impl Barycentric {
    fn eval(&self, xv: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.x.len() {
            let d = xv - self.x[i];
            if d == 0.0 {
                return self.y[i];
            }
            let t = self.w[i] / d;
            num += t * self.y[i];
            den += t;
        }
        num / den
    }
}

/// One exchange step's interpolation: returns δ and the amplitude interpolant.
fn solve(omega: &[f64], desired: &[f64], weight: &[f64]) -> (f64, Barycentric) {
    let x: Vec<f64> = omega.iter().map(|w| w.cos()).collect();
    let gamma = barycentric_weights(&x);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        num += gamma[i] * desired[i];
        den += sign * gamma[i] / weight[i];
    }
    let delta = num / den;
    let r = x.len() - 1;
    let xs = x[..r].to_vec();
    let ys = (0..r)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            desired[i] - sign * delta / weight[i]
        })
        .collect();
    let w = barycentric_weights(&xs);
    (delta, Barycentric { x: xs, y: ys, w })
}

#[derive(Clone, Copy)]
struct Extremum {
    omega: f64,
    error: f64,
    desired: f64,
    weight: f64,
}

/// Maximizes `|E|` by golden-section search on `[lo, hi]`.
fn refine(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = f(a).abs();
    let mut fb = f(b).abs();
    for _ in 0..48 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a).abs();
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b).abs();
        }
    }
    0.5 * (lo + hi)
}

fn find_extrema(grid: &Grid, interp: &Barycentric, r: usize) -> (Vec<Extremum>, f64) {
    let error = |i: usize, w: f64| grid.weight[i] * (grid.desired[i] - interp.eval(w.cos()));
    let e: Vec<f64> = (0..grid.omega.len()).map(|i| error(i, grid.omega[i])).collect();
    let max_err = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = e.len();
    let mut found: Vec<Extremum> = Vec::new();
    for j in 0..n {
        let left = (j > 0 && grid.band[j - 1] == grid.band[j]).then(|| e[j - 1]);
        let right = (j + 1 < n && grid.band[j + 1] == grid.band[j]).then(|| e[j + 1]);
        let is_max = e[j] > 0.0 && left.is_none_or(|l| e[j] >= l) && right.is_none_or(|r| e[j] > r);
        let is_min = e[j] < 0.0 && left.is_none_or(|l| e[j] <= l) && right.is_none_or(|r| e[j] < r);
        if !(is_max || is_min) {
            continue;
        }
        let mut omega = grid.omega[j];
        if let (Some(_), Some(_)) = (left, right) {
            let refined = refine(|w| error(j, w), grid.omega[j - 1], grid.omega[j + 1]);
            if error(j, refined).abs() > e[j].abs() {
                omega = refined;
            }
        }
        let ext = Extremum {
            omega,
            error: error(j, omega),
            desired: grid.desired[j],
            weight: grid.weight[j],
        };
        match found.last_mut() {
            Some(last) if last.error.signum() == ext.error.signum() => {
                if ext.error.abs() > last.error.abs() {
                    *last = ext;
                }
            }
            _ => found.push(ext),
        }
    }
    while found.len() > r + 1 {
        if found.len() == r + 2 {
            if found[0].error.abs() < found[found.len() - 1].error.abs() {
                found.remove(0);
            } else {
                found.pop();
            }
            continue;
        }
        let (k, _) = found
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.error.abs().total_cmp(&b.1.error.abs()))
            .expect("non-empty");
        found.remove(k);
        if k > 0 && k < found.len() && found[k - 1].error.signum() == found[k].error.signum() {
            if found[k].error.abs() > found[k - 1].error.abs() {
                found.remove(k - 1);
            } else {
                found.remove(k);
            }
        }
    }
    (found, max_err)
}

pub fn design_fir_equiripple(spec: &EquirippleSpec) -> Result<EquirippleResult> {
    spec.validate()?;
    let r = (spec.numtaps - 1) / 2 + 1;
    let grid = dense_grid(spec);
    if grid.omega.len() < r + 1 {
        return Err(DspError::InvalidSpec("bands too narrow for the requested length".into()));
    }
    let scale = spec
        .desired
        .iter()
        .zip(&spec.weight)
        .fold(0.0f64, |m, (d, w)| m.max(d.abs() * w))
        .max(f64::MIN_POSITIVE);

    let g = grid.omega.len();
    let mut omega: Vec<f64> = (0..=r).map(|i| grid.omega[i * (g - 1) / r]).collect();
    let mut desired: Vec<f64> = (0..=r).map(|i| grid.desired[i * (g - 1) / r]).collect();
    let mut weight: Vec<f64> = (0..=r).map(|i| grid.weight[i * (g - 1) / r]).collect();

    let mut prev_delta: Option<f64> = None;
    for iteration in 1..=MAX_ITERATIONS {
        let (delta, interp) = solve(&omega, &desired, &weight);
        let (next, max_err) = find_extrema(&grid, &interp, r);
        let exact = max_err <= 1e-12 * scale;
        let settled = prev_delta.is_some_and(|p| (delta.abs() - p.abs()).abs() < CONVERGENCE_TOL * delta.abs());
        if exact || settled || next.len() < r + 1 {
            if !exact && !settled && max_err > delta.abs() * (1.0 + 1e-3) {
                return Err(DspError::NoConvergence {
                    iterations: iteration,
                    detail: format!("extremal set collapsed: delta {delta:e}, max error {max_err:e}"),
                });
            }
            return Ok(EquirippleResult {
                tf: TransferFunction::fir(taps(&interp, spec.numtaps))?,
                delta: delta.abs(),
                extrema: omega,
                iterations: iteration,
            });
        }
        prev_delta = Some(delta);
        omega = next.iter().map(|e| e.omega).collect();
        desired = next.iter().map(|e| e.desired).collect();
        weight = next.iter().map(|e| e.weight).collect();
    }
    Err(DspError::NoConvergence {
        iterations: MAX_ITERATIONS,
        detail: format!("delta still moving: last {:e}", prev_delta.unwrap_or(f64::NAN)),
    })
}

/// Inverse cosine expansion: samples `A` at `2πt/N` and inverts the
/// zero-phase DFT, then re-centres for linear phase.
fn taps(interp: &Barycentric, numtaps: usize) -> Vec<f64> {
    let n = numtaps;
    let half = (n - 1) / 2;
    let amp: Vec<f64> = (0..n).map(|t| interp.eval((2.0 * PI * t as f64 / n as f64).cos())).collect();
    let mut b: Vec<f64> = (0..n)
        .map(|i| {
            let shift = i as f64 - half as f64;
            amp.iter()
                .enumerate()
                .map(|(t, a)| a * (2.0 * PI * t as f64 * shift / n as f64).cos())
                .sum::<f64>()
                / n as f64
        })
        .collect();
    for i in 0..half {
        let avg = 0.5 * (b[i] + b[n - 1 - i]);
        b[i] = avg;
        b[n - 1 - i] = avg;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_band(numtaps: usize, weight: [f64; 2]) -> EquirippleSpec {
        EquirippleSpec {
            numtaps,
            bands: vec![(0.0, 0.2 * PI), (0.3 * PI, PI)],
            desired: vec![1.0, 0.0],
            weight: weight.to_vec(),
        }
    }

    #[test]
    fn allpass_target_is_exact() {
        let res = design_fir_equiripple(&EquirippleSpec {
            numtaps: 5,
            bands: vec![(0.0, PI)],
            desired: vec![1.0],
            weight: vec![1.0],
        })
        .unwrap();
        for (v, e) in res.tf.b.iter().zip([0.0, 0.0, 1.0, 0.0, 0.0]) {
            assert!((v - e).abs() < 1e-12, "{:?}", res.tf.b);
        }
        assert!(res.delta < 1e-12);
    }

    #[test]
    fn weights_are_homogeneous() {
        let a = design_fir_equiripple(&two_band(15, [1.0, 1.0])).unwrap();
        let b = design_fir_equiripple(&two_band(15, [2.0, 2.0])).unwrap();
        for (x, y) in a.tf.b.iter().zip(&b.tf.b) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((b.delta - 2.0 * a.delta).abs() < 1e-9);
    }

    #[test]
    fn result_shape() {
        let res = design_fir_equiripple(&two_band(15, [1.0, 1.0])).unwrap();
        assert_eq!(res.tf.b.len(), 15);
        assert_eq!(res.extrema.len(), 9);
        assert!(res.iterations <= MAX_ITERATIONS);
        for i in 0..7 {
            assert!((res.tf.b[i] - res.tf.b[14 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(design_fir_equiripple(&two_band(14, [1.0, 1.0])).is_err());
        assert!(design_fir_equiripple(&two_band(15, [1.0, 0.0])).is_err());
        let overlap = EquirippleSpec { bands: vec![(0.0, 0.5), (0.4, 1.0)], ..two_band(15, [1.0, 1.0]) };
        assert!(design_fir_equiripple(&overlap).is_err());
    }
}

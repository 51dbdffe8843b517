//! Crossing-point estimation and exponential fits.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One sample of a curve indexed by code distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub distance: usize,
    pub x: f64,
    pub y: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub value: f64,
    /// Spread of the estimate under binomial resampling.
    pub std_err: f64,
    /// `(smaller L, larger L, crossing)` for every pair that crosses.
    pub pairwise: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThresholdEstimate {
    Crossing(Crossing),
    /// No pair of curves crosses inside the sampled range.
    NoCrossing,
}

impl ThresholdEstimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            ThresholdEstimate::Crossing(c) => Some(c.value),
            ThresholdEstimate::NoCrossing => None,
        }
    }
}

/// Least-squares quadratic in `x`, stored as coefficients of `1, x, x^2`.
fn fit_quadratic(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    // Centre and scale for conditioning.
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let sx = xs.iter().map(|x| (x - mx).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = (x - mx) / sx;
        let basis = [1.0, u, u * u];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
            b[i] += basis[i] * y;
        }
    }
    let c = solve3(a, b);
    // Back to the original variable.
    let (c0, c1, c2) = (c[0], c[1] / sx, c[2] / (sx * sx));
    [c0 - c1 * mx + c2 * mx * mx, c1 - 2.0 * c2 * mx, c2]
}

#[allow(clippy::needless_range_loop)]
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        if a[col][col].abs() < 1e-300 {
            continue;
        }
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        if a[row][row].abs() < 1e-300 {
            continue;
        }
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Root of `lo - hi` in `[xmin, xmax]` where the larger code goes from
/// better to worse, if any.
fn crossing_of(lo: &[f64; 3], hi: &[f64; 3], xmin: f64, xmax: f64) -> Option<f64> {
    let d = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    let scale = d.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let range = xmax - xmin;
    let mut roots = Vec::new();
    if d[2].abs() * range * range > 1e-9 * scale.max(1e-300) && d[2] != 0.0 {
        let disc = d[1] * d[1] - 4.0 * d[2] * d[0];
        if disc >= 0.0 {
            let s = disc.sqrt();
            roots.push((-d[1] - s) / (2.0 * d[2]));
            roots.push((-d[1] + s) / (2.0 * d[2]));
        }
    } else if d[1] != 0.0 {
        roots.push(-d[0] / d[1]);
    }
    let eval = |x: f64| d[0] + d[1] * x + d[2] * x * x;
    let slope = |x: f64| d[1] + 2.0 * d[2] * x;
    let tol = 1e-12 * range.max(1.0);
    roots
        .into_iter()
        .filter(|&x| x >= xmin - tol && x <= xmax + tol && slope(x) > 0.0 && eval(x).is_finite())
        .min_by(|a, b| a.total_cmp(b))
}

/// `(x, y)` samples keyed by distance.
type Curves = BTreeMap<usize, (Vec<f64>, Vec<f64>)>;

/// `(smaller L, larger L, crossing)`.
type Pairwise = Vec<(usize, usize, f64)>;

/// Grid points on each side of a sign change that enter a local fit.
const HALF_WINDOW: usize = 2;

fn value_at(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    xs.iter().position(|&v| v == x).map(|i| ys[i])
}

/// Crossing of two curves from quadratics fitted near the first place where
/// the larger code changes from better to worse on their shared grid.
fn pair_crossing(small: &(Vec<f64>, Vec<f64>), large: &(Vec<f64>, Vec<f64>)) -> Option<f64> {
    let mut grid: Vec<f64> = small.0.iter().copied().filter(|x| large.0.contains(x)).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 3 {
        return None;
    }
    let diff: Vec<f64> = grid
        .iter()
        .map(|&x| value_at(&large.0, &large.1, x).unwrap() - value_at(&small.0, &small.1, x).unwrap())
        .collect();
    let k = (0..grid.len() - 1).find(|&k| diff[k] < 0.0 && diff[k + 1] >= 0.0)?;
    let lo = k.saturating_sub(HALF_WINDOW - 1);
    let hi = (k + 1 + HALF_WINDOW).min(grid.len());
    // Keep at least three points so the quadratic is determined.
    let (lo, hi) = match hi - lo {
        n if n >= 3 => (lo, hi),
        _ if lo == 0 => (0, 3),
        _ => (grid.len() - 3, grid.len()),
    };
    let window = &grid[lo..hi];
    let fit = |c: &(Vec<f64>, Vec<f64>)| {
        let ys: Vec<f64> = window.iter().map(|&x| value_at(&c.0, &c.1, x).unwrap()).collect();
        fit_quadratic(window, &ys)
    };
    let (fs, fl) = (fit(small), fit(large));
    // Prefer the root inside the bracket, else anywhere in the window.
    crossing_of(&fs, &fl, grid[k], grid[k + 1]).or_else(|| crossing_of(&fs, &fl, window[0], window[window.len() - 1]))
}

fn point_estimate(curves: &Curves) -> Option<(f64, Pairwise)> {
    let keys: Vec<usize> = curves.keys().copied().collect();
    let mut pairwise = Vec::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            if let Some(x) = pair_crossing(&curves[&keys[i]], &curves[&keys[j]]) {
                pairwise.push((keys[i], keys[j], x));
            }
        }
    }
    if pairwise.is_empty() {
        return None;
    }
    let mean = pairwise.iter().map(|p| p.2).sum::<f64>() / pairwise.len() as f64;
    Some((mean, pairwise))
}

/// Estimates where curves for different distances cross, using quadratic
/// fits local to each pairwise crossing and the mean over pairs. Curves must
/// share their `x` grid. The uncertainty
/// comes from `bootstrap` parametric binomial resamples.
pub fn estimate_threshold(points: &[CurvePoint], bootstrap: usize, seed: u64) -> Result<ThresholdEstimate> {
    let mut curves = Curves::new();
    for p in points {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(invalid("curve points must be finite"));
        }
        let e = curves.entry(p.distance).or_default();
        e.0.push(p.x);
        e.1.push(p.y);
    }
    if curves.len() < 2 {
        return Err(invalid("need curves for at least two distances"));
    }
    if curves.values().any(|(xs, _)| xs.len() < 3) {
        return Err(invalid("need at least three points per distance"));
    }
    let Some((value, pairwise)) = point_estimate(&curves) else {
        return Ok(ThresholdEstimate::NoCrossing);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let mut resampled = Curves::new();
        for p in points {
            let y = if p.trials > 0 {
                let dist = Binomial::new(p.trials as u64, p.y.clamp(0.0, 1.0)).expect("valid binomial");
                dist.sample(&mut rng) as f64 / p.trials as f64
            } else {
                p.y
            };
            let e = resampled.entry(p.distance).or_default();
            e.0.push(p.x);
            e.1.push(y);
        }
        if let Some((v, _)) = point_estimate(&resampled) {
            samples.push(v);
        }
    }
    let std_err = if samples.len() > 1 {
        let m = samples.iter().sum::<f64>() / samples.len() as f64;
        (samples.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (samples.len() - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(ThresholdEstimate::Crossing(Crossing { value, std_err, pairwise }))
}

/// `y = alpha * exp(beta * x)` fitted by least squares on `ln y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub alpha: f64,
    pub beta: f64,
    pub beta_std_err: f64,
    pub residuals: Vec<f64>,
}

pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    if points.len() < 3 {
        return Err(invalid("need at least three points for an exponential fit"));
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite() || y <= 0.0) {
        return Err(invalid("exponential fit requires finite x and positive y"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.iter().all(|p| p.0 == points[0].0) {
        return Err(invalid("exponential fit needs at least two distinct x values"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let beta = sxy / sxx;
    let ln_alpha = my - beta * mx;
    let residuals: Vec<f64> = points.iter().map(|p| p.1.ln() - (ln_alpha + beta * p.0)).collect();
    let beta_std_err = (residuals.iter().map(|r| r * r).sum::<f64>() / (n - 2.0) / sxx).sqrt();
    Ok(ExponentialFit { alpha: ln_alpha.exp(), beta, beta_std_err, residuals })
}

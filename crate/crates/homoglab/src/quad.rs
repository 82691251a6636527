//! Quadrature building blocks shared by the independent oracles: adaptive
//! Gauss-Legendre panels, dyadic refinement toward integrable singularities,
//! and tail sums for slowly decaying / oscillatory integrands.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Deterministic for a given `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre on [a, b].
pub fn gl_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

fn gl_fixed_c<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Adaptive panel integration: compare one GL-12 panel against its two
/// halves, bisect until the discrepancy is below the local tolerance.
/// Returns the value and an error estimate (sum of accepted discrepancies).
pub fn adaptive_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let (nodes, weights) = gauss_legendre(12);
    let mut total = 0.0;
    let mut err = 0.0;
    // Work stack of (a, b, coarse value, depth).
    let coarse = gl_fixed(f, a, b, &nodes, &weights);
    let mut stack = vec![(a, b, coarse, 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_fixed(f, lo, mid, &nodes, &weights);
        let right = gl_fixed(f, mid, hi, &nodes, &weights);
        let diff = (left + right - whole).abs();
        let local_tol = tol * ((hi - lo) / (b - a)).max(1e-3);
        if diff < local_tol || depth >= 40 {
            if depth >= 40 && diff >= local_tol {
                return Err(Error::Quadrature(format!(
                    "adaptive panel [{lo:.3e},{hi:.3e}] did not converge (diff {diff:.3e})"
                )));
            }
            total += left + right;
            err += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok((total, err))
}

/// Complex-valued variant of [`adaptive_gl`].
pub fn adaptive_gl_c<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let (nodes, weights) = gauss_legendre(12);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let coarse = gl_fixed_c(f, a, b, &nodes, &weights);
    let mut stack = vec![(a, b, coarse, 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_fixed_c(f, lo, mid, &nodes, &weights);
        let right = gl_fixed_c(f, mid, hi, &nodes, &weights);
        let diff = (left + right - whole).norm();
        let local_tol = tol * ((hi - lo) / (b - a)).max(1e-3);
        if diff < local_tol || depth >= 40 {
            if depth >= 40 && diff >= local_tol {
                return Err(Error::Quadrature(format!(
                    "adaptive panel [{lo:.3e},{hi:.3e}] did not converge (diff {diff:.3e})"
                )));
            }
            total += left + right;
            err += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok((total, err))
}

/// Integrate `f` over (0, h] where `f` has an integrable power singularity at
/// zero: dyadic panels [h/2^{k+1}, h/2^k] with GL-16 each, continued until the
/// panel contributions decay geometrically below `tol`, then closed with a
/// geometric tail extrapolation from the measured ratio.
pub fn dyadic_toward_zero_c<F: Fn(f64) -> Complex64>(
    f: &F,
    h: f64,
    min_levels: usize,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let (nodes, weights) = gauss_legendre(16);
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut last = Complex64::new(0.0, 0.0);
    let mut ratio: f64 = 0.5;
    for k in 0..2000usize {
        let hi = h * 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        last = gl_fixed_c(f, lo, hi, &nodes, &weights);
        total += last;
        let mag = last.norm();
        if mag > 0.0 && prev_mag.is_finite() && prev_mag > 0.0 {
            ratio = (mag / prev_mag).min(0.999);
        }
        prev_mag = mag;
        let tail_est = mag * ratio / (1.0 - ratio);
        if k + 1 >= min_levels && tail_est < tol {
            let tail = last * ratio / (1.0 - ratio);
            return Ok((total + tail, tail_est * ratio));
        }
    }
    Err(Error::Quadrature(format!(
        "dyadic refinement toward 0 did not converge (last panel {:.3e})",
        last.norm()
    )))
}

/// Tail sum S = sum_{n >= 0} (c + n)^{-s} for s > 1, via direct summation of
/// the first terms plus Euler-Maclaurin closure. Absolute error is far below
/// 1e-12 for c >= 1, s >= 1.5.
pub fn power_tail_sum(c: f64, s: f64) -> f64 {
    let n_direct = 64usize;
    let mut acc = 0.0;
    for n in 0..n_direct {
        acc += (c + n as f64).powf(-s);
    }
    let x = c + n_direct as f64;
    // integral + half endpoint - B_2/2! f' + B_4/4! f'''
    acc += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s) - s * x.powf(-s - 1.0) / 12.0
        + s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0) / 720.0;
    acc
}

/// Phase-weighted tail sum S = sum_{n >= 0} omega^n (c + n)^{-s} with
/// omega = exp(i kappa) on the unit circle. Requires either omega == 1
/// (handled by Euler-Maclaurin) or |1 - omega| bounded away from zero
/// (direct summation with an Abel remainder bound).
pub fn phase_power_tail_sum(kappa: f64, c: f64, s: f64, tol: f64) -> Result<(Complex64, f64)> {
    let omega = Complex64::new(0.0, kappa).exp();
    let gap = (Complex64::new(1.0, 0.0) - omega).norm();
    if gap < 1e-9 {
        // kappa is an integer multiple of 2*pi: purely monotone tail.
        return Ok((Complex64::new(power_tail_sum(c, s), 0.0), 1e-14));
    }
    if gap < 1e-3 {
        return Err(Error::Quadrature(format!(
            "phase increment too close to 2*pi*Z (|1-omega| = {gap:.3e}); tail sum ill-conditioned"
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut n = 0usize;
    loop {
        acc += phase * (c + n as f64).powf(-s);
        phase *= omega;
        n += 1;
        let bound = 2.0 * (c + n as f64).powf(-s) / gap;
        if bound < tol {
            return Ok((acc, bound));
        }
        if n > 2_000_000 {
            return Err(Error::Quadrature(format!(
                "phase tail sum did not reach tol {tol:.3e} (bound {bound:.3e})"
            )));
        }
    }
}

/// Sum of an alternating-sign sequence of panel integrals, accelerated by
/// iterated averaging of partial sums (Euler transform). `panel(i)` is the
/// i-th panel integral; panels must alternate in sign asymptotically. Returns
/// the accelerated value and the difference of the last two averaging levels
/// as the error estimate.
pub fn euler_alternating<F: Fn(usize) -> f64>(panel: F, n_panels: usize) -> (f64, f64) {
    let mut row: Vec<f64> = Vec::with_capacity(n_panels);
    let mut acc = 0.0;
    for i in 0..n_panels {
        acc += panel(i);
        row.push(acc);
    }
    let mut prev_head = row[row.len() - 1];
    while row.len() > 1 {
        prev_head = row[row.len() - 1];
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let value = row[0];
    (value, (value - prev_head).abs())
}

//! Closed-form evaluation of the Lévy symbol `c0(d, alpha) |k|^alpha`, its
//! first and second derivatives, and an independent quadrature route to the
//! constant `c0`.

use crate::error::{Error, Result};
use crate::quad;

/// Problem dimensionality and kernel exponent, with the cached constant c0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolParams {
    pub d: usize,
    pub alpha: f64,
    pub c0: f64,
}

impl SymbolParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        let c0 = levy_constant(d, alpha)?;
        Ok(Self { d, alpha, c0 })
    }
}

fn check_domain(d: usize, alpha: f64) -> Result<()> {
    if d != 1 && d != 2 {
        return Err(Error::Domain(format!("unsupported dimension d = {d}")));
    }
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!(
            "alpha must lie strictly in (1,2), got {alpha}"
        )));
    }
    Ok(())
}

/// c0(d, alpha) = pi^{d/2} |Gamma(-alpha/2)| / (2^alpha Gamma((d+alpha)/2)).
pub fn levy_constant(d: usize, alpha: f64) -> Result<f64> {
    check_domain(d, alpha)?;
    let num = std::f64::consts::PI.powf(d as f64 / 2.0) * libm::tgamma(-alpha / 2.0).abs();
    let den = 2.0f64.powf(alpha) * libm::tgamma((d as f64 + alpha) / 2.0);
    Ok(num / den)
}

/// Numerical evaluation of c0 as the integral of (1 - cos z_1) / |z|^{d+alpha}
/// over R^d. The near field subtracts the cosine Taylor head to regularize the
/// |z|^{1-alpha} singularity; the far field is integrated up to a cutoff with
/// an analytic tail closure. Errors if the internal estimate exceeds `tol`
/// (relative).
pub fn levy_constant_quadrature(d: usize, alpha: f64, tol: f64) -> Result<f64> {
    check_domain(d, alpha)?;
    if tol < 1e-8 {
        return Err(Error::Domain(format!("tol must be >= 1e-8, got {tol:e}")));
    }
    match d {
        1 => levy_quad_1d(alpha, tol),
        2 => levy_quad_2d(alpha, tol),
        _ => unreachable!(),
    }
}

fn levy_quad_1d(alpha: f64, tol: f64) -> Result<f64> {
    let abs_tol = 0.1 * tol; // the integral is O(1); keep a wide margin
    // Inner part on (0, 1]: subtract z^2/2 - z^4/24 and integrate the smooth
    // remainder; the subtracted head integrates in closed form.
    let smooth = |z: f64| {
        if z < 1e-4 {
            // Next Taylor term of 1 - cos z - z^2/2 + z^4/24.
            -z.powi(6) / 720.0 * z.powf(-1.0 - alpha)
        } else {
            (1.0 - z.cos() - z * z / 2.0 + z.powi(4) / 24.0) * z.powf(-1.0 - alpha)
        }
    };
    let (inner_smooth, e1) = quad::adaptive_gl(&smooth, 0.0, 1.0, abs_tol)?;
    let inner = inner_smooth + 0.5 / (2.0 - alpha) - 1.0 / (24.0 * (4.0 - alpha));

    // Outer part on [1, R]: 1/alpha minus the oscillatory cosine integral,
    // closed beyond R by repeated integration by parts.
    let r_out = 60.0;
    let osc = |z: f64| z.cos() * z.powf(-1.0 - alpha);
    let (osc_main, e2) = quad::adaptive_gl(&osc, 1.0, r_out, abs_tol)?;
    let (osc_tail, e3) = cos_power_tail(r_out, 1.0 + alpha, 4);
    let outer = 1.0 / alpha - (osc_main + osc_tail);

    let value = 2.0 * (inner + outer);
    let est = 2.0 * (e1 + e2 + e3);
    if est > tol * value.abs() {
        return Err(Error::Quadrature(format!(
            "c0 quadrature (d=1) error estimate {est:.3e} exceeds tol"
        )));
    }
    Ok(value)
}

/// int_R^inf cos(z) z^{-s} dz by integration by parts, `depth` terms deep.
/// Returns (value, remainder bound).
fn cos_power_tail(r: f64, s: f64, depth: usize) -> (f64, f64) {
    if depth == 0 {
        return (0.0, r.powf(1.0 - s) / (s - 1.0));
    }
    let (sin_tail, bound) = sin_power_tail(r, s + 1.0, depth - 1);
    (-r.powf(-s) * r.sin() + s * sin_tail, s * bound)
}

fn sin_power_tail(r: f64, s: f64, depth: usize) -> (f64, f64) {
    if depth == 0 {
        return (0.0, r.powf(1.0 - s) / (s - 1.0));
    }
    let (cos_tail, bound) = cos_power_tail(r, s + 1.0, depth - 1);
    (r.powf(-s) * r.cos() - s * cos_tail, s * bound)
}

fn levy_quad_2d(alpha: f64, tol: f64) -> Result<f64> {
    let abs_tol = 0.1 * tol;
    let tau = 2.0 * std::f64::consts::PI;
    // Angular reduction: int (1 - cos z_1)/|z|^{2+alpha} dz
    //   = 2 pi int_0^inf (1 - J0(r)) r^{-1-alpha} dr.
    let smooth = |r: f64| {
        if r < 1e-4 {
            -r.powi(6) / 2304.0 * r.powf(-1.0 - alpha)
        } else {
            (1.0 - libm::j0(r) - r * r / 4.0 + r.powi(4) / 64.0) * r.powf(-1.0 - alpha)
        }
    };
    let (inner_smooth, e1) = quad::adaptive_gl(&smooth, 0.0, 1.0, abs_tol)?;
    let inner = inner_smooth + 0.25 / (2.0 - alpha) - 1.0 / (64.0 * (4.0 - alpha));

    let r_out = 40.0;
    let bessel = |r: f64| libm::j0(r) * r.powf(-1.0 - alpha);
    let one_minus = |r: f64| (1.0 - libm::j0(r)) * r.powf(-1.0 - alpha);
    let (mid, e2) = quad::adaptive_gl(&one_minus, 1.0, r_out, abs_tol)?;

    // Tail: int_R^inf r^{-1-alpha} dr minus the Bessel part, the latter summed
    // over the sign-alternating arcs between consecutive zeros of J0.
    let mut zeros = Vec::with_capacity(40);
    let mut guess = (r_out / std::f64::consts::PI + 0.75).ceil() * std::f64::consts::PI
        - 0.25 * std::f64::consts::PI;
    for _ in 0..40 {
        let mut z = guess;
        for _ in 0..50 {
            let step = libm::j0(z) / libm::j1(z);
            z += step;
            if step.abs() < 1e-13 {
                break;
            }
        }
        zeros.push(z);
        guess = z + std::f64::consts::PI;
    }
    let (nodes, weights) = quad::gauss_legendre(16);
    let first_panel = quad::gl_fixed(&bessel, r_out, zeros[0], &nodes, &weights);
    let (arc_sum, e3) = quad::euler_alternating(
        |i| quad::gl_fixed(&bessel, zeros[i], zeros[i + 1], &nodes, &weights),
        zeros.len() - 1,
    );
    let bessel_tail = first_panel + arc_sum;
    let tail = r_out.powf(-alpha) / alpha - bessel_tail;

    let value = tau * (inner + mid + tail);
    let est = tau * (e1 + e2 + e3);
    if est > tol * value.abs() {
        return Err(Error::Quadrature(format!(
            "c0 quadrature (d=2) error estimate {est:.3e} exceeds tol"
        )));
    }
    Ok(value)
}

fn norm(k: &[f64]) -> f64 {
    k.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Symbol value c0 |k|^alpha.
pub fn symbol(p: &SymbolParams, k: &[f64]) -> f64 {
    p.c0 * norm(k).powf(p.alpha)
}

/// Gradient c0 alpha |k|^{alpha-2} k, extended by 0 at k = 0 (valid
/// continuous extension for alpha > 1).
pub fn symbol_grad(p: &SymbolParams, k: &[f64]) -> Vec<f64> {
    let r = norm(k);
    if r == 0.0 {
        return vec![0.0; k.len()];
    }
    let scale = p.c0 * p.alpha * r.powf(p.alpha - 2.0);
    k.iter().map(|&x| scale * x).collect()
}

/// Hessian c0 alpha |k|^{alpha-2} (I + (alpha-2) k k^T / |k|^2); singular at
/// k = 0 for alpha < 2, hence a domain error there.
pub fn symbol_hess(p: &SymbolParams, k: &[f64]) -> Result<Vec<Vec<f64>>> {
    let r = norm(k);
    if r == 0.0 {
        return Err(Error::Domain(
            "symbol Hessian is singular at k = 0 for alpha < 2".into(),
        ));
    }
    let scale = p.c0 * p.alpha * r.powf(p.alpha - 2.0);
    let d = k.len();
    let mut h = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut v = if i == j { 1.0 } else { 0.0 };
            v += (p.alpha - 2.0) * k[i] * k[j] / (r * r);
            h[i][j] = scale * v;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn c0_reference_value_d1() {
        // pi^{1/2} |Gamma(-3/4)| / (2^{3/2} Gamma(5/4)) for alpha = 3/2.
        let c0 = levy_constant(1, 1.5).unwrap();
        assert_relative_eq!(c0, 3.3422, max_relative = 1e-4);
    }

    #[test]
    fn c0_blows_up_like_inverse_gap() {
        let ratio = levy_constant(1, 1.99).unwrap() / levy_constant(1, 1.999).unwrap();
        assert!((ratio - 0.1).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn c0_domain_errors() {
        assert!(levy_constant(1, 1.0).is_err());
        assert!(levy_constant(1, 2.0).is_err());
        assert!(levy_constant(3, 1.5).is_err());
    }

    #[test]
    fn c0_quadrature_matches_gamma_formula() {
        for d in [1usize, 2] {
            for alpha in [1.1, 1.5, 1.9] {
                let exact = levy_constant(d, alpha).unwrap();
                let q = levy_constant_quadrature(d, alpha, 1e-6).unwrap();
                assert_relative_eq!(q, exact, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn symbol_at_zero() {
        let p = SymbolParams::new(1, 1.5).unwrap();
        assert_eq!(symbol(&p, &[0.0]), 0.0);
        assert_eq!(symbol_grad(&p, &[0.0]), vec![0.0]);
        assert!(symbol_hess(&p, &[0.0]).is_err());
    }

    #[test]
    fn hessian_reference_value() {
        // c0 * alpha (alpha-1) (2 pi)^{alpha-2} for d = 1, alpha = 3/2.
        let p = SymbolParams::new(1, 1.5).unwrap();
        let h = symbol_hess(&p, &[2.0 * std::f64::consts::PI]).unwrap();
        let expect = p.c0 * 1.5 * 0.5 * (2.0 * std::f64::consts::PI).powf(-0.5);
        assert_relative_eq!(h[0][0], expect, max_relative = 1e-12);
        assert_relative_eq!(h[0][0], 1.0000, max_relative = 1e-3);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = SymbolParams::new(2, 1.5).unwrap();
        let k = [1.0, 0.3];
        let g = symbol_grad(&p, &k);
        let h = 1e-5;
        for j in 0..2 {
            let mut kp = k.to_vec();
            let mut km = k.to_vec();
            kp[j] += h;
            km[j] -= h;
            let fd = (symbol(&p, &kp) - symbol(&p, &km)) / (2.0 * h);
            assert_relative_eq!(g[j], fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let p = SymbolParams::new(2, 1.7).unwrap();
        let k = [0.8, -0.4];
        let hess = symbol_hess(&p, &k).unwrap();
        let h = 1e-5;
        for j in 0..2 {
            let mut kp = k.to_vec();
            let mut km = k.to_vec();
            kp[j] += h;
            km[j] -= h;
            let gp = symbol_grad(&p, &kp);
            let gm = symbol_grad(&p, &km);
            for i in 0..2 {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                assert_relative_eq!(hess[i][j], fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn rotational_invariance_d2() {
        let p = SymbolParams::new(2, 1.3).unwrap();
        let r = 2.7;
        let base = symbol(&p, &[r, 0.0]);
        for i in 0..16 {
            let th = i as f64 * 0.39269908169872414;
            let k = [r * th.cos(), r * th.sin()];
            assert_relative_eq!(symbol(&p, &k), base, max_relative = 1e-12);
        }
    }

    #[test]
    fn grad_matches_fd_over_magnitude_range() {
        let p = SymbolParams::new(1, 1.5).unwrap();
        for &k in &[0.1, 1.0, 10.0, 100.0] {
            let g = symbol_grad(&p, &[k]);
            let h = 1e-5 * k;
            let fd = (symbol(&p, &[k + h]) - symbol(&p, &[k - h])) / (2.0 * h);
            assert_relative_eq!(g[0], fd, max_relative = 1e-6);
        }
    }
}

//! Independent singular-kernel quadrature oracle for the d = 1 fiber form.
//!
//! The oracle never touches the mode-selection algebra of the closed-form
//! assembly: it integrates the jump form numerically. Writing y = x + z and
//! V_n(x) = e^{i (2 pi n + xi) x},
//!
//!   a(xi)[V_p, V_q] = 1/2 int_R dz |z|^{-1-alpha} q(z) w(z),
//!
//! where q(z) = (1 - e^{i k_p z})(1 - e^{-i k_q z}) carries the O(z^2)
//! cancellation at the diagonal and w(z) = int_0^1 mu(x, x+z)
//! e^{2 pi i (p-q) x} dx is evaluated by a periodic trapezoid rule (exact for
//! trigonometric polynomials below the Nyquist index). w is 1-periodic in z,
//! so the far field reduces to integer-window sums with power-law weights.

use crate::assembly::LatticeBasis;
use crate::coefficient::{CoefficientTable, ProblemSpec};
use crate::error::{Error, Result};
use crate::quad;
use nalgebra::DVector;
use num_complex::Complex64;

const TAU: f64 = std::f64::consts::TAU;
const TRAPEZOID_POINTS: usize = 128;
const FAR_FIELD_START: f64 = 20.0; // integer, so integer windows stay aligned

/// Quadrature result with the accumulated internal error estimate.
#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// 1 - e^{i theta} = 2 sin^2(theta/2) - 2 i sin(theta/2) cos(theta/2),
/// stable for tiny theta.
fn one_minus_exp(theta: f64) -> Complex64 {
    let s = (0.5 * theta).sin();
    let c = (0.5 * theta).cos();
    Complex64::new(2.0 * s * s, -2.0 * s * c)
}

fn check_oracle_domain(ct: &CoefficientTable, spec: &ProblemSpec) -> Result<()> {
    if spec.d != 1 || ct.dimension() != 1 {
        return Err(Error::Domain(
            "the quadrature oracle is implemented for d = 1 only".into(),
        ));
    }
    Ok(())
}

/// w(z) = (1/n) sum_j mu(x_j, x_j + z) e^{2 pi i f x_j} on the periodic grid.
fn periodic_x_average(ct: &CoefficientTable, z: f64, freq: i64) -> Result<Complex64> {
    let n = TRAPEZOID_POINTS;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let x = j as f64 / n as f64;
        let mu = ct.evaluate(&[x], &[x + z])?;
        acc += Complex64::new(0.0, TAU * freq as f64 * x).exp() * mu;
    }
    Ok(acc / n as f64)
}

/// Far-field integral int_R^inf w(z) e^{i kappa z} z^{-s} dz for 1-periodic
/// `w`, through integer windows z = R + n + t.
fn window_tail<W: Fn(f64) -> Result<Complex64>>(
    w: &W,
    kappa: f64,
    s: f64,
    r_start: f64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    let n_t = (32 + 4 * (kappa.abs().ceil() as usize)).min(256);
    let (nodes, weights) = quad::gauss_legendre(n_t);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (x, gw) in nodes.iter().zip(&weights) {
        let t = 0.5 * (x + 1.0);
        let wt = w(r_start + t)?;
        let (tail, tail_err) = quad::phase_power_tail_sum(kappa, r_start + t, s, tol)?;
        let phase = Complex64::new(0.0, kappa * (r_start + t)).exp();
        acc += wt * phase * tail * (0.5 * gw);
        err += wt.norm() * tail_err * (0.5 * gw);
    }
    Ok((acc, err))
}

/// Evaluate the fiber form entry a(xi)[V_p, V_q] by adaptive quadrature of
/// the singular kernel. d = 1 only. Errors if the internal error estimate
/// exceeds `tol` (absolute).
pub fn form_oracle_quadrature(
    ct: &CoefficientTable,
    spec: &ProblemSpec,
    xi: f64,
    p: i64,
    q: i64,
    tol: f64,
) -> Result<OracleValue> {
    check_oracle_domain(ct, spec)?;
    let alpha = spec.alpha;
    let kp = TAU * p as f64 + xi;
    let kq = TAU * q as f64 + xi;
    let freq = p - q;

    let integrand = |z: f64| -> Result<Complex64> {
        let w = periodic_x_average(ct, z, freq)?;
        let qz = one_minus_exp(kp * z) * one_minus_exp(-kq * z);
        Ok(qz * w * z.abs().powf(-1.0 - alpha))
    };

    let mut total = Complex64::new(0.0, 0.0);
    let mut est = 0.0;

    // Near field (0, 1/2] on both sides: dyadic refinement toward the
    // integrable |z|^{1-alpha} singularity.
    for sign in [1.0f64, -1.0] {
        let f = |u: f64| integrand(sign * u).expect("mu evaluation failed in near field");
        let (v, e) = quad::dyadic_toward_zero_c(&f, 0.5, 12, tol / 8.0)?;
        total += v;
        est += e;
    }

    // Mid field [1/2, R] on both sides.
    for sign in [1.0f64, -1.0] {
        let f = |u: f64| integrand(sign * u).expect("mu evaluation failed in mid field");
        let (v, e) = quad::adaptive_gl_c(&f, 0.5, FAR_FIELD_START, tol / 8.0)?;
        total += v;
        est += e;
    }

    // Far field |z| > R: expand q(z) into its four plane-wave terms; each
    // term couples the 1-periodic w with a fixed phase.
    let terms = [
        (Complex64::new(1.0, 0.0), 0.0),
        (Complex64::new(-1.0, 0.0), kp),
        (Complex64::new(-1.0, 0.0), -kq),
        (Complex64::new(1.0, 0.0), TAU * freq as f64),
    ];
    for (coef, kappa) in terms {
        // Positive side.
        let wp = |z: f64| periodic_x_average(ct, z, freq);
        let (v, e) = window_tail(&wp, kappa, 1.0 + alpha, FAR_FIELD_START, tol / 16.0)?;
        total += coef * v;
        est += e;
        // Negative side: z -> -z.
        let wm = |z: f64| periodic_x_average(ct, -z, freq);
        let (v, e) = window_tail(&wm, -kappa, 1.0 + alpha, FAR_FIELD_START, tol / 16.0)?;
        total += coef * v;
        est += e;
    }

    let value = total * 0.5;
    est *= 0.5;
    if est > tol {
        return Err(Error::Quadrature(format!(
            "form oracle error estimate {est:.3e} exceeds tol {tol:.1e}"
        )));
    }
    Ok(OracleValue {
        value,
        error_estimate: est,
    })
}

/// Pairing of the first-order kernel with a periodic function v (given by its
/// Fourier coefficients on `basis`):
///
///   1/2 int_R dy int_0^1 dx mu(x,y) (x - y) (v(x) - v(y)) / |x-y|^{1+alpha}.
///
/// Used as the independent cross-check of the corrector part of the
/// effective matrix. d = 1 only.
pub fn first_order_pairing_quadrature(
    ct: &CoefficientTable,
    spec: &ProblemSpec,
    basis: &LatticeBasis,
    v_hat: &DVector<Complex64>,
    tol: f64,
) -> Result<OracleValue> {
    check_oracle_domain(ct, spec)?;
    let alpha = spec.alpha;

    let v_at = |x: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, nvec) in basis.indices.iter().enumerate() {
            acc += v_hat[i] * Complex64::new(0.0, TAU * nvec[0] as f64 * x).exp();
        }
        acc
    };
    // G_v(z) = int_0^1 mu(x, x+z) (v(x) - v(x+z)) dx, 1-periodic in z.
    let g_v = |z: f64| -> Result<Complex64> {
        let n = TRAPEZOID_POINTS;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let x = j as f64 / n as f64;
            let mu = ct.evaluate(&[x], &[x + z])?;
            acc += (v_at(x) - v_at(x + z)) * mu;
        }
        Ok(acc / n as f64)
    };
    // x - y = -z.
    let integrand =
        |z: f64| -> Result<Complex64> { Ok(g_v(z)? * (-z) * z.abs().powf(-1.0 - alpha)) };

    let mut total = Complex64::new(0.0, 0.0);
    let mut est = 0.0;
    for sign in [1.0f64, -1.0] {
        let f = |u: f64| integrand(sign * u).expect("mu evaluation failed in near field");
        let (v, e) = quad::dyadic_toward_zero_c(&f, 0.5, 12, tol / 8.0)?;
        total += v;
        est += e;
        let (v, e) = quad::adaptive_gl_c(&f, 0.5, FAR_FIELD_START, tol / 8.0)?;
        total += v;
        est += e;
    }
    // Far field: -int_R^inf G_v(z) z^{-alpha} dz + int_R^inf G_v(-z) z^{-alpha} dz.
    for sign in [1.0f64, -1.0] {
        let w = |z: f64| g_v(sign * z);
        let (v, e) = window_tail(&w, 0.0, alpha, FAR_FIELD_START, tol / 16.0)?;
        total += v * (-sign);
        est += e;
    }

    let value = total * 0.5;
    est *= 0.5;
    if est > tol {
        return Err(Error::Quadrature(format!(
            "pairing oracle error estimate {est:.3e} exceeds tol {tol:.1e}"
        )));
    }
    Ok(OracleValue {
        value,
        error_estimate: est,
    })
}

/// Relative discrepancy with an absolute floor, used when comparing assembled
/// entries against the oracle (zero entries compare against the floor).
pub fn relative_discrepancy(closed: Complex64, oracle: Complex64, floor: f64) -> f64 {
    (closed - oracle).norm() / closed.norm().max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_fiber;
    use crate::coefficient::examples;
    use crate::symbol::SymbolParams;
    use approx::assert_relative_eq;

    fn spec_a() -> ProblemSpec {
        ProblemSpec::new(1, 1.5, 4).unwrap()
    }

    #[test]
    fn constant_coefficient_reproduces_symbol() {
        let ct = CoefficientTable::constant(1, 1.0);
        let sp = spec_a();
        let params = SymbolParams::new(1, 1.5).unwrap();
        let got = form_oracle_quadrature(&ct, &sp, 0.3, 0, 0, 1e-5).unwrap();
        let expect = params.c0 * 0.3f64.powf(1.5);
        assert_relative_eq!(got.value.re, expect, max_relative = 1e-4);
        assert!(got.value.im.abs() < 1e-6);
    }

    #[test]
    fn fixture_a_diagonal_entry_matches_assembly() {
        let ct = examples::cosine_difference();
        let sp = spec_a();
        let fm = assemble_fiber(&ct, &sp, &[0.3]).unwrap();
        let i0 = fm.basis.zero_index;
        let got = form_oracle_quadrature(&ct, &sp, 0.3, 0, 0, 1e-5).unwrap();
        let closed = fm.entries[(i0, i0)];
        assert!(
            relative_discrepancy(closed, got.value, 1e-4) <= 1e-3,
            "closed {closed}, oracle {}",
            got.value
        );
    }

    #[test]
    fn fixture_a_off_diagonal_is_zero_for_difference_kernel() {
        // The cosine difference kernel is diagonal in the plane-wave basis;
        // the oracle must confirm the vanishing off-diagonal entry.
        let ct = examples::cosine_difference();
        let sp = spec_a();
        let got = form_oracle_quadrature(&ct, &sp, 0.3, 0, 1, 1e-5).unwrap();
        assert!(got.value.norm() < 1e-4, "oracle {}", got.value);
    }

    #[test]
    fn fixture_b_entries_match_assembly_at_nonzero_xi() {
        let ct = examples::separable_cosine();
        let sp = spec_a();
        let fm = assemble_fiber(&ct, &sp, &[0.3]).unwrap();
        let i0 = fm.basis.zero_index;
        for (p, q) in [(0i64, 0i64), (0, 1), (1, 0), (-1, 1), (2, 1)] {
            let got = form_oracle_quadrature(&ct, &sp, 0.3, p, q, 1e-5).unwrap();
            let closed = fm.entries[((i0 as i64 + q) as usize, (i0 as i64 + p) as usize)];
            assert!(
                relative_discrepancy(closed, got.value, 1e-4) <= 1e-3,
                "entry ({q},{p}): closed {closed}, oracle {}",
                got.value
            );
        }
    }

    #[test]
    fn fixture_b_entries_match_assembly_at_xi_zero() {
        let ct = examples::separable_cosine();
        let sp = spec_a();
        let fm = assemble_fiber(&ct, &sp, &[0.0]).unwrap();
        let i0 = fm.basis.zero_index;
        for (p, q) in [(0i64, 0i64), (0, 1), (2, -1)] {
            let got = form_oracle_quadrature(&ct, &sp, 0.0, p, q, 1e-5).unwrap();
            let closed = fm.entries[((i0 as i64 + q) as usize, (i0 as i64 + p) as usize)];
            assert!(
                relative_discrepancy(closed, got.value, 1e-4) <= 1e-3,
                "entry ({q},{p}): closed {closed}, oracle {}",
                got.value
            );
        }
    }
}

//! Periodic jump coefficient `mu(x, y)` represented as a finite trigonometric
//! polynomial, with the symmetry bookkeeping and the derived data (effective
//! coefficient, anti-diagonal modes) used downstream.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;

const SYMMETRY_TOL: f64 = 1e-12;
const TAU: f64 = std::f64::consts::TAU;

/// Dimension, kernel exponent and Fourier truncation of a problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub d: usize,
    pub alpha: f64,
    /// Fourier basis = all multi-indices n with ||n||_inf <= m_trunc.
    pub m_trunc: usize,
}

impl ProblemSpec {
    pub fn new(d: usize, alpha: f64, m_trunc: usize) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::Config(format!("unsupported dimension d = {d}")));
        }
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::Config(format!(
                "alpha must lie strictly in (1,2), got {alpha}"
            )));
        }
        if m_trunc == 0 {
            return Err(Error::Config("truncation M must be >= 1".into()));
        }
        Ok(Self { d, alpha, m_trunc })
    }

    pub fn basis_size(&self) -> usize {
        (2 * self.m_trunc + 1).pow(self.d as u32)
    }
}

pub type ModeIndex = Vec<i64>;

/// Whether missing swap/conjugate partners are filled in on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutoComplete {
    On,
    Off,
}

/// Finite Fourier-mode table of the coefficient
/// mu(x, y) = sum over (m, l) of mu_hat[m, l] e^{2 pi i (<m,x> + <l,y>)}.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    d: usize,
    modes: BTreeMap<(ModeIndex, ModeIndex), Complex64>,
    mu_minus: f64,
    mu_plus: f64,
}

/// Per-invariant outcome of `validate`.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub swap_ok: bool,
    pub conj_ok: bool,
    pub swap_defect: f64,
    pub conj_defect: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub positive: bool,
    pub grid_points_per_axis: usize,
    pub valid: bool,
}

impl CoefficientTable {
    /// Build a table from raw records. With `AutoComplete::On` the closure of
    /// every record under swap and conjugate symmetry is inserted; conflicting
    /// amplitudes beyond 1e-12 are rejected either way.
    pub fn from_modes(
        d: usize,
        records: &[(ModeIndex, ModeIndex, Complex64)],
        auto: AutoComplete,
    ) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::Config(format!("unsupported dimension d = {d}")));
        }
        if records.is_empty() {
            return Err(Error::Config("coefficient mode list is empty".into()));
        }
        let mut modes: BTreeMap<(ModeIndex, ModeIndex), Complex64> = BTreeMap::new();
        let mut insert = |m: ModeIndex, l: ModeIndex, v: Complex64| -> Result<()> {
            if m.len() != d || l.len() != d {
                return Err(Error::Config(format!(
                    "mode index length does not match d = {d}: ({m:?}, {l:?})"
                )));
            }
            match modes.get(&(m.clone(), l.clone())) {
                Some(old) if (old - v).norm() > SYMMETRY_TOL => Err(Error::Symmetry(format!(
                    "conflicting amplitudes for mode ({m:?}, {l:?}): {old} vs {v}"
                ))),
                Some(_) => Ok(()),
                None => {
                    modes.insert((m, l), v);
                    Ok(())
                }
            }
        };
        for (m, l, v) in records {
            insert(m.clone(), l.clone(), *v)?;
            if auto == AutoComplete::On {
                let neg = |a: &ModeIndex| a.iter().map(|x| -x).collect::<ModeIndex>();
                insert(l.clone(), m.clone(), *v)?;
                insert(neg(m), neg(l), v.conj())?;
                insert(neg(l), neg(m), v.conj())?;
            }
        }
        let table = Self {
            d,
            modes,
            mu_minus: f64::NAN,
            mu_plus: f64::NAN,
        };
        table.check_symmetries()?;
        Ok(table)
    }

    /// Constant coefficient mu = value (single (0,0) mode).
    pub fn constant(d: usize, value: f64) -> Self {
        let zero = vec![0i64; d];
        let mut modes = BTreeMap::new();
        modes.insert((zero.clone(), zero), Complex64::new(value, 0.0));
        Self {
            d,
            modes,
            mu_minus: value,
            mu_plus: value,
        }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn modes(&self) -> impl Iterator<Item = (&ModeIndex, &ModeIndex, Complex64)> {
        self.modes.iter().map(|((m, l), v)| (m, l, *v))
    }

    pub fn amplitude(&self, m: &[i64], l: &[i64]) -> Complex64 {
        self.modes
            .get(&(m.to_vec(), l.to_vec()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Estimated lower bound of mu from the last validation run.
    pub fn mu_minus(&self) -> f64 {
        self.mu_minus
    }

    /// Estimated upper bound of mu from the last validation run.
    pub fn mu_plus(&self) -> f64 {
        self.mu_plus
    }

    fn check_symmetries(&self) -> Result<()> {
        let (sd, cd) = self.symmetry_defects();
        if sd > SYMMETRY_TOL {
            return Err(Error::Symmetry(format!(
                "swap symmetry violated: max |mu[m,l] - mu[l,m]| = {sd:.3e}"
            )));
        }
        if cd > SYMMETRY_TOL {
            return Err(Error::Symmetry(format!(
                "conjugate symmetry violated: max |mu[-m,-l] - conj mu[m,l]| = {cd:.3e}"
            )));
        }
        Ok(())
    }

    fn symmetry_defects(&self) -> (f64, f64) {
        let mut swap: f64 = 0.0;
        let mut conj: f64 = 0.0;
        for ((m, l), v) in &self.modes {
            let partner = self.amplitude(l, m);
            swap = swap.max((partner - v).norm());
            let neg_m: ModeIndex = m.iter().map(|x| -x).collect();
            let neg_l: ModeIndex = l.iter().map(|x| -x).collect();
            let c = self.amplitude(&neg_m, &neg_l);
            conj = conj.max((c - v.conj()).norm());
        }
        (swap, conj)
    }

    /// Evaluate mu(x, y); errors if the imaginary residue exceeds 1e-10,
    /// which signals a corrupted mode table.
    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((m, l), v) in &self.modes {
            let mut phase = 0.0;
            for j in 0..self.d {
                phase += m[j] as f64 * x[j] + l[j] as f64 * y[j];
            }
            acc += v * Complex64::new(0.0, TAU * phase).exp();
        }
        if acc.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "mu evaluation has imaginary residue {:.3e} at x={x:?}, y={y:?}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// Sample mu over the tensor grid on Omega x Omega, check the symmetry
    /// invariants and estimate mu_minus / mu_plus. The bound estimates are
    /// cached on success.
    pub fn validate(&mut self, grid_points_per_axis: usize) -> Result<ValidationReport> {
        if self.modes.is_empty() {
            return Err(Error::Config("coefficient mode list is empty".into()));
        }
        if grid_points_per_axis < 8 {
            return Err(Error::Config(format!(
                "grid_points_per_axis must be >= 8, got {grid_points_per_axis}"
            )));
        }
        let (swap_defect, conj_defect) = self.symmetry_defects();
        let swap_ok = swap_defect <= SYMMETRY_TOL;
        let conj_ok = conj_defect <= SYMMETRY_TOL;
        if !swap_ok {
            return Err(Error::Symmetry(format!(
                "swap symmetry violated: defect {swap_defect:.3e}"
            )));
        }
        if !conj_ok {
            return Err(Error::Symmetry(format!(
                "conjugate symmetry violated: defect {conj_defect:.3e}"
            )));
        }

        let g = grid_points_per_axis;
        let npts = g.pow(self.d as u32);
        let point = |flat: usize| -> Vec<f64> {
            let mut p = Vec::with_capacity(self.d);
            let mut rest = flat;
            for _ in 0..self.d {
                p.push((rest % g) as f64 / g as f64);
                rest /= g;
            }
            p
        };
        let mut mu_min = f64::INFINITY;
        let mut mu_max = f64::NEG_INFINITY;
        for ix in 0..npts {
            let x = point(ix);
            for iy in 0..npts {
                let y = point(iy);
                let v = self.evaluate(&x, &y)?;
                mu_min = mu_min.min(v);
                mu_max = mu_max.max(v);
            }
        }
        let positive = mu_min > 0.0;
        if !positive {
            return Err(Error::Domain(format!(
                "sampled minimum of mu is {mu_min:.6e} <= 0; coefficient not admissible"
            )));
        }
        self.mu_minus = mu_min;
        self.mu_plus = mu_max;
        Ok(ValidationReport {
            swap_ok,
            conj_ok,
            swap_defect,
            conj_defect,
            mu_min,
            mu_max,
            positive,
            grid_points_per_axis: g,
            valid: true,
        })
    }

    /// Effective coefficient mu0 = mu_hat[0, 0] (the mean of mu over the
    /// doubled cell). Must be real within 1e-14.
    pub fn mu_effective(&self) -> Result<f64> {
        let zero = vec![0i64; self.d];
        let v = match self.modes.get(&(zero.clone(), zero)) {
            Some(v) => *v,
            None => {
                return Err(Error::Domain(
                    "mode (0,0) absent; mu0 undefined for this table".into(),
                ))
            }
        };
        if v.im.abs() > 1e-14 {
            return Err(Error::Numerical(format!(
                "mu0 has imaginary part {:.3e}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Anti-diagonal modes {m != 0 : mu_hat[m, -m]} of the zero-average
    /// profile mu_*(z); amplitudes are real by swap + conjugate symmetry.
    pub fn mu_star_modes(&self) -> Result<BTreeMap<ModeIndex, f64>> {
        let mut out = BTreeMap::new();
        for ((m, l), v) in &self.modes {
            if m.iter().all(|&x| x == 0) {
                continue;
            }
            let is_anti = m.iter().zip(l).all(|(a, b)| *a == -*b);
            if !is_anti {
                continue;
            }
            if v.im.abs() > SYMMETRY_TOL {
                return Err(Error::Numerical(format!(
                    "anti-diagonal mode {m:?} has imaginary amplitude {:.3e}",
                    v.im
                )));
            }
            out.insert(m.clone(), v.re);
        }
        Ok(out)
    }

    /// mu_*(z) = sum over m != 0 of mu_hat[m, -m] cos(2 pi <m, z>).
    pub fn mu_star(&self, z: &[f64]) -> Result<f64> {
        let modes = self.mu_star_modes()?;
        let mut acc = 0.0;
        for (m, amp) in &modes {
            let mut phase = 0.0;
            for j in 0..self.d {
                phase += m[j] as f64 * z[j];
            }
            acc += amp * (TAU * phase).cos();
        }
        Ok(acc)
    }
}

/// Reference coefficient families used by the test-suite and the shipped
/// example configs.
pub mod examples {
    use super::*;

    /// d = 1, mu(x, y) = 1 + cos(2 pi (x - y)) / 2: a pure difference kernel.
    pub fn cosine_difference() -> CoefficientTable {
        CoefficientTable::from_modes(
            1,
            &[
                (vec![0], vec![0], Complex64::new(1.0, 0.0)),
                (vec![1], vec![-1], Complex64::new(0.25, 0.0)),
                (vec![-1], vec![1], Complex64::new(0.25, 0.0)),
            ],
            AutoComplete::Off,
        )
        .expect("valid table")
    }

    /// d = 1, mu(x, y) = 1 + 0.3 (cos 2 pi x + cos 2 pi y): separable, not a
    /// difference kernel, so the cell correctors are nontrivial.
    pub fn separable_cosine() -> CoefficientTable {
        CoefficientTable::from_modes(
            1,
            &[
                (vec![0], vec![0], Complex64::new(1.0, 0.0)),
                (vec![1], vec![0], Complex64::new(0.15, 0.0)),
                (vec![-1], vec![0], Complex64::new(0.15, 0.0)),
                (vec![0], vec![1], Complex64::new(0.15, 0.0)),
                (vec![0], vec![-1], Complex64::new(0.15, 0.0)),
            ],
            AutoComplete::Off,
        )
        .expect("valid table")
    }

    /// d = 2 analogue of `separable_cosine` along the first axis.
    pub fn separable_cosine_2d() -> CoefficientTable {
        CoefficientTable::from_modes(
            2,
            &[
                (vec![0, 0], vec![0, 0], Complex64::new(1.0, 0.0)),
                (vec![1, 0], vec![0, 0], Complex64::new(0.15, 0.0)),
            ],
            AutoComplete::On,
        )
        .expect("valid table")
    }

    /// d = 2 difference kernel 1 + (cos 2 pi (x1 - y1)) / 2.
    pub fn cosine_difference_2d() -> CoefficientTable {
        CoefficientTable::from_modes(
            2,
            &[
                (vec![0, 0], vec![0, 0], Complex64::new(1.0, 0.0)),
                (vec![1, 0], vec![-1, 0], Complex64::new(0.25, 0.0)),
            ],
            AutoComplete::On,
        )
        .expect("valid table")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_table_is_valid() {
        let mut ct = CoefficientTable::constant(1, 1.0);
        let rep = ct.validate(64).unwrap();
        assert!(rep.valid);
        assert_relative_eq!(rep.mu_min, 1.0);
        assert_relative_eq!(rep.mu_max, 1.0);
        assert_relative_eq!(ct.mu_effective().unwrap(), 1.0);
        assert!(ct.mu_star_modes().unwrap().is_empty());
    }

    #[test]
    fn cosine_difference_bounds() {
        let mut ct = examples::cosine_difference();
        let rep = ct.validate(256).unwrap();
        assert!(rep.valid);
        assert_relative_eq!(rep.mu_min, 0.5, max_relative = 1e-3);
        assert_relative_eq!(rep.mu_max, 1.5, max_relative = 1e-3);
        assert_relative_eq!(ct.mu_effective().unwrap(), 1.0);
    }

    #[test]
    fn swap_violation_rejected() {
        let r = CoefficientTable::from_modes(
            1,
            &[(vec![1], vec![0], Complex64::new(0.25, 0.0))],
            AutoComplete::Off,
        );
        assert!(matches!(r, Err(Error::Symmetry(_))));
    }

    #[test]
    fn autocomplete_builds_closure() {
        let ct = CoefficientTable::from_modes(
            1,
            &[
                (vec![0], vec![0], Complex64::new(1.0, 0.0)),
                (vec![1], vec![0], Complex64::new(0.1, 0.05)),
            ],
            AutoComplete::On,
        )
        .unwrap();
        assert_eq!(ct.amplitude(&[0], &[1]), Complex64::new(0.1, 0.05));
        assert_eq!(ct.amplitude(&[-1], &[0]), Complex64::new(0.1, -0.05));
        assert_eq!(ct.amplitude(&[0], &[-1]), Complex64::new(0.1, -0.05));
    }

    #[test]
    fn autocomplete_conflict_rejected() {
        let r = CoefficientTable::from_modes(
            1,
            &[
                (vec![1], vec![0], Complex64::new(0.1, 0.0)),
                (vec![0], vec![1], Complex64::new(0.2, 0.0)),
            ],
            AutoComplete::On,
        );
        assert!(matches!(r, Err(Error::Symmetry(_))));
    }

    #[test]
    fn evaluate_mu_fixture_values() {
        let ct = examples::cosine_difference();
        assert_relative_eq!(ct.evaluate(&[0.0], &[0.0]).unwrap(), 1.5, epsilon = 1e-12);
        assert_relative_eq!(ct.evaluate(&[0.0], &[0.25]).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mu_effective_of_fixtures_is_one() {
        assert_relative_eq!(
            examples::cosine_difference().mu_effective().unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            examples::separable_cosine().mu_effective().unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn mu_star_modes_of_fixtures() {
        let a = examples::cosine_difference().mu_star_modes().unwrap();
        assert_eq!(a.len(), 2);
        assert_relative_eq!(a[&vec![1]], 0.25);
        assert_relative_eq!(a[&vec![-1]], 0.25);
        let b = examples::separable_cosine().mu_star_modes().unwrap();
        assert!(b.is_empty());
    }

    #[test]
    fn positivity_rejected_for_sign_changing_mu() {
        // 1 + 1.2 cos(2 pi (x - y)) dips below zero.
        let mut ct = CoefficientTable::from_modes(
            1,
            &[
                (vec![0], vec![0], Complex64::new(1.0, 0.0)),
                (vec![1], vec![-1], Complex64::new(0.6, 0.0)),
            ],
            AutoComplete::On,
        )
        .unwrap();
        assert!(matches!(ct.validate(128), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_star_at_zero_matches_diagonal_average() {
        // mu_*(0) = int_Omega mu(x, x) dx - mu0, checked by quadrature.
        for ct in [examples::cosine_difference(), examples::separable_cosine()] {
            let n = 4096;
            let mut acc = 0.0;
            for i in 0..n {
                let x = [i as f64 / n as f64];
                acc += ct.evaluate(&x, &x).unwrap();
            }
            let diag_avg = acc / n as f64;
            let lhs = ct.mu_star(&[0.0]).unwrap();
            let rhs = diag_avg - ct.mu_effective().unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn mu_effective_within_estimated_bounds() {
        for mut ct in [examples::cosine_difference(), examples::separable_cosine()] {
            ct.validate(256).unwrap();
            let mu0 = ct.mu_effective().unwrap();
            assert!(ct.mu_minus() <= mu0 && mu0 <= ct.mu_plus());
        }
    }

    proptest! {
        #[test]
        fn symmetry_and_periodicity_hold_for_random_tables(
            re in -0.2f64..0.2,
            im in -0.2f64..0.2,
            mx in -2i64..=2,
            lx in -2i64..=2,
            x in 0.0f64..1.0,
            y in 0.0f64..1.0,
            shift in -2i64..=2,
        ) {
            // Anti-diagonal modes force real amplitudes; keep the random
            // mode off that line so an arbitrary phase is admissible.
            prop_assume!(mx != -lx);
            let ct = CoefficientTable::from_modes(
                1,
                &[
                    (vec![0], vec![0], Complex64::new(1.0, 0.0)),
                    (vec![mx], vec![lx], Complex64::new(re, im)),
                ],
                AutoComplete::On,
            ).unwrap();
            let vxy = ct.evaluate(&[x], &[y]).unwrap();
            let vyx = ct.evaluate(&[y], &[x]).unwrap();
            prop_assert!((vxy - vyx).abs() <= 1e-12);
            let vshift = ct.evaluate(&[x], &[y + shift as f64]).unwrap();
            prop_assert!((vxy - vshift).abs() <= 1e-12);
        }
    }
}

//! Galerkin assembly of the fiber operators on the truncated Fourier lattice.
//!
//! For plane waves V_n(x) = e^{i <2 pi n + xi, x>} the sesquilinear form of
//! the fiber operator has the closed-form matrix
//!
//!   A[q,p] = (c0/2) * sum_l mu_hat[q-p-l, l] *
//!            ( |2 pi l + k_p|^a + |2 pi l - k_q|^a
//!              - |2 pi l|^a - |2 pi l + 2 pi (p-q)|^a ),
//!
//! with k_n = 2 pi n + xi. The derivation substitutes u = V_p, v = V_q into
//! the jump form, changes variables y = x + z (the x-integral over the cell
//! selects the mode m = q - p - l), and evaluates each z-integral through
//! the identity int (1 - e^{i<k,z>}) |z|^{-d-a} dz = c0 |k|^a; the divergent
//! parts cancel because the four exponential coefficients sum to zero.

use crate::coefficient::{CoefficientTable, ModeIndex, ProblemSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::symbol::SymbolParams;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::io::Write;

const TAU: f64 = std::f64::consts::TAU;
const HERMITIAN_REL_TOL: f64 = 1e-10;

/// Truncated Fourier lattice: all multi-indices with ||n||_inf <= M in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub d: usize,
    pub m_trunc: usize,
    pub indices: Vec<ModeIndex>,
    pub zero_index: usize,
}

impl LatticeBasis {
    pub fn new(spec: &ProblemSpec) -> Self {
        let m = spec.m_trunc as i64;
        let mut indices = Vec::with_capacity(spec.basis_size());
        match spec.d {
            1 => {
                for i in -m..=m {
                    indices.push(vec![i]);
                }
            }
            2 => {
                for i in -m..=m {
                    for j in -m..=m {
                        indices.push(vec![i, j]);
                    }
                }
            }
            _ => unreachable!("ProblemSpec enforces d in {{1,2}}"),
        }
        let zero_index = indices
            .iter()
            .position(|n| n.iter().all(|&x| x == 0))
            .expect("zero index present");
        Self {
            d: spec.d,
            m_trunc: spec.m_trunc,
            indices,
            zero_index,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// k_n = 2 pi n + xi for every basis index.
    pub fn kappas(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        self.indices
            .iter()
            .map(|n| {
                (0..self.d)
                    .map(|j| TAU * n[j] as f64 + xi[j])
                    .collect::<Vec<f64>>()
            })
            .collect()
    }
}

/// Dense Hermitian Galerkin matrix of a fibered operator.
#[derive(Debug, Clone)]
pub struct FiberMatrix {
    pub basis: LatticeBasis,
    pub xi: Vec<f64>,
    pub entries: DMatrix<Complex64>,
    pub hermitian_defect: f64,
}

impl FiberMatrix {
    fn checked(basis: LatticeBasis, xi: Vec<f64>, entries: DMatrix<Complex64>) -> Result<Self> {
        let defect = linalg::hermitian_defect(&entries);
        let scale = linalg::max_abs(&entries).max(f64::MIN_POSITIVE);
        if defect > HERMITIAN_REL_TOL * scale {
            return Err(Error::Numerical(format!(
                "hermitian defect {defect:.3e} exceeds {HERMITIAN_REL_TOL:.1e} * max entry {scale:.3e}"
            )));
        }
        Ok(Self {
            basis,
            xi,
            entries,
            hermitian_defect: defect,
        })
    }

    /// Eigendecomposition with the positive-semidefiniteness guard
    /// (smallest eigenvalue >= -1e-10 * largest).
    pub fn eigensystem(&self) -> Result<linalg::Eigensystem> {
        let es = linalg::eigensystem_checked(&self.entries, 1e-9)?;
        let n = es.values.len();
        let lo = es.values[0];
        let hi = es.values[n - 1];
        if lo < -1e-10 * hi.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "fiber matrix not positive semidefinite: lambda_min = {lo:.3e}, lambda_max = {hi:.3e}"
            )));
        }
        Ok(es)
    }

    /// Debug dump: header plus one line per entry "q p re im".
    pub fn dump<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "# d={} M={} xi={}",
            self.basis.d,
            self.basis.m_trunc,
            self.xi
                .iter()
                .map(|x| format!("{x:.17e}"))
                .collect::<Vec<_>>()
                .join(",")
        )?;
        for q in 0..self.entries.nrows() {
            for p in 0..self.entries.ncols() {
                let z = self.entries[(q, p)];
                writeln!(w, "{q} {p} {:.17e} {:.17e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Modes grouped by the selection sum s = m + l; assembly of the pair (q, p)
/// only sees the group s = q - p.
fn modes_by_sum(ct: &CoefficientTable) -> BTreeMap<ModeIndex, Vec<(ModeIndex, Complex64)>> {
    let mut by_sum: BTreeMap<ModeIndex, Vec<(ModeIndex, Complex64)>> = BTreeMap::new();
    for (m, l, amp) in ct.modes() {
        let s: ModeIndex = m.iter().zip(l).map(|(a, b)| a + b).collect();
        by_sum.entry(s).or_default().push((l.clone(), amp));
    }
    by_sum
}

fn check_xi(spec: &ProblemSpec, xi: &[f64]) -> Result<()> {
    if xi.len() != spec.d {
        return Err(Error::Domain(format!(
            "quasimomentum has length {} but d = {}",
            xi.len(),
            spec.d
        )));
    }
    if xi.iter().any(|x| !(-std::f64::consts::PI..std::f64::consts::PI).contains(x)) {
        return Err(Error::Domain(format!(
            "quasimomentum {xi:?} outside [-pi, pi)^d"
        )));
    }
    Ok(())
}

/// Assemble the fiber matrix A(xi) of the jump form for the coefficient `ct`.
pub fn assemble_fiber(
    ct: &CoefficientTable,
    spec: &ProblemSpec,
    xi: &[f64],
) -> Result<FiberMatrix> {
    if ct.dimension() != spec.d {
        return Err(Error::Config(format!(
            "coefficient dimension {} does not match spec d = {}",
            ct.dimension(),
            spec.d
        )));
    }
    check_xi(spec, xi)?;
    let params = SymbolParams::new(spec.d, spec.alpha)?;
    let basis = LatticeBasis::new(spec);
    let kappas = basis.kappas(xi);
    let by_sum = modes_by_sum(ct);
    let n = basis.len();
    let half_c0 = 0.5 * params.c0;
    let alpha = spec.alpha;
    let d = spec.d;

    let pw = |v: &[f64]| norm(v).powf(alpha);
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    let mut kv = vec![0.0; d];
    for q in 0..n {
        for p in 0..n {
            let s: ModeIndex = (0..d)
                .map(|j| basis.indices[q][j] - basis.indices[p][j])
                .collect();
            let Some(group) = by_sum.get(&s) else {
                continue;
            };
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, amp) in group {
                // |2 pi l + k_p|^a
                for j in 0..d {
                    kv[j] = TAU * l[j] as f64 + kappas[p][j];
                }
                let t1 = pw(&kv);
                // |2 pi l - k_q|^a
                for j in 0..d {
                    kv[j] = TAU * l[j] as f64 - kappas[q][j];
                }
                let t2 = pw(&kv);
                // |2 pi l|^a
                for j in 0..d {
                    kv[j] = TAU * l[j] as f64;
                }
                let t3 = pw(&kv);
                // |2 pi (l + p - q)|^a
                for j in 0..d {
                    kv[j] = TAU * (l[j] + basis.indices[p][j] - basis.indices[q][j]) as f64;
                }
                let t4 = pw(&kv);
                acc += amp * (t1 + t2 - t3 - t4);
            }
            entries[(q, p)] = acc * half_c0;
        }
    }
    FiberMatrix::checked(basis, xi.to_vec(), entries)
}

/// Effective fiber A0(xi) for the constant coefficient mu0: assembled through
/// the same code path as `assemble_fiber`, which makes the consistency with
/// the constant-coefficient table exact; the result is diagonal with entries
/// mu0 c0 |2 pi n + xi|^alpha.
pub fn assemble_effective_fiber(mu0: f64, spec: &ProblemSpec, xi: &[f64]) -> Result<FiberMatrix> {
    if mu0 <= 0.0 {
        return Err(Error::Domain(format!("mu0 must be positive, got {mu0}")));
    }
    assemble_fiber(&CoefficientTable::constant(spec.d, mu0), spec, xi)
}

/// Diagonal of the effective fiber, bit-identical to the diagonal of
/// `assemble_effective_fiber` but O(n); used in the resolvent sweeps.
pub fn effective_symbol_diagonal(mu0: f64, spec: &ProblemSpec, xi: &[f64]) -> Result<Vec<f64>> {
    check_xi(spec, xi)?;
    let params = SymbolParams::new(spec.d, spec.alpha)?;
    let basis = LatticeBasis::new(spec);
    let half_c0 = 0.5 * params.c0;
    Ok(basis
        .kappas(xi)
        .iter()
        .map(|k| {
            let t = norm(k).powf(spec.alpha);
            mu0 * (t + t) * half_c0
        })
        .collect())
}

/// First-order matrices A^{(j)}: the xi-gradient of the assembly at xi = 0,
/// with the |0|^{alpha-2} * 0 := 0 convention. The |xi|^alpha-type
/// non-smooth contributions belong to the remainder, not to this linear term.
pub fn assemble_first_order(
    ct: &CoefficientTable,
    spec: &ProblemSpec,
    axis: usize,
) -> Result<FiberMatrix> {
    if ct.dimension() != spec.d {
        return Err(Error::Config(format!(
            "coefficient dimension {} does not match spec d = {}",
            ct.dimension(),
            spec.d
        )));
    }
    if axis >= spec.d {
        return Err(Error::Domain(format!(
            "axis {axis} out of range for d = {}",
            spec.d
        )));
    }
    let params = SymbolParams::new(spec.d, spec.alpha)?;
    let basis = LatticeBasis::new(spec);
    let by_sum = modes_by_sum(ct);
    let n = basis.len();
    let d = spec.d;
    let half = 0.5 * params.c0 * spec.alpha;

    // g_j(n) = |2 pi n|^{alpha-2} (2 pi n_j), zero at n = 0.
    let grad_j = |nvec: &[i64]| -> f64 {
        let k: Vec<f64> = nvec.iter().map(|&x| TAU * x as f64).collect();
        let r = norm(&k);
        if r == 0.0 {
            0.0
        } else {
            r.powf(spec.alpha - 2.0) * k[axis]
        }
    };

    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for q in 0..n {
        for p in 0..n {
            let s: ModeIndex = (0..d)
                .map(|j| basis.indices[q][j] - basis.indices[p][j])
                .collect();
            let Some(group) = by_sum.get(&s) else {
                continue;
            };
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, amp) in group {
                let lp: Vec<i64> = (0..d).map(|j| l[j] + basis.indices[p][j]).collect();
                let lq: Vec<i64> = (0..d).map(|j| l[j] - basis.indices[q][j]).collect();
                acc += amp * (grad_j(&lp) - grad_j(&lq));
            }
            entries[(q, p)] = acc * half;
        }
    }
    FiberMatrix::checked(basis, vec![0.0; d], entries)
}

//! Hilbert-space structure of `T = M_w E M_u` on `L²(μ)`: polar
//! decomposition, spectrum, spectral radius, normality and hyponormality.
//!
//! Every closed-form statement here has a dense-matrix counterpart computed
//! in the orthonormal basis `χ_a/√μ_a`, so the two can be compared.

use std::collections::BTreeSet;

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::expect::{block_averages, block_averages_real};
use crate::measure::MeasFn;
use crate::operator::{symbol_blocks, to_matrix, WctOperator};
use crate::C64;

/// Block values above this count as nonzero when forming `S` and `S ∩ G`.
pub const SUPPORT_THRESHOLD: f64 = 1e-14;

/// `T = U|T|` with `|T| = M_{u'} E M_u` and `U = M_{w'} E M_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarPair {
    pub modulus: WctOperator,
    pub isometry_part: WctOperator,
    /// `S = S(E(|u|²))`.
    pub support_s: BTreeSet<usize>,
    /// `G = S(E(|w|²))`.
    pub support_g: BTreeSet<usize>,
}

impl PolarPair {
    pub fn u_prime(&self) -> &MeasFn {
        self.modulus.w()
    }

    pub fn w_prime(&self) -> &MeasFn {
        self.isometry_part.w()
    }
}

/// Builds `|T|` and `U` from the closed forms
///
/// ```text
/// u' = (E|w|² / E|u|²)^{1/2} · conj(u) · χ_S
/// w' = w / (E|w|² · E|u|²)^{1/2} · χ_{S∩G}
/// ```
///
/// Divisions are only evaluated on `S` (resp. `S ∩ G`); elsewhere the
/// result is exactly zero.
pub fn polar_decompose(t: &WctOperator) -> Result<PolarPair> {
    t.require_hilbert()?;
    let part = t.partition();
    let space = t.space();
    let eu = block_averages_real(&t.u().abs_pow(2.0).re(), part, space);
    let ew = block_averages_real(&t.w().abs_pow(2.0).re(), part, space);
    let in_s = |b: usize| eu[b] > SUPPORT_THRESHOLD;
    let in_g = |b: usize| ew[b] > SUPPORT_THRESHOLD;
    let zero = C64::new(0.0, 0.0);
    let u_prime = MeasFn::from_fn(t.dim(), |a| {
        let b = part.block_of(a);
        if in_s(b) {
            t.u().get(a).conj() * (ew[b] / eu[b]).sqrt()
        } else {
            zero
        }
    });
    let w_prime = MeasFn::from_fn(t.dim(), |a| {
        let b = part.block_of(a);
        if in_s(b) && in_g(b) {
            t.w().get(a) / (ew[b] * eu[b]).sqrt()
        } else {
            zero
        }
    });
    let atoms_where = |pred: &dyn Fn(usize) -> bool| (0..t.dim()).filter(|&a| pred(part.block_of(a))).collect();
    Ok(PolarPair {
        modulus: WctOperator::new(t.u().clone(), u_prime, part.clone(), space.clone(), 2.0)?,
        isometry_part: WctOperator::new(t.u().clone(), w_prime, part.clone(), space.clone(), 2.0)?,
        support_s: atoms_where(&in_s),
        support_g: atoms_where(&in_g),
    })
}

/// Hilbert–Schmidt residuals of the polar identities, plus the
/// eigendecomposition oracle for `|T|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarResiduals {
    /// `‖U|T| − T‖`.
    pub factorization: f64,
    /// `‖|T|² − T*T‖`.
    pub square: f64,
    /// `‖UU*U − U‖`.
    pub partial_isometry: f64,
    /// `‖|T| − sqrt(T*T)‖` with the root from a Hermitian eigendecomposition.
    pub modulus_oracle: f64,
    /// Smallest eigenvalue of `|T|` (should be ≥ 0).
    pub modulus_min_eigenvalue: f64,
    /// `‖|T| − |T|*‖`.
    pub modulus_hermitian: f64,
    pub t_norm: f64,
    pub tt_norm: f64,
}

pub fn polar_residuals(t: &WctOperator, pair: &PolarPair) -> Result<PolarResiduals> {
    let s = to_matrix(t)?.symmetrized();
    let m = to_matrix(&pair.modulus)?.symmetrized();
    let u = to_matrix(&pair.isometry_part)?.symmetrized();
    let tt = s.adjoint() * &s;
    let f = dense::frobenius;
    Ok(PolarResiduals {
        factorization: f(&(&u * &m - &s)),
        square: f(&(&m * &m - &tt)),
        partial_isometry: f(&(&u * u.adjoint() * &u - &u)),
        modulus_oracle: f(&(&m - dense::modulus(&s))),
        modulus_min_eigenvalue: dense::min_eigenvalue_hermitian(&m),
        modulus_hermitian: f(&(&m - m.adjoint())),
        t_norm: f(&s),
        tt_norm: f(&tt),
    })
}

/// Closed-form spectrum next to the dense eigenvalue oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Distinct block values of `E(uw)`, merged within `tol`.
    pub predicted: Vec<C64>,
    pub zero_in_spectrum: bool,
    /// Eigenvalues of the dense matrix, sorted by real then imaginary part.
    pub oracle_eigenvalues: Vec<C64>,
    /// Largest `|λ|` over the oracle eigenvalues.
    pub radius: f64,
    pub tol: f64,
}

impl SpectrumReport {
    /// Nonzero parts of both sides coincide as sets within `tol`: each
    /// nonzero value on one side lies within `tol` of the other side's
    /// values or of zero.
    pub fn nonzero_sets_match(&self, tol: f64) -> bool {
        let near = |z: C64, set: &[C64]| z.norm() <= tol || set.iter().any(|&x| (x - z).norm() <= tol);
        self.predicted.iter().all(|&z| near(z, &self.oracle_eigenvalues))
            && self.oracle_eigenvalues.iter().all(|&z| near(z, &self.predicted))
    }

    pub fn nonzero_predicted(&self, tol: f64) -> Vec<C64> {
        self.predicted.iter().copied().filter(|z| z.norm() > tol).collect()
    }
}

fn sort_complex(values: &mut [C64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Merges values closer than `tol` (single-linkage on the sorted list).
fn dedup_within(mut values: Vec<C64>, tol: f64) -> Vec<C64> {
    sort_complex(&mut values);
    let mut out: Vec<C64> = Vec::new();
    for z in values {
        if !out.iter().any(|x| (x - z).norm() <= tol) {
            out.push(z);
        }
    }
    out
}

pub fn spectrum(t: &WctOperator, tol: f64) -> Result<SpectrumReport> {
    t.require_hilbert()?;
    let predicted = dedup_within(symbol_blocks(t)?, tol);
    let s = to_matrix(t)?.symmetrized();
    let mut eigs = dense::eigenvalues(&s);
    sort_complex(&mut eigs);
    let radius = eigs.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    let zero_in_spectrum = !t.partition().is_discrete() || dense::smallest_singular_value(&s) < tol;
    Ok(SpectrumReport {
        predicted,
        zero_in_spectrum,
        oracle_eigenvalues: eigs,
        radius,
        tol,
    })
}

/// `‖E(uw)‖_∞`.
pub fn spectral_radius(t: &WctOperator) -> Result<f64> {
    t.require_hilbert()?;
    Ok(symbol_blocks(t)?.iter().fold(0.0, |m: f64, z| m.max(z.norm())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityReport {
    /// `u·E(|w|²)^{1/2} = conj(w)·E(|u|²)^{1/2}` within `tol` (sup norm).
    pub sufficient_holds: bool,
    /// `‖[T*, T]‖_HS < tol·‖T‖_HS`.
    pub matrix_normal: bool,
    /// `|E(u)|²E(|w|²) = |E(w)|²E(|u|²)` per block.
    pub necessary_identity_holds: bool,
    pub sufficient_residual: f64,
    pub commutator_norm: f64,
    pub necessary_residual: f64,
}

/// `(u·E(|w|²)^{1/2}, conj(w)·E(|u|²)^{1/2})`.
fn normal_symbols(t: &WctOperator) -> (MeasFn, MeasFn) {
    let part = t.partition();
    let eu = block_averages_real(&t.u().abs_pow(2.0).re(), part, t.space());
    let ew = block_averages_real(&t.w().abs_pow(2.0).re(), part, t.space());
    let x = MeasFn::from_fn(t.dim(), |a| t.u().get(a) * ew[part.block_of(a)].sqrt());
    let y = MeasFn::from_fn(t.dim(), |a| t.w().get(a).conj() * eu[part.block_of(a)].sqrt());
    (x, y)
}

/// Per block `E(|w|²)|E(u)|² − E(|u|²)|E(w)|²`.
fn normality_gap(t: &WctOperator) -> Result<Vec<f64>> {
    let part = t.partition();
    let space = t.space();
    let eu2 = block_averages_real(&t.u().abs_pow(2.0).re(), part, space);
    let ew2 = block_averages_real(&t.w().abs_pow(2.0).re(), part, space);
    let eu = block_averages(t.u(), part, space)?;
    let ew = block_averages(t.w(), part, space)?;
    Ok((0..part.n_blocks())
        .map(|b| ew2[b] * eu[b].norm_sqr() - eu2[b] * ew[b].norm_sqr())
        .collect())
}

fn self_commutator(s: &CMatrix) -> CMatrix {
    s.adjoint() * s - s * s.adjoint()
}

pub fn normality_test(t: &WctOperator, tol: f64) -> Result<NormalityReport> {
    t.require_hilbert()?;
    let (x, y) = normal_symbols(t);
    let sufficient_residual = (&x - &y).sup_norm();
    let s = to_matrix(t)?.symmetrized();
    let s_norm = dense::frobenius(&s);
    let commutator_norm = dense::frobenius(&self_commutator(&s));
    let necessary_residual = normality_gap(t)?.iter().fold(0.0, |m: f64, g| m.max(g.abs()));
    // The block gap is a Rayleigh quotient of the commutator, so it is
    // bounded by ‖[T*,T]‖ < tol‖T‖ ≤ tol(1 + ‖T‖²).
    let necessary_tol = tol * (1.0 + s_norm * s_norm) + 1e-12 * (1.0 + s_norm * s_norm);
    Ok(NormalityReport {
        sufficient_holds: sufficient_residual < tol,
        matrix_normal: commutator_norm <= tol * s_norm,
        necessary_identity_holds: necessary_residual <= necessary_tol,
        sufficient_residual,
        commutator_norm,
        necessary_residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyponormalityReport {
    /// Pointwise `u·E(|w|²)^{1/2} ≥ w·E(|u|²)^{1/2}`; `None` for complex data.
    pub sufficient_holds: Option<bool>,
    /// `T*T − TT* ≥ −tol` as a form.
    pub form_nonneg: bool,
    /// `E(|w|²)|E(u)|² ≥ E(|u|²)|E(w)|²` per block.
    pub necessary_inequality_holds: bool,
    pub min_form_eigenvalue: f64,
    pub min_necessary_gap: f64,
}

/// The pointwise order condition `u·E(|w|²)^{1/2} ≥ w·E(|u|²)^{1/2}`, only
/// meaningful for real `u`, `w`.
///
/// This condition does not by itself imply hyponormality when a block
/// carries more than one atom: on one block with weights `(½, ½)`,
/// `u = (2, 0)`, `w = (1, −1)` satisfies it while `⟨[T*,T]f, f⟩ < 0` for
/// `f = (1, −1)`. It is reported, never used to conclude anything.
pub fn hyponormal_sufficient(t: &WctOperator, tol: f64) -> Result<bool> {
    t.require_hilbert()?;
    if !(t.u().is_real(0.0) && t.w().is_real(0.0)) {
        return Err(Error::NonRealComparison);
    }
    let (x, y) = normal_symbols(t);
    Ok(x.values().iter().zip(y.values()).all(|(a, b)| a.re >= b.re - tol))
}

pub fn hyponormality_test(t: &WctOperator, tol: f64) -> Result<HyponormalityReport> {
    t.require_hilbert()?;
    let sufficient_holds = match hyponormal_sufficient(t, tol) {
        Ok(v) => Some(v),
        Err(Error::NonRealComparison) => None,
        Err(e) => return Err(e),
    };
    let s = to_matrix(t)?.symmetrized();
    let s_norm = dense::frobenius(&s);
    let min_form_eigenvalue = dense::min_eigenvalue_hermitian(&self_commutator(&s));
    let min_necessary_gap = normality_gap(t)?.into_iter().fold(f64::INFINITY, f64::min);
    Ok(HyponormalityReport {
        sufficient_holds,
        form_nonneg: min_form_eigenvalue >= -tol,
        necessary_inequality_holds: min_necessary_gap >= -tol - 1e-12 * (1.0 + s_norm * s_norm),
        min_form_eigenvalue,
        min_necessary_gap,
    })
}

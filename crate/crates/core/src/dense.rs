//! Dense complex linear algebra used as the independent oracle for the
//! closed-form operator formulas.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::C64;

pub type CMatrix = DMatrix<C64>;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// matrix. The input is Hermitized first.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = hermitize(h);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitize(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

pub fn max_eigenvalue_hermitian(h: &CMatrix) -> f64 {
    hermitize(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn min_eigenvalue_hermitian(h: &CMatrix) -> f64 {
    hermitize(h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Slightly negative eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(h: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let roots = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    ));
    &vectors * roots * vectors.adjoint()
}

/// `|S| = (S*S)^{1/2}` from the eigenvectors `v_i` of `S*S`, with the
/// roots taken as `‖S v_i‖` rather than `λ_i^{1/2}`. Null directions then
/// come out at rounding level instead of `ε^{1/2}`.
pub fn modulus(s: &CMatrix) -> CMatrix {
    let (_, vectors) = hermitian_eigen(&(s.adjoint() * s));
    let sv = s * &vectors;
    let roots = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vectors.ncols(),
        sv.column_iter().map(|c| C64::new(c.norm(), 0.0)),
    ));
    &vectors * roots * vectors.adjoint()
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    m.clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form is always triangular")
        .iter()
        .copied()
        .collect()
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(f64::INFINITY, f64::min)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

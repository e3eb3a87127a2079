//! Rayleigh differences `Delta_ij(f)`, the degree-dependent resultant
//! `res_k`, the resultant maps `phi_i(g) = Res_{x_i}(g, f)`, and the
//! Dodgson (Desnanot-Jacobi) determinant identities.

use crate::error::Error;
use crate::matrix::{Mat, PMat};
use crate::mpoly::Poly;

/// `Delta_ij(f) = d_i f * d_j f - f * d_i d_j f`.
///
/// When `f` is affine in both `x_i` and `x_j`, the result is also
/// recomputed through the slice identity
/// `f_i^j * f_j^i - f^{ij} * f_{ij}` and the two must agree.
pub fn delta(f: &Poly, i: usize, j: usize) -> Poly {
    assert_ne!(i, j, "Rayleigh difference needs distinct variables");
    let fi = f.derivative(i);
    let fj = f.derivative(j);
    let fij = fi.derivative(j);
    let d = fi.mul(&fj).sub(&f.mul(&fij));
    if f.deg(i).unwrap_or(0) <= 1 && f.deg(j).unwrap_or(0) <= 1 {
        let alt = f
            .slice(&[i], &[j])
            .mul(&f.slice(&[j], &[i]))
            .sub(&f.slice(&[], &[i, j]).mul(&f.slice(&[i, j], &[])));
        assert_eq!(d, alt, "slice identity violated (internal bug)");
    }
    d
}

/// Degree-dependent resultant
/// `res_k(g, h) = g|_{x_k=0} * d_k h - h|_{x_k=0} * d_k g`.
pub fn res_k(g: &Poly, h: &Poly, k: usize) -> Poly {
    let zero = crate::exactfield::FieldValue::zero(g.field);
    g.specialize(k, &zero)
        .mul(&h.derivative(k))
        .sub(&h.specialize(k, &zero).mul(&g.derivative(k)))
}

/// `phi_i(g) = Res_{x_i}(g, f)` for `f` of degree exactly 1 in `x_i`:
/// with `f = f_i x_i + f^i` and `g = sum_k g_k x_i^k` of degree `d`,
/// this is `sum_k g_k (-f^i)^k f_i^{d-k}`.
pub fn phi(g: &Poly, f: &Poly, i: usize) -> Result<Poly, Error> {
    if f.deg(i) != Some(1) {
        return Err(Error::Unsupported(format!(
            "resultant map needs degree exactly 1 in x{} of the base polynomial",
            i + 1
        )));
    }
    let fc = f.coeffs_in_var(i);
    let gc = g.coeffs_in_var(i);
    if gc.is_empty() {
        return Ok(Poly::zero(g.field, g.nvars));
    }
    let d = gc.len() - 1;
    let neg_f0 = fc[0].neg();
    let mut out = Poly::zero(g.field, g.nvars);
    for (k, coeff) in gc.iter().enumerate() {
        out = out.add(&coeff.mul(&neg_f0.pow(k as u32)).mul(&fc[1].pow((d - k) as u32)));
    }
    Ok(out)
}

/// For `M = diag(x) + A`: the pair of opposite off-diagonal minors
/// `(det M(i,j), det M(j,i))` (row `i`/column `j` deleted, unsigned).
/// Their product must equal `delta(det M, i, j)`; checked, a mismatch
/// is an internal error.
pub fn delta_from_minors(a: &Mat, i: usize, j: usize) -> (Poly, Poly) {
    assert_ne!(i, j);
    let m = PMat::char_matrix(a);
    let mij = m.delete(&[i], &[j]).det();
    let mji = m.delete(&[j], &[i]).det();
    let f = m.det();
    assert_eq!(
        mij.mul(&mji),
        delta(&f, i, j),
        "Desnanot-Jacobi factorization violated (internal bug)"
    );
    (mij, mji)
}

/// The Desnanot-Jacobi identity
/// `det M(i,k) det M(j,l) - det M * det M({i,j},{k,l}) = det M(i,l) det M(j,k)`
/// for rows `i < j` and columns `k < l` (unsigned deleted minors).
pub fn dodgson_holds(m: &Mat, i: usize, j: usize, k: usize, l: usize) -> bool {
    assert!(i < j && k < l);
    let d = |rows: &[usize], cols: &[usize]| m.delete(rows, cols).det();
    let lhs = d(&[i], &[k])
        .mul(&d(&[j], &[l]))
        .sub(&m.det().mul(&d(&[i, j], &[k, l])));
    let rhs = d(&[i], &[l]).mul(&d(&[j], &[k]));
    lhs == rhs
}

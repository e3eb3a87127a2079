//! An explicit family of multiaffine polynomials on an odd number of
//! variables that lie outside the image of the principal minor map
//! while every single-variable specialization lies inside it, together
//! with the closed-form specialized representations and a verification
//! report that certifies both facts exactly.

use crate::detrep::{coeff_vector, is_in_image_general_bounded, poly_to_minors};
use crate::error::Error;
use crate::exactfield::{FieldId, FieldValue};
use crate::matrix::Mat;
use crate::mpoly::{Monomial, Poly};
use crate::rayleigh::delta;
use crate::squares::Outcome;

/// `f` on `2n+1` variables:
/// `x1 * prod_{j=1..n} (x_{2j+1} x_{2j+2} + 1) + prod_{j=1..n} (x_{2j} x_{2j+1} + 1)`
/// with the index `2n+2` read as `2`.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub n: usize,
    pub f: Poly,
    /// The factorization of `Delta_12(f)`: a linear difference and the
    /// `2n-2` binomials forming an odd cycle of variable supports.
    pub delta12_factors: Vec<Poly>,
}

fn family_poly(field: FieldId, n: usize) -> Poly {
    let nv = 2 * n + 1;
    // 1-based variable accessor
    let var = |i: usize| Poly::var(field, nv, i - 1);
    let one = Poly::one(field, nv);
    let edge = |a: usize, b: usize| var(a).mul(&var(b)).add(&one);
    let mut p1 = one.clone();
    for j in 1..=n {
        let b = if 2 * j + 2 == 2 * n + 2 { 2 } else { 2 * j + 2 };
        p1 = p1.mul(&edge(2 * j + 1, b));
    }
    let mut p2 = one.clone();
    for j in 1..=n {
        p2 = p2.mul(&edge(2 * j, 2 * j + 1));
    }
    var(1).mul(&p1).add(&p2)
}

/// Build the family member with `2n+1` variables over the rationals.
pub fn family(n: usize) -> Result<FamilyInstance, Error> {
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "the family needs n >= 2 (got {n})"
        )));
    }
    let field = FieldId::Q;
    let f = family_poly(field, n);
    let nv = 2 * n + 1;
    let var = |i: usize| Poly::var(field, nv, i - 1);
    let mut factors = vec![var(3).sub(&var(2 * n + 1))];
    for i in 3..=2 * n {
        factors.push(var(i).mul(&var(i + 1)).add(&Poly::one(field, nv)));
    }
    let mut prod = Poly::one(field, nv);
    for p in &factors {
        prod = prod.mul(p);
    }
    assert_eq!(
        delta(&f, 0, 1),
        prod,
        "cached cycle factorization must reproduce Delta_12 (internal bug)"
    );
    Ok(FamilyInstance {
        n,
        f,
        delta12_factors: factors,
    })
}

/// Remove an unused variable, renumbering the later ones down by one.
fn drop_var(f: &Poly, v: usize) -> Poly {
    let mut out = Poly::zero(f.field, f.nvars - 1);
    for (m, c) in f.terms() {
        assert_eq!(m.0[v], 0, "dropped variable occurs");
        let mut e = m.0.clone();
        e.remove(v);
        out.insert_term(Monomial(e), c.clone());
    }
    out
}

/// The closed-form `2n x 2n` representation of
/// `(1/(1+t)) * f|_{x1=t}` over `diag(x2, ..., x_{2n+1})`.
pub fn lemma83_matrix(n: usize, t: &FieldValue) -> Result<Mat, Error> {
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "the family needs n >= 2 (got {n})"
        )));
    }
    let field = t.field();
    let one = FieldValue::one(field);
    let denom = one.add(t);
    if denom.is_zero() {
        return Err(Error::Unsupported(
            "the first-variable specialization has a pole at t = -1".into(),
        ));
    }
    let inv = denom.inv();
    let zero = FieldValue::zero(field);
    let sz = 2 * n;
    let mut a = Mat::zero(field, sz);
    // rows/columns indexed by the variables i, j = 2 .. 2n+1
    for i in 2..=2 * n + 1 {
        for j in 2..=2 * n + 1 {
            let v = if i == j {
                continue;
            } else if i == 2 && j == 2 * n + 1 {
                t.neg()
            } else if i % 2 == 1 && j % 2 == 0 {
                if i > j {
                    inv.clone()
                } else {
                    t.neg().mul(&inv)
                }
            } else if i % 2 == 0 && j == i + 1 {
                one.neg()
            } else if i % 2 == 0 && j + 1 == i {
                one.clone()
            } else {
                zero.clone()
            };
            a.set(i - 2, j - 2, v);
        }
    }
    Ok(a)
}

/// Entry `(i, j)` (1-based, over `1..=2n`) of the canonical matrix `B`
/// representing `(1/s) * f|_{x_{2n+1}=s}` over `diag(x1, ..., x_{2n})`.
fn canonical_b_entry(n: usize, i: usize, j: usize, s: &FieldValue) -> FieldValue {
    let field = s.field();
    let one = FieldValue::one(field);
    if i == 1 {
        if j == 1 {
            return one;
        }
        if j % 2 == 0 {
            return s.inv();
        }
    } else if i == 2 {
        if j == 1 || j == 3 {
            return one;
        }
        if j % 2 == 0 {
            return s.inv();
        }
    } else if i % 2 == 1 {
        if j == 1 {
            return s.clone();
        }
        if j % 2 == 0 && j > i {
            return one;
        }
    } else {
        if j + 1 == i {
            return one.neg();
        }
        if j == i + 1 {
            return one;
        }
        if i == 2 * n && j == 1 {
            return one.neg();
        }
    }
    FieldValue::zero(field)
}

/// The permutation of the cycle variables `{2, ..., 2n+1}` carrying `m`
/// to `2n+1` while leaving the family polynomial invariant: a rotation
/// by two positions, composed with the reflection for even `m`.
fn dihedral_to_last(n: usize, m: usize) -> Vec<usize> {
    let two_n = 2 * n;
    let rot = |j: usize, k: usize| ((j - 2 + 2 * k) % two_n) + 2;
    let refl = |j: usize| 2 * n + 3 - j;
    let m1 = if m % 2 == 0 { refl(m) } else { m };
    let k = (2 * n + 1 - m1) / 2;
    let mut pi: Vec<usize> = (0..=2 * n + 1).collect();
    for j in 2..=2 * n + 1 {
        let mut x = j;
        if m % 2 == 0 {
            x = refl(x);
        }
        pi[j] = rot(x, k);
    }
    debug_assert_eq!(pi[m], 2 * n + 1);
    pi
}

/// The closed-form `2n x 2n` representation of `(1/t) * f|_{x_m=t}`
/// over the diagonal of the remaining variables in increasing order,
/// for `2 <= m <= 2n+1`.
pub fn lemma84_matrix(n: usize, m: usize, t: &FieldValue) -> Result<Mat, Error> {
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "the family needs n >= 2 (got {n})"
        )));
    }
    if !(2..=2 * n + 1).contains(&m) {
        return Err(Error::Unsupported(format!(
            "specialized variable index must be in 2..={} (got {m})",
            2 * n + 1
        )));
    }
    if t.is_zero() {
        return Err(Error::Unsupported(
            "the specialization has a pole at t = 0".into(),
        ));
    }
    let field = t.field();
    let sz = 2 * n;
    let mut a = Mat::zero(field, sz);
    let pi = dihedral_to_last(n, m);
    debug_assert!({
        // the relabeling fixes the family polynomial
        let f = family_poly(FieldId::Q, n);
        let perm: Vec<usize> = (0..2 * n + 1).map(|i| pi[i + 1] - 1).collect();
        f.permute_vars(&perm) == f
    });
    // remaining variables in increasing order; slot u holds x_{vars[u]}
    let vars: Vec<usize> = (1..=2 * n + 1).filter(|&v| v != m).collect();
    for u in 0..sz {
        for v in 0..sz {
            if u == v {
                continue;
            }
            a.set(u, v, canonical_b_entry(n, pi[vars[u]], pi[vars[v]], t));
        }
    }
    // the canonical matrix carries two corrections on its diagonal
    for u in 0..sz {
        a.set(u, u, canonical_b_entry(n, pi[vars[u]], pi[vars[u]], t));
    }
    Ok(a)
}

#[derive(Clone, Debug)]
pub struct SpecializationCheck {
    /// 1-based index of the specialized variable.
    pub m: usize,
    /// Number of distinct specialization values verified.
    pub points: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub n: usize,
    /// True when the membership search refuted the full polynomial.
    pub nonmember: bool,
    /// The refutation certificate of the membership search.
    pub certificate: String,
    /// Display forms of the cycle factors of `Delta_12`.
    pub cycle_factors: Vec<String>,
    pub specializations: Vec<SpecializationCheck>,
}

impl FamilyReport {
    pub fn all_pass(&self) -> bool {
        self.nonmember && self.specializations.iter().all(|s| s.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let nv = 2 * self.n + 1;
        out.push_str(&format!("family member on {nv} variables\n"));
        out.push_str(&format!(
            "non-membership: {}\n",
            if self.nonmember { "REFUTED (not in the image)" } else { "FAILED" }
        ));
        out.push_str(&format!(
            "Delta_12 factor cycle ({} factors): {}\n",
            self.cycle_factors.len(),
            self.cycle_factors.join(" * ")
        ));
        out.push_str(&format!("certificate:\n{}\n", self.certificate));
        for s in &self.specializations {
            out.push_str(&format!(
                "specialization x{} = t: {} ({} points, complete by degree count)\n",
                s.m,
                if s.pass { "member" } else { "FAILED" },
                s.points
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.all_pass() { "PASS" } else { "FAIL" }
        ));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "variables": 2 * self.n + 1,
            "nonmember": self.nonmember,
            "certificate": self.certificate,
            "cycle_factors": self.cycle_factors,
            "specializations": self.specializations.iter().map(|s| serde_json::json!({
                "variable": s.m,
                "points": s.points,
                "pass": s.pass,
            })).collect::<Vec<_>>(),
            "all_pass": self.all_pass(),
        })
    }
}

/// Verify both halves of the counterexample statement for the `2n+1`
/// variable member with the default size bound (up to 9 variables).
pub fn verify_family(n: usize) -> Result<FamilyReport, Error> {
    verify_family_bounded(n, 4)
}

pub fn verify_family_bounded(n: usize, bound: usize) -> Result<FamilyReport, Error> {
    if n > bound {
        return Err(Error::BoundExceeded(format!(
            "family verification bound is n <= {bound} (got {n})"
        )));
    }
    let inst = family(n)?;
    let mv = poly_to_minors(&inst.f)?;
    let (nonmember, certificate) = match is_in_image_general_bounded(&mv, 2 * n + 1)? {
        Outcome::Refuted { condition } => (true, condition),
        Outcome::Witness(rep) => (
            false,
            format!("unexpected witness found: {}", rep.to_json()),
        ),
    };
    let cycle_factors: Vec<String> =
        inst.delta12_factors.iter().map(|p| format!("({p})")).collect();
    // One evaluation point more than the degree bound needs: each
    // coefficient identity, cleared of its declared pole, has degree at
    // most 2n+1 in t, so 2n+3 distinct points prove it.
    let points = 2 * n + 3;
    let tasks: Vec<(usize, i64)> = (1..=2 * n + 1)
        .flat_map(|m| (1..=points as i64).map(move |t| (m, t)))
        .collect();
    let f = inst.f.clone();
    let results = crate::par::map_collect(tasks, |(m, tv)| {
        let t = FieldValue::from_integer(FieldId::Q, tv);
        let check = || -> Result<bool, Error> {
            let (mat, scale) = if m == 1 {
                let denom = FieldValue::one(FieldId::Q).add(&t);
                (lemma83_matrix(n, &t)?, denom)
            } else {
                (lemma84_matrix(n, m, &t)?, t.clone())
            };
            let g = drop_var(&f.specialize(m - 1, &t).scale(&scale.inv()), m - 1);
            Ok(mat.principal_minors() == coeff_vector(&g))
        };
        (m, check().unwrap_or(false))
    });
    let specializations = (1..=2 * n + 1)
        .map(|m| SpecializationCheck {
            m,
            points,
            pass: results.iter().filter(|(rm, _)| *rm == m).all(|(_, ok)| *ok),
        })
        .collect();
    Ok(FamilyReport {
        n,
        nonmember,
        certificate,
        cycle_factors,
        specializations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detrep::charpoly;
    use crate::mpoly::parse;

    fn qv(k: i64) -> FieldValue {
        FieldValue::from_integer(FieldId::Q, k)
    }

    #[test]
    fn family_small_example() {
        let inst = family(2).unwrap();
        let e = |s: &str| parse(s, FieldId::Q, 5).unwrap();
        let want = e("x1")
            .mul(&e("x3*x4 + 1"))
            .mul(&e("x2*x5 + 1"))
            .add(&e("x2*x3 + 1").mul(&e("x4*x5 + 1")));
        assert_eq!(inst.f, want);
        assert!(family(1).is_err());
    }

    #[test]
    fn family_cycle_factorization() {
        for n in 2..=4 {
            let inst = family(n).unwrap();
            assert_eq!(inst.delta12_factors.len(), 2 * n - 1);
            // the constructor asserts the product equals Delta_12; also
            // confirm the variable supports form an odd cycle: every
            // bipartition of the factors repeats a variable on a side
            let nv = 2 * n + 1;
            let mut adjacency = vec![0usize; nv];
            for fac in &inst.delta12_factors {
                for v in 0..nv {
                    if fac.depends_on(v) {
                        adjacency[v] += 1;
                    }
                }
            }
            // cycle: every touched variable lies on exactly two factors
            assert!(adjacency.iter().all(|&d| d == 0 || d == 2));
            assert_eq!(adjacency.iter().filter(|&&d| d == 2).count(), 2 * n - 1);
        }
    }

    #[test]
    fn lemma83_specialization_identity() {
        for n in 2..=3 {
            for tv in [0i64, 1, 2, 5, -2] {
                let t = qv(tv);
                let a = lemma83_matrix(n, &t).unwrap();
                let inst = family(n).unwrap();
                let denom = qv(1).add(&t);
                let g = drop_var(&inst.f.specialize(0, &t).scale(&denom.inv()), 0);
                assert_eq!(charpoly(&a), g, "n={n}, t={tv}");
            }
        }
        assert!(lemma83_matrix(3, &qv(-1)).is_err());
    }

    #[test]
    fn lemma83_zero_specialization_splits() {
        // at t = 0 the matrix is block upper-triangular and the
        // determinant splits into the binomial blocks
        let n = 3;
        let a = lemma83_matrix(n, &qv(0)).unwrap();
        let cp = charpoly(&a);
        // variables of cp are x2..x7 renumbered 1..6
        let e = |s: &str| parse(s, FieldId::Q, 6).unwrap();
        let want = e("x1*x2 + 1")
            .mul(&e("x3*x4 + 1"))
            .mul(&e("x5*x6 + 1"));
        assert_eq!(cp, want);
    }

    #[test]
    fn lemma84_canonical_figure() {
        // the displayed 6x6 matrix for 7 variables with x7 = 1
        let t = qv(1);
        let b = lemma84_matrix(3, 7, &t).unwrap();
        let rows: Vec<Vec<i64>> = vec![
            vec![1, 1, 0, 1, 0, 1],
            vec![1, 1, 1, 1, 0, 1],
            vec![1, 0, 0, 1, 0, 1],
            vec![0, 0, -1, 0, 1, 0],
            vec![1, 0, 0, 0, 0, 1],
            vec![-1, 0, 0, 0, -1, 0],
        ];
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(*b.at(i, j), qv(rows[i][j]), "entry ({},{})", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn lemma84_specialization_identity() {
        for n in 2..=3 {
            let inst = family(n).unwrap();
            for m in 2..=2 * n + 1 {
                for tv in [1i64, 2, -1, 3] {
                    let t = qv(tv);
                    let a = lemma84_matrix(n, m, &t).unwrap();
                    let g = drop_var(&inst.f.specialize(m - 1, &t).scale(&t.inv()), m - 1);
                    assert_eq!(
                        a.principal_minors(),
                        crate::detrep::coeff_vector(&g),
                        "n={n}, m={m}, t={tv}"
                    );
                }
            }
        }
        assert!(lemma84_matrix(2, 6, &qv(1)).is_err());
        assert!(lemma84_matrix(2, 1, &qv(1)).is_err());
        assert!(lemma84_matrix(2, 3, &qv(0)).is_err());
    }

    #[test]
    fn lemma84_first_variable_coefficient() {
        // the minor dropping row/column 1 equals the derivative of the
        // specialized polynomial in the first variable
        let n = 3;
        let t = qv(2);
        let b = lemma84_matrix(n, 7, &t).unwrap();
        let inst = family(n).unwrap();
        let g = drop_var(&inst.f.specialize(6, &t).scale(&t.inv()), 6);
        let sub = b.delete(&[0], &[0]);
        let lhs = charpoly(&sub);
        let rhs = drop_var(&g.derivative(0), 0);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn verify_family_small() {
        let report = verify_family(2).unwrap();
        assert!(report.nonmember);
        assert!(report.all_pass());
        assert_eq!(report.specializations.len(), 5);
        assert_eq!(report.cycle_factors.len(), 3);
        let rendered = report.render();
        for fac in &report.cycle_factors {
            assert!(
                report.certificate.contains(fac.as_str())
                    || rendered.contains(fac.as_str()),
                "cycle factor {fac} must appear in the report"
            );
        }
        assert!(verify_family(5).is_err());
    }

    #[test]
    fn verify_family_seven_variables() {
        let report = verify_family(3).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.specializations.len(), 7);
        // the refutation certificate names the impossible bipartition
        assert!(report.certificate.contains("Delta_12"));
    }
}

//! The action of `SL2(F)^n x S_n` on degree-bounded polynomials and on
//! matrices, plus diagonal conjugation.
//!
//! For a degree bound `d_i` in each variable,
//! `gamma . f = prod_i (c_i x_i + d_i)^{d_i} * f((a_i x_i + b_i)/(c_i x_i + d_i))`,
//! computed by multihomogenizing, substituting linearly in each
//! `(x_i, y_i)` pair, and restricting `y_i := 1`.  The permutation part
//! relabels variables first, then the per-variable transforms apply.

use rand::Rng;

use crate::error::Error;
use crate::exactfield::{parse_literal, FieldId, FieldValue};
use crate::matrix::{Mat, PMat};
use crate::mpoly::Poly;

/// An element of `SL2`: `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SL2 {
    pub a: FieldValue,
    pub b: FieldValue,
    pub c: FieldValue,
    pub d: FieldValue,
}

impl SL2 {
    pub fn new(a: FieldValue, b: FieldValue, c: FieldValue, d: FieldValue) -> SL2 {
        let det = a.mul(&d).sub(&b.mul(&c));
        assert!(det.is_one(), "SL2 entry has determinant {det} != 1");
        SL2 { a, b, c, d }
    }

    pub fn identity(field: FieldId) -> SL2 {
        SL2 {
            a: FieldValue::one(field),
            b: FieldValue::zero(field),
            c: FieldValue::zero(field),
            d: FieldValue::one(field),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// `[[1, t], [0, 1]]`: the substitution `x -> x + t`.
    pub fn translation(t: FieldValue) -> SL2 {
        let field = t.field();
        SL2 {
            a: FieldValue::one(field),
            b: t,
            c: FieldValue::zero(field),
            d: FieldValue::one(field),
        }
    }

    /// `[[0, 1], [-1, 0]]`: the substitution `x -> 1/x` up to sign.
    pub fn inversion(field: FieldId) -> SL2 {
        SL2 {
            a: FieldValue::zero(field),
            b: FieldValue::one(field),
            c: FieldValue::one(field).neg(),
            d: FieldValue::zero(field),
        }
    }

    pub fn matmul(&self, other: &SL2) -> SL2 {
        SL2 {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
    }

    pub fn inverse(&self) -> SL2 {
        SL2 {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
    }

    /// Seeded random element with integer entries in `[-bound, bound]`,
    /// `a != 0`, and `d` solved from the determinant condition.
    pub fn random<R: Rng>(rng: &mut R, field: FieldId, bound: i64) -> SL2 {
        loop {
            let a = FieldValue::from_integer(field, rng.gen_range(-bound..=bound));
            if a.is_zero() {
                continue;
            }
            let b = FieldValue::from_integer(field, rng.gen_range(-bound..=bound));
            let c = FieldValue::from_integer(field, rng.gen_range(-bound..=bound));
            let d = FieldValue::one(field).add(&b.mul(&c)).div(&a);
            return SL2 { a, b, c, d };
        }
    }
}

/// An element of `SL2(F)^n x S_n`.  `perm[i]` is the new label of
/// variable `i` (0-based); the relabeling applies before the
/// per-variable transforms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupElement {
    pub gammas: Vec<SL2>,
    pub perm: Vec<usize>,
}

impl GroupElement {
    pub fn identity(field: FieldId, n: usize) -> GroupElement {
        GroupElement {
            gammas: vec![SL2::identity(field); n],
            perm: (0..n).collect(),
        }
    }

    pub fn from_gammas(gammas: Vec<SL2>) -> GroupElement {
        let n = gammas.len();
        GroupElement {
            gammas,
            perm: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.gammas.len()
    }

    fn perm_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    /// Group inverse: `act(g.inverse(), act(g, f, d), d) = f`.
    pub fn inverse(&self) -> GroupElement {
        let pinv = self.perm_inverse();
        let gammas = (0..self.n())
            .map(|j| self.gammas[self.perm[j]].inverse())
            .collect();
        GroupElement { gammas, perm: pinv }
    }

    /// Translations only (trivial permutation, upper-triangular gammas):
    /// these preserve the coefficient of the top monomial.
    pub fn is_translation(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
            && self
                .gammas
                .iter()
                .all(|g| g.a.is_one() && g.c.is_zero() && g.d.is_one())
    }
}

/// Semidirect-product composition:
/// `act_on_poly(compose(g1, g2), f, d) = act_on_poly(g1, act_on_poly(g2, f, d), d)`.
pub fn compose(g1: &GroupElement, g2: &GroupElement) -> GroupElement {
    assert_eq!(g1.n(), g2.n(), "size mismatch");
    let n = g1.n();
    let p1inv = g1.perm_inverse();
    let perm = (0..n).map(|i| g1.perm[g2.perm[i]]).collect();
    let gammas = (0..n)
        .map(|j| g2.gammas[p1inv[j]].matmul(&g1.gammas[j]))
        .collect();
    GroupElement { gammas, perm }
}

/// Replace the homogeneous pair `(x_i, y_i)` by
/// `(a x_i + b y_i, c x_i + d y_i)` in a `2n`-variable polynomial.
fn pair_linear_sub(h: &Poly, i: usize, n: usize, g: &SL2) -> Poly {
    if g.is_identity() {
        return h.clone();
    }
    let field = h.field;
    let xi = Poly::var(field, 2 * n, i);
    let yi = Poly::var(field, 2 * n, n + i);
    let new_x = xi.scale(&g.a).add(&yi.scale(&g.b));
    let new_y = xi.scale(&g.c).add(&yi.scale(&g.d));
    let mut out = Poly::zero(field, 2 * n);
    for (m, c) in h.terms() {
        let (ex, ey) = (m.0[i], m.0[n + i]);
        let mut exps = m.0.clone();
        exps[i] = 0;
        exps[n + i] = 0;
        let mut t = Poly::zero(field, 2 * n);
        t.insert_term(crate::mpoly::Monomial(exps), c.clone());
        out = out.add(&t.mul(&new_x.pow(ex)).mul(&new_y.pow(ey)));
    }
    out
}

/// Apply a group element to `f` as a polynomial of multidegree `<= d`.
pub fn act_on_poly(g: &GroupElement, f: &Poly, d: &[u32]) -> Result<Poly, Error> {
    assert_eq!(g.n(), f.nvars, "group element size mismatch");
    assert_eq!(d.len(), f.nvars);
    let n = f.nvars;
    let pf = f.permute_vars(&g.perm);
    let mut pd = vec![0u32; n];
    for i in 0..n {
        pd[g.perm[i]] = d[i];
    }
    let mut h = pf.multihomogenize(&pd)?;
    for i in 0..n {
        h = pair_linear_sub(&h, i, n, &g.gammas[i]);
    }
    Ok(h.dehomogenize_pairs())
}

/// The rational action on matrices through their characteristic
/// polynomials: returns `(beta, B)` with
/// `gamma . f_A = beta * det(diag(x) + B)`, computed by the adjugate
/// transport formula and verified by a symbolic determinant.
pub fn act_on_matrix(g: &GroupElement, a: &Mat) -> Result<(FieldValue, Mat), Error> {
    let n = a.n;
    assert_eq!(g.n(), n);
    let field = a.field;
    let cm = PMat::char_matrix(a);
    let f = cm.det();
    let gf = act_on_poly(g, &f, &vec![1; n])?;
    let beta = gf.coeff_exps(&vec![1; n]);
    if beta.is_zero() {
        return Err(Error::Unsupported(
            "action undefined at this matrix: top coefficient vanishes".into(),
        ));
    }
    if n == 1 {
        let b0 = gf.coeff_exps(&[0]).div(&beta);
        return Ok((beta.clone(), Mat::new(field, 1, vec![b0])));
    }
    // Transport the off-diagonal adjugate entries entrywise, each with
    // its own degree bound (affine in every variable except its own
    // row/column index); the diagonal of the transported matrix is the
    // derivative of the transported polynomial, as in the
    // reconstruction that proves the transport formula.
    let big_g = cm.adjugate();
    let mut entries = vec![Poly::zero(field, n); n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut d = vec![1u32; n];
            d[i] = 0;
            d[j] = 0;
            let moved = act_on_poly(g, big_g.at(i, j), &d)?;
            entries[g.perm[i] * n + g.perm[j]] = moved;
        }
    }
    for i in 0..n {
        entries[i * n + i] = gf.derivative(i);
    }
    let h = PMat::new(field, n, n, entries);
    let adj_h = h.adjugate();
    // beta*(diag(x)+B) = (gamma.f)^{2-n} * adj(H)
    let denom = gf.pow((n - 2) as u32);
    let mut b = Mat::zero(field, n);
    for i in 0..n {
        for j in 0..n {
            let e = adj_h
                .at(i, j)
                .div_exact(&denom)
                .ok_or_else(|| Error::Unsupported("adjugate transport not exact".into()))?;
            let val = if i == j {
                // entry is beta*x_i + beta*b_ii
                let coeffs = e.coeffs_in_var(i);
                if coeffs.len() != 2 || coeffs[1].constant_value() != Some(beta.clone()) {
                    return Err(Error::Unsupported(
                        "transported diagonal entry is not beta*x_i + const".into(),
                    ));
                }
                coeffs[0].constant_value().ok_or_else(|| {
                    Error::Unsupported("transported entry not constant".into())
                })?
            } else {
                e.constant_value().ok_or_else(|| {
                    Error::Unsupported("transported off-diagonal entry not constant".into())
                })?
            };
            b.set(i, j, val.div(&beta));
        }
    }
    // Internal verification against the symbolic determinant.
    let check = PMat::char_matrix(&b).det().scale(&beta);
    assert_eq!(check, gf, "matrix action failed verification (internal bug)");
    Ok((beta, b))
}

/// Parse the text form `perm=[2,1,3]; g1=[[a,b],[c,d]]; g2=...` with
/// field literals; omitted parts default to the identity.
pub fn parse_group_element(
    s: &str,
    field: FieldId,
    n: usize,
) -> Result<GroupElement, Error> {
    let mut out = GroupElement::identity(field, n);
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("expected key=value in `{part}`"), 0))?;
        let key = key.trim();
        let val = val.trim();
        if key == "perm" {
            let inner = val
                .strip_prefix('[')
                .and_then(|v| v.strip_suffix(']'))
                .ok_or_else(|| Error::parse("perm needs [..]", 0))?;
            let images: Vec<usize> = inner
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::parse("bad permutation entry", 0))?;
            if images.len() != n {
                return Err(Error::parse("permutation length mismatch", 0));
            }
            let mut seen = vec![false; n];
            for &im in &images {
                if im == 0 || im > n || seen[im - 1] {
                    return Err(Error::parse("not a permutation of 1..n", 0));
                }
                seen[im - 1] = true;
            }
            out.perm = images.iter().map(|&im| im - 1).collect();
        } else if let Some(idx) = key.strip_prefix('g') {
            let i: usize = idx
                .parse()
                .map_err(|_| Error::parse(format!("bad gamma key `{key}`"), 0))?;
            if i == 0 || i > n {
                return Err(Error::parse(format!("gamma index {i} out of range"), 0));
            }
            let vals = parse_matrix_2x2(val, field)?;
            out.gammas[i - 1] = SL2::new(
                vals[0].clone(),
                vals[1].clone(),
                vals[2].clone(),
                vals[3].clone(),
            );
        } else {
            return Err(Error::parse(format!("unknown key `{key}`"), 0));
        }
    }
    Ok(out)
}

fn parse_matrix_2x2(s: &str, field: FieldId) -> Result<Vec<FieldValue>, Error> {
    let inner = s
        .trim()
        .strip_prefix("[[")
        .and_then(|v| v.strip_suffix("]]"))
        .ok_or_else(|| Error::parse("matrix needs [[..],[..]]", 0))?;
    let rows: Vec<&str> = inner.split("],[").collect();
    if rows.len() != 2 {
        return Err(Error::parse("need exactly 2 rows", 0));
    }
    let mut out = Vec::with_capacity(4);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 2 {
            return Err(Error::parse("need exactly 2 entries per row", 0));
        }
        for c in cells {
            out.push(parse_literal(c.trim(), field)?);
        }
    }
    Ok(out)
}

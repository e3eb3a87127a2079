//! Constructive square certification: polynomial square roots,
//! discriminants, the B/C/D cubic operators on quartic coefficients,
//! factorization of multiquadratics into multiaffine products,
//! Hermitian-square factorization over the quadratic extension, the
//! 2x2x2 hyperdeterminant, and the finite certificate-equation family.

use crate::error::Error;
use crate::exactfield::{canonical_unit_qi, FieldId, FieldValue};
use crate::mpoly::{gcd, Monomial, Poly};
use crate::par;
use crate::rayleigh::delta;
use num::{Signed, Zero};

/// Coefficients `b0..b4` of a univariate quartic `h = sum b_j x^j`.
pub type QuarticCoeffs = [FieldValue; 5];

/// The result of a constructive membership test: either a verifiable
/// witness or a refutation naming a checkable failed condition.
#[derive(Debug, Clone)]
pub enum Outcome<T> {
    Witness(T),
    Refuted { condition: String },
}

impl<T> Outcome<T> {
    pub fn witness(self) -> Option<T> {
        match self {
            Outcome::Witness(w) => Some(w),
            Outcome::Refuted { .. } => None,
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, Outcome::Witness(_))
    }

    pub fn condition(&self) -> Option<&str> {
        match self {
            Outcome::Witness(_) => None,
            Outcome::Refuted { condition } => Some(condition),
        }
    }
}

/// A serializable certificate for the square/factorization routines.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// `claim = scalar * prod(factors)`, all factors multiaffine monic.
    MaProduct { scalar: FieldValue, factors: Vec<Poly> },
    /// `claim = witness * conj(witness)`.
    HermitianSquare { witness: Poly },
    /// `claim = witness * conj(witness)` for scalars.
    ScalarSquare { witness: FieldValue },
    /// A named failed condition (equation, square test, or inequality).
    Refutation { condition: String },
}

impl Certificate {
    /// Re-verify a witness certificate against the claimed polynomial by
    /// exact multiplication. Refutations are not checkable here and
    /// return `false`.
    pub fn verify(&self, claim: &Poly) -> bool {
        match self {
            Certificate::MaProduct { scalar, factors } => {
                let mut p = Poly::constant(claim.nvars, scalar.clone());
                for f in factors {
                    if !f.is_multiaffine() {
                        return false;
                    }
                    p = p.mul(f);
                }
                &p == claim
            }
            Certificate::HermitianSquare { witness } => {
                &witness.mul(&witness.conj()) == &claim.promote(witness.field)
            }
            Certificate::ScalarSquare { witness } => {
                claim.constant_value().map(|c| {
                    witness.mul(&witness.conj()) == c.promote(witness.field())
                }) == Some(true)
            }
            Certificate::Refutation { .. } => false,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Certificate::MaProduct { scalar, factors } => {
                let fs: Vec<String> = factors.iter().map(|f| format!("({f})")).collect();
                format!("ma-product: {} * {}", scalar, fs.join(" * "))
            }
            Certificate::HermitianSquare { witness } => {
                format!("hermitian-square: ({witness}) * conj")
            }
            Certificate::ScalarSquare { witness } => {
                format!("scalar-square: {witness} * conj")
            }
            Certificate::Refutation { condition } => format!("refuted: {condition}"),
        }
    }
}

// ---------------------------------------------------------------------
// Scalar and polynomial square roots
// ---------------------------------------------------------------------

/// A square root of `v` within its own field, or `None`; the returned
/// root is deterministic (canonical representative).
pub fn scalar_sqrt(v: &FieldValue) -> Option<FieldValue> {
    let id = v.field();
    if v.is_zero() {
        return Some(FieldValue::zero(id));
    }
    match id {
        FieldId::Q | FieldId::Fp { .. } | FieldId::F2 => v.sqrt_in_fixed_field(),
        FieldId::Qi => {
            // (x + y i)^2 = a + b i: x^2 = (a + r)/2 with r = |a + b i|.
            let half = FieldValue::from_rational(id, 1, 2);
            let a = v.add(&v.conj()).mul(&half);
            let bi = v.sub(&a);
            if bi.is_zero() {
                if let Some(x) = a.sqrt_in_fixed_field() {
                    return Some(x);
                }
                // a < 0: sqrt is purely imaginary.
                return a.neg().sqrt_in_fixed_field().map(|r| {
                    r.mul(&FieldValue::generator(FieldId::Qi))
                });
            }
            let r = v.mul(&v.conj()).sqrt_in_fixed_field()?;
            let x = a.add(&r).mul(&half).sqrt_in_fixed_field()?;
            if x.is_zero() {
                return None;
            }
            let two = FieldValue::from_integer(id, 2);
            let cand = x.add(&bi.div(&x.mul(&two)));
            if cand.mul(&cand) == *v {
                Some(cand)
            } else {
                None
            }
        }
        FieldId::Fpd { .. } | FieldId::F4 => {
            id.all_elements().into_iter().find(|r| r.mul(r) == *v)
        }
    }
}

fn sign_canonical(v: &FieldValue) -> bool {
    match v {
        FieldValue::Rat(r) => !r.is_negative(),
        FieldValue::Gauss { re, im } => {
            re.is_positive() || (re.is_zero() && !im.is_negative())
        }
        FieldValue::Fp { p, val } => *val <= p / 2,
        FieldValue::Fp2 { p, re, im, .. } => {
            if *re != 0 {
                *re <= p / 2
            } else {
                *im <= p / 2
            }
        }
        FieldValue::F2(_) | FieldValue::F4 { .. } => true,
    }
}

/// Flip the sign of `g` if needed so its leading coefficient is the
/// canonical representative of `{c, -c}`.
fn canonical_sign_poly(g: &Poly) -> Poly {
    if g.is_zero() || sign_canonical(&g.leading_coeff()) {
        g.clone()
    } else {
        g.neg()
    }
}

/// A polynomial `g` with `g^2 = h` (canonical sign), or `None`.
pub fn poly_sqrt(h: &Poly) -> Option<Poly> {
    if h.is_zero() {
        return Some(h.clone());
    }
    if h.field.is_char2() {
        // Squaring is the (injective) Frobenius composed with exponent
        // doubling: every exponent must be even and every coefficient a
        // square (c -> c^2 inverts Frobenius on F2 and F4).
        let mut g = Poly::zero(h.field, h.nvars);
        for (m, c) in h.terms() {
            if m.0.iter().any(|&e| e % 2 != 0) {
                return None;
            }
            let half = Monomial(m.0.iter().map(|&e| e / 2).collect());
            g.insert_term(half, c.mul(c));
        }
        return if &g.mul(&g) == h { Some(g) } else { None };
    }
    let lm = h.leading_monomial().unwrap().clone();
    if lm.0.iter().any(|&e| e % 2 != 0) {
        return None;
    }
    let lc = scalar_sqrt(&h.leading_coeff())?;
    let mut g = Poly::zero(h.field, h.nvars);
    let gl = Monomial(lm.0.iter().map(|&e| e / 2).collect());
    g.insert_term(gl.clone(), lc.clone());
    let two_lc = lc.add(&lc);
    let bound = 4 * h.num_terms() * h.num_terms() + 16;
    for _ in 0..bound {
        let r = h.sub(&g.mul(&g));
        if r.is_zero() {
            return Some(canonical_sign_poly(&g));
        }
        let rm = r.leading_monomial().unwrap().clone();
        if !gl.divides(&rm) {
            return None;
        }
        let tm = Monomial(rm.0.iter().zip(&gl.0).map(|(a, b)| a - b).collect());
        let tc = r.leading_coeff().div(&two_lc);
        let mut t = Poly::zero(h.field, h.nvars);
        t.insert_term(tm, tc);
        // The correction must stay below the leading term, else h is
        // not a square.
        if t.leading_monomial() >= g.leading_monomial() {
            return None;
        }
        g = g.add(&t);
    }
    None
}

/// The discriminant `b^2 - 4ac` of `g = a x_k^2 + b x_k + c`.
pub fn discr(g: &Poly, k: usize) -> Result<Poly, Error> {
    if g.deg(k).unwrap_or(0) > 2 {
        return Err(Error::Unsupported(format!(
            "discriminant needs degree <= 2 in x{}",
            k + 1
        )));
    }
    let mut cs = g.coeffs_in_var(k);
    while cs.len() < 3 {
        cs.push(Poly::zero(g.field, g.nvars));
    }
    let four = Poly::from_int(g.field, g.nvars, 4);
    Ok(cs[1].mul(&cs[1]).sub(&four.mul(&cs[2]).mul(&cs[0])))
}

// ---------------------------------------------------------------------
// Quartic-square conditions
// ---------------------------------------------------------------------

fn fv_prod(vs: &[&FieldValue]) -> FieldValue {
    let mut out = FieldValue::one(vs[0].field());
    for v in vs {
        out = out.mul(v);
    }
    out
}

fn fv_int(id: FieldId, k: i64) -> FieldValue {
    FieldValue::from_integer(id, k)
}

/// The three cubic operators `B, C, D` on quartic coefficients:
/// `B = b4 b1^2 - b3^2 b0`, `C = b1^3 - 4 b0 b1 b2 + 8 b0^2 b3`,
/// `D = b1^2 b2 - 4 b0 b2^2 + 2 b0 b1 b3 + 16 b0^2 b4`.
pub fn bcd_operators(b: &QuarticCoeffs) -> (FieldValue, FieldValue, FieldValue) {
    let id = b[0].field();
    let bv = |i: usize| &b[i];
    let bb = fv_prod(&[bv(4), bv(1), bv(1)]).sub(&fv_prod(&[bv(3), bv(3), bv(0)]));
    let c = fv_prod(&[bv(1), bv(1), bv(1)])
        .sub(&fv_int(id, 4).mul(&fv_prod(&[bv(0), bv(1), bv(2)])))
        .add(&fv_int(id, 8).mul(&fv_prod(&[bv(0), bv(0), bv(3)])));
    let d = fv_prod(&[bv(1), bv(1), bv(2)])
        .sub(&fv_int(id, 4).mul(&fv_prod(&[bv(0), bv(2), bv(2)])))
        .add(&fv_int(id, 2).mul(&fv_prod(&[bv(0), bv(1), bv(3)])))
        .add(&fv_int(id, 16).mul(&fv_prod(&[bv(0), bv(0), bv(4)])));
    (bb, c, d)
}

/// The two mirror cubics `b3^3 - 4 b4 b3 b2 + 8 b4^2 b1` and
/// `b2 b3^2 - 4 b2^2 b4 + 2 b1 b3 b4 + 16 b0 b4^2`, obtained from `C`
/// and `D` through the inversion element `b_k -> (-1)^k b_{4-k}`
/// (cross-checked against direct evaluation).
pub fn bcd_mirrors(b: &QuarticCoeffs) -> (FieldValue, FieldValue) {
    let id = b[0].field();
    // Transport through the inversion element.
    let inv: QuarticCoeffs = [
        b[4].clone(),
        b[3].neg(),
        b[2].clone(),
        b[1].neg(),
        b[0].clone(),
    ];
    let (_, c_inv, d_inv) = bcd_operators(&inv);
    // Direct evaluation of the displayed forms.
    let bv = |i: usize| &b[i];
    let c_mir = fv_prod(&[bv(3), bv(3), bv(3)])
        .sub(&fv_int(id, 4).mul(&fv_prod(&[bv(4), bv(3), bv(2)])))
        .add(&fv_int(id, 8).mul(&fv_prod(&[bv(4), bv(4), bv(1)])));
    let d_mir = fv_prod(&[bv(2), bv(3), bv(3)])
        .sub(&fv_int(id, 4).mul(&fv_prod(&[bv(2), bv(2), bv(4)])))
        .add(&fv_int(id, 2).mul(&fv_prod(&[bv(1), bv(3), bv(4)])))
        .add(&fv_int(id, 16).mul(&fv_prod(&[bv(0), bv(4), bv(4)])));
    assert_eq!(c_inv.neg(), c_mir, "mirror transport mismatch (internal bug)");
    assert_eq!(d_inv, d_mir, "mirror transport mismatch (internal bug)");
    (c_mir, d_mir)
}

/// If `h = sum b_j x^j` is `(alpha x^2 + beta x + delta)^2`, return the
/// triple (canonical overall sign); `None` otherwise.
pub fn is_square_quartic(
    b: &QuarticCoeffs,
) -> Result<Option<(FieldValue, FieldValue, FieldValue)>, Error> {
    let id = b[0].field();
    if id.is_char2() {
        return Err(Error::Unsupported(
            "quartic square reconstruction needs characteristic != 2".into(),
        ));
    }
    let alpha = match scalar_sqrt(&b[4]) {
        Some(a) => a,
        None => return Ok(None),
    };
    let delta0 = match scalar_sqrt(&b[0]) {
        Some(d) => d,
        None => return Ok(None),
    };
    let two = fv_int(id, 2);
    for delta in [delta0.clone(), delta0.neg()] {
        let beta = if !alpha.is_zero() {
            b[3].div(&two.mul(&alpha))
        } else if !delta.is_zero() {
            b[1].div(&two.mul(&delta))
        } else {
            match scalar_sqrt(&b[2]) {
                Some(r) => r,
                None => return Ok(None),
            }
        };
        let ok = b[4] == alpha.mul(&alpha)
            && b[3] == two.mul(&alpha).mul(&beta)
            && b[2] == beta.mul(&beta).add(&two.mul(&alpha).mul(&delta))
            && b[1] == two.mul(&beta).mul(&delta)
            && b[0] == delta.mul(&delta);
        if ok {
            let first = [&alpha, &beta, &delta]
                .into_iter()
                .find(|v| !v.is_zero());
            let flip = first.map(|v| !sign_canonical(v)).unwrap_or(false);
            return Ok(Some(if flip {
                (alpha.neg(), beta.neg(), delta.neg())
            } else {
                (alpha, beta, delta)
            }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------
// Factorization of multiquadratics into multiaffine products
// ---------------------------------------------------------------------

/// Split `g` (degree <= 2 in `x_k`) into two factors of degree <= 1 in
/// `x_k`, via a square root of the discriminant; `Ok(None)` when the
/// discriminant is not a square.
pub fn factor_quadratic_linear(g: &Poly, k: usize) -> Result<Option<(Poly, Poly)>, Error> {
    if g.field.is_char2() {
        return Err(Error::Unsupported(
            "quadratic splitting needs characteristic != 2".into(),
        ));
    }
    if g.deg(k).unwrap_or(0) < 2 {
        return Ok(Some((g.clone(), Poly::one(g.field, g.nvars))));
    }
    let cs = g.coeffs_in_var(k);
    let (c, b, a) = (&cs[0], &cs[1], &cs[2]);
    let disc = discr(g, k)?;
    let q = match poly_sqrt(&disc) {
        Some(q) => q,
        None => return Ok(None),
    };
    let half = Poly::constant(g.nvars, FieldValue::from_rational(g.field, 1, 2));
    let xk = Poly::var(g.field, g.nvars, k);
    for s in [q.clone(), q.neg()] {
        let m = b.sub(&s).mul(&half);
        let mp = b.add(&s).mul(&half);
        // Split a = a1 * a2 with a1 dividing m: (a2 x + m/a1)(a1 x + mp/a2).
        for a1 in [gcd(a, &m), a.div_exact(&gcd(a, &mp)).unwrap_or_else(|| a.clone())] {
            if a1.is_zero() {
                continue;
            }
            let c1 = match m.div_exact(&a1) {
                Some(p) => p,
                None => continue,
            };
            let a2 = match a.div_exact(&a1) {
                Some(p) => p,
                None => continue,
            };
            if a2.is_zero() {
                continue;
            }
            let c2 = match mp.div_exact(&a2) {
                Some(p) => p,
                None => continue,
            };
            let f1 = a2.mul(&xk).add(&c1);
            let f2 = a1.mul(&xk).add(&c2);
            if f1.mul(&f2) == *g {
                debug_assert_eq!(c1.mul(&c2), *c);
                return Ok(Some((f1, f2)));
            }
        }
    }
    Err(Error::Unsupported(
        "discriminant is a square but no quadratic split re-expands (internal bug)".into(),
    ))
}

/// Irreducible factorization of a nonzero multiaffine polynomial:
/// monic factors over disjoint variable supports plus a scalar.
///
/// The supports are the connected components of the graph on active
/// variables with edges where the Rayleigh difference is nonzero; each
/// factor is recovered by specializing the complementary variables at a
/// point where the cofactor is nonzero.
pub fn ma_irreducible_factorization(f: &Poly) -> (FieldValue, Vec<Poly>) {
    assert!(!f.is_zero(), "factorization needs a nonzero input");
    assert!(f.is_multiaffine(), "input must be multiaffine");
    let active: Vec<usize> = (0..f.nvars).filter(|&i| f.depends_on(i)).collect();
    if active.is_empty() {
        return (f.constant_value().unwrap(), vec![]);
    }
    // Union-find over active variables.
    let mut parent: Vec<usize> = (0..f.nvars).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for (ai, &i) in active.iter().enumerate() {
        for &j in &active[ai + 1..] {
            if find(&mut parent, i) != find(&mut parent, j)
                && !delta(f, i, j).is_zero()
            {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = vec![];
    for &i in &active {
        let r = find(&mut parent, i);
        if let Some(c) = comps.iter_mut().find(|c| find(&mut parent, c[0]) == r) {
            c.push(i);
        } else {
            comps.push(vec![i]);
        }
    }
    comps.sort_by_key(|c| c[0]);
    let candidates = candidate_points(f.field);
    let mut factors = vec![];
    for comp in &comps {
        // Specialize every active variable outside the component at a
        // point keeping the cofactor nonzero (greedy: for each variable
        // at most one candidate value can annihilate the polynomial).
        let mut p = f.clone();
        for &v in &active {
            if comp.contains(&v) {
                continue;
            }
            let mut done = false;
            for val in &candidates {
                let sp = p.specialize(v, val);
                if !sp.is_zero() {
                    p = sp;
                    done = true;
                    break;
                }
            }
            assert!(done, "no specialization point keeps the cofactor nonzero");
        }
        factors.push(p.monic().0);
    }
    let (_, scalar) = f.monic();
    let mut prod = Poly::constant(f.nvars, scalar.clone());
    for g in &factors {
        prod = prod.mul(g);
    }
    assert_eq!(prod, *f, "factor recovery failed to re-verify (internal bug)");
    (scalar, factors)
}

fn candidate_points(id: FieldId) -> Vec<FieldValue> {
    match id {
        FieldId::Q | FieldId::Qi => (0..8)
            .flat_map(|k| {
                if k == 0 {
                    vec![FieldValue::zero(id)]
                } else {
                    vec![
                        FieldValue::from_integer(id, k),
                        FieldValue::from_integer(id, -k),
                    ]
                }
            })
            .collect(),
        _ => id.all_elements(),
    }
}

/// Factor a multiquadratic polynomial into irreducible multiaffine
/// factors (monic, with scalar), or refute with the failed condition.
pub fn ma_factorization(q: &Poly) -> Result<Outcome<(FieldValue, Vec<Poly>)>, Error> {
    if q.is_zero() {
        return Err(Error::Unsupported("cannot factor the zero polynomial".into()));
    }
    if !q.is_multiquadratic() {
        return Err(Error::Unsupported(
            "multiaffine-product factorization needs a multiquadratic input".into(),
        ));
    }
    if q.field.is_char2() {
        return ma_factorization_exhaustive(q);
    }
    ma_factorization_rec(q)
}

fn ma_factorization_rec(q: &Poly) -> Result<Outcome<(FieldValue, Vec<Poly>)>, Error> {
    if q.is_multiaffine() {
        let (s, fs) = ma_irreducible_factorization(q);
        return Ok(Outcome::Witness((s, fs)));
    }
    let k = (0..q.nvars)
        .find(|&i| q.deg(i) == Some(2))
        .expect("non-multiaffine multiquadratic has a degree-2 variable");
    match factor_quadratic_linear(q, k)? {
        None => Ok(Outcome::Refuted {
            condition: format!(
                "Discr_{{x{}}} of the quadratic in x{} is not a square",
                k + 1,
                k + 1
            ),
        }),
        Some((g1, g2)) => {
            let r1 = ma_factorization_rec(&g1)?;
            let r2 = ma_factorization_rec(&g2)?;
            match (r1, r2) {
                (Outcome::Witness((s1, f1)), Outcome::Witness((s2, f2))) => {
                    let mut fs = f1;
                    fs.extend(f2);
                    fs.sort_by(|a, b| format!("{a}").cmp(&format!("{b}")));
                    Ok(Outcome::Witness((s1.mul(&s2), fs)))
                }
                (Outcome::Refuted { condition }, _)
                | (_, Outcome::Refuted { condition }) => {
                    Ok(Outcome::Refuted { condition })
                }
            }
        }
    }
}

/// Exhaustive divisor search over small characteristic-2 fields; bails
/// out with a bound error above 3 active variables.
fn ma_factorization_exhaustive(q: &Poly) -> Result<Outcome<(FieldValue, Vec<Poly>)>, Error> {
    if q.is_multiaffine() {
        let (s, fs) = ma_irreducible_factorization(q);
        return Ok(Outcome::Witness((s, fs)));
    }
    let active: Vec<usize> = (0..q.nvars).filter(|&i| q.depends_on(i)).collect();
    if active.len() > 3 {
        return Err(Error::BoundExceeded(format!(
            "exhaustive factor search over {} supports at most 3 active variables, got {}",
            q.field,
            active.len()
        )));
    }
    for g in enumerate_multiaffine(q.field, q.nvars, &active) {
        if g.is_constant() {
            continue;
        }
        if let Some(h) = q.div_exact(&g) {
            if h.is_constant() {
                continue;
            }
            let r1 = ma_factorization_exhaustive(&g)?;
            let r2 = ma_factorization_exhaustive(&h)?;
            if let (Outcome::Witness((s1, f1)), Outcome::Witness((s2, f2))) = (r1, r2) {
                let mut fs = f1;
                fs.extend(f2);
                fs.sort_by(|a, b| format!("{a}").cmp(&format!("{b}")));
                return Ok(Outcome::Witness((s1.mul(&s2), fs)));
            }
        }
    }
    Ok(Outcome::Refuted {
        condition: "no multiaffine divisor exists (exhaustive search)".into(),
    })
}

/// All multiaffine polynomials over `field` supported on the given
/// variables (coefficients enumerated in field order).
fn enumerate_multiaffine(field: FieldId, nvars: usize, vars: &[usize]) -> Vec<Poly> {
    let elems = field.all_elements();
    let monoms: Vec<Monomial> = (0..1u32 << vars.len())
        .map(|mask| {
            let mut e = vec![0u32; nvars];
            for (b, &v) in vars.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    e[v] = 1;
                }
            }
            Monomial(e)
        })
        .collect();
    let mut out = vec![];
    let total = elems.len().pow(monoms.len() as u32);
    for idx in 0..total {
        let mut p = Poly::zero(field, nvars);
        let mut rest = idx;
        for m in &monoms {
            let c = &elems[rest % elems.len()];
            rest /= elems.len();
            if !c.is_zero() {
                p.insert_term(m.clone(), c.clone());
            }
        }
        out.push(p);
    }
    out
}

// ---------------------------------------------------------------------
// Hermitian-square factorization
// ---------------------------------------------------------------------

/// The scalar `d` with `K = F(sqrt(d))` for the fixed field `F`.
pub(crate) fn extension_discriminant(f: FieldId) -> FieldValue {
    match f {
        FieldId::Q => FieldValue::from_integer(FieldId::Q, -1),
        FieldId::Fp { p } => FieldValue::Fp {
            p,
            val: crate::exactfield::least_nonresidue(p),
        },
        _ => panic!("no quadratic extension data for {f}"),
    }
}

/// Canonicalize a Hermitian-square witness by a norm-one unit: over
/// `Q(i)` multiply by the unit in `{1, i, -1, -i}` making the leading
/// coefficient canonical; over finite fields pick the norm-one multiple
/// with the smallest deterministic key.
fn canonical_witness(g: &Poly) -> Poly {
    if g.is_zero() {
        return g.clone();
    }
    match g.field {
        FieldId::Qi => {
            let lc = g.leading_coeff();
            let canon = canonical_unit_qi(&lc);
            let unit = canon.div(&lc);
            g.scale(&unit)
        }
        FieldId::Fpd { .. } | FieldId::F4 => {
            let one = FieldValue::one(g.field);
            let mut best: Option<(String, Poly)> = None;
            for u in g.field.all_elements() {
                if u.mul(&u.conj()) != one {
                    continue;
                }
                let cand = g.scale(&u);
                let key = format!("{cand}");
                if best.as_ref().map(|(k, _)| key < *k).unwrap_or(true) {
                    best = Some((key, cand));
                }
            }
            best.map(|(_, p)| p).unwrap_or_else(|| g.clone())
        }
        _ => g.clone(),
    }
}

/// A witness `g` over the quadratic extension `K` with
/// `g * conj(g) = q`, for `q` with coefficients in the fixed field; or
/// a refutation naming the failed condition.
pub fn hermitian_square_factor(q: &Poly) -> Result<Outcome<Poly>, Error> {
    if !q.is_multiquadratic() {
        return Err(Error::Unsupported(
            "Hermitian-square factorization needs a multiquadratic input".into(),
        ));
    }
    // Normalize to the fixed field.
    let qf = if q.field.has_involution() {
        match q.restrict() {
            Some(p) => p,
            None => {
                return Err(Error::Unsupported(
                    "input coefficients must lie in the fixed field".into(),
                ))
            }
        }
    } else {
        q.clone()
    };
    if qf.field.is_char2() {
        return hermitian_square_exhaustive(&qf);
    }
    hermitian_square_rec(&qf)
}

fn hermitian_square_rec(q: &Poly) -> Result<Outcome<Poly>, Error> {
    let f = q.field;
    let k_field = f.extension();
    if q.is_zero() {
        return Ok(Outcome::Witness(Poly::zero(k_field, q.nvars)));
    }
    if let Some(c) = q.constant_value() {
        // The norm test runs in the extension field.
        return Ok(match c.promote(k_field).hermitian_square_scalar()? {
            Some(w) => Outcome::Witness(Poly::constant(q.nvars, w)),
            None => Outcome::Refuted {
                condition: format!("scalar {c} is not a Hermitian square (norm test)"),
            },
        });
    }
    let k = (0..q.nvars).find(|&i| q.depends_on(i)).unwrap();
    if q.deg(k) == Some(1) {
        return Ok(Outcome::Refuted {
            condition: format!("odd degree in x{} (a Hermitian square has even degrees)", k + 1),
        });
    }
    let cs = q.coeffs_in_var(k);
    let (c, b, a) = (&cs[0], &cs[1], &cs[2]);
    let s = match hermitian_square_rec(a)? {
        Outcome::Witness(w) => w,
        Outcome::Refuted { condition } => {
            return Ok(Outcome::Refuted {
                condition: format!("leading coefficient in x{}: {condition}", k + 1),
            })
        }
    };
    if let Outcome::Refuted { condition } = hermitian_square_rec(c)? {
        return Ok(Outcome::Refuted {
            condition: format!("trailing coefficient in x{}: {condition}", k + 1),
        });
    }
    // Discr / delta^2 must have a polynomial square root over F.
    let disc = discr(q, k)?;
    let d = extension_discriminant(f);
    let r = match poly_sqrt(&disc.scale(&d.inv())) {
        Some(r) => r,
        None => {
            return Ok(Outcome::Refuted {
                condition: format!(
                    "Discr_{{x{}}} / delta^2 is not a square in the fixed field",
                    k + 1
                ),
            })
        }
    };
    let delta = FieldValue::generator(k_field);
    let qd = r.promote(k_field).scale(&delta);
    let bk = b.promote(k_field);
    let half = Poly::constant(q.nvars, FieldValue::from_rational(k_field, 1, 2));
    let xk = Poly::var(k_field, q.nvars, k);
    let qk = q.promote(k_field);
    for u in [bk.sub(&qd).mul(&half), bk.add(&qd).mul(&half)] {
        for sv in [s.clone(), s.conj()] {
            if sv.is_zero() {
                continue;
            }
            if let Some(t_bar) = u.div_exact(&sv) {
                let t = t_bar.conj();
                let g = sv.mul(&xk).add(&t);
                if g.mul(&g.conj()) == qk {
                    return Ok(Outcome::Witness(canonical_witness(&g)));
                }
            }
        }
    }
    // The chosen Hermitian splits of the leading/trailing coefficients
    // were incompatible; fall back to pairing conjugate factors of the
    // full multiaffine factorization over K.
    pair_conjugate_factors(q)
}

/// Factor `q` into multiaffine irreducibles over `K` and pair them
/// under conjugation to assemble a Hermitian-square witness.
fn pair_conjugate_factors(q: &Poly) -> Result<Outcome<Poly>, Error> {
    let k_field = q.field.extension();
    let qk = q.promote(k_field);
    let (_, factors) = match ma_factorization(&qk)? {
        Outcome::Witness(w) => w,
        Outcome::Refuted { condition } => {
            return Ok(Outcome::Refuted {
                condition: format!("not a product of multiaffine factors over K: {condition}"),
            })
        }
    };
    // Multiset of monic factors with multiplicities.
    let mut counted: Vec<(Poly, usize)> = vec![];
    for f in factors {
        if let Some(e) = counted.iter_mut().find(|(g, _)| *g == f) {
            e.1 += 1;
        } else {
            counted.push((f, 1));
        }
    }
    let mut w0 = Poly::one(k_field, q.nvars);
    let mut remaining = counted.clone();
    while let Some(pos) = remaining.iter().position(|(_, m)| *m > 0) {
        let (p, mult) = remaining[pos].clone();
        let p_conj_monic = p.conj().monic().0;
        if p_conj_monic == p {
            // Self-conjugate up to a unit: needs even multiplicity.
            if mult % 2 != 0 {
                return Ok(Outcome::Refuted {
                    condition: format!(
                        "self-conjugate factor ({p}) occurs with odd multiplicity {mult}"
                    ),
                });
            }
            w0 = w0.mul(&p.pow((mult / 2) as u32));
            remaining[pos].1 = 0;
        } else {
            let partner = remaining
                .iter()
                .position(|(g, m)| *g == p_conj_monic && *m > 0);
            match partner {
                Some(ppos) if remaining[ppos].1 == mult => {
                    w0 = w0.mul(&p.pow(mult as u32));
                    remaining[pos].1 = 0;
                    remaining[ppos].1 = 0;
                }
                _ => {
                    return Ok(Outcome::Refuted {
                        condition: format!(
                            "factor ({p}) has no conjugate partner of equal multiplicity"
                        ),
                    })
                }
            }
        }
    }
    // q = rho * w0 * conj(w0) for a fixed-field scalar rho.
    let prod = w0.mul(&w0.conj());
    let rho = match qk.div_exact(&prod).and_then(|r| r.constant_value()) {
        Some(r) => r,
        None => {
            return Err(Error::Unsupported(
                "conjugate pairing failed to re-expand (internal bug)".into(),
            ))
        }
    };
    assert!(rho.is_fixed(), "ratio of Hermitian polynomials is fixed");
    match rho.hermitian_square_scalar()? {
        Some(sw) => {
            let w = w0.scale(&sw);
            debug_assert_eq!(w.mul(&w.conj()), qk);
            Ok(Outcome::Witness(canonical_witness(&w)))
        }
        None => Ok(Outcome::Refuted {
            condition: format!("leftover scalar {rho} is not a Hermitian square"),
        }),
    }
}

/// Exhaustive witness search for characteristic-2 fields (F2 inside
/// F4); bounded at 3 active variables.
fn hermitian_square_exhaustive(q: &Poly) -> Result<Outcome<Poly>, Error> {
    let k_field = q.field.extension();
    let qk = q.promote(k_field);
    let active: Vec<usize> = (0..q.nvars).filter(|&i| q.depends_on(i)).collect();
    if active.len() > 3 {
        return Err(Error::BoundExceeded(format!(
            "exhaustive Hermitian-square search supports at most 3 active variables, got {}",
            active.len()
        )));
    }
    for g in enumerate_multiaffine(k_field, q.nvars, &active) {
        if g.mul(&g.conj()) == qk {
            return Ok(Outcome::Witness(canonical_witness(&g)));
        }
    }
    Ok(Outcome::Refuted {
        condition: "no multiaffine Hermitian-square witness exists (exhaustive search)".into(),
    })
}

// ---------------------------------------------------------------------
// Hyperdeterminant and the certificate-equation family
// ---------------------------------------------------------------------

/// The multiaffine polynomial `f_a = sum_S a_S prod_{i notin S} x_i`
/// from a principal-minor vector indexed by subset bitmask.
pub fn minors_to_poly(field: FieldId, n: usize, a: &[FieldValue]) -> Poly {
    assert_eq!(a.len(), 1 << n, "need 2^n minors");
    let mut f = Poly::zero(field, n);
    for (mask, c) in a.iter().enumerate() {
        let exps: Vec<u32> = (0..n).map(|i| 1 - (mask as u32 >> i & 1)).collect();
        f.insert_term(Monomial(exps), c.clone());
    }
    f
}

/// Cayley's 2x2x2 hyperdeterminant of a length-8 principal-minor
/// vector (bitmask index order); both displayed forms are evaluated and
/// must agree.
pub fn hyperdet(a: &[FieldValue]) -> FieldValue {
    assert_eq!(a.len(), 8, "hyperdeterminant needs a 3-variable minor vector");
    let (a0, a1, a2, a12, a3, a13, a23, a123) =
        (&a[0], &a[1], &a[2], &a[3], &a[4], &a[5], &a[6], &a[7]);
    let id = a0.field();
    let four = fv_int(id, 4);
    let s = a1
        .mul(a23)
        .add(&a2.mul(a13))
        .sub(&a3.mul(a12))
        .sub(&a0.mul(a123));
    let form1 = s.mul(&s).sub(
        &four
            .mul(&a1.mul(a2).sub(&a0.mul(a12)))
            .mul(&a13.mul(a23).sub(&a3.mul(a123))),
    );
    // Expanded 12-term form.
    let two = fv_int(id, 2);
    let mut form2 = fv_prod(&[a0, a0, a123, a123])
        .add(&fv_prod(&[a1, a1, a23, a23]))
        .add(&fv_prod(&[a2, a2, a13, a13]))
        .add(&fv_prod(&[a3, a3, a12, a12]));
    for t in [
        fv_prod(&[a0, a1, a23, a123]),
        fv_prod(&[a0, a2, a13, a123]),
        fv_prod(&[a0, a3, a12, a123]),
        fv_prod(&[a1, a2, a13, a23]),
        fv_prod(&[a1, a3, a12, a23]),
        fv_prod(&[a2, a3, a12, a13]),
    ] {
        form2 = form2.sub(&two.mul(&t));
    }
    form2 = form2
        .add(&four.mul(&fv_prod(&[a0, a23, a13, a12])))
        .add(&four.mul(&fv_prod(&[a123, a1, a2, a3])));
    assert_eq!(form1, form2, "hyperdeterminant forms disagree (internal bug)");
    form1
}

/// One evaluated condition from the certificate family.
#[derive(Debug, Clone)]
pub struct ConditionResult {
    pub name: String,
    pub value: String,
    pub pass: bool,
}

/// The finite family of degree-12 equations in the minor coordinates:
/// B/C/D and their two mirrors applied to `Discr_{x_k}(Delta_{ij} f)`,
/// specialized at grid points `lambda` from a 13-element evaluation
/// set.
pub struct CertificateFamily {
    pub n: usize,
    pub field: FieldId,
    pub lambda_set: Vec<FieldValue>,
}

impl CertificateFamily {
    pub fn new(n: usize, field: FieldId, lambda_set: Vec<FieldValue>) -> Result<Self, Error> {
        if n < 3 {
            return Err(Error::Unsupported(
                "the certificate family needs at least 3 variables".into(),
            ));
        }
        if lambda_set.len() < 13 {
            return Err(Error::Unsupported(format!(
                "the evaluation set needs at least 13 elements, got {}",
                lambda_set.len()
            )));
        }
        Ok(CertificateFamily { n, field, lambda_set })
    }

    /// The default 13-element evaluation set `0..12` (only valid when
    /// the field has at least 13 elements).
    pub fn default_lambda_set(field: FieldId) -> Vec<FieldValue> {
        (0..13).map(|k| FieldValue::from_integer(field, k)).collect()
    }

    /// Evaluate every equation on a multiaffine `f` in `n` variables;
    /// embarrassingly parallel over index tuples and grid points, with
    /// deterministic output order.
    pub fn evaluate(&self, f: &Poly) -> Vec<ConditionResult> {
        assert_eq!(f.nvars, self.n);
        assert!(f.is_multiaffine(), "the certificate family applies to multiaffine inputs");
        let n = self.n;
        if n == 3 {
            return vec![];
        }
        // One task per (i, j, k, l): the 13^(n-4) grid is walked inside.
        let mut tasks: Vec<(usize, usize, usize, usize)> = vec![];
        for i in 0..n {
            for j in i + 1..n {
                let rest: Vec<usize> =
                    (0..n).filter(|&v| v != i && v != j).collect();
                for &k in &rest {
                    for &l in &rest {
                        if k != l {
                            tasks.push((i, j, k, l));
                        }
                    }
                }
            }
        }
        let lambda_set = self.lambda_set.clone();
        let fc = f.clone();
        let results = par::map_collect(tasks, move |(i, j, k, l)| {
            let dij = delta(&fc, i, j);
            let disc = discr(&dij, k).expect("Rayleigh difference is multiquadratic");
            let others: Vec<usize> = (0..fc.nvars)
                .filter(|&v| v != i && v != j && v != k && v != l)
                .collect();
            let mut out = vec![];
            let grid = lambda_grid(&lambda_set, others.len());
            for lam in grid {
                let mut p = disc.clone();
                for (v, val) in others.iter().zip(&lam) {
                    p = p.specialize(*v, val);
                }
                let mut cs: Vec<FieldValue> = p
                    .coeffs_in_var(l)
                    .into_iter()
                    .map(|c| c.constant_value().expect("fully specialized"))
                    .collect();
                while cs.len() < 5 {
                    cs.push(FieldValue::zero(fc.field));
                }
                let b: QuarticCoeffs =
                    [cs[0].clone(), cs[1].clone(), cs[2].clone(), cs[3].clone(), cs[4].clone()];
                let (bb, c, d) = bcd_operators(&b);
                let (cm, dm) = bcd_mirrors(&b);
                let lam_str: Vec<String> = lam.iter().map(|v| format!("{v}")).collect();
                let ctx = format!(
                    "(Discr_{{x{}}}(Delta_{{{}{}}})) at lambda=({})",
                    k + 1,
                    i + 1,
                    j + 1,
                    lam_str.join(",")
                );
                for (op, v) in [("B", bb), ("C", c), ("D", d), ("C'", cm), ("D'", dm)] {
                    out.push(ConditionResult {
                        name: format!("{}_{{x{}}}{}", op, l + 1, ctx),
                        pass: v.is_zero(),
                        value: format!("{v}"),
                    });
                }
            }
            out
        });
        results.into_iter().flatten().collect()
    }
}

fn lambda_grid(set: &[FieldValue], dims: usize) -> Vec<Vec<FieldValue>> {
    let mut out = vec![vec![]];
    for _ in 0..dims {
        let mut next = vec![];
        for partial in &out {
            for v in set {
                let mut p = partial.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

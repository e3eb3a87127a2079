//! The principal minor map and its constructive inverse: minor
//! vectors, determinantal representations `f = det(diag(x) + A)`,
//! reconstruction from compatible factorizations of the Rayleigh
//! differences (general and Hermitian), membership tests for the image
//! of the principal minor map, and the sampled necessary-condition
//! filter.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::action::{act_on_matrix, act_on_poly, GroupElement, SL2};
use crate::error::Error;
use crate::exactfield::{parse_literal, FieldId, FieldValue};
use crate::matrix::{Mat, PMat};
use crate::mpoly::{gcd, Monomial, Poly};
use crate::rayleigh::{delta, phi, res_k};
use crate::squares::{
    self, discr, hermitian_square_factor, ma_factorization, ma_irreducible_factorization,
    scalar_sqrt, ConditionResult, Outcome,
};

// ---------------------------------------------------------------------------
// Minor vectors
// ---------------------------------------------------------------------------

/// The `2^n` principal minors of an `n x n` matrix, indexed by subset
/// bitmask (bit `i-1` set iff `i` is in the subset); `minors[0]` is the
/// empty minor, normalized to 1 for matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorVector {
    pub field: FieldId,
    pub n: usize,
    pub minors: Vec<FieldValue>,
}

impl MinorVector {
    pub fn new(field: FieldId, n: usize, minors: Vec<FieldValue>) -> Result<MinorVector, Error> {
        if minors.len() != 1 << n {
            return Err(Error::Unsupported(format!(
                "minor vector needs 2^{n} = {} entries, got {}",
                1usize << n,
                minors.len()
            )));
        }
        for v in &minors {
            if v.field() != field {
                return Err(Error::FieldMismatch(
                    field.to_string(),
                    v.field().to_string(),
                ));
            }
        }
        Ok(MinorVector { field, n, minors })
    }

    pub fn at(&self, mask: usize) -> &FieldValue {
        &self.minors[mask]
    }

    /// The multiaffine polynomial `f = sum_S a_S prod_{i not in S} x_i`.
    pub fn poly(&self) -> Poly {
        squares::minors_to_poly(self.field, self.n, &self.minors)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (mask, v) in self.minors.iter().enumerate() {
            map.insert(mask.to_string(), serde_json::Value::String(v.to_string()));
        }
        serde_json::json!({
            "n": self.n,
            "field": self.field.to_string(),
            "minors": serde_json::Value::Object(map),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<MinorVector, Error> {
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Unsupported("minor vector JSON: missing `n`".into()))?
            as usize;
        let field = FieldId::parse_name(
            v.get("field")
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Unsupported("minor vector JSON: missing `field`".into()))?,
        )?;
        let obj = v
            .get("minors")
            .and_then(|x| x.as_object())
            .ok_or_else(|| Error::Unsupported("minor vector JSON: missing `minors`".into()))?;
        let mut minors = vec![FieldValue::zero(field); 1 << n];
        for (k, val) in obj {
            let mask: usize = k
                .parse()
                .map_err(|_| Error::Unsupported(format!("minor vector JSON: bad mask key `{k}`")))?;
            if mask >= 1 << n {
                return Err(Error::Unsupported(format!(
                    "minor vector JSON: mask {mask} out of range for n={n}"
                )));
            }
            let s = val
                .as_str()
                .ok_or_else(|| Error::Unsupported("minor vector JSON: entry not a string".into()))?;
            minors[mask] = parse_literal(s, field)?;
        }
        MinorVector::new(field, n, minors)
    }
}

/// The full vector of principal minors of a square matrix.
pub fn principal_minors(a: &Mat) -> MinorVector {
    MinorVector {
        field: a.field,
        n: a.n,
        minors: a.principal_minors(),
    }
}

/// The symbolic determinant `det(diag(x_1,...,x_n) + A)`.
pub fn charpoly(a: &Mat) -> Poly {
    PMat::char_matrix(a).det()
}

/// Coefficient extraction without any normalization requirement:
/// `out[mask]` is the coefficient of the monomial on the complementary
/// variable set.
pub(crate) fn coeff_vector(f: &Poly) -> Vec<FieldValue> {
    let n = f.nvars;
    (0..1usize << n)
        .map(|mask| {
            let exps: Vec<u32> = (0..n).map(|i| 1 - (mask as u32 >> i & 1)).collect();
            f.coeff_exps(&exps)
        })
        .collect()
}

/// Inverse of [`MinorVector::poly`] on multiaffine polynomials with
/// unit coefficient of `x_1 ... x_n`.
pub fn poly_to_minors(f: &Poly) -> Result<MinorVector, Error> {
    if !f.is_multiaffine() {
        return Err(Error::Unsupported(
            "coefficient extraction needs a multiaffine polynomial".into(),
        ));
    }
    let ones = vec![1u32; f.nvars];
    if !f.coeff_exps(&ones).is_one() {
        return Err(Error::Unsupported(
            "coefficient extraction needs unit coefficient of x1*...*xn".into(),
        ));
    }
    MinorVector::new(f.field, f.nvars, coeff_vector(f))
}

// ---------------------------------------------------------------------------
// Determinantal representations
// ---------------------------------------------------------------------------

/// A witness `A` for `f = det(diag(x_1,...,x_n) + A)`; the `hermitian`
/// flag asserts `A` equals its conjugate transpose exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetRep {
    pub a: Mat,
    pub hermitian: bool,
}

impl DetRep {
    pub fn new(a: Mat) -> DetRep {
        let hermitian = a.field.has_involution() && a.is_hermitian();
        DetRep { a, hermitian }
    }

    pub fn charpoly(&self) -> Poly {
        charpoly(&self.a)
    }

    /// Exact verification against a claimed determinant.
    pub fn verify(&self, f: &Poly) -> bool {
        (!self.hermitian || self.a.is_hermitian()) && self.charpoly() == *f
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = (0..self.a.n * self.a.n)
            .map(|k| {
                serde_json::Value::String(self.a.at(k / self.a.n, k % self.a.n).to_string())
            })
            .collect();
        serde_json::json!({
            "n": self.a.n,
            "field": self.a.field.to_string(),
            "hermitian": self.hermitian,
            "entries": entries,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<DetRep, Error> {
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Unsupported("representation JSON: missing `n`".into()))?
            as usize;
        let field = FieldId::parse_name(
            v.get("field")
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Unsupported("representation JSON: missing `field`".into()))?,
        )?;
        let arr = v
            .get("entries")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Unsupported("representation JSON: missing `entries`".into()))?;
        if arr.len() != n * n {
            return Err(Error::Unsupported(format!(
                "representation JSON: expected {} entries, got {}",
                n * n,
                arr.len()
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for e in arr {
            let s = e.as_str().ok_or_else(|| {
                Error::Unsupported("representation JSON: entry not a string".into())
            })?;
            entries.push(parse_literal(s, field)?);
        }
        let a = Mat::new(field, n, entries);
        let hermitian = v
            .get("hermitian")
            .and_then(|x| x.as_bool())
            .unwrap_or(false);
        if hermitian && !a.is_hermitian() {
            return Err(Error::Unsupported(
                "representation JSON: hermitian flag set but matrix is not conj-symmetric".into(),
            ));
        }
        Ok(DetRep { a, hermitian })
    }
}

/// The matrix of off-diagonal minor witnesses `g_ij` with diagonal
/// `g_ii = df/dx_i`; the candidate for the adjugate of `diag(x)+A`.
#[derive(Clone, Debug)]
pub struct GMatrix {
    pub m: PMat,
}

impl GMatrix {
    pub fn new(m: PMat) -> Result<GMatrix, Error> {
        let n = m.n;
        for i in 0..n {
            for j in 0..n {
                let e = m.at(i, j);
                if !e.is_multiaffine() {
                    return Err(Error::Unsupported(format!(
                        "g[{}][{}] is not multiaffine",
                        i + 1,
                        j + 1
                    )));
                }
                if i != j && (e.depends_on(i) || e.depends_on(j)) {
                    return Err(Error::Unsupported(format!(
                        "g[{}][{}] must not involve x{} or x{}",
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(GMatrix { m })
    }
}

/// Reconstruct `A` from a compatible `G`: computes `G^adj / f^{n-2}`,
/// checks the quotient has shape `diag(x) + A` with constant entries,
/// and verifies `det(diag(x)+A) = f` and `det(G) = f^{n-1}` exactly.
pub fn rep_from_g(g: &GMatrix, f: &Poly) -> Result<DetRep, Error> {
    let n = g.m.n;
    let field = f.field;
    if n < 2 {
        return Err(Error::Unsupported(
            "reconstruction needs a matrix of size at least 2".into(),
        ));
    }
    for i in 0..n {
        if *g.m.at(i, i) != f.derivative(i) {
            return Err(Error::Unsupported(format!(
                "diagonal entry g[{0}][{0}] must be the derivative of f in x{0}",
                i + 1
            )));
        }
    }
    let adj = g.m.adjugate();
    let denom = f.pow((n - 2) as u32);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let e = adj.at(i, j).div_exact(&denom).ok_or_else(|| {
                Error::Unsupported(format!(
                    "adjugate entry ({},{}) is not divisible by f^{} (compatibility violated)",
                    i + 1,
                    j + 1,
                    n - 2
                ))
            })?;
            let val = if i == j {
                let cs = e.coeffs_in_var(i);
                if cs.len() != 2 || !cs[1].is_constant() || cs[1].constant_value() != Some(FieldValue::one(field)) {
                    return Err(Error::Unsupported(format!(
                        "reconstructed diagonal entry ({0},{0}) is not x{0} + constant",
                        i + 1
                    )));
                }
                cs[0].constant_value().ok_or_else(|| {
                    Error::Unsupported(format!(
                        "reconstructed diagonal entry ({0},{0}) is not x{0} + constant",
                        i + 1
                    ))
                })?
            } else {
                e.constant_value().ok_or_else(|| {
                    Error::Unsupported(format!(
                        "reconstructed entry ({},{}) is not constant (compatibility violated)",
                        i + 1,
                        j + 1
                    ))
                })?
            };
            entries.push(val);
        }
    }
    let a = Mat::new(field, n, entries);
    let rep = DetRep::new(a);
    if rep.charpoly() != *f {
        return Err(Error::Unsupported(
            "reconstructed matrix does not reproduce f (compatibility violated)".into(),
        ));
    }
    if g.m.det() != f.pow((n - 1) as u32) {
        return Err(Error::Unsupported(
            "det(G) != f^(n-1) (compatibility violated)".into(),
        ));
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Block decomposition helpers
// ---------------------------------------------------------------------------

fn support(p: &Poly) -> Vec<usize> {
    (0..p.nvars).filter(|&i| p.depends_on(i)).collect()
}

/// Rewrite a polynomial depending only on `vars` as a polynomial in
/// `vars.len()` variables (`vars` sorted ascending).
fn project_to_vars(p: &Poly, vars: &[usize]) -> Poly {
    let mut out = Poly::zero(p.field, vars.len());
    for (mono, c) in p.terms() {
        let exps: Vec<u32> = vars.iter().map(|&v| mono.0[v]).collect();
        let total: u32 = mono.0.iter().sum();
        let kept: u32 = exps.iter().sum();
        assert_eq!(total, kept, "polynomial depends on a variable outside its block");
        out.insert_term(Monomial(exps), c.clone());
    }
    out
}

/// Irreducible blocks of a monic multiaffine polynomial: each block is
/// `(sorted original variables, compressed polynomial)`; the supports
/// partition the variable set.
fn blocks_of(f: &Poly) -> Vec<(Vec<usize>, Poly)> {
    let (s, factors) = ma_irreducible_factorization(f);
    assert!(s.is_one(), "block decomposition needs a monic polynomial");
    let mut out = Vec::new();
    let mut seen = vec![false; f.nvars];
    for fac in &factors {
        let vars = support(fac);
        for &v in &vars {
            assert!(!seen[v], "irreducible factors must have disjoint supports");
            seen[v] = true;
        }
        out.push((vars.clone(), project_to_vars(fac, &vars)));
    }
    assert!(seen.iter().all(|&b| b), "every variable must appear in some block");
    out.sort_by_key(|(vars, _)| vars[0]);
    out
}

fn scatter_block(big: &mut Mat, vars: &[usize], ab: &Mat) {
    for (bi, &i) in vars.iter().enumerate() {
        for (bj, &j) in vars.iter().enumerate() {
            big.set(i, j, ab.at(bi, bj).clone());
        }
    }
}

// ---------------------------------------------------------------------------
// Hermitian reconstruction (compatible Hermitian factorizations)
// ---------------------------------------------------------------------------

/// Reconstruct a Hermitian representation of a monic multiaffine `f`
/// over the fixed field, or refute (some Rayleigh difference is not a
/// Hermitian square).  The retry budget bounds the number of generic
/// coordinate changes attempted when the genericity assumptions fail.
pub fn algorithm1(f: &Poly) -> Result<Outcome<DetRep>, Error> {
    algorithm1_with(f, 20)
}

pub fn algorithm1_with(f: &Poly, retry_budget: u64) -> Result<Outcome<DetRep>, Error> {
    if !f.is_multiaffine() {
        return Err(Error::Unsupported(
            "Hermitian reconstruction needs a multiaffine polynomial".into(),
        ));
    }
    let n = f.nvars;
    let ones = vec![1u32; n];
    if !f.coeff_exps(&ones).is_one() {
        return Err(Error::Unsupported(
            "Hermitian reconstruction needs unit coefficient of x1*...*xn".into(),
        ));
    }
    if f.field.has_involution() {
        return Err(Error::Unsupported(
            "Hermitian reconstruction expects a polynomial over the fixed field".into(),
        ));
    }
    let kf = f.field.extension();
    let mut big = Mat::zero(kf, n);
    for (vars, fb) in blocks_of(f) {
        match solve_hermitian_block(&fb, retry_budget)? {
            Outcome::Witness(ab) => scatter_block(&mut big, &vars, &ab),
            Outcome::Refuted { condition } => {
                let names: Vec<String> = vars.iter().map(|v| format!("x{}", v + 1)).collect();
                return Ok(Outcome::Refuted {
                    condition: format!(
                        "irreducible factor on {{{}}}: {condition}",
                        names.join(",")
                    ),
                });
            }
        }
    }
    let rep = DetRep::new(big);
    assert!(rep.hermitian, "assembled block-diagonal witness must be Hermitian");
    assert_eq!(rep.charpoly(), f.promote(kf), "witness verification failed (internal bug)");
    Ok(Outcome::Witness(rep))
}

enum CoreResult {
    Done(Mat),
    Refuted(String),
    Failed,
}

fn solve_hermitian_block(fb: &Poly, budget: u64) -> Result<Outcome<Mat>, Error> {
    let field = fb.field;
    let kf = field.extension();
    let m = fb.nvars;
    if m == 1 {
        let c = fb.coeff_exps(&[0]).promote(kf);
        return Ok(Outcome::Witness(Mat::new(kf, 1, vec![c])));
    }
    if m == 2 {
        let a1 = fb.coeff_exps(&[0, 1]);
        let a2 = fb.coeff_exps(&[1, 0]);
        let e = fb.coeff_exps(&[0, 0]);
        let nu = a1.mul(&a2).sub(&e);
        let w = match nu.promote(kf).hermitian_square_scalar()? {
            Some(w) => w,
            None => {
                return Ok(Outcome::Refuted {
                    condition: format!(
                        "a1*a2 - a12 = {nu} is not a Hermitian square (norm) in {kf}"
                    ),
                })
            }
        };
        let a = Mat::new(
            kf,
            2,
            vec![a1.promote(kf), w.clone(), w.conj(), a2.promote(kf)],
        );
        return Ok(Outcome::Witness(a));
    }
    // The Rayleigh-difference conditions are invariant under the
    // coordinate changes used below, so a refutation at any attempt is
    // a refutation of the original polynomial.
    for i in 0..m {
        for j in i + 1..m {
            let d = delta(fb, i, j);
            if let Outcome::Refuted { condition } = hermitian_square_factor(&d)? {
                return Ok(Outcome::Refuted {
                    condition: format!(
                        "Delta_{}{}(f) = {d} is not a Hermitian square: {condition}",
                        i + 1,
                        j + 1
                    ),
                });
            }
        }
    }
    let needs_moving = !assumption_derivatives_irreducible(fb);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
    for attempt in 0..=budget {
        let (gamma, fcur) = if attempt == 0 {
            if needs_moving {
                continue;
            }
            (GroupElement::identity(field, m), fb.clone())
        } else {
            // Translations preserve monicity but never repair a
            // reducible partial derivative (they rescale it); use the
            // full group whenever the derivative assumption failed.
            let full = needs_moving || attempt > budget / 2;
            let gamma = sample_gamma(&mut rng, field, m, full);
            let moved = act_on_poly(&gamma, fb, &vec![1; m])?;
            let lam = moved.coeff_exps(&vec![1; m]);
            if lam.is_zero() {
                continue;
            }
            (gamma, moved.scale(&lam.inv()))
        };
        if !assumption_derivatives_irreducible(&fcur) {
            continue;
        }
        match hermitian_core(&fcur)? {
            CoreResult::Refuted(c) => return Ok(Outcome::Refuted { condition: c }),
            CoreResult::Failed => continue,
            CoreResult::Done(mat) => {
                if attempt == 0 {
                    return Ok(Outcome::Witness(mat));
                }
                // Transport back through the inverse coordinate change.
                let gk = GroupElement {
                    gammas: gamma
                        .gammas
                        .iter()
                        .map(|s| SL2::new(
                            s.a.promote(kf),
                            s.b.promote(kf),
                            s.c.promote(kf),
                            s.d.promote(kf),
                        ))
                        .collect(),
                    perm: gamma.perm.clone(),
                };
                let (_, b) = match act_on_matrix(&gk.inverse(), &mat) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                if b.is_hermitian() && charpoly(&b) == fb.promote(kf) {
                    return Ok(Outcome::Witness(b));
                }
            }
        }
    }
    Err(Error::BoundExceeded(format!(
        "generic coordinate-change retry budget ({budget}) exhausted without a verified witness"
    )))
}

fn sample_gamma<R: rand::Rng>(rng: &mut R, field: FieldId, m: usize, full: bool) -> GroupElement {
    let gammas = (0..m)
        .map(|_| {
            if full {
                SL2::random(rng, field, 2)
            } else {
                SL2::translation(FieldValue::from_integer(field, rng.gen_range(-3i64..=3)))
            }
        })
        .collect();
    GroupElement::from_gammas(gammas)
}

fn assumption_derivatives_irreducible(f: &Poly) -> bool {
    (0..f.nvars).all(|i| {
        let d = f.derivative(i);
        !d.is_zero() && ma_irreducible_factorization(&d).1.len() == 1
    })
}

fn hermitian_core(f: &Poly) -> Result<CoreResult, Error> {
    let kf = f.field.extension();
    let fk = f.promote(kf);
    let d12 = delta(f, 0, 1);
    let w12 = match hermitian_square_factor(&d12)? {
        Outcome::Witness(w) => w,
        Outcome::Refuted { condition } => {
            return Ok(CoreResult::Refuted(format!(
                "Delta_12(f) = {d12} is not a Hermitian square: {condition}"
            )))
        }
    };
    for g12 in [w12.clone(), w12.conj()] {
        match hermitian_core_with(f, &fk, &g12)? {
            CoreResult::Done(mat) => return Ok(CoreResult::Done(mat)),
            CoreResult::Refuted(c) => return Ok(CoreResult::Refuted(c)),
            CoreResult::Failed => continue,
        }
    }
    Ok(CoreResult::Failed)
}

fn hermitian_core_with(f: &Poly, fk: &Poly, g12: &Poly) -> Result<CoreResult, Error> {
    let kf = fk.field;
    let m = f.nvars;
    let mut g: HashMap<(usize, usize), Poly> = HashMap::new();
    g.insert((0, 1), g12.clone());
    for k in 2..m {
        let d1k = delta(f, 0, k).promote(kf);
        let wk = match hermitian_square_factor(&delta(f, 0, k))? {
            Outcome::Witness(w) => w,
            Outcome::Refuted { condition } => {
                return Ok(CoreResult::Refuted(format!(
                    "Delta_1{}(f) is not a Hermitian square: {condition}",
                    k + 1
                )))
            }
        };
        // Greatest common divisor of Delta_1k with the resultant images
        // of the already-chosen first-row witnesses.
        let mut q = {
            let (mq, _) = d1k.monic();
            mq
        };
        for j in 1..k {
            q = gcd(&q, &phi(&g[&(0, j)], fk, k)?);
        }
        // Peel conjugate factor pairs of Delta_1k out of the gcd.
        let (_, pk_factors) = ma_irreducible_factorization(&wk);
        for p in &pk_factors {
            let pc = p.conj();
            if p.mul(&pc).divides(&q) {
                q = q.div_exact(&pc).expect("checked divisibility");
            }
        }
        // Rescale so that g1k * conj(g1k) = Delta_1k exactly.
        let nrm = q.mul(&q.conj());
        let s0 = match d1k.div_exact(&nrm).and_then(|t| t.constant_value()) {
            Some(c) => c,
            None => return Ok(CoreResult::Failed),
        };
        let c = match s0.hermitian_square_scalar()? {
            Some(c) => c,
            None => return Ok(CoreResult::Failed),
        };
        let g1k = q.scale(&c);
        if g1k.mul(&g1k.conj()) != d1k {
            return Ok(CoreResult::Failed);
        }
        for j in 1..k {
            let num = phi(&g[&(0, j)], fk, k)?;
            let quot = match num.div_exact(&g1k) {
                Some(t) => t,
                None => return Ok(CoreResult::Failed),
            };
            g.insert((j, k), quot.conj());
        }
        g.insert((0, k), g1k);
    }
    let mut entries = vec![Poly::zero(kf, m); m * m];
    for i in 0..m {
        entries[i * m + i] = fk.derivative(i);
        for j in i + 1..m {
            entries[i * m + j] = g[&(i, j)].clone();
            entries[j * m + i] = g[&(i, j)].conj();
        }
    }
    let gm = match GMatrix::new(PMat::new(kf, m, m, entries)) {
        Ok(gm) => gm,
        Err(_) => return Ok(CoreResult::Failed),
    };
    match rep_from_g(&gm, fk) {
        Ok(rep) if rep.hermitian => Ok(CoreResult::Done(rep.a)),
        _ => Ok(CoreResult::Failed),
    }
}

// ---------------------------------------------------------------------------
// General (not necessarily Hermitian) membership
// ---------------------------------------------------------------------------

/// Decide membership in the image of the principal minor map over the
/// coefficient field itself, with the default size bound.
pub fn is_in_image_general(a: &MinorVector) -> Result<Outcome<DetRep>, Error> {
    is_in_image_general_bounded(a, 6)
}

pub fn is_in_image_general_bounded(
    a: &MinorVector,
    bound: usize,
) -> Result<Outcome<DetRep>, Error> {
    let n = a.n;
    if n > bound {
        return Err(Error::BoundExceeded(format!(
            "membership search supports at most {bound} variables, got {n}"
        )));
    }
    if !a.minors[0].is_one() {
        return Err(Error::Unsupported(
            "membership test needs a normalized minor vector (empty minor = 1)".into(),
        ));
    }
    let f = a.poly();
    let field = f.field;
    let mut big = Mat::zero(field, n);
    for (vars, fb) in blocks_of(&f) {
        match solve_general_block(&fb)? {
            Outcome::Witness(ab) => scatter_block(&mut big, &vars, &ab),
            Outcome::Refuted { condition } => {
                let names: Vec<String> = vars.iter().map(|v| format!("x{}", v + 1)).collect();
                return Ok(Outcome::Refuted {
                    condition: format!("irreducible factor on {{{}}}: {condition}", names.join(",")),
                });
            }
        }
    }
    let rep = DetRep::new(big);
    assert_eq!(rep.charpoly(), f, "witness verification failed (internal bug)");
    Ok(Outcome::Witness(rep))
}

fn solve_general_block(fb: &Poly) -> Result<Outcome<Mat>, Error> {
    let field = fb.field;
    let m = fb.nvars;
    if m == 1 {
        return Ok(Outcome::Witness(Mat::new(
            field,
            1,
            vec![fb.coeff_exps(&[0])],
        )));
    }
    if m == 2 {
        // [[a1, 1], [a1*a2 - a12, a2]] always works.
        let a1 = fb.coeff_exps(&[0, 1]);
        let a2 = fb.coeff_exps(&[1, 0]);
        let e = fb.coeff_exps(&[0, 0]);
        let nu = a1.mul(&a2).sub(&e);
        return Ok(Outcome::Witness(Mat::new(
            field,
            2,
            vec![a1, FieldValue::one(field), nu, a2],
        )));
    }
    let mut search = GeneralSearch::prepare(fb)?;
    match search.run() {
        Some(mat) => Ok(Outcome::Witness(mat)),
        None => Ok(Outcome::Refuted {
            condition: search.refutation(),
        }),
    }
}

struct PairData {
    i: usize,
    j: usize,
    scalar: FieldValue,
    factors: Vec<Poly>,
    /// Ordered candidates (monic part of g_ij, monic part of g_ji).
    candidates: Vec<(Poly, Poly)>,
    /// Set when `Delta_ij` is not a product of multiaffine polynomials
    /// at all; such a pair has no candidates.
    nonfactorable: Option<String>,
}

struct GeneralSearch {
    f: Poly,
    m: usize,
    pairs: Vec<PairData>,
    assigned: HashMap<(usize, usize), Poly>,
}

/// All ways to split a multiset of irreducible multiaffine factors into
/// an ordered pair of multiaffine products (no side may repeat a
/// variable), as subset bitmasks for the first side.
fn bipartition_masks(factors: &[Poly]) -> Vec<usize> {
    let t = factors.len();
    let mut out = Vec::new();
    'mask: for mask in 0..1usize << t {
        let nv = if t == 0 { 0 } else { factors[0].nvars };
        let mut used_a = vec![false; nv];
        let mut used_b = vec![false; nv];
        for (idx, fac) in factors.iter().enumerate() {
            let side = if mask >> idx & 1 == 1 {
                &mut used_a
            } else {
                &mut used_b
            };
            for v in support(fac) {
                if side[v] {
                    continue 'mask;
                }
                side[v] = true;
            }
        }
        out.push(mask);
    }
    out
}

fn product_of(factors: &[Poly], mask: usize, invert: bool, field: FieldId, nvars: usize) -> Poly {
    let mut p = Poly::one(field, nvars);
    for (idx, fac) in factors.iter().enumerate() {
        let on = mask >> idx & 1 == 1;
        if on != invert {
            p = p.mul(fac);
        }
    }
    p
}

impl GeneralSearch {
    fn prepare(fb: &Poly) -> Result<GeneralSearch, Error> {
        let field = fb.field;
        let m = fb.nvars;
        let mut pairs = Vec::new();
        let mut order = Vec::new();
        for j in 1..m {
            order.push((0, j));
        }
        for i in 1..m {
            for j in i + 1..m {
                order.push((i, j));
            }
        }
        for (i, j) in order {
            let d = delta(fb, i, j);
            assert!(!d.is_zero(), "irreducible block has nonzero Rayleigh differences");
            let (scalar, factors, nonfactorable) = match ma_factorization(&d)? {
                Outcome::Witness((s, fs)) => (s, fs, None),
                Outcome::Refuted { condition } => (
                    FieldValue::one(field),
                    Vec::new(),
                    Some(format!(
                        "Delta_{}{}(f) = {d} is not a product of multiaffine polynomials: {condition}",
                        i + 1,
                        j + 1
                    )),
                ),
            };
            let mut candidates = Vec::new();
            if nonfactorable.is_none() {
                let mut seen = std::collections::HashSet::new();
                for mask in bipartition_masks(&factors) {
                    if seen.insert(mask) {
                        let p = product_of(&factors, mask, false, field, m);
                        let q = product_of(&factors, mask, true, field, m);
                        candidates.push((p, q));
                    }
                }
            }
            pairs.push(PairData {
                i,
                j,
                scalar,
                factors,
                candidates,
                nonfactorable,
            });
        }
        Ok(GeneralSearch {
            f: fb.clone(),
            m,
            pairs,
            assigned: HashMap::new(),
        })
    }

    fn run(&mut self) -> Option<Mat> {
        self.dfs(0)
    }

    fn dfs(&mut self, idx: usize) -> Option<Mat> {
        if idx == self.pairs.len() {
            return self.finalize();
        }
        let (i, j) = (self.pairs[idx].i, self.pairs[idx].j);
        let scalar = self.pairs[idx].scalar.clone();
        let ncand = self.pairs[idx].candidates.len();
        for c in 0..ncand {
            let (p, q) = self.pairs[idx].candidates[c].clone();
            let (gij, gji) = if i == 0 {
                // Diagonal-conjugation gauge: the first-row witness may
                // be taken monic; the opposite entry carries the scalar.
                (p, q.scale(&scalar))
            } else {
                // Compatibility with the first row fixes the scale:
                // res_{x_1}(g_ij, f) = g_i1 * g_1j.
                let r = res_k(&p, &self.f, 0);
                let target = self.assigned[&(i, 0)].mul(&self.assigned[&(0, j)]);
                let lam = if r.is_zero() && target.is_zero() {
                    FieldValue::one(self.f.field)
                } else if r.is_zero() || target.is_zero() {
                    continue;
                } else {
                    match target.div_exact(&r).and_then(|t| t.constant_value()) {
                        Some(l) => l,
                        None => continue,
                    }
                };
                (p.scale(&lam), q.scale(&scalar.div(&lam)))
            };
            self.assigned.insert((i, j), gij);
            self.assigned.insert((j, i), gji);
            if self.partial_ok(i, j) {
                if let Some(mat) = self.dfs(idx + 1) {
                    return Some(mat);
                }
            }
            self.assigned.remove(&(i, j));
            self.assigned.remove(&(j, i));
        }
        None
    }

    /// Check every resultant compatibility condition that involves the
    /// just-assigned pair and only assigned pairs.
    fn partial_ok(&self, pi: usize, pj: usize) -> bool {
        let m = self.m;
        for u in 0..m {
            for v in 0..m {
                if u == v {
                    continue;
                }
                for k in 0..m {
                    if k == u || k == v {
                        continue;
                    }
                    let touches = |a: usize, b: usize| {
                        (a.min(b), a.max(b)) == (pi.min(pj), pi.max(pj))
                    };
                    if !(touches(u, v) || touches(u, k) || touches(k, v)) {
                        continue;
                    }
                    let (Some(guv), Some(guk), Some(gkv)) = (
                        self.assigned.get(&(u, v)),
                        self.assigned.get(&(u, k)),
                        self.assigned.get(&(k, v)),
                    ) else {
                        continue;
                    };
                    if res_k(guv, &self.f, k) != guk.mul(gkv) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Read off the candidate `A` from the assigned `G` numerically:
    /// at a point `p` with `f(p) != 0`, `G(p)^adj / f(p)^{m-2}` equals
    /// `diag(p) + A`.  Verifying the principal minors of `A` against
    /// the coefficients of `f` is then a complete membership check.
    fn finalize(&self) -> Option<Mat> {
        let field = self.f.field;
        let m = self.m;
        let p = match (0..64i64)
            .map(|s| {
                (0..m)
                    .map(|i| FieldValue::from_integer(field, i as i64 + 2 + s))
                    .collect::<Vec<_>>()
            })
            .find(|pt| !self.f.eval(pt).is_zero())
        {
            Some(p) => p,
            // tiny fields may have no convenient nonvanishing point;
            // fall back to the symbolic reconstruction
            None => return self.finalize_symbolic(),
        };
        let fp = self.f.eval(&p);
        let mut gp = Mat::zero(field, m);
        for i in 0..m {
            gp.set(i, i, self.f.derivative(i).eval(&p));
            for j in 0..m {
                if i != j {
                    gp.set(i, j, self.assigned[&(i, j)].eval(&p));
                }
            }
        }
        let denom = fp.pow((m - 2) as u32);
        let mut a = Mat::zero(field, m);
        for i in 0..m {
            for j in 0..m {
                // adjugate entry (i,j) is the (j,i) cofactor
                let mut c = gp.delete(&[j], &[i]).det();
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                let mut v = c.div(&denom);
                if i == j {
                    v = v.sub(&p[i]);
                }
                a.set(i, j, v);
            }
        }
        if a.principal_minors() == coeff_vector(&self.f) {
            Some(a)
        } else {
            None
        }
    }

    fn finalize_symbolic(&self) -> Option<Mat> {
        let field = self.f.field;
        let m = self.m;
        let mut entries = vec![Poly::zero(field, m); m * m];
        for i in 0..m {
            entries[i * m + i] = self.f.derivative(i);
            for j in 0..m {
                if i != j {
                    entries[i * m + j] = self.assigned[&(i, j)].clone();
                }
            }
        }
        let gm = GMatrix::new(PMat::new(field, m, m, entries)).ok()?;
        rep_from_g(&gm, &self.f).ok().map(|r| r.a)
    }

    /// Build a refutation certificate after an exhausted search: find a
    /// pair whose candidates are all impossible on their own (either no
    /// variable-disjoint bipartition of `Delta_ij` exists at all, or
    /// every candidate has a resultant `res_{x_k}(g_ij, f)` that cannot
    /// be split into admissible `g_ik * g_kj`).
    fn refutation(&mut self) -> String {
        for idx in 0..self.pairs.len() {
            let PairData {
                i,
                j,
                scalar,
                factors,
                candidates,
                nonfactorable,
            } = &self.pairs[idx];
            let (i, j) = (*i, *j);
            if let Some(msg) = nonfactorable {
                return format!("membership refuted: {msg}");
            }
            let flist: Vec<String> = factors.iter().map(|p| format!("({p})")).collect();
            if candidates.is_empty() {
                return format!(
                    "membership refuted: Delta_{}{}(f) = {} * {} has no factorization into \
                     two multiaffine polynomials g_{}{} * g_{}{} (every bipartition of its \
                     irreducible factors repeats a variable)",
                    i + 1,
                    j + 1,
                    scalar,
                    flist.join(" * "),
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                );
            }
            let mut lines = Vec::new();
            let mut all_blocked = true;
            for (p, q) in candidates {
                match self.blocking_line(i, j, p).or_else(|| self.blocking_line(j, i, q)) {
                    Some(line) => lines.push(format!(
                        "candidate g_{}{} = {p}, g_{}{} = {scalar} * ({q}): {line}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )),
                    None => {
                        all_blocked = false;
                        break;
                    }
                }
            }
            if all_blocked {
                return format!(
                    "membership refuted: every factorization Delta_{}{}(f) = g_{}{} * g_{}{} \
                     fails a resultant compatibility condition:\n{}",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1,
                    lines.join("\n")
                );
            }
        }
        "membership refuted: no consistent system of factorizations of the Rayleigh \
         differences satisfies the resultant compatibility conditions"
            .into()
    }

    /// For the ordered condition `res_{x_k}(g_uv, f) = g_uk * g_kv`:
    /// find a `k` for which no admissible split of the resultant exists
    /// (first factor avoiding `x_u`, second avoiding `x_v`).
    fn blocking_line(&self, u: usize, v: usize, guv: &Poly) -> Option<String> {
        let m = self.m;
        for k in 0..m {
            if k == u || k == v {
                continue;
            }
            let r = res_k(guv, &self.f, k);
            if r.is_zero() {
                continue;
            }
            let (factors, note) = match ma_factorization(&r) {
                Ok(Outcome::Witness((_, fs))) => (fs, None),
                Ok(Outcome::Refuted { condition }) => (
                    Vec::new(),
                    Some(format!("it is not a product of multiaffine polynomials: {condition}")),
                ),
                Err(_) => continue,
            };
            let blocked = if let Some(note) = note {
                Some(note)
            } else {
                let mut ok = false;
                for mask in bipartition_masks(&factors) {
                    let a = product_of(&factors, mask, false, self.f.field, m);
                    let b = product_of(&factors, mask, true, self.f.field, m);
                    if !a.depends_on(u) && !a.depends_on(k) && !b.depends_on(k) && !b.depends_on(v)
                    {
                        ok = true;
                        break;
                    }
                }
                if ok {
                    None
                } else {
                    let fl: Vec<String> = factors.iter().map(|p| format!("({p})")).collect();
                    Some(format!(
                        "its {} irreducible factors {} admit no split with the first part free \
                         of x{} and the second free of x{}",
                        factors.len(),
                        fl.join(" * "),
                        u + 1,
                        v + 1
                    ))
                }
            };
            if let Some(why) = blocked {
                return Some(format!(
                    "Res_x{}(g_{}{}, f) = {r}: {why}; it must equal g_{}{} * g_{}{}",
                    k + 1,
                    u + 1,
                    v + 1,
                    u + 1,
                    k + 1,
                    k + 1,
                    v + 1
                ));
            }
        }
        None
    }
}

/// Decide membership in the image of the principal minor map of
/// Hermitian matrices over the quadratic extension.
pub fn is_in_image_hermitian(a: &MinorVector) -> Result<Outcome<DetRep>, Error> {
    if !a.minors[0].is_one() {
        return Err(Error::Unsupported(
            "membership test needs a normalized minor vector (empty minor = 1)".into(),
        ));
    }
    algorithm1(&a.poly())
}

// ---------------------------------------------------------------------------
// Sampled necessary conditions
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NecessaryMode {
    /// Square/norm conditions over the fixed field and its quadratic
    /// extension.
    HermitianSquares,
    /// Sign conditions for the real closure (rational data standing in
    /// for real numbers).
    RealClosure,
}

#[derive(Debug)]
pub struct NecessaryReport {
    pub conditions: Vec<ConditionResult>,
}

impl NecessaryReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }
}

/// Evaluate the sampled necessary conditions for membership in the
/// Hermitian image: the scalar norm/sign condition on `a1*a2 - a0*a12`,
/// the hyperdeterminant square/sign condition, and the degree-12
/// equations from the quartic-square certificate of the discriminant of
/// `Delta_12`, each at `samples` group elements drawn from the seed
/// (the first sample is the identity).
pub fn necessary_conditions_hermitian(
    a: &MinorVector,
    mode: NecessaryMode,
    seed: u64,
    samples: usize,
) -> Result<NecessaryReport, Error> {
    let field = a.field;
    if field.has_involution() {
        return Err(Error::Unsupported(
            "necessary conditions are formulated over the fixed field".into(),
        ));
    }
    if mode == NecessaryMode::RealClosure && field != FieldId::Q {
        return Err(Error::Unsupported(
            "real-closure mode needs rational data".into(),
        ));
    }
    let n = a.n;
    let f = a.poly();
    let ones = vec![1u32; n];
    let kf = field.extension();
    let disc = squares::extension_discriminant(field);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut conditions = Vec::new();
    for s_idx in 0..samples.max(1) {
        let gamma = if s_idx == 0 {
            GroupElement::identity(field, n)
        } else {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let gammas = (0..n).map(|_| SL2::random(&mut rng, field, 2)).collect();
            GroupElement { gammas, perm }
        };
        let gname = if s_idx == 0 {
            "identity".to_string()
        } else {
            format!("gamma#{s_idx}")
        };
        let fb = act_on_poly(&gamma, &f, &ones)?;
        let b = coeff_vector(&fb);
        // (i) scalar condition on a1*a2 - a0*a12.
        let s = b[1].mul(&b[2]).sub(&b[0].mul(&b[3]));
        let (val, pass) = match mode {
            NecessaryMode::HermitianSquares => {
                let p = s.promote(kf).hermitian_square_scalar()?.is_some();
                (s.to_string(), p)
            }
            NecessaryMode::RealClosure => (s.to_string(), rational_sign(&s) >= 0),
        };
        conditions.push(ConditionResult {
            name: format!("a1*a2 - a0*a12 at {gname}"),
            value: val,
            pass,
        });
        if n >= 3 {
            // (ii) hyperdeterminant condition on the minors of the
            // leading 3x3 block (the coefficients of the specialization
            // x4 = ... = xn = 0).
            let high = ((1usize << n) - 1) & !0b111;
            let c8: Vec<FieldValue> = (0..8).map(|t| b[t | high].clone()).collect();
            let h = squares::hyperdet(&c8);
            let (val, pass) = match mode {
                NecessaryMode::HermitianSquares => {
                    let p = scalar_sqrt(&h.div(&disc)).is_some();
                    (h.to_string(), p)
                }
                NecessaryMode::RealClosure => (h.to_string(), rational_sign(&h) <= 0),
            };
            conditions.push(ConditionResult {
                name: format!("HypDet at {gname}"),
                value: val,
                pass,
            });
        }
        if n >= 4 {
            // (iii) degree-12 equations: quartic-square certificate of
            // Discr_{x3}(Delta_12) specialized at x5 = ... = xn = 0.
            let mut d12 = delta(&fb, 0, 1);
            for v in 4..n {
                d12 = d12.specialize(v, &FieldValue::zero(field));
            }
            let ds = discr(&d12, 2)?;
            let mut cs = ds.coeffs_in_var(3);
            cs.resize(5, Poly::zero(field, n));
            let qc: Vec<FieldValue> = cs
                .iter()
                .map(|c| c.constant_value().expect("specialized coefficients are constants"))
                .collect();
            let qc: squares::QuarticCoeffs =
                [qc[0].clone(), qc[1].clone(), qc[2].clone(), qc[3].clone(), qc[4].clone()];
            let (bb, cc, dd) = squares::bcd_operators(&qc);
            let (cm, dm) = squares::bcd_mirrors(&qc);
            for (op, v) in [("B", bb), ("C", cc), ("D", dd), ("C'", cm), ("D'", dm)] {
                conditions.push(ConditionResult {
                    name: format!("{op}(Discr_x3(Delta_12)) at {gname}"),
                    value: v.to_string(),
                    pass: v.is_zero(),
                });
            }
        }
    }
    Ok(NecessaryReport { conditions })
}

fn rational_sign(v: &FieldValue) -> i8 {
    use num::Signed;
    match v {
        FieldValue::Rat(r) => {
            if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            }
        }
        _ => panic!("sign comparison needs a rational value"),
    }
}

// ---------------------------------------------------------------------------
// Rank-one extraction and diagonal Hermitization
// ---------------------------------------------------------------------------

/// For a Hermitian matrix of rank one whose diagonal entries are norms,
/// a vector `v` with `A = v * conj(v)^T`; otherwise a refutation naming
/// the failed condition.  Matrices over a fixed field are promoted to
/// its quadratic extension so that norms are taken there.
pub fn rank_one_extract(a: &Mat) -> Result<Outcome<Vec<FieldValue>>, Error> {
    let kf = if a.field.has_involution() {
        a.field
    } else {
        a.field.extension()
    };
    let n = a.n;
    let mut ak = Mat::zero(kf, n);
    for i in 0..n {
        for j in 0..n {
            ak.set(i, j, a.at(i, j).promote(kf));
        }
    }
    if !ak.is_hermitian() {
        return Err(Error::Unsupported(
            "rank-one extraction needs a Hermitian matrix".into(),
        ));
    }
    let zero = FieldValue::zero(kf);
    if (0..n).all(|i| (0..n).all(|j| ak.at(i, j).is_zero())) {
        return Ok(Outcome::Witness(vec![zero; n]));
    }
    let rank = ak.rank();
    if rank != 1 {
        return Ok(Outcome::Refuted {
            condition: format!("rank is {rank}, expected 1"),
        });
    }
    let i0 = match (0..n).find(|&i| !ak.at(i, i).is_zero()) {
        Some(i) => i,
        None => {
            return Ok(Outcome::Refuted {
                condition: "rank-one Hermitian matrix has vanishing diagonal".into(),
            })
        }
    };
    let vi0 = match ak.at(i0, i0).hermitian_square_scalar()? {
        Some(w) => w,
        None => {
            return Ok(Outcome::Refuted {
                condition: format!(
                    "diagonal entry ({0},{0}) = {1} is not a norm over this exact field",
                    i0 + 1,
                    ak.at(i0, i0)
                ),
            })
        }
    };
    let v: Vec<FieldValue> = (0..n)
        .map(|j| ak.at(j, i0).div(&vi0.conj()))
        .collect();
    for i in 0..n {
        for j in 0..n {
            if v[i].mul(&v[j].conj()) != *ak.at(i, j) {
                return Ok(Outcome::Refuted {
                    condition: "no norm witness for the diagonal reproduces the matrix".into(),
                });
            }
        }
    }
    Ok(Outcome::Witness(v))
}

/// A diagonal matrix `D` over the fixed field with `D^{-1} A D`
/// Hermitian, when one exists: requires a symmetric nonzero pattern,
/// fixed diagonal entries, consistent transition ratios (cocycle
/// condition), and square roots inside the fixed field.
pub fn hermitize_by_diagonal(a: &Mat) -> Result<Outcome<Vec<FieldValue>>, Error> {
    let n = a.n;
    let kf = a.field;
    if !kf.has_involution() {
        return Err(Error::Unsupported(
            "diagonal Hermitization needs a matrix over the extension field".into(),
        ));
    }
    for i in 0..n {
        if !a.at(i, i).is_fixed() {
            return Ok(Outcome::Refuted {
                condition: format!(
                    "diagonal entry ({0},{0}) = {1} is not fixed by the involution",
                    i + 1,
                    a.at(i, i)
                ),
            });
        }
        for j in i + 1..n {
            if a.at(i, j).is_zero() != a.at(j, i).is_zero() {
                return Ok(Outcome::Refuted {
                    condition: format!(
                        "asymmetric zero pattern at ({},{})",
                        i + 1,
                        j + 1
                    ),
                });
            }
        }
    }
    // Transition ratios (d_j/d_i)^2 = conj(a_ji)/a_ij along the
    // off-diagonal nonzero pattern, propagated per connected component.
    let mut rho: Vec<Option<FieldValue>> = vec![None; n];
    let one = FieldValue::one(kf);
    for root in 0..n {
        if rho[root].is_some() {
            continue;
        }
        rho[root] = Some(one.clone());
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if j == i || a.at(i, j).is_zero() {
                    continue;
                }
                let mu = a.at(j, i).conj().div(a.at(i, j));
                if !mu.is_fixed() {
                    return Ok(Outcome::Refuted {
                        condition: format!(
                            "transition ratio conj(a_{}{})/a_{}{} = {mu} is not fixed by the involution",
                            j + 1,
                            i + 1,
                            i + 1,
                            j + 1
                        ),
                    });
                }
                let next = rho[i].as_ref().unwrap().mul(&mu);
                match &rho[j] {
                    Some(existing) => {
                        if *existing != next {
                            return Ok(Outcome::Refuted {
                                condition: format!(
                                    "cocycle condition fails at ({},{})",
                                    i + 1,
                                    j + 1
                                ),
                            });
                        }
                    }
                    None => {
                        rho[j] = Some(next);
                        stack.push(j);
                    }
                }
            }
        }
    }
    let mut d = Vec::with_capacity(n);
    for (j, r) in rho.into_iter().enumerate() {
        let r = r.expect("all components visited");
        let rf = r.restrict().expect("fixed value restricts");
        let root = match scalar_sqrt(&rf) {
            Some(s) => s,
            None => {
                return Ok(Outcome::Refuted {
                    condition: format!(
                        "square root outside field: d_{}^2 = {rf} has no square root in {}",
                        j + 1,
                        kf.fixed_field()
                    ),
                })
            }
        };
        d.push(root.promote(kf));
    }
    let conj = a.diagonal_conjugate(&d);
    if !conj.is_hermitian() {
        return Ok(Outcome::Refuted {
            condition: "conjugated matrix is not Hermitian".into(),
        });
    }
    Ok(Outcome::Witness(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse;
    use rand::Rng;

    fn qi(k: i64, l: i64) -> FieldValue {
        FieldValue::from_integer(FieldId::Qi, k).add(
            &FieldValue::from_integer(FieldId::Qi, l).mul(&FieldValue::generator(FieldId::Qi)),
        )
    }

    fn qmat(rows: Vec<Vec<i64>>) -> Mat {
        let n = rows.len();
        Mat::from_rows(
            FieldId::Q,
            rows.into_iter()
                .map(|r| {
                    assert_eq!(r.len(), n);
                    r.into_iter()
                        .map(|k| FieldValue::from_integer(FieldId::Q, k))
                        .collect()
                })
                .collect(),
        )
    }

    /// x1*x2*x3*x4 - sum_{i<j} x_i*x_j + 1.
    fn her_example_f() -> Poly {
        parse(
            "x1*x2*x3*x4 - x1*x2 - x1*x3 - x1*x4 - x2*x3 - x2*x4 - x3*x4 + 1",
            FieldId::Q,
            4,
        )
        .unwrap()
    }

    /// The three Hermitian witnesses for the quartic example, up to
    /// diagonal equivalence.
    fn her_example_matrices() -> Vec<Mat> {
        let e = |k: i64, l: i64| qi(k, l);
        let rows = |data: Vec<Vec<(i64, i64)>>| {
            Mat::from_rows(
                FieldId::Qi,
                data.into_iter()
                    .map(|r| r.into_iter().map(|(k, l)| e(k, l)).collect())
                    .collect(),
            )
        };
        vec![
            rows(vec![
                vec![(0, 0), (-1, 0), (0, 1), (0, 1)],
                vec![(-1, 0), (0, 0), (-1, 0), (-1, 0)],
                vec![(0, -1), (-1, 0), (0, 0), (0, -1)],
                vec![(0, -1), (-1, 0), (0, 1), (0, 0)],
            ]),
            rows(vec![
                vec![(0, 0), (-1, 0), (0, 1), (0, 1)],
                vec![(-1, 0), (0, 0), (-1, 0), (-1, 0)],
                vec![(0, -1), (-1, 0), (0, 0), (0, 1)],
                vec![(0, -1), (-1, 0), (0, -1), (0, 0)],
            ]),
            rows(vec![
                vec![(0, 0), (-1, 0), (0, 1), (0, -1)],
                vec![(-1, 0), (0, 0), (-1, 0), (-1, 0)],
                vec![(0, -1), (-1, 0), (0, 0), (0, -1)],
                vec![(0, 1), (-1, 0), (0, 1), (0, 0)],
            ]),
        ]
    }

    /// Entrywise conjugation (the transpose, for a Hermitian matrix):
    /// the other orientation of the same representation class.
    fn entrywise_conj(a: &Mat) -> Mat {
        let mut out = Mat::zero(a.field, a.n);
        for i in 0..a.n {
            for j in 0..a.n {
                out.set(i, j, a.at(i, j).conj());
            }
        }
        out
    }

    /// Invariants matching iff two matrices are diagonally similar in
    /// either orientation.
    fn equivalent_rep(a: &Mat, b: &Mat) -> bool {
        let ia = diag_equiv_invariants(a);
        ia == diag_equiv_invariants(b) || ia == diag_equiv_invariants(&entrywise_conj(b))
    }

    /// Diagonal-similarity invariants: diagonal entries, opposite
    /// products `a_ij * a_ji`, and directed 3-cycle products.
    fn diag_equiv_invariants(a: &Mat) -> Vec<FieldValue> {
        let n = a.n;
        let mut out = Vec::new();
        for i in 0..n {
            out.push(a.at(i, i).clone());
        }
        for i in 0..n {
            for j in i + 1..n {
                out.push(a.at(i, j).mul(a.at(j, i)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i < j && j != k && i < k {
                        out.push(a.at(i, j).mul(a.at(j, k)).mul(a.at(k, i)));
                    }
                }
            }
        }
        out
    }

    fn random_hermitian_gauss<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Mat {
        let mut a = Mat::zero(FieldId::Qi, n);
        for i in 0..n {
            a.set(i, i, qi(rng.gen_range(-bound..=bound), 0));
            for j in i + 1..n {
                let v = qi(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
                a.set(i, j, v.clone());
                a.set(j, i, v.conj());
            }
        }
        a
    }

    #[test]
    fn principal_minors_examples() {
        let a = qmat(vec![vec![1, 2], vec![3, 4]]);
        let mv = principal_minors(&a);
        let want: Vec<FieldValue> = [1, 1, 4, -2]
            .iter()
            .map(|&k| FieldValue::from_integer(FieldId::Q, k))
            .collect();
        assert_eq!(mv.minors, want);
        let id = Mat::identity(FieldId::Q, 3);
        assert!(principal_minors(&id).minors.iter().all(|v| v.is_one()));
        let z = Mat::zero(FieldId::Q, 3);
        let mz = principal_minors(&z);
        assert!(mz.minors[0].is_one());
        assert!(mz.minors[1..].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn minor_poly_round_trip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let mut minors = vec![FieldValue::one(FieldId::Q)];
            for _ in 1..1usize << n {
                minors.push(FieldValue::from_integer(FieldId::Q, rng.gen_range(-9i64..=9)));
            }
            let mv = MinorVector::new(FieldId::Q, n, minors).unwrap();
            let f = mv.poly();
            assert_eq!(poly_to_minors(&f).unwrap(), mv);
        }
        // only the full product: the all-but-empty-zero vector
        let mut minors = vec![FieldValue::zero(FieldId::Q); 8];
        minors[0] = FieldValue::one(FieldId::Q);
        let mv = MinorVector::new(FieldId::Q, 3, minors).unwrap();
        assert_eq!(mv.poly(), parse("x1*x2*x3", FieldId::Q, 3).unwrap());
    }

    #[test]
    fn charpoly_examples() {
        let a = qmat(vec![vec![5]]);
        assert_eq!(charpoly(&a), parse("x1 + 5", FieldId::Q, 1).unwrap());
        let d = qmat(vec![vec![2, 0], vec![0, 3]]);
        let want = parse("x1 + 2", FieldId::Q, 2)
            .unwrap()
            .mul(&parse("x2 + 3", FieldId::Q, 2).unwrap());
        assert_eq!(charpoly(&d), want);
    }

    #[test]
    fn charpoly_minors_agree() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let entries: Vec<FieldValue> = (0..n * n)
                .map(|_| FieldValue::from_integer(FieldId::Q, rng.gen_range(-5i64..=5)))
                .collect();
            let a = Mat::new(FieldId::Q, n, entries);
            assert_eq!(poly_to_minors(&charpoly(&a)).unwrap(), principal_minors(&a));
        }
    }

    #[test]
    fn json_round_trips() {
        let a = qmat(vec![vec![1, 2], vec![3, 4]]);
        let mv = principal_minors(&a);
        let j = mv.to_json();
        assert_eq!(j["minors"]["0"], "1");
        assert_eq!(j["minors"]["3"], "-2");
        assert_eq!(MinorVector::from_json(&j).unwrap(), mv);
        let rep = DetRep::new(a);
        let jr = rep.to_json();
        assert_eq!(DetRep::from_json(&jr).unwrap(), rep);
    }

    #[test]
    fn rep_from_g_two_by_two() {
        // f = (x1+a)(x2+d) - bc for A = [[a,b],[c,d]]
        let a = qmat(vec![vec![1, 2], vec![3, 4]]);
        let f = charpoly(&a);
        let g = GMatrix::new(PMat::char_matrix(&a).adjugate()).unwrap();
        let rep = rep_from_g(&g, &f).unwrap();
        assert_eq!(rep.a, a);
    }

    /// The printed minor witness matrix of the quartic example: its
    /// adjugate divided by f^2 is the first listed Hermitian matrix.
    #[test]
    fn rep_from_g_quartic_example() {
        let f = her_example_f().promote(FieldId::Qi);
        let x = |k: usize| Poly::var(FieldId::Qi, 4, k);
        let c = |k: i64, l: i64| Poly::constant(4, qi(k, l));
        let lin = |k: usize, l: i64| x(k).add(&c(0, l));
        // off-diagonal entries as printed, diagonal from the derivatives
        let mut entries = vec![Poly::zero(FieldId::Qi, 4); 16];
        for i in 0..4 {
            entries[i * 4 + i] = f.derivative(i);
        }
        let put = |entries: &mut Vec<Poly>, i: usize, j: usize, p: Poly| {
            entries[i * 4 + j] = p;
        };
        put(&mut entries, 0, 1, lin(2, -1).mul(&lin(3, -1)));
        put(&mut entries, 0, 2, c(0, -1).mul(&lin(1, 1)).mul(&lin(3, -1)));
        put(&mut entries, 0, 3, c(0, -1).mul(&lin(1, 1)).mul(&lin(2, 1)));
        put(&mut entries, 1, 2, lin(0, -1).mul(&lin(3, -1)));
        put(&mut entries, 1, 3, lin(0, -1).mul(&lin(2, 1)));
        put(&mut entries, 2, 3, c(0, 1).mul(&lin(0, -1)).mul(&lin(1, -1)));
        for i in 0..4 {
            for j in i + 1..4 {
                entries[j * 4 + i] = entries[i * 4 + j].conj();
            }
        }
        let g = GMatrix::new(PMat::new(FieldId::Qi, 4, 4, entries)).unwrap();
        let rep = rep_from_g(&g, &f).unwrap();
        assert!(rep.hermitian);
        assert_eq!(rep.a, her_example_matrices()[0]);
    }

    #[test]
    fn algorithm_quartic_example() {
        let f = her_example_f();
        let rep = algorithm1(&f).unwrap().witness().expect("member");
        assert!(rep.hermitian);
        assert_eq!(rep.charpoly(), f.promote(FieldId::Qi));
        let matches = her_example_matrices()
            .iter()
            .filter(|m| equivalent_rep(&rep.a, m))
            .count();
        assert_eq!(matches, 1, "witness must match exactly one listed matrix");
    }

    #[test]
    fn algorithm_char2_example() {
        let f = parse("x1*x2*x3 + x1 + x2 + x3 + 1", FieldId::F2, 3).unwrap();
        let rep = algorithm1(&f).unwrap().witness().expect("member");
        assert!(rep.hermitian);
        assert_eq!(rep.charpoly(), f.promote(FieldId::F4));
        // the printed witness over the quadratic extension of F2
        let al = FieldValue::generator(FieldId::F4);
        let alb = al.conj();
        let zero = FieldValue::zero(FieldId::F4);
        let printed = Mat::from_rows(
            FieldId::F4,
            vec![
                vec![zero.clone(), alb.clone(), alb.clone()],
                vec![al.clone(), zero.clone(), alb.clone()],
                vec![al.clone(), al.clone(), zero.clone()],
            ],
        );
        assert_eq!(charpoly(&printed), f.promote(FieldId::F4));
        assert!(equivalent_rep(&rep.a, &printed));
    }

    #[test]
    fn algorithm_split_polynomial() {
        let f = parse("x1 + 2", FieldId::Q, 3)
            .unwrap()
            .mul(&parse("x2 - 3", FieldId::Q, 3).unwrap())
            .mul(&parse("x3 + 5", FieldId::Q, 3).unwrap());
        let rep = algorithm1(&f).unwrap().witness().expect("member");
        let want = vec![2i64, -3, 5];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(*rep.a.at(i, i), qi(*w, 0));
            for j in 0..3 {
                if i != j {
                    assert!(rep.a.at(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn algorithm_scalar_norm_refutation() {
        // nu = a1*a2 - a12 = 3 is not a Gaussian norm
        let f = parse("x1*x2 - 3", FieldId::Q, 2).unwrap();
        let out = algorithm1(&f).unwrap();
        let cond = out.condition().expect("refuted");
        assert!(cond.contains("not a Hermitian square"), "{cond}");
    }

    #[test]
    fn algorithm_delta_refutation() {
        // Delta_12 = -x3 has odd degree, never a Hermitian square
        let f = parse("x1*x2*x3 + 1", FieldId::Q, 3).unwrap();
        let out = algorithm1(&f).unwrap();
        assert!(out.condition().expect("refuted").contains("Hermitian square"));
    }

    #[test]
    fn algorithm_needs_generic_move() {
        // symmetric witness whose trailing 2x2 block is diagonal, so
        // df/dx1 factors and the genericity assumption fails
        let a = qmat(vec![vec![1, 1, 1], vec![1, 2, 0], vec![1, 0, 3]]);
        let f = charpoly(&a);
        assert!(!assumption_derivatives_irreducible(&f));
        let rep = algorithm1(&f).unwrap().witness().expect("member");
        assert!(rep.hermitian);
        assert_eq!(rep.charpoly(), f.promote(FieldId::Qi));
    }

    #[test]
    fn algorithm_hermitian_round_trip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for trial in 0..12 {
            let n = 3 + (trial % 2);
            let a = random_hermitian_gauss(&mut rng, n, 3);
            let f = charpoly(&a);
            let minors = a.principal_minors();
            let fq = match f.restrict() {
                Some(fq) => fq,
                None => continue, // Gaussian minors: stay on fixed-field instances
            };
            let rep = algorithm1(&fq).unwrap().witness().expect("member");
            assert!(rep.hermitian);
            assert_eq!(rep.a.principal_minors(), minors);
        }
    }

    #[test]
    fn algorithm_matches_hermitian_square_test() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut done = 0;
        while done < 25 {
            let n = 3;
            let mut f = Poly::zero(FieldId::Q, n);
            for mask in 0..1u32 << n {
                let c = if mask == (1 << n) - 1 {
                    1
                } else {
                    rng.gen_range(-4i64..=4)
                };
                let exps: Vec<u32> = (0..n).map(|i| mask >> i & 1).collect();
                f.insert_term(Monomial(exps), FieldValue::from_integer(FieldId::Q, c));
            }
            let mut all_squares = true;
            for i in 0..n {
                for j in i + 1..n {
                    let d = delta(&f, i, j);
                    if !hermitian_square_factor(&d).unwrap().is_witness() {
                        all_squares = false;
                    }
                }
            }
            done += 1;
            match algorithm1(&f) {
                Ok(out) => assert_eq!(
                    out.is_witness(),
                    all_squares,
                    "membership must agree with the Hermitian-square test on {f}"
                ),
                Err(Error::BoundExceeded(_)) => panic!("retry budget exhausted on {f}"),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn image_general_two_by_two() {
        let minors = vec![
            FieldValue::one(FieldId::Q),
            FieldValue::from_integer(FieldId::Q, 4),
            FieldValue::from_integer(FieldId::Q, -1),
            FieldValue::from_integer(FieldId::Q, 7),
        ];
        let mv = MinorVector::new(FieldId::Q, 2, minors).unwrap();
        let rep = is_in_image_general(&mv).unwrap().witness().expect("member");
        assert_eq!(principal_minors(&rep.a), mv);
        // witness shape [[a1, 1], [a1*a2 - a12, a2]]
        assert!(rep.a.at(0, 1).is_one());
        assert_eq!(*rep.a.at(1, 0), FieldValue::from_integer(FieldId::Q, -11));
    }

    #[test]
    fn image_general_round_trip_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let entries: Vec<FieldValue> = (0..n * n)
                .map(|_| FieldValue::from_integer(FieldId::Q, rng.gen_range(-4i64..=4)))
                .collect();
            let a = Mat::new(FieldId::Q, n, entries);
            let mv = principal_minors(&a);
            let rep = is_in_image_general(&mv).unwrap().witness().expect("member");
            assert_eq!(principal_minors(&rep.a), mv);
        }
    }

    #[test]
    fn image_general_resultant_obstruction() {
        let f = parse(
            "x1*x2*x3*x4*x5 + x1*x2*x3*x4 + x1*x2*x3*x5 + x1*x2*x4*x5 + x1*x3*x4*x5 \
             + x2*x3*x4*x5 + x1*x2*x4 + x1*x2*x5 + x1*x3*x4 + x2*x3*x5 + x3*x4*x5",
            FieldId::Q,
            5,
        )
        .unwrap();
        let mv = poly_to_minors(&f).unwrap();
        let out = is_in_image_general(&mv).unwrap();
        let cond = out.condition().expect("refuted");
        for factor in ["x1*x5 + x1 + x5", "x2*x4 + x2 + x4", "x4*x5 + x4 + x5"] {
            assert!(cond.contains(factor), "certificate must list ({factor}): {cond}");
        }
        assert!(cond.contains("3 irreducible factors"), "{cond}");
    }

    #[test]
    fn image_general_bound() {
        let minors = vec![FieldValue::one(FieldId::Q); 1 << 7];
        let mv = MinorVector::new(FieldId::Q, 7, minors).unwrap();
        assert!(matches!(
            is_in_image_general(&mv),
            Err(Error::BoundExceeded(_))
        ));
    }

    #[test]
    fn image_hermitian_round_trip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        let mut done = 0;
        while done < 6 {
            let a = random_hermitian_gauss(&mut rng, 3, 3);
            let minors = a.principal_minors();
            if minors.iter().any(|v| !v.is_fixed()) {
                continue;
            }
            done += 1;
            let fixed: Vec<FieldValue> = minors.iter().map(|v| v.restrict().unwrap()).collect();
            let mv = MinorVector::new(FieldId::Q, 3, fixed).unwrap();
            let rep = is_in_image_hermitian(&mv).unwrap().witness().expect("member");
            assert!(rep.hermitian);
            assert_eq!(rep.a.principal_minors(), minors);
        }
    }

    #[test]
    fn necessary_conditions_real_symmetric_pass() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..3 {
            let n = 4;
            let mut a = Mat::zero(FieldId::Q, n);
            for i in 0..n {
                a.set(i, i, FieldValue::from_integer(FieldId::Q, rng.gen_range(-3i64..=3)));
                for j in i + 1..n {
                    let v = FieldValue::from_integer(FieldId::Q, rng.gen_range(-3i64..=3));
                    a.set(i, j, v.clone());
                    a.set(j, i, v);
                }
            }
            let mv = principal_minors(&a);
            let report =
                necessary_conditions_hermitian(&mv, NecessaryMode::RealClosure, 1, 8).unwrap();
            assert!(
                report.all_pass(),
                "failed: {:?}",
                report.conditions.iter().filter(|c| !c.pass).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn necessary_conditions_scalar_failure() {
        // a1*a2 - a12 = -1 < 0
        let minors = vec![
            FieldValue::one(FieldId::Q),
            FieldValue::zero(FieldId::Q),
            FieldValue::zero(FieldId::Q),
            FieldValue::one(FieldId::Q),
        ];
        let mv = MinorVector::new(FieldId::Q, 2, minors).unwrap();
        let report =
            necessary_conditions_hermitian(&mv, NecessaryMode::RealClosure, 0, 1).unwrap();
        let first = &report.conditions[0];
        assert!(first.name.contains("a1*a2 - a0*a12"));
        assert!(!first.pass);
    }

    #[test]
    fn rank_one_examples() {
        // [[2, 1+i], [1-i, 1]] = v v* for v = (1+i, 1)
        let a = Mat::from_rows(
            FieldId::Qi,
            vec![vec![qi(2, 0), qi(1, 1)], vec![qi(1, -1), qi(1, 0)]],
        );
        let v = rank_one_extract(&a).unwrap().witness().expect("rank one");
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(v[i].mul(&v[j].conj()), *a.at(i, j));
            }
        }
        let id = Mat::identity(FieldId::Qi, 2);
        assert!(rank_one_extract(&id)
            .unwrap()
            .condition()
            .unwrap()
            .contains("rank is 2"));
        let z = Mat::zero(FieldId::Qi, 2);
        let vz = rank_one_extract(&z).unwrap().witness().unwrap();
        assert!(vz.iter().all(|x| x.is_zero()));
        // diagonal 3 is not a Gaussian norm
        let b = Mat::from_rows(
            FieldId::Qi,
            vec![vec![qi(3, 0), qi(3, 0)], vec![qi(3, 0), qi(3, 0)]],
        );
        assert!(rank_one_extract(&b)
            .unwrap()
            .condition()
            .unwrap()
            .contains("not a norm"));
    }

    #[test]
    fn hermitize_examples() {
        // already Hermitian: identity conjugator
        let h = Mat::from_rows(
            FieldId::Qi,
            vec![vec![qi(1, 0), qi(2, 3)], vec![qi(2, -3), qi(5, 0)]],
        );
        let d = hermitize_by_diagonal(&h).unwrap().witness().unwrap();
        assert!(d.iter().all(|x| x.is_one()));
        // [[0,1],[2,0]]: needs sqrt(2) outside Q
        let b = Mat::from_rows(
            FieldId::Qi,
            vec![vec![qi(0, 0), qi(1, 0)], vec![qi(2, 0), qi(0, 0)]],
        );
        assert!(hermitize_by_diagonal(&b)
            .unwrap()
            .condition()
            .unwrap()
            .contains("square root outside field"));
    }

    #[test]
    fn hermitize_round_trip() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..10 {
            let n = rng.gen_range(2..=4);
            let h = random_hermitian_gauss(&mut rng, n, 3);
            let d0: Vec<FieldValue> = (0..n)
                .map(|_| {
                    let k = rng.gen_range(1i64..=3);
                    qi(k * k, 0)
                })
                .collect();
            let scrambled = h.diagonal_conjugate(&d0);
            match hermitize_by_diagonal(&scrambled).unwrap() {
                Outcome::Witness(d) => {
                    assert!(scrambled.diagonal_conjugate(&d).is_hermitian());
                }
                Outcome::Refuted { condition } => {
                    panic!("round trip must succeed: {condition}")
                }
            }
        }
    }

    /// Extending `diag(x)+A` by `y*A0`: the degree in `y` of the
    /// determinant equals the rank of the Hermitian coefficient matrix.
    #[test]
    fn pencil_degree_equals_rank() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(67);
        for rank in 0..=2usize {
            for _ in 0..5 {
                let n = 4;
                let a = random_hermitian_gauss(&mut rng, n, 2);
                // A0 = sum of `rank` rank-one Hermitian terms
                let mut a0 = Mat::zero(FieldId::Qi, n);
                for _ in 0..rank {
                    let v: Vec<FieldValue> = (0..n)
                        .map(|_| qi(rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2)))
                        .collect();
                    for i in 0..n {
                        for j in 0..n {
                            let t = a0.at(i, j).add(&v[i].mul(&v[j].conj()));
                            a0.set(i, j, t);
                        }
                    }
                }
                if a0.rank() != rank {
                    continue; // unlucky draw: dependent rank-one terms
                }
                // entries over n+1 variables; y is the last variable
                let mut entries = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        let mut e = Poly::constant(n + 1, a.at(i, j).clone());
                        if i == j {
                            e = e.add(&Poly::var(FieldId::Qi, n + 1, i));
                        }
                        e = e.add(&Poly::var(FieldId::Qi, n + 1, n)
                            .scale(a0.at(i, j)));
                        entries.push(e);
                    }
                }
                let det = PMat::new(FieldId::Qi, n + 1, n, entries).det();
                assert_eq!(det.deg(n).unwrap_or(0) as usize, rank);
            }
        }
    }

    #[test]
    fn transported_representation_stays_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let n = rng.gen_range(2..=4);
            let entries: Vec<FieldValue> = (0..n * n)
                .map(|_| FieldValue::from_integer(FieldId::Q, rng.gen_range(-3i64..=3)))
                .collect();
            let a = Mat::new(FieldId::Q, n, entries);
            let gammas = (0..n).map(|_| SL2::random(&mut rng, FieldId::Q, 2)).collect();
            let g = GroupElement::from_gammas(gammas);
            let f = charpoly(&a);
            let gf = act_on_poly(&g, &f, &vec![1; n]).unwrap();
            match act_on_matrix(&g, &a) {
                Ok((beta, b)) => {
                    let scaled = gf.scale(&beta.inv());
                    assert_eq!(principal_minors(&b).minors, coeff_vector(&scaled));
                }
                Err(_) => continue, // degenerate orbit point
            }
        }
    }
}

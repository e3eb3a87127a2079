//! Sparse exact multivariate polynomials over the fields of
//! [`crate::exactfield`], with the operations the rest of the crate
//! leans on: slices `f_S^T`, (multi)homogenization, exact division,
//! primitive-PRS gcd, and an ASCII grammar.
//!
//! Grammar: `expr := term (('+'|'-') term)*`;
//! `term := coeff ('*' factor)* | factor ('*' factor)*`;
//! `factor := var ('^' uint)?`; `var := 'x' uint` (1-indexed);
//! `coeff := rational | '(' extension-literal ')'`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::exactfield::{parse_literal, FieldId, FieldValue};

/// Exponent vector; ordered by total degree, then lexicographically.
/// The *largest* element under this order is the leading monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial(
            other
                .0
                .iter()
                .zip(&self.0)
                .map(|(b, a)| b - a)
                .collect(),
        )
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse polynomial; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub field: FieldId,
    pub nvars: usize,
    terms: BTreeMap<Monomial, FieldValue>,
}

impl Poly {
    pub fn zero(field: FieldId, nvars: usize) -> Poly {
        Poly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: FieldValue) -> Poly {
        let mut p = Poly::zero(c.field(), nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    pub fn one(field: FieldId, nvars: usize) -> Poly {
        Poly::constant(nvars, FieldValue::one(field))
    }

    pub fn from_int(field: FieldId, nvars: usize, k: i64) -> Poly {
        Poly::constant(nvars, FieldValue::from_integer(field, k))
    }

    /// The variable `x_i`, 0-based index.
    pub fn var(field: FieldId, nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(field, nvars);
        p.terms.insert(Monomial(e), FieldValue::one(field));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1
            && self
                .terms
                .keys()
                .all(|m| m.total_degree() == 0)
    }

    pub fn constant_value(&self) -> Option<FieldValue> {
        if self.is_zero() {
            return Some(FieldValue::zero(self.field));
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldValue)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldValue {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| FieldValue::zero(self.field))
    }

    /// Coefficient of the monomial with the given exponent vector.
    pub fn coeff_exps(&self, exps: &[u32]) -> FieldValue {
        self.coeff(&Monomial(exps.to_vec()))
    }

    pub fn insert_term(&mut self, m: Monomial, c: FieldValue) {
        assert_eq!(m.0.len(), self.nvars, "exponent vector length");
        assert_eq!(c.field(), self.field, "term field");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Degree in variable `i` (0-based); `None` for the zero polynomial.
    pub fn deg(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Degree vector with 0 for absent variables (zero poly → all 0).
    pub fn degree_vector(&self) -> Vec<u32> {
        (0..self.nvars).map(|i| self.deg(i).unwrap_or(0)).collect()
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.deg(i).unwrap_or(0) > 0
    }

    /// Degree at most 1 in every variable.
    pub fn is_multiaffine(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e <= 1))
    }

    /// Degree at most 2 in every variable.
    pub fn is_multiquadratic(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e <= 2))
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn leading_coeff(&self) -> FieldValue {
        self.terms
            .values()
            .next_back()
            .cloned()
            .unwrap_or_else(|| FieldValue::zero(self.field))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.compat(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.compat(other);
        let mut out = Poly::zero(self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldValue) -> Poly {
        assert_eq!(c.field(), self.field);
        if c.is_zero() {
            return Poly::zero(self.field, self.nvars);
        }
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.mul(c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field, self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn compat(&self, other: &Poly) {
        assert_eq!(self.field, other.field, "mixed-field polynomials");
        assert_eq!(self.nvars, other.nvars, "variable-count mismatch");
    }

    /// Formal partial derivative with respect to variable `i` (0-based).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] = e - 1;
            let factor = FieldValue::from_integer(self.field, e as i64);
            out.insert_term(Monomial(exps), c.mul(&factor));
        }
        out
    }

    /// Substitute `x_i := v`; the result keeps all `nvars` slots.
    pub fn specialize(&self, i: usize, v: &FieldValue) -> Poly {
        assert_eq!(v.field(), self.field);
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut exps = m.0.clone();
            exps[i] = 0;
            out.insert_term(Monomial(exps), c.mul(&v.pow(e)));
        }
        out
    }

    /// The slice `f_S^T`: differentiate once in each variable of `S`,
    /// then set each variable of `T` to zero.  `S` and `T` are 0-based
    /// and must be disjoint.
    pub fn slice(&self, s: &[usize], t: &[usize]) -> Poly {
        assert!(
            s.iter().all(|i| !t.contains(i)),
            "slice: S and T must be disjoint"
        );
        let mut out = self.clone();
        for &i in s {
            out = out.derivative(i);
        }
        let zero = FieldValue::zero(self.field);
        for &j in t {
            out = out.specialize(j, &zero);
        }
        out
    }

    /// Substitute the polynomial `p` (same ambient variables) for `x_i`.
    pub fn substitute(&self, i: usize, p: &Poly) -> Poly {
        self.compat(p);
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut exps = m.0.clone();
            exps[i] = 0;
            let mut term = Poly::zero(self.field, self.nvars);
            term.terms.insert(Monomial(exps), c.clone());
            out = out.add(&term.mul(&p.pow(e)));
        }
        out
    }

    /// Relabel variables: new exponent of variable `perm[i]` is the old
    /// exponent of variable `i` (i.e. `x_i -> x_{perm[i]}`).
    pub fn permute_vars(&self, perm: &[usize]) -> Poly {
        assert_eq!(perm.len(), self.nvars);
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; self.nvars];
            for (i, &e) in m.0.iter().enumerate() {
                exps[perm[i]] = e;
            }
            out.insert_term(Monomial(exps), c.clone());
        }
        out
    }

    /// `prod_i y_i^{d_i} * f(x_1/y_1, ...)` in `2n` variables, the first
    /// `n` being the `x_i` and the last `n` the `y_i`.
    pub fn multihomogenize(&self, d: &[u32]) -> Result<Poly, Error> {
        assert_eq!(d.len(), self.nvars);
        let n = self.nvars;
        let mut out = Poly::zero(self.field, 2 * n);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; 2 * n];
            for i in 0..n {
                if m.0[i] > d[i] {
                    return Err(Error::Unsupported(format!(
                        "degree {} in x{} exceeds the bound {}",
                        m.0[i],
                        i + 1,
                        d[i]
                    )));
                }
                exps[i] = m.0[i];
                exps[n + i] = d[i] - m.0[i];
            }
            out.insert_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Inverse of [`Poly::multihomogenize`]: set all `y_i := 1` and drop
    /// the `y` slots.  `self` must live in `2n` variables.
    pub fn dehomogenize_pairs(&self) -> Poly {
        assert_eq!(self.nvars % 2, 0);
        let n = self.nvars / 2;
        let mut out = Poly::zero(self.field, n);
        for (m, c) in &self.terms {
            out.insert_term(Monomial(m.0[..n].to_vec()), c.clone());
        }
        out
    }

    /// Standard homogenization to total degree `deg(f)` with one extra
    /// variable appended at index `nvars`.
    pub fn homogenize(&self) -> Poly {
        let d = self.total_degree().unwrap_or(0);
        let mut out = Poly::zero(self.field, self.nvars + 1);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.push(d - m.total_degree());
            out.insert_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Extend the ambient variable count (new variables unused).
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars);
        let mut out = Poly::zero(self.field, nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.resize(nvars, 0);
            out.insert_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Drop trailing unused variable slots down to `nvars`.
    pub fn truncate_vars(&self, nvars: usize) -> Poly {
        assert!(nvars <= self.nvars);
        let mut out = Poly::zero(self.field, nvars);
        for (m, c) in &self.terms {
            assert!(
                m.0[nvars..].iter().all(|&e| e == 0),
                "truncate_vars: dropped variable occurs"
            );
            out.insert_term(Monomial(m.0[..nvars].to_vec()), c.clone());
        }
        out
    }

    /// Coefficient-wise conjugation.
    pub fn conj(&self) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.conj());
        }
        out
    }

    /// All coefficients fixed by the involution.
    pub fn is_fixed(&self) -> bool {
        self.terms.values().all(|c| c.is_fixed())
    }

    /// Coefficient-wise embedding into the extension field.
    pub fn promote(&self, target: FieldId) -> Poly {
        let mut out = Poly::zero(target, self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.promote(target));
        }
        out
    }

    /// Coefficient-wise restriction to the fixed field; `None` if some
    /// coefficient is not fixed.
    pub fn restrict(&self) -> Option<Poly> {
        let target = self.field.fixed_field();
        let mut out = Poly::zero(target, self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.restrict()?);
        }
        Some(out)
    }

    /// Evaluate at a full point.
    pub fn eval(&self, point: &[FieldValue]) -> FieldValue {
        assert_eq!(point.len(), self.nvars);
        let mut acc = FieldValue::zero(self.field);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&point[i].pow(e));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Coefficients of `self` viewed as univariate in `x_k`; index =
    /// power of `x_k`; each entry keeps all `nvars` slots with
    /// `deg_k = 0`.  Length is `deg_k + 1` (empty for the zero poly).
    pub fn coeffs_in_var(&self, k: usize) -> Vec<Poly> {
        let d = match self.deg(k) {
            None => return Vec::new(),
            Some(d) => d,
        };
        let mut out = vec![Poly::zero(self.field, self.nvars); (d + 1) as usize];
        for (m, c) in &self.terms {
            let e = m.0[k] as usize;
            let mut exps = m.0.clone();
            exps[k] = 0;
            out[e].insert_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Rebuild from `coeffs_in_var` output.
    pub fn from_coeffs_in_var(
        field: FieldId,
        nvars: usize,
        k: usize,
        coeffs: &[Poly],
    ) -> Poly {
        let mut out = Poly::zero(field, nvars);
        for (e, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut exps = m.0.clone();
                exps[k] += e as u32;
                out.insert_term(Monomial(exps), v.clone());
            }
        }
        out
    }

    /// Monic canonicalization: returns `(monic, scalar)` with
    /// `self = scalar * monic` and `monic` having leading coefficient 1
    /// in graded-lex order.  The zero polynomial returns `(0, 1)`.
    pub fn monic(&self) -> (Poly, FieldValue) {
        if self.is_zero() {
            return (self.clone(), FieldValue::one(self.field));
        }
        let lc = self.leading_coeff();
        (self.scale(&lc.inv()), lc)
    }

    /// Exact division: `Some(q)` with `self = q * g`, else `None`.
    pub fn div_exact(&self, g: &Poly) -> Option<Poly> {
        self.compat(g);
        assert!(!g.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let mut q = Poly::zero(self.field, self.nvars);
        let glm = g.leading_monomial().unwrap().clone();
        let glc = g.leading_coeff();
        while !r.is_zero() {
            let rlm = r.leading_monomial().unwrap().clone();
            if !glm.divides(&rlm) {
                return None;
            }
            let qm = glm.quotient(&rlm);
            let qc = r.leading_coeff().div(&glc);
            let mut t = Poly::zero(self.field, self.nvars);
            t.terms.insert(qm, qc);
            q = q.add(&t);
            r = r.sub(&t.mul(g));
        }
        Some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Content with respect to `x_k`: the (monic) gcd of the
    /// `x_k`-coefficients.
    fn content_wrt(&self, k: usize) -> Poly {
        let coeffs = self.coeffs_in_var(k);
        let mut g = Poly::zero(self.field, self.nvars);
        for c in &coeffs {
            g = gcd(&g, c);
            if g.is_constant() && !g.is_zero() {
                break;
            }
        }
        g
    }

    /// Pseudo-remainder of `self` by `g`, both viewed as univariate in
    /// `x_k`; requires `deg_k(g) >= 1`.
    fn prem(&self, g: &Poly, k: usize) -> Poly {
        let dg = g.deg(k).expect("prem: zero divisor");
        let g_coeffs = g.coeffs_in_var(k);
        let lc_g = &g_coeffs[dg as usize];
        let mut r = self.clone();
        while let Some(dr) = r.deg(k) {
            if dr < dg {
                break;
            }
            let r_coeffs = r.coeffs_in_var(k);
            let lc_r = &r_coeffs[dr as usize];
            let shift = {
                let mut e = vec![0u32; self.nvars];
                e[k] = dr - dg;
                let mut p = Poly::zero(self.field, self.nvars);
                p.insert_term(Monomial(e), FieldValue::one(self.field));
                p
            };
            r = r.mul(lc_g).sub(&shift.mul(lc_r).mul(g));
        }
        r
    }
}

/// Monic greatest common divisor via content/primitive-part reduction
/// and a primitive pseudo-remainder sequence.
pub fn gcd(f: &Poly, g: &Poly) -> Poly {
    if f.is_zero() {
        return g.monic().0;
    }
    if g.is_zero() {
        return f.monic().0;
    }
    if f.is_constant() || g.is_constant() {
        return Poly::one(f.field, f.nvars);
    }
    // Main variable: the highest index occurring in either input.
    let k = (0..f.nvars)
        .rev()
        .find(|&i| f.depends_on(i) || g.depends_on(i))
        .expect("non-constant polynomial has a variable");
    if !f.depends_on(k) {
        // k occurs only in g: gcd divides every x_k-coefficient of g.
        return gcd(f, &g.content_wrt(k));
    }
    if !g.depends_on(k) {
        return gcd(&f.content_wrt(k), g);
    }
    let cont_f = f.content_wrt(k);
    let cont_g = g.content_wrt(k);
    let prim_f = f.div_exact(&cont_f).expect("content divides");
    let prim_g = g.div_exact(&cont_g).expect("content divides");
    let cont = gcd(&cont_f, &cont_g);

    let (mut a, mut b) = if prim_f.deg(k) >= prim_g.deg(k) {
        (prim_f, prim_g)
    } else {
        (prim_g, prim_f)
    };
    loop {
        let r = a.prem(&b, k);
        if r.is_zero() {
            break;
        }
        let rc = r.content_wrt(k);
        a = b;
        b = r.div_exact(&rc).expect("content divides");
        if !b.depends_on(k) {
            // Coprime in the main variable.
            b = Poly::one(f.field, f.nvars);
            break;
        }
    }
    cont.mul(&b).monic().0
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: FieldId,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(msg, self.pos)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src.get(self.pos).map(|&b| b as char)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u64, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number too large"))
    }

    /// rational := uint ('/' uint)?  (sign handled by the caller)
    fn rational_text(&mut self) -> Result<String, Error> {
        let n = self.uint()?;
        if self.eat('/') {
            let d = self.uint()?;
            Ok(format!("{n}/{d}"))
        } else {
            Ok(format!("{n}"))
        }
    }

    fn coeff(&mut self) -> Result<FieldValue, Error> {
        if self.peek() == Some('(') {
            let start = self.pos;
            let mut depth = 0usize;
            loop {
                match self.bump() {
                    Some('(') => depth += 1,
                    Some(')') => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    Some(_) => {}
                    None => return Err(self.err("unterminated '('")),
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            parse_literal(text, self.field)
        } else {
            let text = self.rational_text()?;
            parse_literal(&text, self.field)
        }
    }

    /// factor := 'x' uint ('^' uint)?
    fn factor(&mut self) -> Result<(usize, u32), Error> {
        if !self.eat('x') {
            return Err(self.err("expected a variable"));
        }
        let idx = self.uint()? as usize;
        if idx == 0 || idx > self.nvars {
            return Err(self.err(format!(
                "variable index {idx} out of range 1..={}",
                self.nvars
            )));
        }
        let e = if self.eat('^') { self.uint()? as u32 } else { 1 };
        Ok((idx - 1, e))
    }

    fn term(&mut self) -> Result<(Monomial, FieldValue), Error> {
        let mut coeff = FieldValue::one(self.field);
        let mut exps = vec![0u32; self.nvars];
        let mut saw_factor = false;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '(' => {
                coeff = self.coeff()?;
            }
            Some('x') => {
                let (i, e) = self.factor()?;
                exps[i] += e;
                saw_factor = true;
            }
            _ => return Err(self.err("expected a term")),
        }
        loop {
            let save = self.pos;
            if self.eat('*') {
                let (i, e) = self.factor()?;
                exps[i] += e;
            } else if !saw_factor && self.peek() == Some('x') {
                // tolerate "3x1" style implicit products
                let (i, e) = self.factor()?;
                exps[i] += e;
                saw_factor = true;
            } else {
                self.pos = save;
                break;
            }
        }
        Ok((Monomial(exps), coeff))
    }

    fn expr(&mut self) -> Result<Poly, Error> {
        let mut out = Poly::zero(self.field, self.nvars);
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let (m, c) = self.term()?;
            let c = if sign < 0 { c.neg() } else { c };
            out.insert_term(m, c);
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(other) => {
                    return Err(self.err(format!("unexpected character `{other}`")));
                }
                None => break,
            }
        }
        Ok(out)
    }
}

/// Parse a polynomial over `field` in `nvars` ambient variables.
pub fn parse(src: &str, field: FieldId, nvars: usize) -> Result<Poly, Error> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        field,
        nvars,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty input"));
    }
    // Allow "0" as the zero polynomial.
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(poly)
}

/// Parse with the variable count inferred from the largest index used.
pub fn parse_infer(src: &str, field: FieldId) -> Result<Poly, Error> {
    let mut max = 1usize;
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                let idx: usize = src[i + 1..j].parse().unwrap_or(0);
                max = max.max(idx);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    parse(src, field, max)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            // Pull a leading minus out of "negative" rational coefficients
            // so output reads naturally; extension/finite coefficients are
            // printed verbatim.
            let (neg, mag) = match c {
                FieldValue::Rat(r) if r < &num::BigRational::from_integer(0.into()) => {
                    (true, c.neg())
                }
                FieldValue::Gauss { re, im }
                    if im == &num::BigRational::from_integer(0.into())
                        && re < &num::BigRational::from_integer(0.into()) =>
                {
                    (true, c.neg())
                }
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let has_vars = m.total_degree() > 0;
            let coeff_str = format!("{mag}");
            if !has_vars {
                write!(f, "{coeff_str}")?;
            } else {
                let mut wrote_coeff = false;
                if !mag.is_one() {
                    write!(f, "{coeff_str}")?;
                    wrote_coeff = true;
                }
                let mut first_var = true;
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if wrote_coeff || !first_var {
                        write!(f, "*")?;
                    }
                    first_var = false;
                    if e == 1 {
                        write!(f, "x{}", i + 1)?;
                    } else {
                        write!(f, "x{}^{}", i + 1, e)?;
                    }
                    wrote_coeff = wrote_coeff || true;
                }
            }
        }
        Ok(())
    }
}

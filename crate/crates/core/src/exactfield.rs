//! Exact arithmetic in fields carrying an order-two involution.
//!
//! Supported fields: the rationals `Q` and Gaussian rationals `Q(i)`,
//! prime fields `F_p` (odd `p <= 97`) and their quadratic extensions
//! `F_p(d)` with `d` a fixed non-square, and the characteristic-two
//! pair `F_2` / `F_4`.  Conjugation fixes the declared base field and
//! negates the imaginary (resp. `delta`) coordinate; on `F_4` it maps
//! the generator `a` to `1 + a`.

use std::fmt;

use num::bigint::BigInt;
use num::integer::Roots;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Trial-division bound used by the scalar norm test.
pub const FACTOR_BOUND: u64 = 1_000_000;

/// Largest prime admitted for `F_p` arithmetic.
pub const MAX_PRIME: u64 = 97;

/// Identifies a coefficient field, including the minimal-polynomial data
/// for quadratic extensions.  Values from different fields never mix.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum FieldId {
    /// Rationals with the trivial involution.
    Q,
    /// Gaussian rationals `Q(i)` over the fixed field `Q`.
    Qi,
    /// Prime field `F_p` with the trivial involution.
    Fp { p: u64 },
    /// `F_p(delta)` with `delta^2 = d`, `d` a non-square mod `p`.
    Fpd { p: u64, d: u64 },
    /// `F_2` with the trivial involution.
    F2,
    /// `F_4 = F_2[a]/(a^2 + a + 1)` over the fixed field `F_2`.
    F4,
}

impl FieldId {
    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(self) -> u64 {
        match self {
            FieldId::Q | FieldId::Qi => 0,
            FieldId::Fp { p } | FieldId::Fpd { p, .. } => p,
            FieldId::F2 | FieldId::F4 => 2,
        }
    }

    pub fn is_char2(self) -> bool {
        self.characteristic() == 2
    }

    /// Whether the involution is nontrivial (the field is a proper
    /// quadratic extension of its fixed field).
    pub fn has_involution(self) -> bool {
        matches!(self, FieldId::Qi | FieldId::Fpd { .. } | FieldId::F4)
    }

    /// The quadratic extension carrying the involution whose fixed field
    /// is `self`.  Identity on fields that already carry one.
    pub fn extension(self) -> FieldId {
        match self {
            FieldId::Q => FieldId::Qi,
            FieldId::Fp { p } => FieldId::Fpd {
                p,
                d: least_nonresidue(p),
            },
            FieldId::F2 => FieldId::F4,
            other => other,
        }
    }

    /// The fixed field of the involution.
    pub fn fixed_field(self) -> FieldId {
        match self {
            FieldId::Qi => FieldId::Q,
            FieldId::Fpd { p, .. } => FieldId::Fp { p },
            FieldId::F4 => FieldId::F2,
            other => other,
        }
    }

    /// Elements of a finite field, in a fixed deterministic order.
    /// Panics for infinite fields.
    pub fn all_elements(self) -> Vec<FieldValue> {
        match self {
            FieldId::Fp { p } => (0..p).map(|v| FieldValue::Fp { p, val: v }).collect(),
            FieldId::Fpd { p, d } => {
                let mut out = Vec::with_capacity((p * p) as usize);
                for re in 0..p {
                    for im in 0..p {
                        out.push(FieldValue::Fp2 { p, d, re, im });
                    }
                }
                out
            }
            FieldId::F2 => vec![FieldValue::F2(0), FieldValue::F2(1)],
            FieldId::F4 => (0..2u8)
                .flat_map(|re| (0..2u8).map(move |im| FieldValue::F4 { re, im }))
                .collect(),
            _ => panic!("all_elements: infinite field {self:?}"),
        }
    }

    /// Parse CLI-facing field names: `Q`, `Qi`, `F2`, `F4`, `F<p>`,
    /// `F<p>:<d>` and the `Fp:d` spelling.
    pub fn parse_name(s: &str) -> Result<FieldId, Error> {
        match s {
            "Q" => return Ok(FieldId::Q),
            "Qi" | "Q(i)" => return Ok(FieldId::Qi),
            "F2" => return Ok(FieldId::F2),
            "F4" => return Ok(FieldId::F4),
            _ => {}
        }
        let body = s
            .strip_prefix('F')
            .ok_or_else(|| Error::parse(format!("unknown field name `{s}`"), 0))?;
        let (p_str, d_str) = match body.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (body, None),
        };
        let p: u64 = p_str
            .parse()
            .map_err(|_| Error::parse(format!("bad prime in field name `{s}`"), 0))?;
        if p == 2 {
            return Ok(FieldId::F2);
        }
        if p > MAX_PRIME || !is_small_prime(p) {
            return Err(Error::parse(
                format!("field prime must be an odd prime <= {MAX_PRIME}, got {p}"),
                0,
            ));
        }
        match d_str {
            None => Ok(FieldId::Fp { p }),
            Some(ds) => {
                let d: u64 = ds
                    .parse()
                    .map_err(|_| Error::parse(format!("bad extension element in `{s}`"), 0))?;
                let d = d % p;
                if legendre(d, p) != p - 1 {
                    return Err(Error::parse(
                        format!("{d} is a square mod {p}; need a non-square"),
                        0,
                    ));
                }
                Ok(FieldId::Fpd { p, d })
            }
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldId::Q => write!(f, "Q"),
            FieldId::Qi => write!(f, "Qi"),
            FieldId::Fp { p } => write!(f, "F{p}"),
            FieldId::Fpd { p, d } => write!(f, "F{p}:{d}"),
            FieldId::F2 => write!(f, "F2"),
            FieldId::F4 => write!(f, "F4"),
        }
    }
}

fn is_small_prime(p: u64) -> bool {
    p >= 2 && (2..p).take_while(|q| q * q <= p).all(|q| p % q != 0)
}

fn legendre(a: u64, p: u64) -> u64 {
    // a^((p-1)/2) mod p
    pow_mod(a % p, (p - 1) / 2, p)
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// Least quadratic non-residue of an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&d| legendre(d, p) == p - 1).expect("odd prime has a non-residue")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

/// An exact element of one of the supported fields.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FieldValue {
    Rat(BigRational),
    Gauss { re: BigRational, im: BigRational },
    Fp { p: u64, val: u64 },
    Fp2 { p: u64, d: u64, re: u64, im: u64 },
    F2(u8),
    F4 { re: u8, im: u8 },
}

impl FieldValue {
    pub fn field(&self) -> FieldId {
        match self {
            FieldValue::Rat(_) => FieldId::Q,
            FieldValue::Gauss { .. } => FieldId::Qi,
            FieldValue::Fp { p, .. } => FieldId::Fp { p: *p },
            FieldValue::Fp2 { p, d, .. } => FieldId::Fpd { p: *p, d: *d },
            FieldValue::F2(_) => FieldId::F2,
            FieldValue::F4 { .. } => FieldId::F4,
        }
    }

    pub fn zero(id: FieldId) -> FieldValue {
        FieldValue::from_integer(id, 0)
    }

    pub fn one(id: FieldId) -> FieldValue {
        FieldValue::from_integer(id, 1)
    }

    /// The image of the integer `k` in the field.
    pub fn from_integer(id: FieldId, k: i64) -> FieldValue {
        match id {
            FieldId::Q => FieldValue::Rat(BigRational::from_integer(BigInt::from(k))),
            FieldId::Qi => FieldValue::Gauss {
                re: BigRational::from_integer(BigInt::from(k)),
                im: BigRational::zero(),
            },
            FieldId::Fp { p } => FieldValue::Fp {
                p,
                val: k.rem_euclid(p as i64) as u64,
            },
            FieldId::Fpd { p, d } => FieldValue::Fp2 {
                p,
                d,
                re: k.rem_euclid(p as i64) as u64,
                im: 0,
            },
            FieldId::F2 => FieldValue::F2((k.rem_euclid(2)) as u8),
            FieldId::F4 => FieldValue::F4 {
                re: (k.rem_euclid(2)) as u8,
                im: 0,
            },
        }
    }

    pub fn from_rational(id: FieldId, num: i64, den: i64) -> FieldValue {
        assert!(den != 0, "zero denominator");
        match id {
            FieldId::Q | FieldId::Qi => {
                let r = BigRational::new(BigInt::from(num), BigInt::from(den));
                if id == FieldId::Q {
                    FieldValue::Rat(r)
                } else {
                    FieldValue::Gauss {
                        re: r,
                        im: BigRational::zero(),
                    }
                }
            }
            _ => {
                let n = FieldValue::from_integer(id, num);
                let d = FieldValue::from_integer(id, den);
                n.div(&d)
            }
        }
    }

    /// The generator of the quadratic extension: `i`, `delta`, or `a`.
    pub fn generator(id: FieldId) -> FieldValue {
        match id {
            FieldId::Qi => FieldValue::Gauss {
                re: BigRational::zero(),
                im: BigRational::one(),
            },
            FieldId::Fpd { p, d } => FieldValue::Fp2 { p, d, re: 0, im: 1 },
            FieldId::F4 => FieldValue::F4 { re: 0, im: 1 },
            _ => panic!("generator: field {id:?} is not a quadratic extension"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldValue::Rat(r) => r.is_zero(),
            FieldValue::Gauss { re, im } => re.is_zero() && im.is_zero(),
            FieldValue::Fp { val, .. } => *val == 0,
            FieldValue::Fp2 { re, im, .. } => *re == 0 && *im == 0,
            FieldValue::F2(v) => *v == 0,
            FieldValue::F4 { re, im } => *re == 0 && *im == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == FieldValue::one(self.field())
    }

    fn check(&self, other: &FieldValue) {
        assert!(
            self.field() == other.field(),
            "mixed-field operation: {:?} vs {:?}",
            self.field(),
            other.field()
        );
    }

    pub fn add(&self, other: &FieldValue) -> FieldValue {
        self.check(other);
        match (self, other) {
            (FieldValue::Rat(a), FieldValue::Rat(b)) => FieldValue::Rat(a + b),
            (FieldValue::Gauss { re: a, im: b }, FieldValue::Gauss { re: c, im: d }) => {
                FieldValue::Gauss { re: a + c, im: b + d }
            }
            (FieldValue::Fp { p, val: a }, FieldValue::Fp { val: b, .. }) => FieldValue::Fp {
                p: *p,
                val: (a + b) % p,
            },
            (
                FieldValue::Fp2 { p, d, re: a, im: b },
                FieldValue::Fp2 { re: c, im: e, .. },
            ) => FieldValue::Fp2 {
                p: *p,
                d: *d,
                re: (a + c) % p,
                im: (b + e) % p,
            },
            (FieldValue::F2(a), FieldValue::F2(b)) => FieldValue::F2(a ^ b),
            (FieldValue::F4 { re: a, im: b }, FieldValue::F4 { re: c, im: d }) => {
                FieldValue::F4 { re: a ^ c, im: b ^ d }
            }
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> FieldValue {
        match self {
            FieldValue::Rat(a) => FieldValue::Rat(-a),
            FieldValue::Gauss { re, im } => FieldValue::Gauss { re: -re, im: -im },
            FieldValue::Fp { p, val } => FieldValue::Fp {
                p: *p,
                val: (p - val) % p,
            },
            FieldValue::Fp2 { p, d, re, im } => FieldValue::Fp2 {
                p: *p,
                d: *d,
                re: (p - re) % p,
                im: (p - im) % p,
            },
            FieldValue::F2(v) => FieldValue::F2(*v),
            FieldValue::F4 { re, im } => FieldValue::F4 { re: *re, im: *im },
        }
    }

    pub fn sub(&self, other: &FieldValue) -> FieldValue {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldValue) -> FieldValue {
        self.check(other);
        match (self, other) {
            (FieldValue::Rat(a), FieldValue::Rat(b)) => FieldValue::Rat(a * b),
            (FieldValue::Gauss { re: a, im: b }, FieldValue::Gauss { re: c, im: d }) => {
                FieldValue::Gauss {
                    re: a * c - b * d,
                    im: a * d + b * c,
                }
            }
            (FieldValue::Fp { p, val: a }, FieldValue::Fp { val: b, .. }) => FieldValue::Fp {
                p: *p,
                val: ((*a as u128 * *b as u128) % *p as u128) as u64,
            },
            (
                FieldValue::Fp2 { p, d, re: a, im: b },
                FieldValue::Fp2 { re: c, im: e, .. },
            ) => {
                let p128 = *p as u128;
                let (a, b, c, e, d128) =
                    (*a as u128, *b as u128, *c as u128, *e as u128, *d as u128);
                // (a + b delta)(c + e delta) = (ac + d be) + (ae + bc) delta
                let re = (a * c % p128 + d128 * (b * e % p128) % p128) % p128;
                let im = (a * e + b * c) % p128;
                FieldValue::Fp2 {
                    p: *p,
                    d: *d,
                    re: re as u64,
                    im: im as u64,
                }
            }
            (FieldValue::F2(a), FieldValue::F2(b)) => FieldValue::F2(a & b),
            (FieldValue::F4 { re: a, im: b }, FieldValue::F4 { re: c, im: d }) => {
                // (a + b t)(c + d t) with t^2 = t + 1
                FieldValue::F4 {
                    re: (a & c) ^ (b & d),
                    im: (a & d) ^ (b & c) ^ (b & d),
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn inv(&self) -> FieldValue {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            FieldValue::Rat(a) => FieldValue::Rat(a.recip()),
            FieldValue::Gauss { re, im } => {
                let n = re * re + im * im;
                FieldValue::Gauss {
                    re: re / &n,
                    im: -(im / &n),
                }
            }
            FieldValue::Fp { p, val } => FieldValue::Fp {
                p: *p,
                val: inv_mod(*val, *p),
            },
            FieldValue::Fp2 { .. } => {
                // 1/x = conj(x)/N(x) with N(x) in F_p
                let c = self.conj();
                let n = self.mul(&c);
                let n_inv = match n {
                    FieldValue::Fp2 { p, d, re, im } => {
                        debug_assert_eq!(im, 0);
                        FieldValue::Fp2 {
                            p,
                            d,
                            re: inv_mod(re, p),
                            im: 0,
                        }
                    }
                    _ => unreachable!(),
                };
                c.mul(&n_inv)
            }
            FieldValue::F2(_) => self.clone(),
            FieldValue::F4 { .. } => {
                // x^3 = 1 for x != 0, so 1/x = x^2
                self.mul(self)
            }
        }
    }

    pub fn div(&self, other: &FieldValue) -> FieldValue {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: u32) -> FieldValue {
        let mut acc = FieldValue::one(self.field());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The order-two involution of the field; identity on `Q`, `F_p`, `F_2`.
    pub fn conj(&self) -> FieldValue {
        match self {
            FieldValue::Rat(_) | FieldValue::Fp { .. } | FieldValue::F2(_) => self.clone(),
            FieldValue::Gauss { re, im } => FieldValue::Gauss {
                re: re.clone(),
                im: -im,
            },
            FieldValue::Fp2 { p, d, re, im } => FieldValue::Fp2 {
                p: *p,
                d: *d,
                re: *re,
                im: (p - im) % p,
            },
            FieldValue::F4 { re, im } => FieldValue::F4 {
                re: re ^ im,
                im: *im,
            },
        }
    }

    /// Whether the value lies in the fixed field of the involution.
    pub fn is_fixed(&self) -> bool {
        *self == self.conj()
    }

    /// The norm `a * conj(a)`, always in the fixed field.
    pub fn norm(&self) -> FieldValue {
        self.mul(&self.conj())
    }

    /// Embed a fixed-field value into the quadratic extension
    /// (`Q -> Q(i)` etc.).  Identity if already there.
    pub fn promote(&self, target: FieldId) -> FieldValue {
        if self.field() == target {
            return self.clone();
        }
        assert_eq!(
            self.field(),
            target.fixed_field(),
            "promote: {:?} is not the fixed field of {:?}",
            self.field(),
            target
        );
        match (self, target) {
            (FieldValue::Rat(r), FieldId::Qi) => FieldValue::Gauss {
                re: r.clone(),
                im: BigRational::zero(),
            },
            (FieldValue::Fp { val, .. }, FieldId::Fpd { p, d }) => FieldValue::Fp2 {
                p,
                d,
                re: *val,
                im: 0,
            },
            (FieldValue::F2(v), FieldId::F4) => FieldValue::F4 { re: *v, im: 0 },
            _ => unreachable!(),
        }
    }

    /// Restrict an extension value with zero imaginary coordinate back to
    /// the fixed field.  Returns `None` if the value is not fixed.
    pub fn restrict(&self) -> Option<FieldValue> {
        if !self.is_fixed() {
            return None;
        }
        Some(match self {
            FieldValue::Gauss { re, .. } => FieldValue::Rat(re.clone()),
            FieldValue::Fp2 { p, re, .. } => FieldValue::Fp { p: *p, val: *re },
            FieldValue::F4 { re, .. } => FieldValue::F2(*re),
            other => other.clone(),
        })
    }

    /// A square root within the fixed field, canonicalized to the
    /// "nonnegative" representative (positive rational / least residue).
    pub fn sqrt_in_fixed_field(&self) -> Option<FieldValue> {
        assert!(self.is_fixed(), "sqrt_in_fixed_field needs a fixed-field element");
        if self.is_zero() {
            return Some(FieldValue::zero(self.field()));
        }
        match self {
            FieldValue::Rat(r) => rational_sqrt(r).map(FieldValue::Rat),
            FieldValue::Gauss { re, .. } => rational_sqrt(re).map(|r| FieldValue::Gauss {
                re: r,
                im: BigRational::zero(),
            }),
            FieldValue::Fp { p, val } => (0..*p)
                .find(|r| r * r % p == *val)
                .map(|r| FieldValue::Fp { p: *p, val: r }),
            FieldValue::Fp2 { p, d, re, .. } => (0..*p)
                .find(|r| r * r % p == *re)
                .map(|r| FieldValue::Fp2 {
                    p: *p,
                    d: *d,
                    re: r,
                    im: 0,
                }),
            // Squaring is the identity on F_2.
            FieldValue::F2(v) => Some(FieldValue::F2(*v)),
            FieldValue::F4 { re, im } => {
                debug_assert_eq!(*im, 0);
                Some(FieldValue::F4 { re: *re, im: 0 })
            }
        }
    }

    /// A witness `g` in the extension field with `g * conj(g) = self`,
    /// for `self` in the fixed field; `None` when no witness exists.
    ///
    /// Over `Q` (inside `Q(i)`) this is the two-squares test; it can fail
    /// with `Error::FactorBound` when the numerator/denominator does not
    /// factor by trial division below [`FACTOR_BOUND`].
    pub fn hermitian_square_scalar(&self) -> Result<Option<FieldValue>, Error> {
        assert!(self.is_fixed(), "hermitian_square_scalar needs a fixed-field element");
        let id = self.field();
        if self.is_zero() {
            return Ok(Some(FieldValue::zero(id.extension())));
        }
        match id {
            // Trivial involution: Hermitian square = square.
            FieldId::Q | FieldId::Fp { .. } | FieldId::F2 => {
                Ok(self.sqrt_in_fixed_field())
            }
            FieldId::Qi => {
                let re = match self {
                    FieldValue::Gauss { re, .. } => re.clone(),
                    _ => unreachable!(),
                };
                gaussian_norm_witness(&re).map(|o| {
                    o.map(|(a, b)| canonical_unit_qi(&FieldValue::Gauss { re: a, im: b }))
                })
            }
            FieldId::Fpd { p, d } => {
                let target = match self {
                    FieldValue::Fp2 { re, .. } => *re,
                    _ => unreachable!(),
                };
                // The norm x^2 - d y^2 is onto F_p; lexicographic search.
                for x in 0..p {
                    for y in 0..p {
                        let n = ((x as u128 * x as u128 + (p as u128 - d as u128 % p as u128)
                            * (y as u128 * y as u128 % p as u128))
                            % p as u128) as u64;
                        if n == target {
                            return Ok(Some(FieldValue::Fp2 { p, d, re: x, im: y }));
                        }
                    }
                }
                Ok(None)
            }
            FieldId::F4 => {
                let v = self.promote(FieldId::F4);
                for g in FieldId::F4.all_elements() {
                    if g.norm() == v {
                        return Ok(Some(g));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Orders Gaussian rationals as (re, im) for canonicalization; also
    /// gives the deterministic tie-break order for finite fields.
    pub fn canon_key(&self) -> (i8, String) {
        // Only used for deterministic ordering, not for arithmetic.
        (0, format!("{self}"))
    }
}

/// For a nonzero Gaussian value, the canonical unit-equivalent
/// representative: multiply by the unit in `{1, i, -1, -i}` making the
/// real part positive, ties broken by nonnegative imaginary part.
pub fn canonical_unit_qi(g: &FieldValue) -> FieldValue {
    let i = FieldValue::generator(FieldId::Qi);
    let mut best: Option<FieldValue> = None;
    let mut cur = g.clone();
    for _ in 0..4 {
        let ok = match &cur {
            FieldValue::Gauss { re, im } => {
                re.is_positive() || (re.is_zero() && !im.is_negative())
            }
            _ => panic!("canonical_unit_qi: not a Gaussian value"),
        };
        if ok && best.is_none() {
            best = Some(cur.clone());
        }
        cur = cur.mul(&i);
    }
    best.unwrap_or_else(|| g.clone())
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Trial-division factorization; `Err` if a cofactor above
/// `FACTOR_BOUND^2` survives (it could be composite).
fn factor_with_bound(n: &BigInt) -> Result<Vec<(u64, u32)>, Error> {
    let mut n = n.abs();
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut p: u64 = 2;
    while BigInt::from(p) * BigInt::from(p) <= n && p <= FACTOR_BOUND {
        let mut e = 0u32;
        while (&n % p) == BigInt::zero() {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        // All factors below FACTOR_BOUND are removed, so a remainder
        // below FACTOR_BOUND^2 is prime.
        if n < BigInt::from(FACTOR_BOUND) * BigInt::from(FACTOR_BOUND) {
            let r: u64 = u64::try_from(&n).expect("fits");
            out.push((r, 1));
        } else {
            return Err(Error::FactorBound(n.to_string()));
        }
    }
    Ok(out)
}

/// Two-squares witness for a nonnegative rational: returns `(a, b)` with
/// `a^2 + b^2 = r`, or `None` when some prime `p = 3 (mod 4)` divides
/// `numer * denom` to an odd power.
fn gaussian_norm_witness(
    r: &BigRational,
) -> Result<Option<(BigRational, BigRational)>, Error> {
    if r.is_negative() {
        return Ok(None);
    }
    let n = r.numer().clone();
    let d = r.denom().clone();
    let m = &n * &d; // r = m / d^2
    let factors = factor_with_bound(&m)?;
    // Gaussian integer of norm m.
    let mut re = BigInt::one();
    let mut im = BigInt::zero();
    for (p, e) in factors {
        if p == 2 {
            // norm(1 + i) = 2
            for _ in 0..e {
                let (a, b) = (re.clone(), im.clone());
                re = &a - &b;
                im = a + b;
            }
        } else if p % 4 == 1 {
            let (x, y) = two_squares_prime(p);
            for _ in 0..e {
                let (a, b) = (re.clone(), im.clone());
                re = &a * &x - &b * &y;
                im = &a * &y + &b * &x;
            }
        } else {
            if e % 2 == 1 {
                return Ok(None);
            }
            let half = BigInt::from(p).pow(e / 2);
            re *= &half;
            im *= &half;
        }
    }
    Ok(Some((
        BigRational::new(re, d.clone()),
        BigRational::new(im, d),
    )))
}

/// `x^2 + y^2 = p` for a prime `p = 1 (mod 4)` (or `p = 2`).
fn two_squares_prime(p: u64) -> (BigInt, BigInt) {
    let mut x = 1u64;
    loop {
        let xx = x as u128 * x as u128;
        if xx >= p as u128 {
            break;
        }
        let rest = (p as u128 - xx) as u64;
        let y = rest.sqrt();
        if y * y == rest {
            return (BigInt::from(x), BigInt::from(y));
        }
        x += 1;
    }
    panic!("two_squares_prime called with non-representable {p}");
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Rat(r) => write!(f, "{r}"),
            FieldValue::Gauss { re, im } => {
                if im.is_zero() {
                    write!(f, "{re}")
                } else {
                    let (sign, mag) = if im.is_negative() {
                        ("-", -im)
                    } else {
                        ("+", im.clone())
                    };
                    if mag.is_one() {
                        write!(f, "({re}{sign}i)")
                    } else {
                        write!(f, "({re}{sign}{mag}*i)")
                    }
                }
            }
            FieldValue::Fp { val, .. } => write!(f, "{val}"),
            FieldValue::Fp2 { re, im, .. } => {
                if *im == 0 {
                    write!(f, "{re}")
                } else if *im == 1 {
                    write!(f, "({re}+a)")
                } else {
                    write!(f, "({re}+{im}*a)")
                }
            }
            FieldValue::F2(v) => write!(f, "{v}"),
            FieldValue::F4 { re, im } => {
                if *im == 0 {
                    write!(f, "{re}")
                } else {
                    write!(f, "({re}+a)")
                }
            }
        }
    }
}

/// Parse a field literal in the textual grammar, with the field supplied
/// out of band.
pub fn parse_literal(s: &str, id: FieldId) -> Result<FieldValue, Error> {
    let s = s.trim();
    let inner = if s.starts_with('(') && s.ends_with(')') {
        &s[1..s.len() - 1]
    } else {
        s
    };
    parse_literal_body(inner, id).ok_or_else(|| Error::parse(format!("bad field literal `{s}`"), 0))
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn split_re_im(s: &str) -> Option<(String, String)> {
    // Split "re+im*i"-style strings at the sign separating the two parts
    // (skipping a leading sign on the real part).
    let bytes = s.as_bytes();
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && bytes[k - 1] as char != '/' && bytes[k - 1] as char != '*' {
            let prev = bytes[k - 1] as char;
            if prev == '+' || prev == '-' {
                continue;
            }
            return Some((s[..k].to_string(), s[k..].to_string()));
        }
    }
    None
}

fn parse_literal_body(s: &str, id: FieldId) -> Option<FieldValue> {
    let s = s.trim();
    match id {
        FieldId::Q => parse_rat(s).map(FieldValue::Rat),
        FieldId::Qi => {
            // gaussian := rational (('+'|'-') rational? '*'? 'i')?
            if let Some(im_str) = imaginary_part(s) {
                let (re_str, im_sgn_str) = match split_re_im(s) {
                    Some((a, b)) => (a, b),
                    None => (String::from("0"), format!("+{s}")),
                };
                let _ = im_str;
                let re = parse_rat(&re_str)?;
                let im = parse_im_coeff(&im_sgn_str)?;
                Some(FieldValue::Gauss { re, im })
            } else {
                parse_rat(s).map(|re| FieldValue::Gauss {
                    re,
                    im: BigRational::zero(),
                })
            }
        }
        FieldId::Fp { p } => parse_mod(s, p).map(|val| FieldValue::Fp { p, val }),
        FieldId::Fpd { p, d } => {
            if s.contains('a') {
                let (re_str, im_str) = match split_re_im(s) {
                    Some((a, b)) => (a, b),
                    None => (String::from("0"), format!("+{s}")),
                };
                let re = parse_mod(&re_str, p)?;
                let im = parse_gen_coeff(&im_str, p)?;
                Some(FieldValue::Fp2 { p, d, re, im })
            } else {
                parse_mod(s, p).map(|re| FieldValue::Fp2 { p, d, re, im: 0 })
            }
        }
        FieldId::F2 => parse_mod(s, 2).map(|v| FieldValue::F2(v as u8)),
        FieldId::F4 => {
            if s.contains('a') {
                let (re_str, im_str) = match split_re_im(s) {
                    Some((a, b)) => (a, b),
                    None => (String::from("0"), format!("+{s}")),
                };
                let re = parse_mod(&re_str, 2)? as u8;
                let im = parse_gen_coeff(&im_str, 2)? as u8;
                Some(FieldValue::F4 { re, im })
            } else {
                parse_mod(s, 2).map(|v| FieldValue::F4 { re: v as u8, im: 0 })
            }
        }
    }
}

fn imaginary_part(s: &str) -> Option<&str> {
    if s.ends_with('i') && !s.ends_with("/i") {
        Some(s)
    } else {
        None
    }
}

/// Parse `+r/s*i`, `-i`, `+i`, `-3*i`, ...
fn parse_im_coeff(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.trim();
    let body = rest.strip_suffix('i')?;
    let body = body.trim().strip_suffix('*').unwrap_or(body.trim()).trim();
    let mag = if body.is_empty() {
        BigRational::one()
    } else {
        parse_rat(body)?
    };
    Some(if sign < 0 { -mag } else { mag })
}

fn parse_gen_coeff(s: &str, p: u64) -> Option<u64> {
    let s = s.trim();
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let body = rest.trim().strip_suffix('a')?;
    let body = body.trim().strip_suffix('*').unwrap_or(body.trim()).trim();
    let mag = if body.is_empty() { 1 } else { parse_mod(body, p)? };
    Some(if neg { (p - mag % p) % p } else { mag % p })
}

fn parse_mod(s: &str, p: u64) -> Option<u64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num = parse_mod_int(a.trim(), p)?;
        let den = parse_mod_int(b.trim(), p)?;
        if den == 0 {
            return None;
        }
        return Some(((num as u128 * inv_mod(den, p) as u128) % p as u128) as u64);
    }
    parse_mod_int(s, p)
}

fn parse_mod_int(s: &str, p: u64) -> Option<u64> {
    let v: i128 = s.parse().ok()?;
    Some(v.rem_euclid(p as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldValue {
        FieldValue::from_rational(FieldId::Q, n, d)
    }

    fn qi(re: (i64, i64), im: (i64, i64)) -> FieldValue {
        FieldValue::Gauss {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    #[test]
    fn conj_examples() {
        assert_eq!(q(3, 2).conj(), q(3, 2));
        assert_eq!(qi((2, 1), (5, 1)).conj(), qi((2, 1), (-5, 1)));
        let alpha = FieldValue::generator(FieldId::F4);
        assert_eq!(
            alpha.conj(),
            FieldValue::F4 { re: 1, im: 1 },
            "conj(a) = 1 + a over F4"
        );
        assert_eq!(alpha.conj().conj(), alpha);
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(q(9, 4).sqrt_in_fixed_field(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt_in_fixed_field(), None);
        let four = FieldValue::from_integer(FieldId::Fp { p: 7 }, 4);
        assert_eq!(
            four.sqrt_in_fixed_field(),
            Some(FieldValue::from_integer(FieldId::Fp { p: 7 }, 2))
        );
    }

    #[test]
    fn norm_witness_examples() {
        let five = FieldValue::Gauss {
            re: BigRational::from_integer(5.into()),
            im: BigRational::zero(),
        };
        let w = five.hermitian_square_scalar().unwrap().unwrap();
        assert_eq!(w.norm(), five);
        assert_eq!(w, qi((1, 1), (2, 1)), "canonical witness of 5 is 1+2i");

        let three = FieldValue::Gauss {
            re: BigRational::from_integer(3.into()),
            im: BigRational::zero(),
        };
        assert_eq!(three.hermitian_square_scalar().unwrap(), None);

        let zero = FieldValue::zero(FieldId::Qi);
        assert_eq!(
            zero.hermitian_square_scalar().unwrap(),
            Some(FieldValue::zero(FieldId::Qi))
        );
    }

    #[test]
    fn norm_witness_fractions() {
        let v = FieldValue::Gauss {
            re: BigRational::new(13.into(), 17.into()),
            im: BigRational::zero(),
        };
        let w = v.hermitian_square_scalar().unwrap().unwrap();
        assert_eq!(w.norm(), v);
        let bad = FieldValue::Gauss {
            re: BigRational::new(3.into(), 5.into()),
            im: BigRational::zero(),
        };
        assert_eq!(bad.hermitian_square_scalar().unwrap(), None);
    }

    #[test]
    fn finite_norm_onto() {
        let id = FieldId::Fp { p: 7 }.extension();
        for k in 0..7 {
            let v = FieldValue::from_integer(id, k);
            let w = v.hermitian_square_scalar().unwrap().unwrap();
            assert_eq!(w.norm(), v);
        }
    }

    #[test]
    fn field_axioms_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for id in [
            FieldId::Q,
            FieldId::Qi,
            FieldId::Fp { p: 7 },
            FieldId::Fp { p: 7 }.extension(),
            FieldId::F4,
        ] {
            for _ in 0..200 {
                let r = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let a = rng.gen_range(-6i64..=6);
                    let b = rng.gen_range(-6i64..=6);
                    match id {
                        FieldId::Qi => FieldValue::Gauss {
                            re: BigRational::from_integer(a.into()),
                            im: BigRational::from_integer(b.into()),
                        },
                        FieldId::Fpd { p, d } => FieldValue::Fp2 {
                            p,
                            d,
                            re: a.rem_euclid(p as i64) as u64,
                            im: b.rem_euclid(p as i64) as u64,
                        },
                        FieldId::F4 => FieldValue::F4 {
                            re: a.rem_euclid(2) as u8,
                            im: b.rem_euclid(2) as u8,
                        },
                        _ => FieldValue::from_integer(id, a),
                    }
                };
                let (a, b, c) = (r(&mut rng), r(&mut rng), r(&mut rng));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                assert_eq!(a.conj().conj(), a);
                assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
                assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
                if !a.is_zero() {
                    assert!(a.mul(&a.inv()).is_one());
                }
            }
        }
    }

    #[test]
    fn literal_roundtrip() {
        for (s, id) in [
            ("3/2", FieldId::Q),
            ("-7", FieldId::Q),
            ("(1/2+3*i)", FieldId::Qi),
            ("(0+i)", FieldId::Qi),
            ("(2-i)", FieldId::Qi),
            ("5", FieldId::Fp { p: 7 }),
            ("(3+2*a)", FieldId::Fp { p: 7 }.extension()),
            ("(1+a)", FieldId::F4),
        ] {
            let v = parse_literal(s, id).unwrap();
            let v2 = parse_literal(&format!("{v}"), id).unwrap();
            assert_eq!(v, v2, "roundtrip failed for {s}");
        }
    }
}

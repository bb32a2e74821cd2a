//! Arithmetic of the group `Q x| Q*_+` and its subsemigroup `P x| N^x`,
//! where `P = {0, 2, 3, 4, ...}`.
//!
//! The group law is `(r,x)(s,y) = (r + xs, xy)`. The subsemigroup induces the
//! left-invariant order `g <= h  <=>  g^{-1} h  in  P x| N^x`. This order is
//! not quasi-lattice: `(5,7)` and `(2,3)` have the two incomparable minimal
//! common upper bounds `(26,21)` and `(47,21)`. [`cup`] picks the one with
//! multiplicative part `lcm(a,b)` and smallest additive part, found by an
//! extended-Euclid solve of `k = alpha a' - beta b'` restricted to
//! `alpha, beta in P`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Membership in `P = {0, 2, 3, 4, ...}`.
pub fn p_contains(m: &BigInt) -> bool {
    !m.is_negative() && !m.is_one()
}

fn p_contains_u64(m: u64) -> bool {
    m != 1
}

/// An element `(r, x)` of `Q x| Q*_+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QQElement {
    r: Rational,
    x: Rational,
}

impl QQElement {
    pub fn new(r: Rational, x: Rational) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::NonPositiveScale(x.to_string()));
        }
        Ok(QQElement { r, x })
    }

    pub fn identity() -> Self {
        QQElement {
            r: Rational::zero(),
            x: Rational::one(),
        }
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn compose(&self, other: &QQElement) -> QQElement {
        QQElement {
            r: &self.r + &self.x * &other.r,
            x: &self.x * &other.x,
        }
    }

    pub fn invert(&self) -> QQElement {
        let xi = self.x.recip();
        QQElement {
            r: -(&xi * &self.r),
            x: xi,
        }
    }

    /// `self <= other` iff `self^{-1} other` lies in `P x| N^x`.
    pub fn leq(&self, other: &QQElement) -> bool {
        let shift = (&other.r - &self.r) / &self.x;
        let scale = &other.x / &self.x;
        shift.is_integer() && p_contains(shift.numer()) && scale.is_integer()
    }

    /// The element as a point of `P x| N^x`, if it is one.
    pub fn to_pn(&self) -> Option<PNElement> {
        if self.r.is_integer() && self.x.is_integer() {
            PNElement::new(self.r.to_integer(), self.x.to_integer()).ok()
        } else {
            None
        }
    }
}

impl fmt::Display for QQElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.x)
    }
}

impl FromStr for QQElement {
    type Err = Error;

    /// Accepts `r,x` or `(r,x)` with `r`, `x` integers or fractions `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let (r, x) = split_pair(s)?;
        let r = parse_rational(r)?;
        let x = parse_rational(x)?;
        QQElement::new(r, x)
    }
}

/// A point `(m, a)` of `P x| N^x`: `m in P`, `a >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PNElement {
    m: BigInt,
    a: BigInt,
}

impl PNElement {
    pub fn new(m: impl Into<BigInt>, a: impl Into<BigInt>) -> Result<Self> {
        let (m, a) = (m.into(), a.into());
        if !p_contains(&m) || !a.is_positive() {
            return Err(Error::NotInSemigroup {
                m: m.to_string(),
                a: a.to_string(),
            });
        }
        Ok(PNElement { m, a })
    }

    pub fn identity() -> Self {
        PNElement {
            m: BigInt::zero(),
            a: BigInt::one(),
        }
    }

    /// `s = (2,1)`.
    pub fn s() -> Self {
        PNElement {
            m: BigInt::from(2),
            a: BigInt::one(),
        }
    }

    /// `t = (3,1)`.
    pub fn t() -> Self {
        PNElement {
            m: BigInt::from(3),
            a: BigInt::one(),
        }
    }

    /// `v_a = (0,a)`.
    pub fn v(a: impl Into<BigInt>) -> Result<Self> {
        PNElement::new(0, a)
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_zero() && self.a.is_one()
    }

    /// `(m,a)(n,b) = (m + an, ab)`.
    pub fn compose(&self, other: &PNElement) -> PNElement {
        PNElement {
            m: &self.m + &self.a * &other.m,
            a: &self.a * &other.a,
        }
    }

    pub fn pow(&self, k: u64) -> PNElement {
        // (m,a)^k = (m (1 + a + ... + a^{k-1}), a^k)
        let mut acc = PNElement::identity();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    pub fn to_qq(&self) -> QQElement {
        QQElement {
            r: Rational::from_integer(self.m.clone()),
            x: Rational::from_integer(self.a.clone()),
        }
    }

    /// `self <= other`: `(n - m)/a in P` and `a | b`.
    pub fn leq(&self, other: &PNElement) -> bool {
        if !other.a.is_multiple_of(&self.a) {
            return false;
        }
        let diff = &other.m - &self.m;
        diff.is_multiple_of(&self.a) && p_contains(&(diff / &self.a))
    }

    /// `self^{-1} other` when `self <= other`.
    pub fn left_divide(&self, other: &PNElement) -> Option<PNElement> {
        if self.leq(other) {
            Some(PNElement {
                m: (&other.m - &self.m) / &self.a,
                a: &other.a / &self.a,
            })
        } else {
            None
        }
    }

    /// Canonical `m = 2x + 3y` with `y in {0,1}`.
    pub fn decompose(&self) -> DecompPair {
        decompose_p(&self.m).expect("PNElement invariant: m in P")
    }

    pub(crate) fn small(&self) -> Option<(u64, u64)> {
        Some((self.m.to_u64()?, self.a.to_u64()?))
    }
}

impl fmt::Display for PNElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.a)
    }
}

impl FromStr for PNElement {
    type Err = Error;

    /// Accepts `m,a` or `(m,a)`.
    fn from_str(s: &str) -> Result<Self> {
        let (m, a) = split_pair(s)?;
        let parse = |t: &str, off: usize| {
            t.trim().parse::<BigInt>().map_err(|_| Error::Parse {
                pos: off,
                msg: format!("expected an integer, found {:?}", t.trim()),
            })
        };
        let m = parse(m, 0)?;
        let a = parse(a, s.find(',').map_or(0, |i| i + 1))?;
        PNElement::new(m, a)
    }
}

impl Serialize for PNElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut tup = ser.serialize_tuple(2)?;
        tup.serialize_element(&JsonInt(&self.m))?;
        tup.serialize_element(&JsonInt(&self.a))?;
        tup.end()
    }
}

impl<'de> Deserialize<'de> for PNElement {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let (m, a): (JsonIntOwned, JsonIntOwned) = Deserialize::deserialize(de)?;
        PNElement::new(m.0, a.0).map_err(serde::de::Error::custom)
    }
}

/// Integers go out as JSON numbers when they fit in 64 bits, as strings otherwise.
struct JsonInt<'a>(&'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => ser.serialize_i64(v),
            None => ser.serialize_str(&self.0.to_string()),
        }
    }
}

struct JsonIntOwned(BigInt);

impl<'de> Deserialize<'de> for JsonIntOwned {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(v) => Ok(JsonIntOwned(BigInt::from(v))),
            Repr::Str(s) => s.parse().map(JsonIntOwned).map_err(serde::de::Error::custom),
        }
    }
}

fn split_pair(s: &str) -> Result<(&str, &str)> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(t);
    t.split_once(',').ok_or_else(|| Error::Parse {
        pos: 0,
        msg: format!("expected a pair `m,a`, found {s:?}"),
    })
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("expected a rational `p/q`, found {t:?}"),
    };
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Renders as `p/q`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `m = 2x + 3y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompPair {
    pub x: BigInt,
    pub y: BigInt,
}

/// Canonical decomposition `m = 2x + 3y` with `y in {0,1}`.
pub fn decompose_p(m: &BigInt) -> Result<DecompPair> {
    if !p_contains(m) {
        return Err(Error::NotInP(m.to_string()));
    }
    let two = BigInt::from(2);
    if m.is_even() {
        Ok(DecompPair {
            x: m / &two,
            y: BigInt::zero(),
        })
    } else {
        Ok(DecompPair {
            x: (m - 3) / &two,
            y: BigInt::one(),
        })
    }
}

/// Outcome of `(m,a) cup (n,b)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum CupResult {
    /// `(m + aP) cap (n + bP)` is empty.
    Infinite,
    Finite {
        sigma: PNElement,
        alpha: BigInt,
        beta: BigInt,
        /// `(m,a)^{-1} sigma = (alpha, b')`
        left_quot: PNElement,
        /// `(n,b)^{-1} sigma = (beta, a')`
        right_quot: PNElement,
    },
}

impl CupResult {
    pub fn sigma(&self) -> Option<&PNElement> {
        match self {
            CupResult::Infinite => None,
            CupResult::Finite { sigma, .. } => Some(sigma),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CupResult::Infinite)
    }
}

/// Returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `a x + b y = g`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `gcd(a,b) | m - n`.
pub fn has_common_upper(u: &PNElement, v: &PNElement) -> bool {
    let g = u.a.gcd(&v.a);
    (&u.m - &v.m).is_multiple_of(&g)
}

/// Least `(alpha, beta)` with `alpha, beta in P` and `k = alpha a' - beta b'`,
/// for coprime `a', b' >= 1`.
///
/// All integer solutions are `alpha = alpha0 + j b'`, `beta = beta0 + j a'`.
/// Both grow with `j`, so the answer is the first `j` past the non-negativity
/// threshold at which neither entry equals 1. At most two steps are skipped.
pub fn smallest_solution(k: &BigInt, ap: &BigInt, bp: &BigInt) -> Result<(BigInt, BigInt)> {
    if !ap.is_positive() {
        return Err(Error::NonPositiveScale(ap.to_string()));
    }
    if !bp.is_positive() {
        return Err(Error::NonPositiveScale(bp.to_string()));
    }
    let (g, x, y) = extended_gcd(ap, bp);
    if !g.is_one() {
        return Err(Error::NotCoprime(ap.to_string(), bp.to_string()));
    }
    // ap x + bp y = 1  =>  alpha0 = k x, beta0 = -k y
    let alpha0 = k * &x;
    let beta0 = -(k * &y);
    let j_alpha = (-&alpha0).div_ceil(bp);
    let j_beta = (-&beta0).div_ceil(ap);
    let mut j = j_alpha.max(j_beta);
    loop {
        let alpha = &alpha0 + &j * bp;
        let beta = &beta0 + &j * ap;
        if !alpha.is_one() && !beta.is_one() {
            return Ok((alpha, beta));
        }
        j += 1;
    }
}

/// `(m,a) cup (n,b)`: the common upper bound `(l, lcm(a,b))` with `l` the
/// least element of `(m + aP) cap (n + bP)`, together with both quotients.
pub fn cup(u: &PNElement, v: &PNElement) -> CupResult {
    let g = u.a.gcd(&v.a);
    let diff = &v.m - &u.m;
    if !diff.is_multiple_of(&g) {
        return CupResult::Infinite;
    }
    let ap = &u.a / &g;
    let bp = &v.a / &g;
    let k = diff / &g;
    let (alpha, beta) = smallest_solution(&k, &ap, &bp).expect("a/gcd and b/gcd are positive and coprime");
    let ell = &u.m + &u.a * &alpha;
    debug_assert_eq!(ell, &v.m + &v.a * &beta);
    let lcm = &u.a * &bp;
    CupResult::Finite {
        sigma: PNElement { m: ell, a: lcm },
        left_quot: PNElement {
            m: alpha.clone(),
            a: bp,
        },
        right_quot: PNElement { m: beta.clone(), a: ap },
        alpha,
        beta,
    }
}

/// Least element of `(m + aP) cap (n + bP) cap [0, bound]` by enumeration.
///
/// Test oracle for [`cup`]; it never touches the Euclidean solver.
pub fn min_intersection_bruteforce(u: &PNElement, v: &PNElement, bound: u64) -> Option<u64> {
    let (m, a) = match u.small() {
        Some(p) => p,
        // m or a beyond 64 bits; then m > bound or only p = 0 is in range
        None => {
            let m = u.m.to_u64()?;
            return (m <= bound && in_progression(m, v)).then_some(m);
        }
    };
    let mut p: u64 = 0;
    loop {
        if p_contains_u64(p) {
            let k = a.checked_mul(p).and_then(|ap| ap.checked_add(m))?;
            if k > bound {
                return None;
            }
            if in_progression(k, v) {
                return Some(k);
            }
        }
        p += 1;
    }
}

fn in_progression(k: u64, v: &PNElement) -> bool {
    let k = BigInt::from(k);
    if k < v.m {
        return false;
    }
    let d = &k - &v.m;
    d.is_multiple_of(&v.a) && p_contains(&(d / &v.a))
}

/// Minimal common upper bounds of `u` and `v` among the elements `(k, c)`
/// with `k, c <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperBounds {
    /// Minimality is only relative to this enumeration window.
    pub bound: u64,
    pub elements: Vec<PNElement>,
}

pub fn minimal_common_upper_bounds(u: &PNElement, v: &PNElement, bound: u64) -> UpperBounds {
    let lcm = u.a.lcm(&v.a);
    let empty = UpperBounds {
        bound,
        elements: Vec::new(),
    };
    if lcm > BigInt::from(bound) || !has_common_upper(u, v) {
        return empty;
    }
    // (k, c) with c a proper multiple of lcm sits strictly above (k, lcm),
    // so only c = lcm can be minimal.
    let mut candidates = Vec::new();
    let mut from = 0u64;
    while let Some(k) = min_intersection_from(u, v, from, bound) {
        candidates.push(PNElement {
            m: BigInt::from(k),
            a: lcm.clone(),
        });
        from = k + 1;
    }
    let elements = candidates
        .iter()
        .filter(|w| !candidates.iter().any(|z| z != *w && z.leq(w)))
        .cloned()
        .collect();
    UpperBounds { bound, elements }
}

fn min_intersection_from(u: &PNElement, v: &PNElement, from: u64, bound: u64) -> Option<u64> {
    (from..=bound).find(|&k| in_progression(k, u) && in_progression(k, v))
}

//! The dense *-subalgebra spanned by the monomials `W_u W_v^*`.
//!
//! Products reduce through Nica covariance,
//! `W_v^* W_w = W_{v^{-1} sigma} W^*_{w^{-1} sigma}` with `sigma = v cup w`
//! (and `0` when `v cup w` is infinite).
//!
//! Covariance makes `s = W_(2,1)` and `t = W_(3,1)` unitary. The range
//! projection of `(47,21)` lies under those of `(5,7)` and `(2,3)`, hence under
//! that of `(26,21) = (5,7) cup (2,3)`, and covariance for the pair
//! `(26,21), (47,21)` then gives `W_(47,21) W^*_(47,21) = W_(89,21) W^*_(89,21)`,
//! i.e. `s s^* = 1`. Consequently
//! `W_(m,a) W^*_(n,b) = W_(m+aj,a) W^*_(n+bj,b)` whenever both additive parts
//! stay in `P`, and the raw covariance pair is only well defined up to that
//! shift. [`WMonomial`] always stores the representative with the smallest
//! shift; with that normal form the product is associative, while the raw
//! pairs are not.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::semigroup::{cup, format_rational, p_contains, parse_rational, CupResult, PNElement, Rational};

/// Exact complex number with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ComplexRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        ComplexRational::real(Rational::from_integer(v.into()))
    }

    pub fn i() -> Self {
        ComplexRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn to_f64(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Zero for ComplexRational {
    fn zero() -> Self {
        ComplexRational::real(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ComplexRational {
    fn one() -> Self {
        ComplexRational::real(Rational::one())
    }
}

impl Add for ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: Self) -> Self {
        ComplexRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: Self) -> Self {
        ComplexRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> Self {
        ComplexRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Mul<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(
                f,
                "({}{}{}i)",
                self.re,
                if self.im.is_negative() { "" } else { "+" },
                self.im
            )
        }
    }
}

/// `W_left W_right^*`, stored in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WMonomial {
    left: PNElement,
    right: PNElement,
}

impl WMonomial {
    /// Builds `W_left W_right^*` and reduces it to normal form.
    pub fn new(left: PNElement, right: PNElement) -> Self {
        let (left, right) = normalize(left, right);
        WMonomial { left, right }
    }

    pub fn one() -> Self {
        WMonomial {
            left: PNElement::identity(),
            right: PNElement::identity(),
        }
    }

    /// `W_g`.
    pub fn isometry(g: PNElement) -> Self {
        WMonomial::new(g, PNElement::identity())
    }

    /// `W_g^*`.
    pub fn coisometry(g: PNElement) -> Self {
        WMonomial::new(PNElement::identity(), g)
    }

    /// `W_g W_g^*`.
    pub fn projection(g: PNElement) -> Self {
        WMonomial::new(g.clone(), g)
    }

    pub fn left(&self) -> &PNElement {
        &self.left
    }

    pub fn right(&self) -> &PNElement {
        &self.right
    }

    pub fn is_one(&self) -> bool {
        self.left.is_identity() && self.right.is_identity()
    }

    /// `(W_u W_v^*)^* = W_v W_u^*`.
    pub fn adjoint(&self) -> Self {
        WMonomial {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// The covariance formula applied literally, without normalization.
    /// `None` is the zero operator.
    pub fn mul_raw(&self, other: &WMonomial) -> Option<(PNElement, PNElement)> {
        match cup(&self.right, &other.left) {
            CupResult::Infinite => None,
            CupResult::Finite {
                left_quot, right_quot, ..
            } => Some((self.left.compose(&left_quot), other.right.compose(&right_quot))),
        }
    }

    /// Product in normal form; `None` is zero.
    pub fn mul(&self, other: &WMonomial) -> Option<WMonomial> {
        self.mul_raw(other).map(|(l, r)| WMonomial::new(l, r))
    }

    /// Generator rendering `s^x t^y v_a v_b^* t^*y' s^*x'` using the canonical
    /// decomposition with `y in {0,1}`.
    pub fn to_generator_word(&self) -> String {
        let mut parts = Vec::new();
        let dl = self.left.decompose();
        push_power(&mut parts, "s", &dl.x, false);
        push_power(&mut parts, "t", &dl.y, false);
        if !self.left.a().is_one() {
            parts.push(format!("v{}", self.left.a()));
        }
        let dr = self.right.decompose();
        if !self.right.a().is_one() {
            parts.push(format!("v{}*", self.right.a()));
        }
        push_power(&mut parts, "t", &dr.y, true);
        push_power(&mut parts, "s", &dr.x, true);
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

fn push_power(parts: &mut Vec<String>, base: &str, k: &BigInt, star: bool) {
    let star = if star { "*" } else { "" };
    if k.is_one() {
        parts.push(format!("{base}{star}"));
    } else if !k.is_zero() {
        parts.push(format!("{base}{star}^{k}"));
    }
}

/// Smallest `j` with `m + aj` and `n + bj` both in `P`; `j = 0` always qualifies.
fn normalize(left: PNElement, right: PNElement) -> (PNElement, PNElement) {
    let (m, a) = (left.m(), left.a());
    let (n, b) = (right.m(), right.a());
    let mut j = -(m.div_floor(a)).min(n.div_floor(b));
    loop {
        let lm = m + a * &j;
        let rn = n + b * &j;
        if p_contains(&lm) && p_contains(&rn) {
            if j.is_zero() {
                return (left, right);
            }
            return (
                PNElement::new(lm, a.clone()).expect("checked"),
                PNElement::new(rn, b.clone()).expect("checked"),
            );
        }
        j += 1;
    }
}

impl fmt::Display for WMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W({},{})W*({},{})",
            self.left.m(),
            self.left.a(),
            self.right.m(),
            self.right.a()
        )
    }
}

/// Finite linear combination of monomials with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<WMonomial, ComplexRational>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn one() -> Self {
        AlgebraElement::from(WMonomial::one())
    }

    pub fn term(x: WMonomial, c: ComplexRational) -> Self {
        let mut e = AlgebraElement::zero();
        e.add_term(x, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WMonomial, &ComplexRational)> {
        self.terms.iter()
    }

    /// The monomial if this element is exactly one monomial with coefficient 1.
    pub fn as_monomial(&self) -> Option<&WMonomial> {
        match self.terms.iter().next() {
            Some((x, c)) if self.terms.len() == 1 && c.is_one() => Some(x),
            _ => None,
        }
    }

    pub fn add_term(&mut self, x: WMonomial, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(x) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().clone() + c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ComplexRational) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (x, d) in &self.terms {
            out.add_term(x.clone(), c * d);
        }
        out
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (x, c) in &self.terms {
            for (y, d) in &other.terms {
                if let Some(z) = x.mul(y) {
                    out.add_term(z, c * d);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            terms: self.terms.iter().map(|(x, c)| (x.adjoint(), c.conj())).collect(),
        }
    }
}

impl From<WMonomial> for AlgebraElement {
    fn from(x: WMonomial) -> Self {
        AlgebraElement::term(x, ComplexRational::one())
    }
}

impl From<Option<WMonomial>> for AlgebraElement {
    fn from(x: Option<WMonomial>) -> Self {
        x.map_or_else(AlgebraElement::zero, AlgebraElement::from)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (x, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{x}")?;
            } else {
                write!(f, "{c}*{x}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: String,
    im: String,
    left: PNElement,
    right: PNElement,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    terms: Vec<TermJson>,
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ElementJson {
            terms: self
                .terms
                .iter()
                .map(|(x, c)| TermJson {
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                    left: x.left.clone(),
                    right: x.right.clone(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = ElementJson::deserialize(de)?;
        let mut out = AlgebraElement::zero();
        for t in raw.terms {
            let re = parse_rational(&t.re).map_err(serde::de::Error::custom)?;
            let im = parse_rational(&t.im).map_err(serde::de::Error::custom)?;
            out.add_term(WMonomial::new(t.left, t.right), ComplexRational::new(re, im));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pn(m: i64, a: i64) -> PNElement {
        PNElement::new(m, a).unwrap()
    }

    fn mono(l: (i64, i64), r: (i64, i64)) -> WMonomial {
        WMonomial::new(pn(l.0, l.1), pn(r.0, r.1))
    }

    #[test]
    fn one_and_adjoint() {
        let one = WMonomial::one();
        assert_eq!(one, mono((0, 1), (0, 1)));
        assert_eq!(one.adjoint(), one);
        let s = WMonomial::isometry(PNElement::s());
        assert_eq!(s.adjoint(), mono((0, 1), (2, 1)));
        let x = mono((0, 2), (3, 1));
        assert_eq!(x.adjoint(), mono((3, 1), (0, 2)));
        assert_eq!(x.adjoint().adjoint(), x);
        assert_eq!(one.mul(&x), Some(x.clone()));
        assert_eq!(x.mul(&one), Some(x));
    }

    #[test]
    fn covariance_products() {
        let x = mono((0, 1), (5, 7));
        let y = mono((2, 3), (0, 1));
        assert_eq!(x.mul(&y), Some(mono((3, 3), (8, 7))));

        let s_star = WMonomial::coisometry(PNElement::s());
        let t = WMonomial::isometry(PNElement::t());
        assert_eq!(s_star.mul(&t), Some(mono((3, 1), (2, 1))));

        let v2 = WMonomial::isometry(PNElement::v(2).unwrap());
        let s = WMonomial::isometry(PNElement::s());
        let lhs = v2.adjoint().mul(&s).and_then(|z| z.mul(&v2));
        assert_eq!(lhs, Some(mono((3, 1), (2, 1))));

        let v3 = WMonomial::isometry(PNElement::v(3).unwrap());
        let v2s = WMonomial::isometry(PNElement::v(2).unwrap());
        assert!(mono((0, 1), (0, 2)).mul(&mono((3, 2), (0, 1))).is_none());
        assert_eq!(v2s.adjoint().mul(&v3), Some(mono((0, 3), (0, 2))));
    }

    #[test]
    fn normal_form_absorbs_unit_shift() {
        // W_(5,1)W*_(5,1) = t s s* t* = 1 once s and t are unitary
        assert_eq!(mono((5, 1), (5, 1)), WMonomial::one());
        assert_eq!(mono((9, 2), (7, 3)), mono((7, 2), (4, 3)));
        assert_eq!(mono((9, 2), (7, 3)).right(), &pn(4, 3));
        // j = -1 would put 1 into the right slot, j = -2 makes m negative
        let x = mono((3, 3), (8, 7));
        assert_eq!(x.left(), &pn(3, 3));
        assert_eq!(x.right(), &pn(8, 7));
        // (k,a)W*(k,a) with k < a is already reduced
        assert_eq!(mono((4, 7), (4, 7)).left(), &pn(4, 7));
    }

    #[test]
    fn projections_of_s_and_t() {
        let ss = WMonomial {
            left: PNElement::s(),
            right: PNElement::s(),
        };
        let tt = WMonomial {
            left: PNElement::t(),
            right: PNElement::t(),
        };
        assert_eq!(ss.mul_raw(&tt), Some((pn(5, 1), pn(5, 1))));
        assert_eq!(ss.mul(&tt), Some(WMonomial::one()));
        assert_eq!(WMonomial::projection(PNElement::s()), WMonomial::one());
    }

    #[test]
    fn raw_product_is_not_associative_but_normal_form_is() {
        let raw = |m: &WMonomial, n: &WMonomial| m.mul_raw(n).map(|(left, right)| WMonomial { left, right });
        let mut pool = Vec::new();
        for a in 1..=4 {
            for m in [0, 2, 3, 5] {
                pool.push(pn(m, a));
            }
        }
        let monos: Vec<WMonomial> = pool
            .iter()
            .flat_map(|l| {
                pool.iter().map(move |r| WMonomial {
                    left: l.clone(),
                    right: r.clone(),
                })
            })
            .step_by(7)
            .collect();
        let mut raw_failures = 0;
        for x in &monos {
            for y in &monos {
                for z in &monos {
                    let l = raw(x, y).and_then(|xy| raw(&xy, z));
                    let r = raw(y, z).and_then(|yz| raw(x, &yz));
                    if l != r {
                        raw_failures += 1;
                    }
                    let nl = x.mul(y).and_then(|xy| xy.mul(z));
                    let nr = y.mul(z).and_then(|yz| x.mul(&yz));
                    assert_eq!(nl, nr, "{x} {y} {z}");
                }
            }
        }
        assert!(raw_failures > 0);
    }

    #[test]
    fn element_arithmetic() {
        let x = AlgebraElement::from(mono((2, 3), (0, 5)));
        let neg = x.scale(&ComplexRational::from_int(-1));
        assert!(x.add(&neg).is_zero());
        assert_eq!(AlgebraElement::one().mul(&x), x);
        let ss = AlgebraElement::from(WMonomial::projection(PNElement::s()));
        let tt = AlgebraElement::from(WMonomial::projection(PNElement::t()));
        assert_eq!(ss.mul(&tt), AlgebraElement::one());
        let c = ComplexRational::new(Rational::new(1.into(), 2.into()), Rational::from_integer(3.into()));
        let y = AlgebraElement::term(mono((2, 1), (0, 3)), c.clone());
        let adj = y.adjoint();
        let (m, d) = adj.terms().next().unwrap();
        assert_eq!(m, &mono((0, 3), (2, 1)));
        assert_eq!(d, &c.conj());
    }

    #[test]
    fn generator_rendering() {
        assert_eq!(WMonomial::one().to_generator_word(), "1");
        assert_eq!(mono((2, 1), (0, 1)).to_generator_word(), "s");
        assert_eq!(mono((3, 1), (2, 1)).to_generator_word(), "t s*");
        assert_eq!(mono((8, 5), (2, 1)).to_generator_word(), "s^4 v5 s*");
        assert_eq!(mono((7, 2), (9, 3)).to_generator_word(), "t v2 v3* t*");
        assert_eq!(mono((7, 2), (3, 3)).to_generator_word(), "s t v2 v3*");
        assert_eq!(mono((2, 1), (0, 1)).to_string(), "W(2,1)W*(0,1)");
    }

    #[test]
    fn json_roundtrip() {
        let mut e = AlgebraElement::from(mono((3, 1), (2, 1)));
        e.add_term(
            mono((0, 2), (0, 2)),
            ComplexRational::new(Rational::new(1.into(), 3.into()), Rational::from_integer((-2).into())),
        );
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"terms":[{"re":"1/3","im":"-2/1","left":[0,2],"right":[0,2]},{"re":"1/1","im":"0/1","left":[3,1],"right":[2,1]}]}"#
        );
        let back: AlgebraElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}

//! The dynamics `sigma_r(W_u W_v^*) = (a/b)^{ir} W_u W_v^*` and its KMS states.
//!
//! A KMS_beta state is pinned down on spanning monomials by
//! `phi(W_(m,a) W^*_(n,b)) = [a = b] [a | m - n] a^{-beta} omega((m - n)/a)`,
//! where `omega` is a boundary functional on the residual degree. Values are
//! kept as formal sums `sum_n c_n n^{-beta}` so the KMS condition can be
//! checked exactly, base by base, independently of `beta`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{AlgebraElement, ComplexRational, WMonomial};
use crate::semigroup::{format_rational, parse_rational, PNElement, Rational};

/// Tolerance for floating-point identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Allowed negative margin for the smallest Gram eigenvalue.
pub const PSD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum InverseTemperature {
    Exact(Rational),
    Float(f64),
}

impl InverseTemperature {
    pub fn to_f64(&self) -> f64 {
        match self {
            InverseTemperature::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            InverseTemperature::Float(x) => *x,
        }
    }
}

impl FromStr for InverseTemperature {
    type Err = Error;
    /// `p/q` or an integer is exact; anything with a decimal point or exponent is a float.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains(['.', 'e', 'E']) {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(InverseTemperature::Float)
                .ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: format!("invalid inverse temperature {t:?}"),
                })
        } else {
            parse_rational(t).map(InverseTemperature::Exact)
        }
    }
}

impl fmt::Display for InverseTemperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InverseTemperature::Exact(r) => write!(f, "{r}"),
            InverseTemperature::Float(x) => write!(f, "{x}"),
        }
    }
}

/// `sum_n c_n n^{-beta}` over positive rational bases `n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BetaValue {
    terms: BTreeMap<Rational, ComplexRational>,
}

impl BetaValue {
    pub fn zero() -> Self {
        BetaValue::default()
    }

    pub fn one() -> Self {
        BetaValue::term(Rational::one(), ComplexRational::one())
    }

    /// `c base^{-beta}`.
    pub fn term(base: Rational, c: ComplexRational) -> Self {
        assert!(base.is_positive(), "bases are positive");
        let mut v = BetaValue::zero();
        v.add_term(base, c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, base: Rational, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(base) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &BetaValue) -> BetaValue {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ComplexRational) -> BetaValue {
        let mut out = BetaValue::zero();
        for (b, d) in &self.terms {
            out.add_term(b.clone(), c * d);
        }
        out
    }

    /// Multiplies by `r^{-beta}`.
    pub fn times_power(&self, r: &Rational) -> BetaValue {
        BetaValue {
            terms: self.terms.iter().map(|(b, c)| (b * r, c.clone())).collect(),
        }
    }

    pub fn conj(&self) -> BetaValue {
        BetaValue {
            terms: self.terms.iter().map(|(b, c)| (b.clone(), c.conj())).collect(),
        }
    }

    pub fn eval(&self, beta: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(b, c)| c.to_f64() * (-beta * rational_ln(b)).exp())
            .sum()
    }
}

fn rational_ln(r: &Rational) -> f64 {
    big_ln(r.numer()) - big_ln(r.denom())
}

fn big_ln(n: &BigInt) -> f64 {
    // exact enough for bases far beyond f64 range
    let bits = n.bits();
    if bits < 1000 {
        n.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if b.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*({b})^-beta")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BetaTermJson {
    base: String,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct BetaValueJson {
    terms: Vec<BetaTermJson>,
}

impl Serialize for BetaValue {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        BetaValueJson {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| BetaTermJson {
                    base: format_rational(b),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BetaValue {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = BetaValueJson::deserialize(de)?;
        let mut out = BetaValue::zero();
        for t in raw.terms {
            let p = |s: &str| parse_rational(s).map_err(serde::de::Error::custom);
            let base = p(&t.base)?;
            if !base.is_positive() {
                return Err(serde::de::Error::custom("bases must be positive"));
            }
            out.add_term(base, ComplexRational::new(p(&t.re)?, p(&t.im)?));
        }
        Ok(out)
    }
}

/// A point mass `weight` at `exp(2 pi i turns)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub turns: Rational,
    pub weight: Rational,
}

/// Boundary functional `omega(d) = integral of zeta^d`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum BoundaryMeasure {
    /// `omega(d) = [d = 0]`.
    #[default]
    Lebesgue,
    Atomic(Vec<Atom>),
}

impl BoundaryMeasure {
    /// Checks that the weights are non-negative and sum to one.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Measure("no atoms".into()));
        }
        if let Some(a) = atoms.iter().find(|a| a.weight.is_negative()) {
            return Err(Error::Measure(format!("negative weight {}", a.weight)));
        }
        let total: Rational = atoms.iter().map(|a| a.weight.clone()).sum();
        if !total.is_one() {
            return Err(Error::Measure(format!("weights sum to {total}, not 1")));
        }
        Ok(BoundaryMeasure::Atomic(atoms))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MeasureJson = serde_json::from_str(text).map_err(|e| Error::Measure(e.to_string()))?;
        raw.try_into()
    }

    /// `omega(d)` exactly; atoms must sit at quarter turns of `d`.
    pub fn omega(&self, d: &BigInt) -> Result<ComplexRational> {
        match self {
            BoundaryMeasure::Lebesgue => Ok(if d.is_zero() {
                ComplexRational::one()
            } else {
                ComplexRational::zero()
            }),
            BoundaryMeasure::Atomic(atoms) => {
                let mut acc = ComplexRational::zero();
                for a in atoms {
                    let x = &a.turns * Rational::from_integer(d.clone());
                    let frac = &x - x.floor();
                    let quarter = &frac * Rational::from_integer(4.into());
                    if !quarter.is_integer() {
                        return Err(Error::NonExactMeasure(d.to_string()));
                    }
                    let zeta = match quarter.to_integer().to_u8() {
                        Some(0) => ComplexRational::one(),
                        Some(1) => ComplexRational::i(),
                        Some(2) => ComplexRational::from_int(-1),
                        _ => -ComplexRational::i(),
                    };
                    acc = acc + &ComplexRational::real(a.weight.clone()) * &zeta;
                }
                Ok(acc)
            }
        }
    }

    pub fn omega_f64(&self, d: &BigInt) -> Complex64 {
        match self {
            BoundaryMeasure::Lebesgue => Complex64::new(if d.is_zero() { 1.0 } else { 0.0 }, 0.0),
            BoundaryMeasure::Atomic(atoms) => atoms
                .iter()
                .map(|a| {
                    // reduce the angle exactly before going to floating point
                    let x = &a.turns * Rational::from_integer(d.clone());
                    let frac = (&x - x.floor()).to_f64().unwrap_or(0.0);
                    Complex64::from_polar(a.weight.to_f64().unwrap_or(f64::NAN), std::f64::consts::TAU * frac)
                })
                .sum(),
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            BoundaryMeasure::Lebesgue => true,
            BoundaryMeasure::Atomic(atoms) => atoms
                .iter()
                .all(|a| (&a.turns * Rational::from_integer(4.into())).is_integer()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MeasureJson {
    Lebesgue,
    Atomic { atoms: Vec<AtomJson> },
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    turns: String,
    weight: String,
}

impl TryFrom<MeasureJson> for BoundaryMeasure {
    type Error = Error;
    fn try_from(raw: MeasureJson) -> Result<Self> {
        match raw {
            MeasureJson::Lebesgue => Ok(BoundaryMeasure::Lebesgue),
            MeasureJson::Atomic { atoms } => BoundaryMeasure::atomic(
                atoms
                    .iter()
                    .map(|a| {
                        Ok(Atom {
                            turns: parse_rational(&a.turns)?,
                            weight: parse_rational(&a.weight)?,
                        })
                    })
                    .collect::<Result<_>>()?,
            ),
        }
    }
}

impl Serialize for BoundaryMeasure {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundaryMeasure::Lebesgue => MeasureJson::Lebesgue,
            BoundaryMeasure::Atomic(atoms) => MeasureJson::Atomic {
                atoms: atoms
                    .iter()
                    .map(|a| AtomJson {
                        turns: format_rational(&a.turns),
                        weight: format_rational(&a.weight),
                    })
                    .collect(),
            },
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BoundaryMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        MeasureJson::deserialize(de)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

fn scales(x: &WMonomial) -> (&BigInt, &BigInt) {
    (x.left().a(), x.right().a())
}

/// The phase `(a/b)^{ir}` by which `sigma_r` multiplies `x`.
pub fn evolve(x: &WMonomial, r: f64) -> Complex64 {
    let (a, b) = scales(x);
    let ratio = Rational::new(a.clone(), b.clone());
    Complex64::from_polar(1.0, r * rational_ln(&ratio))
}

/// `sigma_{i beta}(x) = (a/b)^{-beta} x`, as the value `1 (a/b)^{-beta}`.
pub fn analytic_factor(x: &WMonomial) -> BetaValue {
    let (a, b) = scales(x);
    BetaValue::term(Rational::new(a.clone(), b.clone()), ComplexRational::one())
}

/// The residual degree `d = (m - n)/a` when `phi(x)` can be non-zero.
pub fn residual_degree(x: &WMonomial) -> Option<BigInt> {
    let (l, r) = (x.left(), x.right());
    if l.a() != r.a() {
        return None;
    }
    let (d, rem) = (l.m() - r.m()).div_rem(l.a());
    rem.is_zero().then_some(d)
}

pub fn kms_value(x: &WMonomial, omega: &BoundaryMeasure) -> Result<BetaValue> {
    match residual_degree(x) {
        None => Ok(BetaValue::zero()),
        Some(d) => Ok(BetaValue::term(
            Rational::from_integer(x.left().a().clone()),
            omega.omega(&d)?,
        )),
    }
}

pub fn kms_value_f64(x: &WMonomial, beta: f64, omega: &BoundaryMeasure) -> Complex64 {
    match residual_degree(x) {
        None => Complex64::zero(),
        Some(d) => omega.omega_f64(&d) * (-beta * big_ln(x.left().a())).exp(),
    }
}

pub fn kms_value_elem(x: &AlgebraElement, omega: &BoundaryMeasure) -> Result<BetaValue> {
    let mut acc = BetaValue::zero();
    for (m, c) in x.terms() {
        acc = acc.add(&kms_value(m, omega)?.scale(c));
    }
    Ok(acc)
}

pub fn kms_value_elem_f64(x: &AlgebraElement, beta: f64, omega: &BoundaryMeasure) -> Complex64 {
    x.terms().map(|(m, c)| c.to_f64() * kms_value_f64(m, beta, omega)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    /// `phi(x y)`.
    pub lhs: BetaValue,
    /// `phi(y sigma_{i beta}(x))`.
    pub rhs: BetaValue,
    pub structural: bool,
    pub float_delta: f64,
    pub holds: bool,
}

/// `phi(x y) = phi(y sigma_{i beta}(x))`, exactly and at `beta` in floating point.
pub fn kms_check_pair(
    x: &AlgebraElement,
    y: &AlgebraElement,
    beta: &InverseTemperature,
    omega: &BoundaryMeasure,
) -> Result<PairCheck> {
    let mut lhs = BetaValue::zero();
    let mut rhs = BetaValue::zero();
    for (mx, cx) in x.terms() {
        for (my, cy) in y.terms() {
            let c = cx * cy;
            if let Some(xy) = mx.mul(my) {
                lhs = lhs.add(&kms_value(&xy, omega)?.scale(&c));
            }
            if let Some(yx) = my.mul(mx) {
                let twisted = kms_value(&yx, omega)?.times_power(&analytic_ratio(mx));
                rhs = rhs.add(&twisted.scale(&c));
            }
        }
    }
    let b = beta.to_f64();
    let float_delta = (lhs.eval(b) - rhs.eval(b)).norm();
    let structural = lhs == rhs;
    Ok(PairCheck {
        holds: structural && float_delta <= IDENTITY_TOL,
        lhs,
        rhs,
        structural,
        float_delta,
    })
}

fn analytic_ratio(x: &WMonomial) -> Rational {
    let (a, b) = scales(x);
    Rational::new(a.clone(), b.clone())
}

/// Floating-point version for measures without exact values.
pub fn kms_check_pair_f64(x: &AlgebraElement, y: &AlgebraElement, beta: f64, omega: &BoundaryMeasure) -> f64 {
    let mut delta = Complex64::zero();
    for (mx, cx) in x.terms() {
        for (my, cy) in y.terms() {
            let c = (cx * cy).to_f64();
            if let Some(xy) = mx.mul(my) {
                delta += c * kms_value_f64(&xy, beta, omega);
            }
            if let Some(yx) = my.mul(mx) {
                let twist = (-beta * rational_ln(&analytic_ratio(mx))).exp();
                delta -= c * twist * kms_value_f64(&yx, beta, omega);
            }
        }
    }
    delta.norm()
}

#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub a: BigInt,
    pub beta: f64,
    /// `|P cap [0, a)| = a - 1`.
    pub count: BigInt,
    /// `(a - 1) a^{-beta}`.
    pub value: BetaValue,
    pub value_f64: f64,
    pub violated: bool,
    /// Pairs of projections whose product was computed and found to be zero.
    pub orthogonal_pairs_checked: u64,
    pub orthogonality_exhaustive: bool,
    /// `a a^{-beta}`: the family completed by `W_(a+1,a) W^*_(a+1,a)`, which
    /// covers the residue class of 1 and is orthogonal to the others.
    pub completed_value_f64: f64,
}

/// Largest `a` for which all pairs are multiplied out.
pub const EXHAUSTIVE_ORTHOGONALITY_LIMIT: u64 = 200;

/// The projections `W_(k,a) W^*_(k,a)`, `k in P cap [0,a)`, are mutually
/// orthogonal and each has value `a^{-beta}`, so a state forces
/// `(a - 1) a^{-beta} <= 1`.
pub fn beta_obstruction(a: &BigInt, beta: f64) -> Result<Obstruction> {
    if a < &BigInt::from(2) {
        return Err(Error::Measure(format!("obstruction needs a >= 2, got {a}")));
    }
    let ks: Vec<BigInt> = match a.to_u64() {
        Some(n) if n <= EXHAUSTIVE_ORTHOGONALITY_LIMIT => (0..n).filter(|&k| k != 1).map(BigInt::from).collect(),
        // the smallest and largest 32 residues
        _ => {
            let lo = (0u64..34).filter(|&k| k != 1).map(BigInt::from);
            let hi = (1u64..=32).map(|j| a - BigInt::from(j));
            lo.chain(hi).collect()
        }
    };
    let exhaustive = ks.len() as u64 + 1 == a.to_u64().unwrap_or(0);
    let proj = |k: &BigInt| WMonomial::projection(PNElement::new(k.clone(), a.clone()).expect("k in P"));
    let projs: Vec<WMonomial> = ks.iter().map(proj).collect();
    let mut pairs = 0;
    for (i, p) in projs.iter().enumerate() {
        for q in &projs[i + 1..] {
            if p.mul(q).is_some() {
                return Err(Error::Measure(format!("projections {p} and {q} are not orthogonal")));
            }
            pairs += 1;
        }
    }
    let count: BigInt = a - 1;
    let value = BetaValue::term(
        Rational::from_integer(a.clone()),
        ComplexRational::real(Rational::from_integer(count.clone())),
    );
    let value_f64 = value.eval(beta).re;
    Ok(Obstruction {
        a: a.clone(),
        beta,
        count,
        violated: value_f64 > 1.0,
        value,
        value_f64,
        orthogonal_pairs_checked: pairs,
        orthogonality_exhaustive: exhaustive,
        completed_value_f64: ((1.0 - beta) * big_ln(a)).exp(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub size: usize,
    pub beta: f64,
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub psd: bool,
}

/// `G_ij = phi(x_i^* x_j)` as exact values.
pub fn gram_matrix(xs: &[WMonomial], omega: &BoundaryMeasure) -> Result<Vec<Vec<BetaValue>>> {
    xs.iter()
        .map(|xi| {
            let xi = xi.adjoint();
            xs.iter()
                .map(|xj| xi.mul(xj).map_or(Ok(BetaValue::zero()), |p| kms_value(&p, omega)))
                .collect()
        })
        .collect()
}

pub fn gram_matrix_f64(xs: &[WMonomial], beta: f64, omega: &BoundaryMeasure) -> Vec<Vec<Complex64>> {
    xs.iter()
        .map(|xi| {
            let xi = xi.adjoint();
            xs.iter()
                .map(|xj| xi.mul(xj).map_or(Complex64::zero(), |p| kms_value_f64(&p, beta, omega)))
                .collect()
        })
        .collect()
}

/// Smallest eigenvalue of a Hermitian matrix, via its real `2n x 2n` form
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `g` doubled.
pub fn min_eigenvalue(g: &[Vec<Complex64>]) -> f64 {
    let n = g.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = g[i % n][j % n];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    SymmetricEigen::new(real).eigenvalues.min()
}

pub fn gram_report(xs: &[WMonomial], beta: f64, omega: &BoundaryMeasure) -> GramReport {
    let g = gram_matrix_f64(xs, beta, omega);
    let hermitian = (0..g.len()).all(|i| (0..g.len()).all(|j| (g[i][j] - g[j][i].conj()).norm() <= IDENTITY_TOL));
    let min_eigenvalue = min_eigenvalue(&g);
    GramReport {
        size: xs.len(),
        beta,
        min_eigenvalue,
        hermitian,
        psd: min_eigenvalue >= -PSD_TOL,
    }
}

//! Truncated left regular representations as exact sparse 0/1 matrices.
//!
//! Two carriers are available. [`Carrier::Semigroup`] is `l^2(P x| N^x)` with
//! `L_(m,a) d_(n,b) = d_(m+an, ab)`. [`Carrier::Integers`] uses the same
//! formula on basis vectors `d_(n,b)` with `n` ranging over all of `Z`; there
//! `s` and `t` are unitary and the projections `L_u L_u^*` commute as
//! multiplication operators by indicator functions of
//! `{(k,c) : a | c, k = m mod a}`, so that representation is Nica covariant.
//! The semigroup carrier is not: `s^* t` and `t s^*` already differ on `d_(3,1)`.
//!
//! Truncation is controlled per column. A column is *safe* for an operator
//! word when evaluating the word on that basis vector never leaves the slice;
//! on safe columns the truncated matrix product equals the exact operator.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::monomial::WMonomial;
use crate::semigroup::PNElement;
use crate::word::GenWord;

/// `(g, starred)`: `L_g` or `L_g^*`. Words act right to left.
pub type Letter = (PNElement, bool);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Semigroup,
    Integers,
}

impl Carrier {
    /// Is `n` an additive part of some basis vector?
    pub fn contains(self, n: i64) -> bool {
        match self {
            Carrier::Semigroup => n >= 0 && n != 1,
            Carrier::Integers => true,
        }
    }
}

/// The basis vectors `d_(n,b)` with `n <= M` (`|n| <= M` over `Z`) and `b <= A`,
/// in lexicographic order.
#[derive(Clone, Debug)]
pub struct BasisSlice {
    pub carrier: Carrier,
    pub max_m: i64,
    pub max_a: i64,
    elements: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
}

impl BasisSlice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[(i64, i64)] {
        &self.elements
    }

    pub fn index_of(&self, x: (i64, i64)) -> Option<usize> {
        self.index.get(&x).copied()
    }
}

pub fn build_basis(max_m: u64, max_a: u64) -> BasisSlice {
    build_basis_on(Carrier::Semigroup, max_m, max_a)
}

pub fn build_basis_on(carrier: Carrier, max_m: u64, max_a: u64) -> BasisSlice {
    let (mm, aa) = (max_m as i64, max_a.max(1) as i64);
    let lo = match carrier {
        Carrier::Semigroup => 0,
        Carrier::Integers => -mm,
    };
    let elements: Vec<(i64, i64)> = (lo..=mm)
        .filter(|&n| carrier.contains(n))
        .flat_map(|n| (1..=aa).map(move |b| (n, b)))
        .collect();
    let index = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    BasisSlice {
        carrier,
        max_m: mm,
        max_a: aa,
        elements,
        index,
    }
}

/// Outcome of applying one letter to one exact basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Vector((i64, i64)),
    Zero,
    /// The exact image is a basis vector outside the slice.
    Escaped,
}

fn apply(letter: &Letter, x: (i64, i64), basis: &BasisSlice) -> Step {
    let Some((m, a)) = letter.0.small() else {
        return Step::Escaped;
    };
    let (m, a) = (m as i64, a as i64);
    let (n, b) = x;
    let image = if letter.1 {
        if b % a != 0 || (n - m) % a != 0 || !basis.carrier.contains((n - m) / a) {
            return Step::Zero;
        }
        ((n - m) / a, b / a)
    } else {
        match a.checked_mul(n).and_then(|an| an.checked_add(m)).zip(a.checked_mul(b)) {
            Some(y) => y,
            None => return Step::Escaped,
        }
    };
    if basis.index.contains_key(&image) {
        Step::Vector(image)
    } else {
        Step::Escaped
    }
}

/// Exact action of a word on `d_x`: `Some(Some(y))` for `d_y`, `Some(None)` for
/// zero, `None` if some intermediate vector leaves the slice.
fn act(word: &[Letter], x: (i64, i64), basis: &BasisSlice) -> Option<Option<(i64, i64)>> {
    let mut cur = x;
    for letter in word.iter().rev() {
        match apply(letter, cur, basis) {
            Step::Vector(y) => cur = y,
            Step::Zero => return Some(None),
            Step::Escaped => return None,
        }
    }
    Some(Some(cur))
}

/// Column-compressed sparse matrix with exact integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    dim: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zero(dim: usize) -> Self {
        SparseMatrix {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            cols: (0..dim).map(|j| vec![(j, 1)]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Entries of column `j` as `(row, value)`, rows ascending.
    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.cols[j]
            .binary_search_by_key(&i, |e| e.0)
            .map_or(0, |k| self.cols[j][k].1)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                cols[i].push((j, v));
            }
        }
        SparseMatrix { dim: self.dim, cols }
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.dim, other.dim);
        let cols = other
            .cols
            .iter()
            .map(|col| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(k, v) in col {
                    for &(i, w) in &self.cols[k] {
                        *acc.entry(i).or_default() += v * w;
                    }
                }
                let mut out: Vec<(usize, i64)> = acc.into_iter().filter(|e| e.1 != 0).collect();
                out.sort_unstable();
                out
            })
            .collect();
        SparseMatrix { dim: self.dim, cols }
    }

    pub fn columns_agree(&self, other: &SparseMatrix, cols: &[usize]) -> bool {
        cols.iter().all(|&j| self.cols[j] == other.cols[j])
    }

    /// One `row col value` line per non-zero entry, column-major.
    pub fn to_coo_text(&self) -> String {
        let mut s = String::new();
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                writeln!(s, "{i} {j} {v}").expect("writing to a String");
            }
        }
        s
    }
}

/// The truncation of `L_g`: columns whose image leaves the slice are zero.
pub fn rep_matrix(g: &PNElement, basis: &BasisSlice) -> SparseMatrix {
    let letter = (g.clone(), false);
    let cols = basis
        .elements
        .iter()
        .map(|&x| match apply(&letter, x, basis) {
            Step::Vector(y) => vec![(basis.index[&y], 1)],
            _ => Vec::new(),
        })
        .collect();
    SparseMatrix { dim: basis.len(), cols }
}

/// Product of the truncated letter matrices, leftmost letter outermost.
///
/// Each truncated letter is a partial map on basis vectors, so the product is
/// evaluated column by column; [`word_matrix_by_products`] multiplies the
/// matrices out and agrees with it.
pub fn word_matrix(word: &[Letter], basis: &BasisSlice) -> SparseMatrix {
    let cols = basis
        .elements
        .iter()
        .map(|&x| {
            let mut cur = x;
            for letter in word.iter().rev() {
                match apply(letter, cur, basis) {
                    Step::Vector(y) => cur = y,
                    Step::Zero | Step::Escaped => return Vec::new(),
                }
            }
            vec![(basis.index[&cur], 1)]
        })
        .collect();
    SparseMatrix { dim: basis.len(), cols }
}

pub fn word_matrix_by_products(word: &[Letter], basis: &BasisSlice) -> SparseMatrix {
    word.iter().fold(SparseMatrix::identity(basis.len()), |acc, (g, star)| {
        let l = rep_matrix(g, basis);
        let l = if *star { l.transpose() } else { l };
        acc.mul(&l)
    })
}

/// `L_left L_right^*`.
pub fn monomial_matrix(x: &WMonomial, basis: &BasisSlice) -> SparseMatrix {
    word_matrix(&monomial_letters(x), basis)
}

pub fn monomial_letters(x: &WMonomial) -> Vec<Letter> {
    vec![(x.left().clone(), false), (x.right().clone(), true)]
}

/// One letter per factor, `g^k` taken as a single translation.
pub fn word_letters(w: &GenWord) -> Vec<Letter> {
    w.factors
        .iter()
        .map(|f| (f.generator.element().pow(f.power), f.starred))
        .collect()
}

/// Columns on which the truncated product of `word` is exact.
pub fn safe_columns(word: &[Letter], basis: &BasisSlice) -> Vec<usize> {
    (0..basis.len())
        .filter(|&j| act(word, basis.elements[j], basis).is_some())
        .collect()
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumericCheck {
    /// Columns on which both sides are exact.
    pub certified: usize,
    /// Certified columns on which the sides differ.
    pub mismatched: Vec<(i64, i64)>,
    pub warning: Option<String>,
}

impl NumericCheck {
    /// Agreement on a non-empty set of certified columns.
    pub fn agrees(&self) -> bool {
        self.certified > 0 && self.mismatched.is_empty()
    }
}

/// Compares two operator words (`None` is the zero operator) as truncated
/// matrices on their common safe columns.
pub fn check_identity_numeric(lhs: &[Letter], rhs: Option<&[Letter]>, basis: &BasisSlice) -> NumericCheck {
    let lm = word_matrix(lhs, basis);
    let mut cols = safe_columns(lhs, basis);
    let rm = match rhs {
        Some(r) => {
            cols = intersect(&cols, &safe_columns(r, basis));
            word_matrix(r, basis)
        }
        None => SparseMatrix::zero(basis.len()),
    };
    let mismatched = cols
        .iter()
        .filter(|&&j| lm.column(j) != rm.column(j))
        .map(|&j| basis.elements[j])
        .collect();
    let warning = cols.is_empty().then(|| {
        format!(
            "no certified columns on slice ({},{}); enlarge the slice",
            basis.max_m, basis.max_a
        )
    });
    NumericCheck {
        certified: cols.len(),
        mismatched,
        warning,
    }
}

/// Checks a word against a monomial (or zero) produced by the symbolic engine.
pub fn check_word_against(w: &GenWord, value: Option<&WMonomial>, basis: &BasisSlice) -> NumericCheck {
    let rhs = value.map(monomial_letters);
    check_identity_numeric(&word_letters(w), rhs.as_deref(), basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pn(m: i64, a: i64) -> PNElement {
        PNElement::new(m, a).unwrap()
    }

    fn word(s: &str) -> Vec<Letter> {
        word_letters(&GenWord::parse(s).unwrap())
    }

    #[test]
    fn basis_enumeration() {
        let b = build_basis(3, 2);
        assert_eq!(b.elements(), &[(0, 1), (0, 2), (2, 1), (2, 2), (3, 1), (3, 2)]);
        assert_eq!(build_basis(0, 1).elements(), &[(0, 1)]);
        for (m, a) in [(10, 3), (1, 4), (25, 1)] {
            let count = (0..=m).filter(|&k| Carrier::Semigroup.contains(k)).count();
            assert_eq!(build_basis(m as u64, a).len(), count * a as usize);
        }
        assert_eq!(build_basis_on(Carrier::Integers, 2, 1).len(), 5);
        let b = build_basis(6, 2);
        for (i, &x) in b.elements().iter().enumerate() {
            assert_eq!(b.index_of(x), Some(i));
        }
    }

    #[test]
    fn translation_by_s() {
        let b = build_basis(6, 1);
        assert_eq!(rep_matrix(&PNElement::identity(), &b), SparseMatrix::identity(b.len()));
        let l = rep_matrix(&pn(2, 1), &b);
        let idx = |m| b.index_of((m, 1)).unwrap();
        for (from, to) in [(0, 2), (2, 4), (3, 5), (4, 6)] {
            assert_eq!(l.get(idx(to), idx(from)), 1);
        }
        assert!(l.column(idx(5)).is_empty());
        assert!(l.column(idx(6)).is_empty());
        assert_eq!(l.nnz(), 4);
    }

    #[test]
    fn safe_columns_examples() {
        let b = build_basis(6, 1);
        assert_eq!(safe_columns(&[], &b).len(), b.len());
        let safe: Vec<i64> = safe_columns(&[(pn(2, 1), false)], &b)
            .into_iter()
            .map(|j| b.elements()[j].0)
            .collect();
        assert_eq!(safe, vec![0, 2, 3, 4]);
        assert_eq!(safe_columns(&[(pn(2, 1), true)], &b).len(), b.len());
    }

    #[test]
    fn isometry_and_homomorphism_on_safe_columns() {
        let b = build_basis(40, 12);
        for g in [pn(2, 1), pn(3, 2), pn(0, 3), pn(5, 2)] {
            let l = rep_matrix(&g, &b);
            let cols = safe_columns(&[(g.clone(), false)], &b);
            assert!(cols.len() >= 10);
            assert!(l
                .transpose()
                .mul(&l)
                .columns_agree(&SparseMatrix::identity(b.len()), &cols));
            for h in [pn(2, 1), pn(0, 2), pn(7, 1)] {
                let w = [(g.clone(), false), (h.clone(), false)];
                let check = check_identity_numeric(&w, Some(&[(g.compose(&h), false)]), &b);
                assert!(check.agrees() && check.certified >= 10, "{g} {h}");
            }
        }
    }

    #[test]
    fn relations_on_both_carriers() {
        let p = build_basis(30, 1);
        let check = check_identity_numeric(&word("t^2"), Some(&word("s^3")), &p);
        assert!(check.agrees() && check.certified >= 10);
        let z = build_basis_on(Carrier::Integers, 40, 10);
        let check = check_identity_numeric(&word("v5* s v5"), None, &z);
        assert!(check.agrees() && check.certified >= 10);
        // R2 separates the carriers
        let r2 = check_identity_numeric(&word("s* t"), Some(&word("t s*")), &p);
        assert_eq!(r2.mismatched, vec![(3, 1)]);
        assert!(check_identity_numeric(&word("s* t"), Some(&word("t s*")), &z).agrees());
    }

    #[test]
    fn covariance_of_the_counterexample_pair() {
        let (u, v) = (pn(5, 7), pn(2, 3));
        let proj = |g: &PNElement| [(g.clone(), false), (g.clone(), true)];
        let lhs: Vec<Letter> = proj(&u).into_iter().chain(proj(&v)).collect();
        let sigma = pn(26, 21);
        let z = build_basis_on(Carrier::Integers, 80, 42);
        let zc = check_identity_numeric(&lhs, Some(&proj(&sigma)), &z);
        assert!(zc.agrees() && zc.certified >= 10);
        let p = build_basis(80, 42);
        let pc = check_identity_numeric(&lhs, Some(&proj(&sigma)), &p);
        assert!(pc.certified >= 10);
        assert!(pc.mismatched.contains(&(47, 21)));
    }

    #[test]
    fn engine_products_match_integer_carrier() {
        let z = build_basis_on(Carrier::Integers, 40, 12);
        let samples = [((3, 2), (0, 3)), ((2, 1), (5, 4)), ((0, 6), (9, 2)), ((7, 3), (7, 3))];
        for &((m, a), (n, b)) in &samples {
            for &((p, c), (q, d)) in &samples {
                let x = WMonomial::new(pn(m, a), pn(n, b));
                let y = WMonomial::new(pn(p, c), pn(q, d));
                let mut w = monomial_letters(&x);
                w.extend(monomial_letters(&y));
                let prod = x.mul(&y);
                let check = check_identity_numeric(&w, prod.as_ref().map(monomial_letters).as_deref(), &z);
                assert!(check.mismatched.is_empty(), "{x} {y}");
                assert!(check.certified > 0);
            }
        }
    }

    #[test]
    fn columnwise_evaluation_matches_matrix_products() {
        for carrier in [Carrier::Semigroup, Carrier::Integers] {
            let b = build_basis_on(carrier, 30, 8);
            for w in ["s* t", "v2* s v2", "t^2 v3 s*^3 v2*", "v4* s^2 v4", "s* s* t* v2 t"] {
                let w = word(w);
                assert_eq!(word_matrix(&w, &b), word_matrix_by_products(&w, &b));
            }
        }
    }

    #[test]
    fn coo_export() {
        let b = build_basis(3, 1);
        let text = rep_matrix(&pn(0, 1), &b).to_coo_text();
        assert_eq!(text, "0 0 1\n1 1 1\n2 2 1\n");
    }
}

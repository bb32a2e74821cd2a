//! The defining relations of the presentation by `s`, `t`, `v_p` and their
//! amplifications to arbitrary `v_a`, as executable identities between words.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::monomial::WMonomial;
use crate::word::GenWord;

/// `lhs = rhs`, or `lhs = 0` when `rhs` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub label: &'static str,
    pub params: Vec<i64>,
    pub lhs: GenWord,
    pub rhs: Option<GenWord>,
}

impl Identity {
    fn new(label: &'static str, params: Vec<i64>, lhs: &str, rhs: Option<&str>) -> Self {
        let parse = |s: &str| GenWord::parse(s).expect("generated words are well-formed");
        Identity {
            label,
            params,
            lhs: parse(lhs),
            rhs: rhs.map(parse),
        }
    }

    pub fn check(&self) -> Check {
        let lhs_value = self.lhs.to_monomial();
        let rhs_value = self.rhs.as_ref().and_then(GenWord::to_monomial);
        Check {
            label: self.label,
            params: self.params.clone(),
            lhs: self.lhs.to_string(),
            rhs: self.rhs.as_ref().map_or_else(|| "0".into(), ToString::to_string),
            holds: lhs_value == rhs_value,
            lhs_value,
            rhs_value,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}: {} = ", self.label, self.params, self.lhs)?;
        match &self.rhs {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: &'static str,
    pub params: Vec<i64>,
    pub lhs: String,
    pub rhs: String,
    #[serde(serialize_with = "ser_value")]
    pub lhs_value: Option<WMonomial>,
    #[serde(serialize_with = "ser_value")]
    pub rhs_value: Option<WMonomial>,
    pub holds: bool,
}

fn ser_value<S: serde::Serializer>(v: &Option<WMonomial>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(m) => s.serialize_str(&m.to_string()),
        None => s.serialize_str("0"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub primes: Vec<u64>,
    pub composite_bound: u64,
    pub checked: usize,
    pub failures: Vec<Check>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
        .collect()
}

/// `g^k` for `k >= 0`, `g*^(-k)` otherwise, as word text.
fn gpow(g: &str, k: i64) -> String {
    match k {
        0 => String::new(),
        1 => g.to_string(),
        -1 => format!("{g}*"),
        k if k > 0 => format!("{g}^{k}"),
        k => format!("{g}*^{}", -k),
    }
}

/// Pairs `(k1, k2)` of non-negative integers with `1 <= 2 k1 + 3 k2 < bound`.
fn degree_pairs(bound: i64) -> impl Iterator<Item = (i64, i64)> {
    (0..bound).flat_map(move |k1| {
        (0..bound)
            .map(move |k2| (k1, k2))
            .filter(move |&(k1, k2)| (1..bound).contains(&(2 * k1 + 3 * k2)))
    })
}

/// Identities for a single prime `p` that do not involve a second index.
fn prime_identities(p: i64, out: &mut Vec<Identity>) {
    let v = format!("v{p}");
    let vs = format!("v{p}*");
    for (g, gs) in [("s", "s*"), ("t", "t*")] {
        out.push(Identity::new(
            "T1",
            vec![p],
            &format!("{v} {g}"),
            Some(&format!("{g}^{p} {v}")),
        ));
        out.push(Identity::new(
            "T1",
            vec![p],
            &format!("{v} {gs}"),
            Some(&format!("{gs}^{p} {v}")),
        ));
    }
    out.push(Identity::new(
        "T4",
        vec![p],
        &format!("s* {v}"),
        Some(&format!("s^{} {v} s*", p - 1)),
    ));
    for (k1, k2) in degree_pairs(p) {
        out.push(Identity::new(
            "T5",
            vec![p, k1, k2],
            &format!("{vs} s^{k1} t^{k2} {v}"),
            None,
        ));
    }
    for k1 in -p..=p {
        for k2 in -p..=p {
            if (1..p).contains(&(2 * k1 + 3 * k2)) {
                let w = format!("{vs} {} {} {v}", gpow("s", k1), gpow("t", k2));
                out.push(Identity::new("T5g", vec![p, k1, k2], &w, None));
            }
        }
    }
    for k in 1..p {
        if p != 2 {
            out.push(Identity::new("T6", vec![p, k], &format!("{vs} s^{k} {v}"), None));
        }
        if p != 3 {
            out.push(Identity::new("T6", vec![p, k], &format!("{vs} t^{k} {v}"), None));
        }
        out.push(Identity::new("T6", vec![p, k], &format!("{vs} t^{k} s*^{k} {v}"), None));
    }
    if p == 2 {
        out.push(Identity::new("T6", vec![2], "v2* s v2", Some("t s*")));
    }
    if p == 3 {
        out.push(Identity::new("T6", vec![3], "v3* t v3", Some("t s*")));
        out.push(Identity::new("T6", vec![3], "v3* t^2 v3", Some("s")));
    }
}

/// The amplified identities for a single index `a`, stated verbatim.
fn composite_identities(a: i64, out: &mut Vec<Identity>) {
    let v = format!("v{a}");
    let vs = format!("v{a}*");
    for (g, gs) in [("s", "s*"), ("t", "t*")] {
        out.push(Identity::new(
            "T1'",
            vec![a],
            &format!("{v} {g}"),
            Some(&format!("{g}^{a} {v}")),
        ));
        out.push(Identity::new(
            "T1'",
            vec![a],
            &format!("{v} {gs}"),
            Some(&format!("{gs}^{a} {v}")),
        ));
    }
    out.push(Identity::new(
        "T4'",
        vec![a],
        &format!("s* {v}"),
        Some(&format!("s^{} {v} s*", a - 1)),
    ));
    for (k1, k2) in degree_pairs(a) {
        out.push(Identity::new(
            "T5'",
            vec![a, k1, k2],
            &format!("{vs} s^{k1} t^{k2} {v}"),
            None,
        ));
    }
    for k in 1..a {
        if a != 2 {
            out.push(Identity::new("T6'", vec![a, k], &format!("{vs} s^{k} {v}"), None));
        }
        if a != 3 {
            out.push(Identity::new("T6'", vec![a, k], &format!("{vs} t^{k} {v}"), None));
        }
        out.push(Identity::new(
            "T6'",
            vec![a, k],
            &format!("{vs} t^{k} s*^{k} {v}"),
            None,
        ));
    }
}

/// Every identity of the presentation for the given primes and all indices
/// `1 <= a, b <= composite_bound`, sorted by label and parameters.
pub fn presentation_identities(primes: &[u64], composite_bound: u64) -> Vec<Identity> {
    let primes: Vec<i64> = primes.iter().map(|&p| p as i64).collect();
    let cb = composite_bound as i64;
    let mut out = vec![
        Identity::new("R1", vec![], "t^2", Some("s^3")),
        Identity::new("R2", vec![], "t s", Some("s t")),
        Identity::new("R2", vec![], "s* t", Some("t s*")),
        Identity::new("R2", vec![], "t* s", Some("s t*")),
    ];
    for &p in &primes {
        prime_identities(p, &mut out);
        for &q in &primes {
            out.push(Identity::new(
                "T2",
                vec![p, q],
                &format!("v{p} v{q}"),
                Some(&format!("v{q} v{p}")),
            ));
            if p != q {
                out.push(Identity::new(
                    "T3",
                    vec![p, q],
                    &format!("v{p}* v{q}"),
                    Some(&format!("v{q} v{p}*")),
                ));
            }
        }
    }
    for a in 1..=cb {
        composite_identities(a, &mut out);
        for b in 1..=cb {
            out.push(Identity::new(
                "T2'",
                vec![a, b],
                &format!("v{a} v{b}"),
                Some(&format!("v{b} v{a}")),
            ));
            if a.gcd(&b) == 1 {
                out.push(Identity::new(
                    "T3'",
                    vec![a, b],
                    &format!("v{a}* v{b}"),
                    Some(&format!("v{b} v{a}*")),
                ));
            }
        }
    }
    // stable: identities sharing label and params keep their generation order
    out.sort_by(|x, y| (x.label, &x.params).cmp(&(y.label, &y.params)));
    out
}

/// Reduces both sides of every identity and collects those that disagree.
pub fn relation_suite(primes: &[u64], composite_bound: u64) -> RelationReport {
    let ids = presentation_identities(primes, composite_bound);
    let failures: Vec<Check> = ids.par_iter().map(Identity::check).filter(|c| !c.holds).collect();
    RelationReport {
        primes: primes.to_vec(),
        composite_bound,
        checked: ids.len(),
        failures,
    }
}

//! Seeded randomized campaigns. Everything here is a deterministic function of
//! the [`RunConfig`], so equal configurations give byte-identical reports.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pnx_core::kms::{self, BoundaryMeasure, InverseTemperature, PSD_TOL};
use pnx_core::monomial::WMonomial;
use pnx_core::regular_rep::{self, build_basis_on, check_identity_numeric, Carrier};
use pnx_core::relations::presentation_identities;
use pnx_core::semigroup::PNElement;
use pnx_core::{BetaValue, Result};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub max_m: u64,
    pub max_a: u64,
    pub slice: (u64, u64),
    pub beta: InverseTemperature,
    pub measure: BoundaryMeasure,
    pub trials: usize,
    pub json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            max_m: 30,
            max_a: 20,
            slice: (80, 42),
            beta: InverseTemperature::Exact(BigInt::from(2).into()),
            measure: BoundaryMeasure::Lebesgue,
            trials: 1000,
            json: false,
        }
    }
}

impl RunConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Uniform on `{0,2,3,...,max_m} x {1,...,max_a}`, rejecting `m = 1`.
pub fn random_element(rng: &mut impl Rng, max_m: u64, max_a: u64) -> PNElement {
    loop {
        let m = rng.gen_range(0..=max_m);
        if m != 1 {
            return PNElement::new(m, rng.gen_range(1..=max_a.max(1))).expect("m != 1, a >= 1");
        }
    }
}

pub fn random_monomial(rng: &mut impl Rng, max_m: u64, max_a: u64) -> WMonomial {
    let l = random_element(rng, max_m, max_a);
    let r = random_element(rng, max_m, max_a);
    WMonomial::new(l, r)
}

/// A pair for the KMS campaign. Independent uniform draws almost never give
/// `phi(xy) != 0` once `max_a` exceeds a handful, so every other pair is
/// `(x, s^k x^*)` with `k` a small multiple of the scale of `x`'s right leg;
/// then `x s^k x^*` lies on the diagonal.
pub fn random_kms_pair(rng: &mut impl Rng, max_m: u64, max_a: u64) -> (WMonomial, WMonomial) {
    let x = random_monomial(rng, max_m, max_a);
    let y = if rng.gen_bool(0.5) {
        random_monomial(rng, max_m, max_a)
    } else {
        let scale = x.right().a().to_u64().unwrap_or(1);
        let k = scale * rng.gen_range(0..=2);
        let shift = WMonomial::isometry(PNElement::s().pow(k));
        shift.mul(&x.adjoint()).expect("isometries have finite products")
    };
    (x, y)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairFailure {
    pub x: String,
    pub y: String,
    pub lhs: BetaValue,
    pub rhs: BetaValue,
    pub float_delta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KmsCheckReport {
    pub seed: u64,
    pub beta: String,
    pub measure: BoundaryMeasure,
    pub mode: &'static str,
    pub trials: usize,
    pub max_m: u64,
    pub max_a: u64,
    pub passed: usize,
    /// Pairs on which at least one side is non-zero.
    pub nontrivial: usize,
    pub max_float_delta: f64,
    pub failures: Vec<PairFailure>,
}

/// `phi(xy) = phi(y sigma_{i beta}(x))` on random monomial pairs; exact when the
/// measure allows it, floating point otherwise.
pub fn kms_check_campaign(cfg: &RunConfig) -> Result<KmsCheckReport> {
    let mut rng = cfg.rng();
    let beta = cfg.beta.to_f64();
    let exact = cfg.measure.is_exact();
    let mut failures = Vec::new();
    let (mut nontrivial, mut max_delta) = (0, 0.0f64);
    for _ in 0..cfg.trials {
        let (x, y) = random_kms_pair(&mut rng, cfg.max_m, cfg.max_a);
        let (xe, ye) = (x.clone().into(), y.clone().into());
        if exact {
            let c = kms::kms_check_pair(&xe, &ye, &cfg.beta, &cfg.measure)?;
            max_delta = max_delta.max(c.float_delta);
            if !c.lhs.is_zero() || !c.rhs.is_zero() {
                nontrivial += 1;
            }
            if !c.holds {
                failures.push(PairFailure {
                    x: x.to_string(),
                    y: y.to_string(),
                    lhs: c.lhs,
                    rhs: c.rhs,
                    float_delta: c.float_delta,
                });
            }
        } else {
            let delta = kms::kms_check_pair_f64(&xe, &ye, beta, &cfg.measure);
            max_delta = max_delta.max(delta);
            let value =
                |p: Option<WMonomial>| p.is_some_and(|p| kms::kms_value_f64(&p, beta, &cfg.measure).norm() > 0.0);
            if value(x.mul(&y)) || value(y.mul(&x)) {
                nontrivial += 1;
            }
            if delta > kms::IDENTITY_TOL {
                failures.push(PairFailure {
                    x: x.to_string(),
                    y: y.to_string(),
                    lhs: BetaValue::zero(),
                    rhs: BetaValue::zero(),
                    float_delta: delta,
                });
            }
        }
    }
    Ok(KmsCheckReport {
        seed: cfg.seed,
        beta: cfg.beta.to_string(),
        measure: cfg.measure.clone(),
        mode: if exact { "exact" } else { "float" },
        trials: cfg.trials,
        max_m: cfg.max_m,
        max_a: cfg.max_a,
        passed: cfg.trials - failures.len(),
        nontrivial,
        max_float_delta: max_delta,
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GramSetResult {
    pub monomials: Vec<String>,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GramCampaignReport {
    pub seed: u64,
    pub beta: f64,
    pub measure: BoundaryMeasure,
    pub sets: usize,
    pub max_size: usize,
    pub max_m: u64,
    pub max_a: u64,
    pub min_eigenvalue: f64,
    /// Sets whose Gram matrix has a non-zero off-diagonal entry.
    pub sets_with_coupling: usize,
    pub tolerance: f64,
    /// Positivity is only asserted for Lebesgue `omega` and `beta >= 2`;
    /// otherwise it is reported. Atomic measures can fail it even at large beta.
    pub asserted: bool,
    pub negative: Vec<GramSetResult>,
}

impl GramCampaignReport {
    pub fn passed(&self) -> bool {
        !self.asserted || self.negative.is_empty()
    }
}

/// A random set for the Gram campaign. Half the sets build every monomial from
/// a pool of four small legs, so that products `x_i^* x_j` overlap; independent
/// draws give (nearly) diagonal Gram matrices.
pub fn random_gram_set(rng: &mut impl Rng, max_size: usize, max_m: u64, max_a: u64) -> Vec<WMonomial> {
    let size = rng.gen_range(1..=max_size.max(1));
    if rng.gen_bool(0.5) {
        return (0..size).map(|_| random_monomial(rng, max_m, max_a)).collect();
    }
    let pool: Vec<PNElement> = (0..4)
        .map(|_| random_element(rng, max_m.min(6), max_a.min(4)))
        .collect();
    (0..size)
        .map(|_| {
            let l = pool[rng.gen_range(0..pool.len())].clone();
            let r = pool[rng.gen_range(0..pool.len())].clone();
            WMonomial::new(l, r)
        })
        .collect()
}

pub fn gram_campaign(cfg: &RunConfig, max_size: usize) -> GramCampaignReport {
    let mut rng = cfg.rng();
    let beta = cfg.beta.to_f64();
    let mut negative = Vec::new();
    let (mut min_eig, mut coupled) = (f64::INFINITY, 0);
    for _ in 0..cfg.trials {
        let xs = random_gram_set(&mut rng, max_size, cfg.max_m, cfg.max_a);
        let size = xs.len();
        let g = kms::gram_matrix_f64(&xs, beta, &cfg.measure);
        if (0..size).any(|i| (0..size).any(|j| i != j && g[i][j].norm() > 0.0)) {
            coupled += 1;
        }
        let report = kms::gram_report(&xs, beta, &cfg.measure);
        min_eig = min_eig.min(report.min_eigenvalue);
        if !report.psd || !report.hermitian {
            negative.push(GramSetResult {
                monomials: xs.iter().map(ToString::to_string).collect(),
                min_eigenvalue: report.min_eigenvalue,
            });
        }
    }
    GramCampaignReport {
        seed: cfg.seed,
        beta,
        measure: cfg.measure.clone(),
        sets: cfg.trials,
        max_size,
        max_m: cfg.max_m,
        max_a: cfg.max_a,
        min_eigenvalue: min_eig,
        sets_with_coupling: coupled,
        tolerance: PSD_TOL,
        asserted: beta >= 2.0 && cfg.measure == BoundaryMeasure::Lebesgue,
        negative,
    }
}

/// Minimum number of certified columns for a numeric comparison to count.
pub const MIN_CERTIFIED: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct RepCase {
    pub case: String,
    pub certified: usize,
    pub mismatched: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepReport {
    pub seed: u64,
    pub carrier: Carrier,
    pub slice: (u64, u64),
    pub relation_sides: usize,
    pub products: usize,
    pub min_certified: usize,
    /// Cases whose sides disagree on some certified column.
    pub mismatched: Vec<RepCase>,
    /// Cases with fewer than [`MIN_CERTIFIED`] certified columns.
    pub under_certified: Vec<RepCase>,
}

impl RepReport {
    pub fn passed(&self) -> bool {
        self.mismatched.is_empty() && self.under_certified.is_empty()
    }
}

/// Symbolic reduction against the truncated representation: every side of
/// every presentation identity, then `trials` random monomial products.
pub fn rep_campaign(cfg: &RunConfig, carrier: Carrier, primes: &[u64], composite_bound: u64) -> RepReport {
    let basis = build_basis_on(carrier, cfg.slice.0, cfg.slice.1);
    let mut cases = Vec::new();
    let ids = presentation_identities(primes, composite_bound);
    let mut relation_sides = 0;
    for id in &ids {
        for (side, w) in std::iter::once(("lhs", &id.lhs)).chain(id.rhs.as_ref().map(|r| ("rhs", r))) {
            let value = w.to_monomial();
            let check = regular_rep::check_word_against(w, value.as_ref(), &basis);
            relation_sides += 1;
            cases.push(RepCase {
                case: format!("{} {:?} {side}: {w}", id.label, id.params),
                certified: check.certified,
                mismatched: check.mismatched,
            });
        }
    }
    let mut rng = cfg.rng();
    for _ in 0..cfg.trials {
        let x = random_monomial(&mut rng, cfg.max_m, cfg.max_a);
        let y = random_monomial(&mut rng, cfg.max_m, cfg.max_a);
        let mut word = regular_rep::monomial_letters(&x);
        word.extend(regular_rep::monomial_letters(&y));
        let prod = x.mul(&y).map(|p| regular_rep::monomial_letters(&p));
        let check = check_identity_numeric(&word, prod.as_deref(), &basis);
        cases.push(RepCase {
            case: format!("{x} * {y}"),
            certified: check.certified,
            mismatched: check.mismatched,
        });
    }
    let min_certified = cases.iter().map(|c| c.certified).min().unwrap_or(0);
    let mismatched = cases.iter().filter(|c| !c.mismatched.is_empty()).cloned().collect();
    let under_certified = cases.into_iter().filter(|c| c.certified < MIN_CERTIFIED).collect();
    RepReport {
        seed: cfg.seed,
        carrier,
        slice: cfg.slice,
        relation_sides,
        products: cfg.trials,
        min_certified,
        mismatched,
        under_certified,
    }
}

//! Deciding whether a finite-support null admits a randomization test.
//!
//! Two sample-space points x, y certify feasibility when they are not
//! permutations of each other yet carry equal product mass under every
//! distribution in the family. Products depend on x only through per-atom
//! counts, so the search runs over integer count-difference vectors d with
//! zero sum. For each candidate d the verdict is:
//!
//! * symmetric family: d must cancel on every {a, -a} class;
//! * equal-mass family: d must vanish off the pinned pair and cancel on it;
//! * moment / quantile families: these are single linear constraints on the
//!   simplex, so equal products across the whole family force the
//!   constraint to pin two atoms to equal mass. When the constraint weights
//!   degenerate that way, the equal-mass rule applies; otherwise a
//!   counterexample distribution is built from an epsilon recipe with a
//!   projected-gradient fallback.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, CountDiff, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::groups::witness_to_group;
use crate::group::GroupSpec;
use crate::null_spec::{NullFamily, NullSpec};
use crate::seed::derive_seed;
use crate::simplex;

/// Log-space tolerance for declaring two mass products equal.
pub const PRODUCT_LOG_TOL: f64 = 1e-10;
/// Required log-space violation magnitude for a counterexample.
pub const VIOLATION_MIN: f64 = 1e-6;
/// Required accuracy of a counterexample on its family constraint.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Epsilon schedule for the recipe constructions: start, shrink, rounds.
const EPS_START: f64 = 1e-3;
const EPS_SHRINK: f64 = 0.25;
const EPS_ROUNDS: usize = 10;
/// Random restarts for the projected-gradient fallback.
const OPTIMIZER_RESTARTS: usize = 50;

/// d_i = c(alpha_i; x) - c(alpha_i; y), the per-atom count difference.
pub fn count_diff(x: &[f64], y: &[f64], alphabet: &Alphabet) -> Result<CountDiff> {
    let cx = alphabet.counts(x)?;
    let cy = alphabet.counts(y)?;
    let diffs: Vec<i64> = cx.iter().zip(&cy).map(|(a, b)| a - b).collect();
    Ok(CountDiff {
        alphabet: alphabet.clone(),
        diffs,
    })
}

/// Whether x and y carry equal product mass under one distribution.
///
/// Zero-mass atoms are handled by comparing exact zero-factor counts before
/// moving to log space; the log comparison uses `PRODUCT_LOG_TOL`.
pub fn product_mass_equal(p: &DiscreteDistribution, x: &[f64], y: &[f64]) -> Result<bool> {
    let alphabet = p.alphabet();
    let cx = alphabet.counts(x)?;
    let cy = alphabet.counts(y)?;
    let zero_x: i64 = cx
        .iter()
        .enumerate()
        .filter(|(i, _)| p.mass(*i) == 0.0)
        .map(|(_, c)| *c)
        .sum();
    let zero_y: i64 = cy
        .iter()
        .enumerate()
        .filter(|(i, _)| p.mass(*i) == 0.0)
        .map(|(_, c)| *c)
        .sum();
    if zero_x > 0 || zero_y > 0 {
        return Ok(zero_x > 0 && zero_y > 0);
    }
    let log_diff: f64 = cx
        .iter()
        .zip(&cy)
        .enumerate()
        .map(|(i, (a, b))| (*a - *b) as f64 * p.mass(i).ln())
        .sum();
    Ok(log_diff.abs() <= PRODUCT_LOG_TOL)
}

/// Verdict for one count-difference vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum WitnessVerdict {
    /// Products agree under every member of the family.
    Yes,
    /// A family member with unequal products.
    No(DiscreteDistribution),
    /// Neither certified nor refuted (optimizer failure).
    Unknown,
}

/// When the linear constraint weights vanish except on two atoms with
/// opposite weights, the family is exactly an equal-mass family on that
/// pair. Detected within a relative tolerance of 1e-12.
fn degenerate_equal_mass_pair(w: &[f64]) -> Option<(usize, usize)> {
    let scale = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let tol = 1e-12 * scale;
    let nonzero: Vec<usize> = (0..w.len()).filter(|i| w[*i].abs() > tol).collect();
    if nonzero.len() == 2 && (w[nonzero[0]] + w[nonzero[1]]).abs() <= tol {
        Some((nonzero[0], nonzero[1]))
    } else {
        None
    }
}

fn equal_mass_rule(d: &[i64], l: usize, l_prime: usize) -> bool {
    d.iter()
        .enumerate()
        .all(|(i, v)| i == l || i == l_prime || *v == 0)
        && d[l] == -d[l_prime]
}

/// Decide whether `d` certifies a witness pair for the family.
pub fn is_witness(d: &CountDiff, null: &NullSpec) -> Result<WitnessVerdict> {
    if d.is_zero() {
        return Err(Error::ZeroDiff);
    }
    if d.alphabet != *null.alphabet() {
        return Err(Error::InvalidParameter {
            reason: "count difference and null family use different alphabets".into(),
        });
    }
    match null.family() {
        NullFamily::SymmetricAboutZero => {
            let classes = null.symmetry_classes()?;
            let cancels = classes
                .iter()
                .all(|c| c.iter().map(|i| d.diffs[*i]).sum::<i64>() == 0);
            if cancels {
                Ok(WitnessVerdict::Yes)
            } else {
                Ok(WitnessVerdict::No(symmetric_counterexample(null, &d.diffs)?))
            }
        }
        NullFamily::EqualMass { l, l_prime } => {
            if equal_mass_rule(&d.diffs, *l, *l_prime) {
                Ok(WitnessVerdict::Yes)
            } else {
                Ok(WitnessVerdict::No(equal_mass_counterexample(
                    null.alphabet(),
                    *l,
                    *l_prime,
                    &d.diffs,
                    None,
                )?))
            }
        }
        NullFamily::Moment { .. } | NullFamily::Quantile { .. } => {
            let w = null.constraint_weights().expect("linear family");
            if let Some((l, l_prime)) = degenerate_equal_mass_pair(&w) {
                if equal_mass_rule(&d.diffs, l, l_prime) {
                    Ok(WitnessVerdict::Yes)
                } else {
                    Ok(WitnessVerdict::No(equal_mass_counterexample(
                        null.alphabet(),
                        l,
                        l_prime,
                        &d.diffs,
                        Some(&w),
                    )?))
                }
            } else {
                match counterexample_distribution(d, null) {
                    Ok(p) => Ok(WitnessVerdict::No(p)),
                    Err(Error::NoCounterexampleFound) => Ok(WitnessVerdict::Unknown),
                    Err(e) => Err(e),
                }
            }
        }
    }
}

fn mass_profile(
    k: usize,
    pinned: &[(usize, f64)],
    free_weight: impl Fn(usize) -> f64,
) -> Vec<f64> {
    // Distinct positive weights on the free atoms, then global normalization
    // that preserves equalities among pinned atoms.
    let pinned_idx: Vec<usize> = pinned.iter().map(|(i, _)| *i).collect();
    let mut masses = vec![0.0; k];
    for (i, w) in pinned {
        masses[*i] = *w;
    }
    for i in 0..k {
        if !pinned_idx.contains(&i) {
            masses[i] = free_weight(i);
        }
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    masses
}

fn violation_of(masses: &[f64], d: &[i64]) -> f64 {
    simplex::log_violation(masses, d)
}

/// Counterexample inside the symmetric family: distinct masses per
/// {a, -a} class, searched over a few deterministic and seeded profiles.
fn symmetric_counterexample(null: &NullSpec, d: &[i64]) -> Result<DiscreteDistribution> {
    let classes = null.symmetry_classes()?;
    let k = null.alphabet().len();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0x5ca1ab1e, "symmetric-counterexample"));
    for attempt in 0..OPTIMIZER_RESTARTS {
        let class_mass: Vec<f64> = (0..classes.len())
            .map(|j| match attempt {
                0 => (j + 2) as f64,
                1 => ((j + 2) * (j + 2)) as f64,
                _ => rand::Rng::gen_range(&mut rng, 0.1..1.0),
            })
            .collect();
        let mut masses = vec![0.0; k];
        let total: f64 = classes
            .iter()
            .zip(&class_mass)
            .map(|(c, m)| m * c.len() as f64)
            .sum();
        for (class, m) in classes.iter().zip(&class_mass) {
            for &i in class {
                masses[i] = m / total;
            }
        }
        if violation_of(&masses, d).abs() > VIOLATION_MIN {
            return DiscreteDistribution::new(null.alphabet().clone(), masses);
        }
    }
    Err(Error::NoCounterexampleFound)
}

/// Counterexample with the pair (l, l') pinned to equal mass and distinct
/// masses elsewhere; covers the explicit equal-mass family and the
/// degenerate moment/quantile families (whose constraint, passed as `w`,
/// is rechecked on the result).
fn equal_mass_counterexample(
    alphabet: &Alphabet,
    l: usize,
    l_prime: usize,
    d: &[i64],
    w: Option<&[f64]>,
) -> Result<DiscreteDistribution> {
    let k = alphabet.len();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0x5ca1ab1e, "equal-mass-counterexample"));
    for attempt in 0..OPTIMIZER_RESTARTS {
        let shared = match attempt {
            0 => 1.0,
            1 => 0.35,
            _ => rand::Rng::gen_range(&mut rng, 0.1..1.0),
        };
        let offset = match attempt {
            0 => 2.0,
            1 => 3.0,
            _ => rand::Rng::gen_range(&mut rng, 1.5..4.0),
        };
        let masses = mass_profile(k, &[(l, shared), (l_prime, shared)], |i| {
            offset + i as f64
        });
        if let Some(w) = w {
            let residual: f64 = masses.iter().zip(w).map(|(m, wi)| m * wi).sum();
            if residual.abs() > CONSTRAINT_TOL {
                continue;
            }
        }
        if violation_of(&masses, d).abs() > VIOLATION_MIN {
            return DiscreteDistribution::new(alphabet.clone(), masses);
        }
    }
    Err(Error::NoCounterexampleFound)
}

/// Construct a family member with unequal product mass for a moment or
/// quantile null.
///
/// The construction concentrates mass on one atom on each side of the
/// target, puts a shrinking epsilon on the rest, and solves the remaining
/// one-dimensional constraint in closed form; a projected-gradient search
/// over the constraint polytope is the fallback. Fails with
/// `NoCounterexampleFound` exactly when `d` is a true witness of a
/// degenerate (equal-mass) family, or in the unexpected case that the
/// optimizer cannot find a violation.
pub fn counterexample_distribution(
    d: &CountDiff,
    null: &NullSpec,
) -> Result<DiscreteDistribution> {
    if d.is_zero() {
        return Err(Error::ZeroDiff);
    }
    let (coeff, target): (Vec<f64>, f64) = match null.family() {
        NullFamily::Moment { t, beta } => (
            null.alphabet()
                .atoms()
                .iter()
                .map(|a| a.powi(*t as i32))
                .collect(),
            *beta,
        ),
        NullFamily::Quantile { q, p } => (
            null.alphabet()
                .atoms()
                .iter()
                .map(|a| if *a <= *q { 1.0 } else { 0.0 })
                .collect(),
            *p,
        ),
        _ => {
            return Err(Error::InvalidParameter {
                reason: "counterexample construction applies to moment and quantile families"
                    .into(),
            })
        }
    };
    let w = null.constraint_weights().expect("linear family");
    if let Some((l, l_prime)) = degenerate_equal_mass_pair(&w) {
        if equal_mass_rule(&d.diffs, l, l_prime) {
            // True witness of the degenerate family: no counterexample exists.
            return Err(Error::NoCounterexampleFound);
        }
        return equal_mass_counterexample(null.alphabet(), l, l_prime, &d.diffs, Some(&w));
    }

    if let Some(masses) = recipe_counterexample(&d.diffs, &coeff, target) {
        let p = DiscreteDistribution::new(null.alphabet().clone(), masses)?;
        return Ok(p);
    }

    // Projected-gradient fallback over {p >= 0, sum p = 1, sum w p = 0}.
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        0x5ca1ab1e,
        &format!("counterexample-{:?}", d.diffs),
    ));
    if let Some(masses) =
        simplex::maximize_violation(&d.diffs, &w, VIOLATION_MIN, OPTIMIZER_RESTARTS, &mut rng)
    {
        let residual: f64 = masses.iter().zip(&w).map(|(m, wi)| m * wi).sum();
        if residual.abs() <= CONSTRAINT_TOL {
            return DiscreteDistribution::new(null.alphabet().clone(), masses);
        }
    }
    Err(Error::NoCounterexampleFound)
}

/// Closed-form two-atom construction. `coeff` and `target` describe the
/// family constraint `sum_i coeff_i p_i = target`.
fn recipe_counterexample(d: &[i64], coeff: &[f64], target: f64) -> Option<Vec<f64>> {
    let k = coeff.len();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i1 in 0..k {
        for i2 in 0..k {
            if coeff[i1] < target && coeff[i2] > target {
                pairs.push((i1, i2));
            }
        }
    }
    // Prefer pairs whose off-pair counts cannot cancel: the epsilon factors
    // then dominate the product ratio as epsilon shrinks.
    pairs.sort_by_key(|(i1, i2)| (-(d[*i1] + d[*i2]).abs(), *i1, *i2));

    for (i1, i2) in pairs {
        let s_c: f64 = (0..k)
            .filter(|j| *j != i1 && *j != i2)
            .map(|j| coeff[j])
            .sum();
        let mut eps = EPS_START;
        for _ in 0..EPS_ROUNDS {
            let rest = 1.0 - (k as f64 - 2.0) * eps;
            let q = (target - eps * s_c - rest * coeff[i2]) / (coeff[i1] - coeff[i2]);
            let r = rest - q;
            if q > eps && r > eps && q < 1.0 && r < 1.0 {
                let mut masses = vec![eps; k];
                masses[i1] = q;
                masses[i2] = r;
                let residual: f64 = masses
                    .iter()
                    .zip(coeff)
                    .map(|(m, c)| m * c)
                    .sum::<f64>()
                    - target;
                if residual.abs() <= CONSTRAINT_TOL
                    && violation_of(&masses, d).abs() > VIOLATION_MIN
                {
                    return Some(masses);
                }
            }
            eps *= EPS_SHRINK;
        }
    }
    None
}

/// One refuted count-difference vector with its exhibit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub diffs: Vec<i64>,
    pub counterexample: DiscreteDistribution,
    /// |sum d_i ln p_i| of the exhibit.
    pub violation: f64,
    /// How far the exhibit sits from its family constraint.
    pub constraint_residual: f64,
}

/// Result of scanning the count-difference space at a fixed sample length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum WitnessOutcome {
    /// A realizing pair and its two-element group.
    Found {
        x: Vec<f64>,
        y: Vec<f64>,
        group: GroupSpec,
    },
    /// Every realizable nonzero d carries a counterexample.
    Exhausted { ledger: Vec<LedgerEntry> },
    /// Some vectors could not be decided.
    Undecided {
        ledger: Vec<LedgerEntry>,
        unknown: Vec<Vec<i64>>,
    },
}

/// Search count-difference space for a witness pair of length-`n` vectors.
///
/// Products depend only on counts, so the enumeration runs over integer
/// vectors d with zero sum and positive mass at most n, in lexicographic
/// order. Each candidate costs one `is_witness` call against the budget.
pub fn find_witness(null: &NullSpec, n: usize, budget: usize) -> Result<WitnessOutcome> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            reason: "sample length must be at least 1".into(),
        });
    }
    let k = null.alphabet().len();
    let mut ledger = Vec::new();
    let mut unknown = Vec::new();
    let mut examined = 0usize;

    let mut stack = vec![0i64; k];
    let mut found: Option<(Vec<f64>, Vec<f64>)> = None;
    enumerate_diffs(
        &mut stack,
        0,
        n as i64,
        n as i64,
        &mut |diffs: &[i64]| -> Result<bool> {
            if examined >= budget {
                return Err(Error::BudgetExceeded { budget });
            }
            examined += 1;
            let d = CountDiff {
                alphabet: null.alphabet().clone(),
                diffs: diffs.to_vec(),
            };
            match is_witness(&d, null)? {
                WitnessVerdict::Yes => {
                    let (x, y) = realize_pair(null.alphabet(), diffs, n);
                    found = Some((x, y));
                    Ok(false)
                }
                WitnessVerdict::No(p) => {
                    let violation = violation_of(p.masses(), diffs).abs();
                    let constraint_residual = family_residual(null, &p);
                    ledger.push(LedgerEntry {
                        diffs: diffs.to_vec(),
                        counterexample: p,
                        violation,
                        constraint_residual,
                    });
                    Ok(true)
                }
                WitnessVerdict::Unknown => {
                    unknown.push(diffs.to_vec());
                    Ok(true)
                }
            }
        },
    )?;

    if let Some((x, y)) = found {
        let group = witness_to_group(&x, &y)?;
        return Ok(WitnessOutcome::Found { x, y, group });
    }
    if unknown.is_empty() {
        Ok(WitnessOutcome::Exhausted { ledger })
    } else {
        Ok(WitnessOutcome::Undecided { ledger, unknown })
    }
}

/// How far a distribution sits from the null family's defining constraint.
pub fn family_residual(null: &NullSpec, p: &DiscreteDistribution) -> f64 {
    match null.family() {
        NullFamily::SymmetricAboutZero => {
            let classes = null.symmetry_classes().expect("validated family");
            classes
                .iter()
                .filter(|c| c.len() == 2)
                .map(|c| (p.mass(c[0]) - p.mass(c[1])).abs())
                .fold(0.0, f64::max)
        }
        NullFamily::EqualMass { l, l_prime } => (p.mass(*l) - p.mass(*l_prime)).abs(),
        NullFamily::Moment { t, beta } => (p.moment(*t) - beta).abs(),
        NullFamily::Quantile { q, p: prob } => (p.cdf(*q) - prob).abs(),
    }
}

/// Depth-first enumeration of integer vectors with per-sign budgets and
/// zero total; the visitor returns false to stop early.
fn enumerate_diffs(
    stack: &mut Vec<i64>,
    idx: usize,
    pos_left: i64,
    neg_left: i64,
    visit: &mut impl FnMut(&[i64]) -> Result<bool>,
) -> Result<bool> {
    let k = stack.len();
    if idx == k {
        let sum: i64 = stack.iter().sum();
        let nonzero = stack.iter().any(|d| *d != 0);
        if sum == 0 && nonzero {
            return visit(stack.as_slice());
        }
        return Ok(true);
    }
    for v in -neg_left..=pos_left {
        stack[idx] = v;
        let (p, n) = if v > 0 {
            (pos_left - v, neg_left)
        } else {
            (pos_left, neg_left + v)
        };
        if !enumerate_diffs(stack, idx + 1, p, n, visit)? {
            stack[idx] = 0;
            return Ok(false);
        }
    }
    stack[idx] = 0;
    Ok(true)
}

/// Realize a count difference as two length-`n` vectors sharing their
/// remaining coordinates.
fn realize_pair(alphabet: &Alphabet, diffs: &[i64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for (i, d) in diffs.iter().enumerate() {
        for _ in 0..d.max(&0).unsigned_abs() {
            x.push(alphabet.atom(i));
        }
        for _ in 0..(-d).max(0).unsigned_abs() {
            y.push(alphabet.atom(i));
        }
    }
    while x.len() < n {
        x.push(alphabet.atom(0));
    }
    while y.len() < n {
        y.push(alphabet.atom(0));
    }
    (x, y)
}

/// Overall verdict for a finite-support null at sample length `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum HypothesisDecision {
    Satisfied {
        x: Vec<f64>,
        y: Vec<f64>,
        group: GroupSpec,
    },
    NotSatisfied {
        ledger: Vec<LedgerEntry>,
    },
    Inconclusive {
        reason: String,
    },
}

/// Wrap [`find_witness`]: budget exhaustion and undecided vectors both map
/// to `Inconclusive`; `NotSatisfied` is only reported after an exhaustive
/// scan in which every vector carried a counterexample.
pub fn decide_randomization_hypothesis(
    null: &NullSpec,
    n: usize,
    budget: usize,
) -> Result<HypothesisDecision> {
    match find_witness(null, n, budget) {
        Ok(WitnessOutcome::Found { x, y, group }) => {
            Ok(HypothesisDecision::Satisfied { x, y, group })
        }
        Ok(WitnessOutcome::Exhausted { ledger }) => Ok(HypothesisDecision::NotSatisfied { ledger }),
        Ok(WitnessOutcome::Undecided { unknown, .. }) => Ok(HypothesisDecision::Inconclusive {
            reason: format!("{} count vectors left undecided", unknown.len()),
        }),
        Err(Error::BudgetExceeded { budget }) => Ok(HypothesisDecision::Inconclusive {
            reason: format!("budget of {budget} candidate vectors exhausted"),
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_spec::NullFamily;

    fn alpha(atoms: &[f64]) -> Alphabet {
        Alphabet::new(atoms.to_vec()).unwrap()
    }

    #[test]
    fn count_diff_examples() {
        let a = alpha(&[-1.0, 0.0, 1.0]);
        let d = count_diff(&[1.0, 1.0], &[-1.0, -1.0], &a).unwrap();
        assert_eq!(d.diffs, vec![-2, 0, 2]);
        assert_eq!(d.sum(), 0);

        let d = count_diff(&[1.0, 0.0, -1.0], &[0.0, -1.0, 1.0], &a).unwrap();
        assert!(d.is_zero());

        let a4 = alpha(&[-1.0, 0.0, 1.0, 2.0f64.sqrt()]);
        let d = count_diff(&[0.0, 1.0], &[2.0f64.sqrt(), 1.0], &a4).unwrap();
        assert_eq!(d.diffs, vec![0, 1, 0, -1]);

        assert!(count_diff(&[0.5], &[1.0], &a).is_err());
    }

    #[test]
    fn product_equality_cases() {
        let a = alpha(&[-1.0, 0.0, 1.0]);
        let sym = DiscreteDistribution::new(a.clone(), vec![0.3, 0.4, 0.3]).unwrap();
        assert!(product_mass_equal(&sym, &[1.0, -1.0, 1.0], &[-1.0, 1.0, -1.0]).unwrap());

        let uniform = DiscreteDistribution::new(a.clone(), vec![1.0 / 3.0; 3]).unwrap();
        let u = 1.0 / 3.0;
        let fixed = DiscreteDistribution::new(a.clone(), vec![u, u, 1.0 - 2.0 * u]).unwrap();
        assert!(product_mass_equal(&fixed, &[1.0, 0.0], &[-1.0, -1.0]).unwrap());
        assert!(product_mass_equal(&uniform, &[0.0], &[1.0]).unwrap());

        let skew = DiscreteDistribution::new(a.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        assert!(!product_mass_equal(&skew, &[-1.0], &[1.0]).unwrap());
    }

    #[test]
    fn zero_mass_atoms_compared_by_zero_counts() {
        let a = alpha(&[-1.0, 0.0, 1.0]);
        let p = DiscreteDistribution::new(a, vec![0.5, 0.0, 0.5]).unwrap();
        // one product zero, the other positive
        assert!(!product_mass_equal(&p, &[0.0], &[1.0]).unwrap());
        // both products zero
        assert!(product_mass_equal(&p, &[0.0, 1.0], &[0.0, -1.0]).unwrap());
    }

    #[test]
    fn symmetric_witness_yes_and_no() {
        let null = NullSpec::new(alpha(&[-1.0, 0.0, 1.0]), NullFamily::SymmetricAboutZero).unwrap();
        let d = count_diff(&[1.0], &[-1.0], null.alphabet()).unwrap();
        assert!(matches!(is_witness(&d, &null).unwrap(), WitnessVerdict::Yes));

        let d = count_diff(&[1.0], &[0.0], null.alphabet()).unwrap();
        match is_witness(&d, &null).unwrap() {
            WitnessVerdict::No(p) => {
                assert_eq!(p.mass(0), p.mass(2));
                assert!(violation_of(p.masses(), &d.diffs).abs() > VIOLATION_MIN);
            }
            other => panic!("expected No, got {other:?}"),
        }

        let zero = CountDiff {
            alphabet: null.alphabet().clone(),
            diffs: vec![0, 0, 0],
        };
        assert!(matches!(is_witness(&zero, &null), Err(Error::ZeroDiff)));
    }

    #[test]
    fn equal_mass_witness_on_root_two_alphabet() {
        let a = alpha(&[-1.0, 0.0, 1.0, 2.0f64.sqrt()]);
        let null = NullSpec::new(a.clone(), NullFamily::EqualMass { l: 1, l_prime: 3 }).unwrap();
        let d = count_diff(&[0.0, 1.0], &[2.0f64.sqrt(), 1.0], &a).unwrap();
        assert!(matches!(is_witness(&d, &null).unwrap(), WitnessVerdict::Yes));
    }

    #[test]
    fn second_moment_one_on_root_two_alphabet_degenerates_to_equal_mass() {
        let a = alpha(&[-1.0, 0.0, 1.0, 2.0f64.sqrt()]);
        let null = NullSpec::new(a.clone(), NullFamily::Moment { t: 2, beta: 1.0 }).unwrap();
        let d = count_diff(&[0.0], &[2.0f64.sqrt()], &a).unwrap();
        assert!(matches!(is_witness(&d, &null).unwrap(), WitnessVerdict::Yes));
        assert!(matches!(
            counterexample_distribution(&d, &null),
            Err(Error::NoCounterexampleFound)
        ));
    }

    #[test]
    fn mean_zero_on_symmetric_three_point_alphabet_degenerates() {
        let a = alpha(&[-2.0, 0.0, 2.0]);
        let null = NullSpec::new(a.clone(), NullFamily::Moment { t: 1, beta: 0.0 }).unwrap();
        let d = count_diff(&[2.0], &[-2.0], &a).unwrap();
        assert!(matches!(is_witness(&d, &null).unwrap(), WitnessVerdict::Yes));
        assert!(matches!(
            counterexample_distribution(&d, &null),
            Err(Error::NoCounterexampleFound)
        ));
    }

    #[test]
    fn mean_three_counterexample_meets_constraint_and_violates_products() {
        let a = alpha(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let null = NullSpec::new(a.clone(), NullFamily::Moment { t: 1, beta: 3.0 }).unwrap();
        let d = CountDiff {
            alphabet: a,
            diffs: vec![1, -1, 0, -1, 1],
        };
        match is_witness(&d, &null).unwrap() {
            WitnessVerdict::No(p) => {
                assert!((p.moment(1) - 3.0).abs() <= CONSTRAINT_TOL);
                assert!(violation_of(p.masses(), &d.diffs).abs() > VIOLATION_MIN);
            }
            other => panic!("expected No, got {other:?}"),
        }
    }

    #[test]
    fn quantile_recipe_example() {
        let a = alpha(&[0.0, 1.0, 2.0]);
        let null = NullSpec::new(a.clone(), NullFamily::Quantile { q: 0.5, p: 0.3 }).unwrap();
        let d = CountDiff {
            alphabet: a,
            diffs: vec![1, 0, -1],
        };
        let p = counterexample_distribution(&d, &null).unwrap();
        assert!((p.cdf(0.5) - 0.3).abs() <= CONSTRAINT_TOL);
        assert!(violation_of(p.masses(), &d.diffs).abs() > VIOLATION_MIN);
    }

    #[test]
    fn find_witness_symmetric_single_coordinate() {
        let null = NullSpec::new(alpha(&[-1.0, 0.0, 1.0]), NullFamily::SymmetricAboutZero).unwrap();
        match find_witness(&null, 1, 10_000).unwrap() {
            WitnessOutcome::Found { x, y, group } => {
                let d = count_diff(&x, &y, null.alphabet()).unwrap();
                assert!(!d.is_zero());
                // the pair is (1) vs (-1) in either order
                let mut pair = vec![x[0], y[0]];
                pair.sort_by(f64::total_cmp);
                assert_eq!(pair, vec![-1.0, 1.0]);
                assert_eq!(group.size_hint(), Some(2));
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn find_witness_equal_mass_single_coordinate() {
        let a = alpha(&[-1.0, 0.0, 1.0, 3.0]);
        let null = NullSpec::new(a, NullFamily::EqualMass { l: 1, l_prime: 2 }).unwrap();
        match find_witness(&null, 1, 10_000).unwrap() {
            WitnessOutcome::Found { x, y, .. } => {
                let mut pair = vec![x[0], y[0]];
                pair.sort_by(f64::total_cmp);
                assert_eq!(pair, vec![0.0, 1.0]);
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn budget_zero_is_inconclusive() {
        let a = alpha(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let null = NullSpec::new(a, NullFamily::Moment { t: 1, beta: 3.0 }).unwrap();
        assert!(matches!(
            decide_randomization_hypothesis(&null, 2, 0).unwrap(),
            HypothesisDecision::Inconclusive { .. }
        ));
    }

    #[test]
    fn witness_pairs_never_have_zero_diff() {
        // permutation degeneracy guard: found pairs always differ in counts
        let null = NullSpec::new(alpha(&[-1.0, 0.0, 1.0]), NullFamily::SymmetricAboutZero).unwrap();
        for n in 1..4 {
            if let WitnessOutcome::Found { x, y, .. } = find_witness(&null, n, 100_000).unwrap() {
                assert!(!count_diff(&x, &y, null.alphabet()).unwrap().is_zero());
            } else {
                panic!("symmetric family admits a witness at every n");
            }
        }
    }
}

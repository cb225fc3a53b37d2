//! Classification of the invariance class of linear transformation groups.
//!
//! One invertible generator either is monomial (one nonzero entry per row
//! and column) or mixes coordinates. A monomial matrix preserves every
//! i.i.d. law when its nonzero entries are all +1 and exactly the symmetric
//! laws when they are signs with at least one -1; any other magnitude kills
//! the variance equation and leaves nothing. A mixing matrix can only
//! preserve Gaussian laws: orthogonal with the ones vector fixed preserves
//! every N(mu, sigma^2); orthogonal without the fixed ones vector preserves
//! the centered ones; a non-orthogonal mixer preserves no i.i.d. law (a
//! derived ruling, cross-validated by the empirical checker). A group's
//! class is the meet of its generators' classes.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dgp::Dgp;
use crate::error::{Error, Result};
use crate::ks::{ks_statistic, ks_threshold};
use crate::seed::derive_seed;
use crate::transform::{condition_estimate, MATRIX_COND_BOUND};

/// Default relative tolerance for the classifier's zero tests.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// The possible invariance classes of a group of linear maps, ordered as a
/// meet-semilattice with `AllDistributions` on top and `Empty` at the
/// bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupClassification {
    AllDistributions,
    SymmetricAboutZero,
    GaussianAnyMeanVar,
    GaussianZeroMean,
    Empty,
}

impl GroupClassification {
    pub fn meet(self, other: GroupClassification) -> GroupClassification {
        use GroupClassification::*;
        match (self, other) {
            (AllDistributions, x) | (x, AllDistributions) => x,
            (Empty, _) | (_, Empty) => Empty,
            (SymmetricAboutZero, SymmetricAboutZero) => SymmetricAboutZero,
            (GaussianAnyMeanVar, GaussianAnyMeanVar) => GaussianAnyMeanVar,
            (GaussianZeroMean, _) | (_, GaussianZeroMean) => GaussianZeroMean,
            (SymmetricAboutZero, GaussianAnyMeanVar) | (GaussianAnyMeanVar, SymmetricAboutZero) => {
                GaussianZeroMean
            }
        }
    }
}

/// Classify a single invertible generator.
pub fn classify_generator(a: &DMatrix<f64>, zero_tol: Option<f64>) -> Result<GroupClassification> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::InvalidParameter {
            reason: "classifier expects a non-empty square matrix".into(),
        });
    }
    let cond = condition_estimate(a);
    if !cond.is_finite() || cond > MATRIX_COND_BOUND {
        return Err(Error::SingularMatrix {
            cond,
            bound: MATRIX_COND_BOUND,
        });
    }
    let n = a.nrows();
    let max_entry = a.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let tol = zero_tol.unwrap_or(DEFAULT_ZERO_TOL) * max_entry.max(1.0);

    let mixing = (0..n).any(|j| (0..n).filter(|i| a[(*i, j)].abs() > tol).count() >= 2);

    if mixing {
        let ata = a.transpose() * a;
        let orthogonal = (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { 1.0 } else { 0.0 };
                (ata[(i, j)] - target).abs() <= tol
            })
        });
        if !orthogonal {
            return Ok(GroupClassification::Empty);
        }
        let fixes_ones = (0..n).all(|i| {
            let row_sum: f64 = (0..n).map(|j| a[(i, j)]).sum();
            (row_sum - 1.0).abs() <= tol
        });
        if fixes_ones {
            Ok(GroupClassification::GaussianAnyMeanVar)
        } else {
            Ok(GroupClassification::GaussianZeroMean)
        }
    } else {
        // Monomial: one entry above tolerance per column (and per row, by
        // invertibility).
        let mut scales = Vec::with_capacity(n);
        for j in 0..n {
            let nz: Vec<f64> = (0..n)
                .map(|i| a[(i, j)])
                .filter(|e| e.abs() > tol)
                .collect();
            if nz.len() != 1 {
                return Ok(GroupClassification::Empty);
            }
            scales.push(nz[0]);
        }
        if scales.iter().all(|d| (d - 1.0).abs() <= tol) {
            Ok(GroupClassification::AllDistributions)
        } else if scales.iter().all(|d| (d.abs() - 1.0).abs() <= tol) {
            Ok(GroupClassification::SymmetricAboutZero)
        } else {
            Ok(GroupClassification::Empty)
        }
    }
}

/// Report for a generator list: per-generator labels and their meet.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub labels: Vec<GroupClassification>,
    pub meet: GroupClassification,
    pub zero_tol: f64,
    pub notes: Vec<String>,
}

/// Classify a group through its generators and fold with the semilattice
/// meet.
pub fn classify_group(
    generators: &[DMatrix<f64>],
    zero_tol: Option<f64>,
) -> Result<ClassifyReport> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter {
            reason: "classifier needs at least one generator".into(),
        });
    }
    let tol = zero_tol.unwrap_or(DEFAULT_ZERO_TOL);
    let mut labels = Vec::with_capacity(generators.len());
    let mut notes = Vec::new();
    for (idx, g) in generators.iter().enumerate() {
        let label = classify_generator(g, Some(tol))?;
        if label == GroupClassification::Empty {
            notes.push(format!(
                "generator {idx}: labeled empty (non-orthogonal mixing or non-unit scaling); \
                 cross-check with the empirical invariance test"
            ));
        }
        labels.push(label);
    }
    let meet = labels
        .iter()
        .copied()
        .fold(GroupClassification::AllDistributions, GroupClassification::meet);
    Ok(ClassifyReport {
        labels,
        meet,
        zero_tol: tol,
        notes,
    })
}

/// Per-coordinate two-sample distances between X and AX marginals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub distances: Vec<f64>,
    pub threshold: f64,
    pub reps: usize,
    pub pass: bool,
}

/// Simulate X with i.i.d. coordinates from `dgp` and compare each marginal
/// of X against the matching marginal of AX with a two-sample KS distance.
///
/// The default threshold is `ks_threshold(reps)`, calibrated so invariant
/// pairs pass with large margin at desk-scale replication counts.
pub fn empirical_invariance_check(
    a: &DMatrix<f64>,
    dgp: Dgp,
    reps: usize,
    seed: u64,
    threshold: Option<f64>,
) -> Result<InvarianceReport> {
    let n = a.nrows();
    if n != a.ncols() || n == 0 {
        return Err(Error::InvalidParameter {
            reason: "invariance check expects a non-empty square matrix".into(),
        });
    }
    if reps == 0 {
        return Err(Error::InvalidParameter {
            reason: "invariance check needs at least one replicate".into(),
        });
    }
    let threshold = threshold.unwrap_or_else(|| ks_threshold(reps));
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "invariance-check"));
    let mut originals = vec![Vec::with_capacity(reps); n];
    let mut transformed = vec![Vec::with_capacity(reps); n];
    let data = a.as_slice();
    for _ in 0..reps {
        let x = dgp.sample_vec(n, &mut rng);
        for i in 0..n {
            originals[i].push(x[i]);
        }
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += data[j * n + i] * x[j];
            }
            transformed[i].push(acc);
        }
    }
    let distances: Vec<f64> = (0..n)
        .map(|i| ks_statistic(&originals[i], &transformed[i]))
        .collect();
    let pass = distances.iter().all(|d| *d < threshold);
    Ok(InvarianceReport {
        distances,
        threshold,
        reps,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::block_rotation_matrix;

    fn rot45() -> DMatrix<f64> {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_row_slice(2, 2, &[c, -c, c, c])
    }

    #[test]
    fn canonical_generator_labels() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(
            classify_generator(&id, None).unwrap(),
            GroupClassification::AllDistributions
        );

        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, -1.0]));
        assert_eq!(
            classify_generator(&neg, None).unwrap(),
            GroupClassification::SymmetricAboutZero
        );

        let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5, 1.0]));
        assert_eq!(
            classify_generator(&scale, None).unwrap(),
            GroupClassification::Empty
        );

        assert_eq!(
            classify_generator(&rot45(), None).unwrap(),
            GroupClassification::GaussianZeroMean
        );

        assert_eq!(
            classify_generator(&block_rotation_matrix(), None).unwrap(),
            GroupClassification::GaussianAnyMeanVar
        );
    }

    #[test]
    fn permutation_matrices_preserve_everything() {
        let mut p = DMatrix::<f64>::zeros(3, 3);
        p[(0, 1)] = 1.0;
        p[(1, 2)] = 1.0;
        p[(2, 0)] = 1.0;
        assert_eq!(
            classify_generator(&p, None).unwrap(),
            GroupClassification::AllDistributions
        );
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            classify_generator(&m, None),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn meet_semilattice_rules() {
        use GroupClassification::*;
        assert_eq!(SymmetricAboutZero.meet(GaussianAnyMeanVar), GaussianZeroMean);
        assert_eq!(AllDistributions.meet(SymmetricAboutZero), SymmetricAboutZero);
        assert_eq!(Empty.meet(GaussianAnyMeanVar), Empty);
        assert_eq!(GaussianZeroMean.meet(GaussianAnyMeanVar), GaussianZeroMean);
    }

    #[test]
    fn group_meet_combines_generators() {
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0]));
        let report = classify_group(&[neg, rot45()], None).unwrap();
        assert_eq!(report.meet, GroupClassification::GaussianZeroMean);
        assert_eq!(report.labels.len(), 2);
    }

    #[test]
    fn classification_ignores_generator_order_and_inversion() {
        let a = block_rotation_matrix();
        let a_inv = a.clone().try_inverse().unwrap();
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, -1.0]));
        let r1 = classify_group(&[a.clone(), neg.clone()], None).unwrap();
        let r2 = classify_group(&[neg, a_inv], None).unwrap();
        assert_eq!(r1.meet, r2.meet);
    }

    #[test]
    fn invariance_check_smoke() {
        // Rotation invariance holds for the Gaussian, fails for the uniform;
        // small rep count here, the full-scale version lives in acceptance.
        let a = rot45();
        let ok = empirical_invariance_check(&a, Dgp::StdNormal, 20_000, 7, None).unwrap();
        assert!(ok.pass, "distances {:?}", ok.distances);
        let bad = empirical_invariance_check(&a, Dgp::UniformSym, 20_000, 7, None).unwrap();
        assert!(!bad.pass, "distances {:?}", bad.distances);

        // coordinate permutation: exchangeability of i.i.d. draws
        let mut p = DMatrix::<f64>::zeros(2, 2);
        p[(0, 1)] = 1.0;
        p[(1, 0)] = 1.0;
        let perm = empirical_invariance_check(&p, Dgp::CenteredExponential, 20_000, 7, None).unwrap();
        assert!(perm.pass);
    }
}

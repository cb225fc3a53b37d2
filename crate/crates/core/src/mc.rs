//! Monte Carlo studies of test size: exactness under invariant
//! data-generating processes, distortion under non-invariant ones, and the
//! block-rotation normality demonstration.
//!
//! Replicates run in parallel with one ChaCha stream per replicate index
//! and a fixed reduction order, so identical seeds give bitwise-identical
//! results regardless of thread count.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{empirical_invariance_check, InvarianceReport};
use crate::dgp::Dgp;
use crate::engine::{check_level, run_with_transforms};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::groups::{block_rotation_group, block_rotation_matrix, BlockRotationMode};
use crate::sample::Sample;
use crate::seed::derive_seed;
use crate::statistic::TestStatistic;

/// A rejection-rate estimate with its binomial standard error.
///
/// Randomized decisions contribute their fractional phi directly, which
/// lowers Monte Carlo variance; the binomial standard error is then
/// conservative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate: f64,
    pub standard_error: f64,
    pub ci95: (f64, f64),
    pub reps: usize,
    pub seed: u64,
}

impl RateEstimate {
    fn from_phis(phis: &[f64], seed: u64) -> RateEstimate {
        // Kahan sum in replicate order for bitwise determinism.
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for phi in phis {
            let y = phi - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        let reps = phis.len();
        let rate = sum / reps as f64;
        let standard_error = (rate * (1.0 - rate) / reps as f64).sqrt();
        RateEstimate {
            rate,
            standard_error,
            ci95: (
                rate - 1.96 * standard_error,
                rate + 1.96 * standard_error,
            ),
            reps,
            seed,
        }
    }
}

/// Run `reps` independent replicates of `phi_of`, each with its own
/// deterministic RNG stream.
pub(crate) fn rate_over_replicates(
    reps: usize,
    seed: u64,
    phi_of: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
) -> Result<RateEstimate> {
    if reps == 0 {
        return Err(Error::InvalidParameter {
            reason: "need at least one replicate".into(),
        });
    }
    let base = derive_seed(seed, "mc-replicates");
    let phis: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(base);
            rng.set_stream(rep as u64);
            phi_of(&mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RateEstimate::from_phis(&phis, seed))
}

/// Estimate the rejection rate of the randomization test under `dgp`.
pub fn estimate_rejection_rate(
    dgp: Dgp,
    group: &GroupSpec,
    statistic: &TestStatistic,
    level: f64,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<RateEstimate> {
    check_level(level)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            reason: "sample length must be at least 1".into(),
        });
    }
    let transforms = group.realize()?;
    rate_over_replicates(reps, seed, |rng| {
        let sample = Sample::new(dgp.sample_vec(n, rng))?;
        Ok(run_with_transforms(&sample, &transforms, statistic, level)?.phi)
    })
}

/// Empirical distribution of the test's p-value at chosen thresholds:
/// share of replicates with p <= u for each u.
pub fn p_value_mass_at(
    dgp: Dgp,
    group: &GroupSpec,
    statistic: &TestStatistic,
    level: f64,
    n: usize,
    reps: usize,
    seed: u64,
    thresholds: &[f64],
) -> Result<Vec<f64>> {
    check_level(level)?;
    let transforms = group.realize()?;
    let base = derive_seed(seed, "mc-pvalues");
    let pvals: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(base);
            rng.set_stream(rep as u64);
            let sample = Sample::new(dgp.sample_vec(n, &mut rng))?;
            Ok(run_with_transforms(&sample, &transforms, statistic, level)?.p_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(thresholds
        .iter()
        .map(|u| pvals.iter().filter(|p| **p <= *u).count() as f64 / reps as f64)
        .collect())
}

/// Which group family a study row uses; the concrete group is built per n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyGroup {
    SignChange,
    /// Full symmetric group for small n, sampled above the cap.
    Permutation,
    /// Block rotations; n must be divisible by 3.
    BlockRotation,
}

impl StudyGroup {
    pub fn build(&self, n: usize, seed: u64) -> Result<GroupSpec> {
        match self {
            StudyGroup::SignChange => crate::groups::sign_change_group(n, None),
            StudyGroup::Permutation => {
                if n <= 7 {
                    crate::groups::permutation_group(
                        n,
                        crate::groups::PermutationMode::Full,
                        seed,
                    )
                } else {
                    crate::groups::permutation_group(
                        n,
                        crate::groups::PermutationMode::Sampled { draws: 1024 },
                        seed,
                    )
                }
            }
            StudyGroup::BlockRotation => {
                block_rotation_group(n, BlockRotationMode::CyclicPerBlock, 100_000)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StudyGroup::SignChange => "sign_change",
            StudyGroup::Permutation => "permutation",
            StudyGroup::BlockRotation => "block_rotation",
        }
    }
}

/// One row of a size study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyRow {
    pub dgp: String,
    pub group: String,
    pub statistic: String,
    pub n: usize,
    pub level: f64,
    pub reps: usize,
    pub rate: f64,
    pub se: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

/// Grid study over dgps, sample sizes, and levels. Row seeds derive from
/// the global seed and the row labels, so adding rows never perturbs
/// existing ones.
pub fn size_study(
    dgps: &[Dgp],
    ns: &[usize],
    levels: &[f64],
    group: StudyGroup,
    statistic: &TestStatistic,
    reps: usize,
    seed: u64,
) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::new();
    for dgp in dgps {
        for n in ns {
            for level in levels {
                let row_seed = derive_seed(
                    seed,
                    &format!("row-{}-{}-{}-{}", dgp.name(), group.name(), n, level),
                );
                let spec = group.build(*n, row_seed)?;
                let est =
                    estimate_rejection_rate(*dgp, &spec, statistic, *level, *n, reps, row_seed)?;
                rows.push(StudyRow {
                    dgp: dgp.name().into(),
                    group: group.name().into(),
                    statistic: statistic.name().into(),
                    n: *n,
                    level: *level,
                    reps,
                    rate: est.rate,
                    se: est.standard_error,
                    ci_lo: est.ci95.0,
                    ci_hi: est.ci95.1,
                    seed: row_seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn study_rows_to_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from("dgp,group,statistic,n,level,reps,rate,se,ci_lo,ci_hi,seed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.dgp, r.group, r.statistic, r.n, r.level, r.reps, r.rate, r.se, r.ci_lo, r.ci_hi,
            r.seed
        ));
    }
    out
}

/// Output of the rotation-group normality demonstration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationDemoReport {
    pub level: f64,
    pub gaussian_rate: RateEstimate,
    pub uniform_rate: RateEstimate,
    pub invariance_gaussian: InvarianceReport,
    pub invariance_uniform: InvarianceReport,
}

/// Size of the block-rotation test under N(3,4) (exact at the nominal
/// level) against uniform(0,1) data, where the rotation invariance fails;
/// the statistic is the maximum absolute coordinate, which is sensitive to
/// the rotation.
pub fn gaussian_rotation_demo(
    n: usize,
    level: f64,
    reps: usize,
    seed: u64,
) -> Result<RotationDemoReport> {
    check_level(level)?;
    let group = block_rotation_group(n, BlockRotationMode::CyclicPerBlock, 100_000)?;
    let statistic = TestStatistic::max_abs();
    let gaussian_rate = estimate_rejection_rate(
        Dgp::NormalThreeFour,
        &group,
        &statistic,
        level,
        n,
        reps,
        derive_seed(seed, "rotation-demo-gaussian"),
    )?;
    let uniform_rate = estimate_rejection_rate(
        Dgp::Uniform01,
        &group,
        &statistic,
        level,
        n,
        reps,
        derive_seed(seed, "rotation-demo-uniform"),
    )?;

    // Invariance audit on the all-blocks rotation matrix.
    let a3 = block_rotation_matrix();
    let blocks = n / 3;
    let mut full = DMatrix::<f64>::identity(n, n);
    for b in 0..blocks {
        for i in 0..3 {
            for j in 0..3 {
                full[(3 * b + i, 3 * b + j)] = a3[(i, j)];
            }
        }
    }
    let invariance_gaussian = empirical_invariance_check(
        &full,
        Dgp::NormalThreeFour,
        reps.min(100_000),
        derive_seed(seed, "rotation-demo-invariance-gaussian"),
        None,
    )?;
    let invariance_uniform = empirical_invariance_check(
        &full,
        Dgp::Uniform01,
        reps.min(100_000),
        derive_seed(seed, "rotation-demo-invariance-uniform"),
        None,
    )?;
    Ok(RotationDemoReport {
        level,
        gaussian_rate,
        uniform_rate,
        invariance_gaussian,
        invariance_uniform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::sign_change_group;

    #[test]
    fn stubbed_always_reject_rate_is_one() {
        let est = rate_over_replicates(500, 3, |_| Ok(1.0)).unwrap();
        assert_eq!(est.rate, 1.0);
    }

    #[test]
    fn identical_seeds_give_bitwise_identical_tables() {
        let rows1 = size_study(
            &[Dgp::StdNormal, Dgp::UniformSym],
            &[4, 6],
            &[0.05, 0.1],
            StudyGroup::SignChange,
            &TestStatistic::AbsMean,
            500,
            99,
        )
        .unwrap();
        let rows2 = size_study(
            &[Dgp::StdNormal, Dgp::UniformSym],
            &[4, 6],
            &[0.05, 0.1],
            StudyGroup::SignChange,
            &TestStatistic::AbsMean,
            500,
            99,
        )
        .unwrap();
        assert_eq!(rows1.len(), 8);
        assert_eq!(study_rows_to_csv(&rows1), study_rows_to_csv(&rows2));
    }

    #[test]
    fn sign_change_size_is_near_nominal_at_smoke_scale() {
        let group = sign_change_group(6, None).unwrap();
        let est = estimate_rejection_rate(
            Dgp::StdNormal,
            &group,
            &TestStatistic::AbsMean,
            0.1,
            6,
            4000,
            12,
        )
        .unwrap();
        // 5 sigma of sqrt(0.1*0.9/4000) ~ 0.024
        assert!(
            (est.rate - 0.1).abs() < 0.024,
            "rate {} se {}",
            est.rate,
            est.standard_error
        );
    }

    #[test]
    fn p_values_super_uniform_at_smoke_scale() {
        let group = sign_change_group(6, None).unwrap();
        let mass = p_value_mass_at(
            Dgp::Laplace,
            &group,
            &TestStatistic::AbsMean,
            0.1,
            6,
            4000,
            21,
            &[0.05, 0.1, 0.5],
        )
        .unwrap();
        for (u, m) in [0.05f64, 0.1, 0.5].iter().zip(&mass) {
            let se = (u * (1.0 - u) / 4000.0).sqrt();
            assert!(*m <= u + 5.0 * se, "P(p <= {u}) = {m}");
        }
    }
}

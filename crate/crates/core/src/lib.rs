//! Exact finite-sample randomization tests and the machinery around them:
//! invariance groups and their verification, feasibility decisions for
//! finite-support null hypotheses, classification of linear invariance
//! groups, density-matching mixture constructions, and Monte Carlo size
//! studies.

pub mod alphabet;
pub mod classify;
pub mod config;
pub mod dense_construct;
pub mod density;
pub mod dgp;
pub mod engine;
pub mod error;
pub mod finite_null;
pub mod group;
pub mod groups;
pub mod ks;
pub mod mc;
pub mod null_spec;
pub mod sample;
pub mod seed;
pub mod simplex;
pub mod statistic;
pub mod transform;

pub use alphabet::{Alphabet, CountDiff, DiscreteDistribution};
pub use classify::{
    classify_generator, classify_group, empirical_invariance_check, ClassifyReport,
    GroupClassification, InvarianceReport,
};
pub use config::GroupConfig;
pub use dense_construct::{
    match_moment_density, match_quantile_density, match_variance_density, numeric_check_mixture,
    MixtureCheckReport,
};
pub use density::{Interval, MixtureConstruction, PiecewiseDensity, SupportSpec, TargetFunctional};
pub use dgp::Dgp;
pub use engine::{apply_transform, group_average_phi, run_randomization_test, Decision};
pub use error::{Error, Result};
pub use finite_null::{
    count_diff, counterexample_distribution, decide_randomization_hypothesis, find_witness,
    is_witness, product_mass_equal, HypothesisDecision, LedgerEntry, WitnessOutcome,
    WitnessVerdict,
};
pub use group::{verify_group_axioms, GroupAxiomReport, GroupSpec, SamplerKind};
pub use mc::{
    estimate_rejection_rate, gaussian_rotation_demo, size_study, RateEstimate,
    RotationDemoReport, StudyGroup, StudyRow,
};
pub use null_spec::{NullFamily, NullSpec};
pub use sample::Sample;
pub use statistic::TestStatistic;
pub use transform::Transform;

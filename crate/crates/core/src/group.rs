use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::transform::Transform;

/// Default cap on realized group size.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// How a sampled group draws its elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Rotation-invariant orthogonal matrices of degree `n`.
    HaarOrthogonal { n: usize },
    /// Uniform coordinate permutations of `n` items.
    Permutations { n: usize },
    /// Uniform sign vectors on `n` coordinates.
    SignFlips { n: usize },
}

/// A finite group given explicitly, by generators with a closure cap, or by
/// a seeded sampler.
///
/// Sampled specs always realize the identity as their first element; the
/// exactness of the randomization test on a sampled multiset relies on that
/// inclusion, so construction rejects `include_identity: false`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "snake_case")]
pub enum GroupSpec {
    Explicit {
        transforms: Vec<Transform>,
    },
    Generated {
        generators: Vec<Transform>,
        closure_cap: usize,
    },
    Sampled {
        #[serde(flatten)]
        sampler: SamplerKind,
        seed: u64,
        draws: usize,
        include_identity: bool,
    },
}

impl GroupSpec {
    pub fn explicit(transforms: Vec<Transform>) -> Result<GroupSpec> {
        if transforms.is_empty() {
            return Err(Error::InvalidParameter {
                reason: "explicit group needs at least one transform".into(),
            });
        }
        Ok(GroupSpec::Explicit { transforms })
    }

    pub fn generated(generators: Vec<Transform>, closure_cap: usize) -> Result<GroupSpec> {
        if generators.is_empty() {
            return Err(Error::InvalidParameter {
                reason: "generated group needs at least one generator".into(),
            });
        }
        Ok(GroupSpec::Generated {
            generators,
            closure_cap,
        })
    }

    pub fn sampled(sampler: SamplerKind, seed: u64, draws: usize) -> Result<GroupSpec> {
        if draws == 0 {
            return Err(Error::InvalidParameter {
                reason: "sampled group needs at least one draw".into(),
            });
        }
        Ok(GroupSpec::Sampled {
            sampler,
            seed,
            draws,
            include_identity: true,
        })
    }

    /// Structural validation. Closure and inverse membership of explicit
    /// lists is the job of [`verify_group_axioms`], which this does not run.
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Explicit { transforms } => {
                if transforms.is_empty() {
                    return Err(Error::InvalidParameter {
                        reason: "explicit group is empty".into(),
                    });
                }
                Ok(())
            }
            GroupSpec::Generated { generators, .. } => {
                if generators.is_empty() {
                    return Err(Error::InvalidParameter {
                        reason: "generated group has no generators".into(),
                    });
                }
                Ok(())
            }
            GroupSpec::Sampled {
                include_identity,
                draws,
                ..
            } => {
                if !include_identity {
                    return Err(Error::IdentityRequired);
                }
                if *draws == 0 {
                    return Err(Error::InvalidParameter {
                        reason: "sampled group has zero draws".into(),
                    });
                }
                Ok(())
            }
        }
    }

    /// Materialize the group as a list of transforms.
    ///
    /// Explicit: the list as given. Generated: breadth-first closure of the
    /// generators (and their inverses) up to the cap. Sampled: the identity
    /// followed by `draws - 1` independent draws.
    pub fn realize(&self) -> Result<Vec<Transform>> {
        self.validate()?;
        match self {
            GroupSpec::Explicit { transforms } => Ok(transforms.clone()),
            GroupSpec::Generated {
                generators,
                closure_cap,
            } => close_generators(generators, *closure_cap),
            GroupSpec::Sampled {
                sampler,
                seed,
                draws,
                ..
            } => {
                let mut out = Vec::with_capacity(*draws);
                match sampler {
                    SamplerKind::HaarOrthogonal { n } => {
                        let mut rng =
                            ChaCha8Rng::seed_from_u64(derive_seed(*seed, "haar-orthogonal"));
                        out.push(Transform::Matrix(DMatrix::identity(*n, *n)));
                        for _ in 1..*draws {
                            out.push(Transform::Matrix(haar_orthogonal(*n, &mut rng)));
                        }
                    }
                    SamplerKind::Permutations { n } => {
                        let mut rng =
                            ChaCha8Rng::seed_from_u64(derive_seed(*seed, "permutations"));
                        out.push(Transform::identity(*n));
                        for _ in 1..*draws {
                            out.push(random_permutation(*n, &mut rng));
                        }
                    }
                    SamplerKind::SignFlips { n } => {
                        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(*seed, "sign-flips"));
                        out.push(Transform::identity(*n));
                        for _ in 1..*draws {
                            let signs: Vec<i8> =
                                (0..*n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
                            out.push(Transform::SignedPermutation {
                                perm: (0..*n).collect(),
                                signs,
                            });
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Number of transforms the realization will contain, when cheap to know.
    pub fn size_hint(&self) -> Option<usize> {
        match self {
            GroupSpec::Explicit { transforms } => Some(transforms.len()),
            GroupSpec::Generated { .. } => None,
            GroupSpec::Sampled { draws, .. } => Some(*draws),
        }
    }
}

/// Breadth-first closure of a generator set under composition.
///
/// Deduplication is by canonical encoding, which distinguishes transform
/// kinds; when any generator is a matrix, signed permutations are converted
/// to their matrix form first so the closure lives in one kind.
fn close_generators(generators: &[Transform], cap: usize) -> Result<Vec<Transform>> {
    let any_matrix = generators.iter().any(|g| matches!(g, Transform::Matrix(_)));
    let normalized: Vec<Transform> = if any_matrix {
        generators
            .iter()
            .map(|g| match g {
                Transform::SignedPermutation { .. } => {
                    Transform::Matrix(g.to_matrix().expect("signed permutation has a matrix form"))
                }
                other => other.clone(),
            })
            .collect()
    } else {
        generators.to_vec()
    };
    let mut gens = Vec::new();
    for g in &normalized {
        gens.push(g.clone());
        gens.push(g.inverse()?);
    }
    let identity = normalized[0].identity_like();

    let mut elements = Vec::new();
    let mut keys = HashSet::new();
    let mut frontier = Vec::new();

    let push = |t: Transform, elements: &mut Vec<Transform>, frontier: &mut Vec<Transform>, keys: &mut HashSet<_>| {
        let key = t.canonical_key();
        if keys.insert(key) {
            elements.push(t.clone());
            frontier.push(t);
        }
    };

    push(identity, &mut elements, &mut frontier, &mut keys);
    for g in &gens {
        push(g.clone(), &mut elements, &mut frontier, &mut keys);
    }

    while let Some(e) = frontier.pop() {
        for g in &gens {
            let composed = e.compose(g)?;
            let key = composed.canonical_key();
            if keys.insert(key) {
                if elements.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                elements.push(composed.clone());
                frontier.push(composed);
            }
        }
    }
    Ok(elements)
}

/// Draw an orthogonal matrix from the rotation-invariant distribution:
/// QR of a standard Gaussian matrix with the R diagonal sign-corrected.
pub fn haar_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let gauss = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let r_diag: Vec<f64> = (0..n).map(|j| qr.r()[(j, j)]).collect();
    let mut q = qr.q();
    for j in 0..n {
        if r_diag[j] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Transform {
    let mut perm: Vec<usize> = (0..n).collect();
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    Transform::SignedPermutation {
        perm,
        signs: vec![1; n],
    }
}

/// Report from checking the group axioms on an explicit list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupAxiomReport {
    pub identity_present: bool,
    /// Pairs (i, j) whose composite is not in the list (or not composable).
    pub closure_violations: Vec<(usize, usize)>,
    /// Elements whose inverse is not in the list.
    pub inverse_violations: Vec<usize>,
    /// Pairs of indices holding the same element.
    pub duplicates: Vec<(usize, usize)>,
}

impl GroupAxiomReport {
    pub fn is_group(&self) -> bool {
        self.identity_present
            && self.closure_violations.is_empty()
            && self.inverse_violations.is_empty()
            && self.duplicates.is_empty()
    }
}

/// Check identity membership, pairwise closure, and inverse membership of an
/// explicit transform list. Membership is decided by canonical encoding.
pub fn verify_group_axioms(transforms: &[Transform]) -> GroupAxiomReport {
    let keys: Vec<_> = transforms.iter().map(|t| t.canonical_key()).collect();
    let key_set: HashSet<_> = keys.iter().cloned().collect();

    let mut duplicates = Vec::new();
    for i in 0..keys.len() {
        for j in (i + 1)..keys.len() {
            if keys[i] == keys[j] {
                duplicates.push((i, j));
            }
        }
    }

    let identity_present = transforms.iter().any(|t| t.is_identity());

    let mut closure_violations = Vec::new();
    for i in 0..transforms.len() {
        for j in 0..transforms.len() {
            match transforms[i].compose(&transforms[j]) {
                Ok(c) => {
                    if !key_set.contains(&c.canonical_key()) {
                        closure_violations.push((i, j));
                    }
                }
                Err(_) => closure_violations.push((i, j)),
            }
        }
    }

    let mut inverse_violations = Vec::new();
    for (i, t) in transforms.iter().enumerate() {
        match t.inverse() {
            Ok(inv) => {
                if !key_set.contains(&inv.canonical_key()) {
                    inverse_violations.push(i);
                }
            }
            Err(_) => inverse_violations.push(i),
        }
    }

    GroupAxiomReport {
        identity_present,
        closure_violations,
        inverse_violations,
        duplicates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_requires_identity_flag() {
        let spec = GroupSpec::Sampled {
            sampler: SamplerKind::SignFlips { n: 3 },
            seed: 1,
            draws: 5,
            include_identity: false,
        };
        assert!(matches!(spec.validate(), Err(Error::IdentityRequired)));
    }

    #[test]
    fn sampled_realization_puts_identity_first_and_is_seed_deterministic() {
        let spec = GroupSpec::sampled(SamplerKind::HaarOrthogonal { n: 3 }, 42, 4).unwrap();
        let a = spec.realize().unwrap();
        let b = spec.realize().unwrap();
        assert_eq!(a.len(), 4);
        assert!(a[0].is_identity());
        assert_eq!(a[1].canonical_key(), b[1].canonical_key());

        let other = GroupSpec::sampled(SamplerKind::HaarOrthogonal { n: 3 }, 43, 4).unwrap();
        let c = other.realize().unwrap();
        assert_ne!(a[1].canonical_key(), c[1].canonical_key());
    }

    #[test]
    fn haar_draws_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let q = haar_orthogonal(4, &mut rng);
            let qtq = q.transpose() * &q;
            for i in 0..4 {
                for j in 0..4 {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq[(i, j)] - target).abs() < 1e-10);
                }
            }
            // unit rows
            for i in 0..4 {
                let norm: f64 = (0..4).map(|j| q[(i, j)] * q[(i, j)]).sum();
                assert!((norm - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn closure_of_quarter_rotation_has_order_four() {
        let rot = Transform::matrix_from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let spec = GroupSpec::generated(vec![rot], 100).unwrap();
        let elems = spec.realize().unwrap();
        assert_eq!(elems.len(), 4);
        let report = verify_group_axioms(&elems);
        assert!(report.is_group());
    }

    #[test]
    fn closure_cap_is_enforced() {
        // 36.87-degree-ish rotation from a scaled (3,4,5) triple has infinite order.
        let rot = Transform::matrix_from_rows(&[vec![0.6, -0.8], vec![0.8, 0.6]]).unwrap();
        let spec = GroupSpec::generated(vec![rot], 50).unwrap();
        assert!(matches!(
            spec.realize(),
            Err(Error::GroupTooLarge { cap: 50 })
        ));
    }

    #[test]
    fn non_group_fails_closure() {
        let rot45 = {
            let c = std::f64::consts::FRAC_1_SQRT_2;
            Transform::matrix_from_rows(&[vec![c, -c], vec![c, c]]).unwrap()
        };
        let set = vec![Transform::Matrix(DMatrix::identity(2, 2)), rot45];
        let report = verify_group_axioms(&set);
        assert!(!report.is_group());
        assert!(!report.closure_violations.is_empty());
    }
}

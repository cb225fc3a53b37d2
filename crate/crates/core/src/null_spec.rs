use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::simplex;

/// A finite-support null family over an explicit alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullFamily {
    /// Distributions symmetric around zero.
    SymmetricAboutZero,
    /// Two named atoms carry equal mass.
    EqualMass { l: usize, l_prime: usize },
    /// E[X^t] = beta.
    Moment { t: u32, beta: f64 },
    /// P[X <= q] = p.
    Quantile { q: f64, p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NullSpecRepr", into = "NullSpecRepr")]
pub struct NullSpec {
    alphabet: Alphabet,
    family: NullFamily,
}

#[derive(Serialize, Deserialize)]
struct NullSpecRepr {
    alphabet: Vec<f64>,
    family: NullFamily,
}

impl TryFrom<NullSpecRepr> for NullSpec {
    type Error = Error;
    fn try_from(repr: NullSpecRepr) -> Result<Self> {
        NullSpec::new(Alphabet::new(repr.alphabet)?, repr.family)
    }
}

impl From<NullSpec> for NullSpecRepr {
    fn from(s: NullSpec) -> Self {
        NullSpecRepr {
            alphabet: s.alphabet.atoms().to_vec(),
            family: s.family,
        }
    }
}

impl NullSpec {
    pub fn new(alphabet: Alphabet, family: NullFamily) -> Result<Self> {
        match &family {
            NullFamily::SymmetricAboutZero => {
                if !alphabet.closed_under_negation() {
                    return Err(Error::InvalidNullFamily {
                        reason: "alphabet is not closed under negation".into(),
                    });
                }
            }
            NullFamily::EqualMass { l, l_prime } => {
                if l == l_prime {
                    return Err(Error::SameAtom);
                }
                if *l >= alphabet.len() || *l_prime >= alphabet.len() {
                    return Err(Error::InvalidNullFamily {
                        reason: "equal-mass atom index out of range".into(),
                    });
                }
            }
            NullFamily::Moment { t, beta } => {
                if *t == 0 {
                    return Err(Error::InvalidNullFamily {
                        reason: "moment order t must be positive".into(),
                    });
                }
                let powers: Vec<f64> =
                    alphabet.atoms().iter().map(|a| a.powi(*t as i32)).collect();
                let lo = powers.iter().cloned().fold(f64::MAX, f64::min);
                let hi = powers.iter().cloned().fold(f64::MIN, f64::max);
                if !beta.is_finite() || *beta <= lo || *beta >= hi {
                    return Err(Error::TargetOutOfRange {
                        value: *beta,
                        lo,
                        hi,
                    });
                }
            }
            NullFamily::Quantile { q, p } => {
                if !(p > &0.0 && p < &1.0) {
                    return Err(Error::InvalidNullFamily {
                        reason: format!("quantile probability must lie in (0,1), got {p}"),
                    });
                }
                let lo = alphabet.atom(0);
                let hi = alphabet.atom(alphabet.len() - 1);
                if !q.is_finite() || *q <= lo || *q >= hi {
                    return Err(Error::QuantileNotInterior { q: *q });
                }
            }
        }
        Ok(NullSpec { alphabet, family })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn family(&self) -> &NullFamily {
        &self.family
    }

    /// The linear-constraint weights for moment and quantile families:
    /// membership is exactly `sum_i w_i p_i = 0` over the simplex. `None`
    /// for the symmetric and equal-mass families.
    pub fn constraint_weights(&self) -> Option<Vec<f64>> {
        match &self.family {
            NullFamily::Moment { t, beta } => Some(
                self.alphabet
                    .atoms()
                    .iter()
                    .map(|a| a.powi(*t as i32) - beta)
                    .collect(),
            ),
            NullFamily::Quantile { q, p } => Some(
                self.alphabet
                    .atoms()
                    .iter()
                    .map(|a| if *a <= *q { 1.0 - p } else { -p })
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Mass-equality classes of the symmetric family: indices grouped so
    /// that each class carries one shared mass value ({a, -a} pairs; zero
    /// alone).
    pub fn symmetry_classes(&self) -> Result<Vec<Vec<usize>>> {
        if !matches!(self.family, NullFamily::SymmetricAboutZero) {
            return Err(Error::InvalidParameter {
                reason: "symmetry classes exist only for the symmetric family".into(),
            });
        }
        let k = self.alphabet.len();
        let mut assigned = vec![false; k];
        let mut classes = Vec::new();
        for i in 0..k {
            if assigned[i] {
                continue;
            }
            let a = self.alphabet.atom(i);
            if a == 0.0 {
                assigned[i] = true;
                classes.push(vec![i]);
            } else {
                let j = self.alphabet.index_of(-a)?;
                assigned[i] = true;
                assigned[j] = true;
                let mut class = vec![i.min(j), i.max(j)];
                class.dedup();
                classes.push(class);
            }
        }
        Ok(classes)
    }

    /// Draw a random member of the family; used by soundness checks.
    pub fn random_member<R: Rng>(&self, rng: &mut R) -> Result<DiscreteDistribution> {
        let k = self.alphabet.len();
        match &self.family {
            NullFamily::SymmetricAboutZero => {
                let classes = self.symmetry_classes()?;
                let weights: Vec<f64> = classes.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = classes
                    .iter()
                    .zip(&weights)
                    .map(|(c, w)| w * c.len() as f64)
                    .sum();
                let mut masses = vec![0.0; k];
                for (class, w) in classes.iter().zip(&weights) {
                    for &i in class {
                        // identical expression for both class members keeps
                        // their masses bitwise equal
                        masses[i] = w / total;
                    }
                }
                DiscreteDistribution::new(self.alphabet.clone(), masses)
            }
            NullFamily::EqualMass { l, l_prime } => {
                let mut masses: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let shared = 0.5 * (masses[*l] + masses[*l_prime]);
                masses[*l] = shared;
                masses[*l_prime] = shared;
                let total: f64 = masses.iter().sum();
                masses.iter_mut().for_each(|m| *m /= total);
                DiscreteDistribution::new(self.alphabet.clone(), masses)
            }
            NullFamily::Moment { .. } | NullFamily::Quantile { .. } => {
                let w = self.constraint_weights().expect("linear family");
                let p = simplex::random_constrained_point(&w, rng)
                    .ok_or(Error::InvalidNullFamily {
                        reason: "could not draw a member of the constrained family".into(),
                    })?;
                DiscreteDistribution::new(self.alphabet.clone(), p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alpha(atoms: &[f64]) -> Alphabet {
        Alphabet::new(atoms.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_requires_negation_closure() {
        assert!(NullSpec::new(alpha(&[-1.0, 0.0, 1.0]), NullFamily::SymmetricAboutZero).is_ok());
        assert!(NullSpec::new(
            alpha(&[-1.0, 0.0, 2.0]),
            NullFamily::SymmetricAboutZero
        )
        .is_err());
    }

    #[test]
    fn moment_target_must_be_interior() {
        let a = alpha(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(NullSpec::new(a.clone(), NullFamily::Moment { t: 1, beta: 3.0 }).is_ok());
        assert!(NullSpec::new(a.clone(), NullFamily::Moment { t: 1, beta: 5.0 }).is_err());
        assert!(NullSpec::new(a, NullFamily::Moment { t: 1, beta: 0.5 }).is_err());
    }

    #[test]
    fn quantile_must_be_interior() {
        let a = alpha(&[0.0, 1.0, 2.0, 3.0]);
        assert!(NullSpec::new(a.clone(), NullFamily::Quantile { q: 1.5, p: 0.3 }).is_ok());
        assert!(NullSpec::new(a.clone(), NullFamily::Quantile { q: 3.5, p: 0.3 }).is_err());
        assert!(NullSpec::new(a, NullFamily::Quantile { q: 1.5, p: 1.0 }).is_err());
    }

    #[test]
    fn symmetry_classes_pair_negatives() {
        let spec =
            NullSpec::new(alpha(&[-2.0, -1.0, 0.0, 1.0, 2.0]), NullFamily::SymmetricAboutZero)
                .unwrap();
        let classes = spec.symmetry_classes().unwrap();
        assert_eq!(classes, vec![vec![0, 4], vec![1, 3], vec![2]]);
    }

    #[test]
    fn random_members_satisfy_their_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = NullSpec::new(
            alpha(&[1.0, 2.0, 3.0, 4.0, 5.0]),
            NullFamily::Moment { t: 1, beta: 3.0 },
        )
        .unwrap();
        for _ in 0..200 {
            let p = m.random_member(&mut rng).unwrap();
            assert!((p.moment(1) - 3.0).abs() < 1e-10);
        }
        let q = NullSpec::new(
            alpha(&[0.0, 1.0, 2.0, 3.0]),
            NullFamily::Quantile { q: 1.5, p: 0.3 },
        )
        .unwrap();
        for _ in 0..200 {
            let p = q.random_member(&mut rng).unwrap();
            assert!((p.cdf(1.5) - 0.3).abs() < 1e-10);
        }
        let s = NullSpec::new(alpha(&[-1.0, 0.0, 1.0]), NullFamily::SymmetricAboutZero).unwrap();
        for _ in 0..50 {
            let p = s.random_member(&mut rng).unwrap();
            assert_eq!(p.mass(0), p.mass(2));
        }
    }
}

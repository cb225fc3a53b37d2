use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for checking that masses sum to one.
pub const MASS_SUM_TOL: f64 = 1e-12;

/// A finite support: strictly increasing distinct reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetRepr", into = "AlphabetRepr")]
pub struct Alphabet {
    atoms: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AlphabetRepr {
    atoms: Vec<f64>,
}

impl TryFrom<AlphabetRepr> for Alphabet {
    type Error = Error;
    fn try_from(repr: AlphabetRepr) -> Result<Self> {
        Alphabet::new(repr.atoms)
    }
}

impl From<Alphabet> for AlphabetRepr {
    fn from(a: Alphabet) -> Self {
        AlphabetRepr { atoms: a.atoms }
    }
}

impl Alphabet {
    pub fn new(atoms: Vec<f64>) -> Result<Self> {
        if atoms.len() < 2 {
            return Err(Error::AlphabetTooSmall { count: atoms.len() });
        }
        for (index, v) in atoms.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { index, value: *v });
            }
        }
        for i in 1..atoms.len() {
            if atoms[i] <= atoms[i - 1] {
                return Err(Error::UnsortedAlphabet { index: i });
            }
        }
        Ok(Alphabet { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> f64 {
        self.atoms[index]
    }

    /// Index of a value that must match an atom exactly.
    pub fn index_of(&self, value: f64) -> Result<usize> {
        self.atoms
            .binary_search_by(|a| a.total_cmp(&value))
            .map_err(|_| Error::AtomNotInAlphabet { value })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.index_of(value).is_ok()
    }

    /// True when for every atom a, -a is also an atom (0 pairs with itself).
    pub fn closed_under_negation(&self) -> bool {
        self.atoms.iter().all(|a| self.contains(-*a) || *a == 0.0)
    }

    /// Per-atom occurrence counts of a vector over this alphabet.
    pub fn counts(&self, xs: &[f64]) -> Result<Vec<i64>> {
        let mut counts = vec![0i64; self.atoms.len()];
        for v in xs {
            counts[self.index_of(*v)?] += 1;
        }
        Ok(counts)
    }
}

/// A probability distribution over an `Alphabet`, stored as a mass per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct DiscreteDistribution {
    alphabet: Alphabet,
    masses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    atoms: Vec<f64>,
    masses: Vec<f64>,
}

impl TryFrom<DistributionRepr> for DiscreteDistribution {
    type Error = Error;
    fn try_from(repr: DistributionRepr) -> Result<Self> {
        DiscreteDistribution::new(Alphabet::new(repr.atoms)?, repr.masses)
    }
}

impl From<DiscreteDistribution> for DistributionRepr {
    fn from(d: DiscreteDistribution) -> Self {
        DistributionRepr {
            atoms: d.alphabet.atoms,
            masses: d.masses,
        }
    }
}

impl DiscreteDistribution {
    pub fn new(alphabet: Alphabet, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != alphabet.len() {
            return Err(Error::InvalidParameter {
                reason: format!(
                    "mass vector length {} does not match alphabet size {}",
                    masses.len(),
                    alphabet.len()
                ),
            });
        }
        for (index, m) in masses.iter().enumerate() {
            if !m.is_finite() || *m < 0.0 || *m > 1.0 {
                return Err(Error::MassOutOfRange { index, value: *m });
            }
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOL {
            return Err(Error::MassNotNormalized {
                sum,
                tol: MASS_SUM_TOL,
            });
        }
        Ok(DiscreteDistribution { alphabet, masses })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, atom_index: usize) -> f64 {
        self.masses[atom_index]
    }

    /// E[X^t] under this distribution.
    pub fn moment(&self, t: u32) -> f64 {
        self.alphabet
            .atoms()
            .iter()
            .zip(&self.masses)
            .map(|(a, m)| a.powi(t as i32) * m)
            .sum()
    }

    /// P[X <= q].
    pub fn cdf(&self, q: f64) -> f64 {
        self.alphabet
            .atoms()
            .iter()
            .zip(&self.masses)
            .filter(|(a, _)| **a <= q)
            .map(|(_, m)| m)
            .sum()
    }
}

/// Per-atom count difference between two vectors over the same alphabet.
///
/// The entries always sum to zero when both vectors have equal length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDiff {
    pub alphabet: Alphabet,
    pub diffs: Vec<i64>,
}

impl CountDiff {
    pub fn is_zero(&self) -> bool {
        self.diffs.iter().all(|d| *d == 0)
    }

    pub fn sum(&self) -> i64 {
        self.diffs.iter().sum()
    }

    /// Sum of the positive entries; the smallest sample length that can
    /// realize this difference.
    pub fn positive_mass(&self) -> i64 {
        self.diffs.iter().filter(|d| **d > 0).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_requires_sorted_distinct() {
        assert!(Alphabet::new(vec![1.0]).is_err());
        assert!(matches!(
            Alphabet::new(vec![1.0, 1.0]),
            Err(Error::UnsortedAlphabet { index: 1 })
        ));
        assert!(matches!(
            Alphabet::new(vec![2.0, 1.0]),
            Err(Error::UnsortedAlphabet { index: 1 })
        ));
        assert!(Alphabet::new(vec![-1.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn negation_closure() {
        assert!(Alphabet::new(vec![-1.0, 0.0, 1.0])
            .unwrap()
            .closed_under_negation());
        assert!(!Alphabet::new(vec![-1.0, 0.0, 1.0, 2.0f64.sqrt()])
            .unwrap()
            .closed_under_negation());
    }

    #[test]
    fn masses_validate() {
        let a = Alphabet::new(vec![-1.0, 0.0, 1.0]).unwrap();
        assert!(DiscreteDistribution::new(a.clone(), vec![0.5, 0.0, 0.5]).is_ok());
        assert!(matches!(
            DiscreteDistribution::new(a.clone(), vec![0.5, 0.0, 0.4]),
            Err(Error::MassNotNormalized { .. })
        ));
        assert!(matches!(
            DiscreteDistribution::new(a, vec![1.5, -0.5, 0.0]),
            Err(Error::MassOutOfRange { .. })
        ));
    }

    #[test]
    fn exact_atom_lookup() {
        let a = Alphabet::new(vec![-1.0, 0.0, 1.0, 2.0f64.sqrt()]).unwrap();
        assert_eq!(a.index_of(2.0f64.sqrt()).unwrap(), 3);
        assert!(a.index_of(1.4142).is_err());
    }
}

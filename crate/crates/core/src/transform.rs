use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Condition-number bound beyond which a matrix is treated as singular.
pub const MATRIX_COND_BOUND: f64 = 1e12;

/// Grid used to canonicalize matrix entries for hashing and membership.
pub const MATRIX_KEY_GRID: f64 = 1e-9;

/// One invertible map on the sample space.
///
/// `SignedPermutation` and `AtomMap` act coordinatewise and compose exactly;
/// `Matrix` composes in floating point; `PointSwap` exchanges two designated
/// points of the sample space and acts as the identity elsewhere. A point
/// swap is stored by its two points, never as a table over the whole space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TransformRepr", into = "TransformRepr")]
pub enum Transform {
    SignedPermutation { perm: Vec<usize>, signs: Vec<i8> },
    Matrix(DMatrix<f64>),
    AtomMap { alphabet: Alphabet, image: Vec<usize> },
    PointSwap { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum TransformRepr {
    SignedPermutation {
        perm: Vec<usize>,
        signs: Vec<i8>,
    },
    Matrix {
        rows: Vec<Vec<f64>>,
    },
    AtomMap {
        atoms: Vec<f64>,
        image: Vec<usize>,
    },
    PointSwap {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

impl TryFrom<TransformRepr> for Transform {
    type Error = Error;
    fn try_from(repr: TransformRepr) -> Result<Self> {
        match repr {
            TransformRepr::SignedPermutation { perm, signs } => {
                Transform::signed_permutation(perm, signs)
            }
            TransformRepr::Matrix { rows } => Transform::matrix_from_rows(&rows),
            TransformRepr::AtomMap { atoms, image } => {
                Transform::atom_map(Alphabet::new(atoms)?, image)
            }
            TransformRepr::PointSwap { x, y } => Transform::point_swap(x, y),
        }
    }
}

impl From<Transform> for TransformRepr {
    fn from(t: Transform) -> Self {
        match t {
            Transform::SignedPermutation { perm, signs } => {
                TransformRepr::SignedPermutation { perm, signs }
            }
            Transform::Matrix(m) => TransformRepr::Matrix {
                rows: (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                    .collect(),
            },
            Transform::AtomMap { alphabet, image } => TransformRepr::AtomMap {
                atoms: alphabet.atoms().to_vec(),
                image,
            },
            Transform::PointSwap { x, y } => TransformRepr::PointSwap { x, y },
        }
    }
}

/// Hashable canonical encoding used for deduplication and group membership.
/// Matrix entries are snapped to a `MATRIX_KEY_GRID` grid; all other fields
/// are encoded exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TransformKey {
    SignedPermutation(Vec<usize>, Vec<i8>),
    Matrix(usize, Vec<i64>),
    AtomMap(Vec<u64>, Vec<usize>),
    PointSwap(Vec<u64>, Vec<u64>),
}

fn is_perm(perm: &[usize]) -> bool {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

impl Transform {
    /// Identity signed permutation on `n` coordinates.
    pub fn identity(n: usize) -> Transform {
        Transform::SignedPermutation {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    pub fn signed_permutation(perm: Vec<usize>, signs: Vec<i8>) -> Result<Transform> {
        if perm.len() != signs.len() {
            return Err(Error::InvalidParameter {
                reason: "permutation and sign vectors differ in length".into(),
            });
        }
        if !is_perm(&perm) {
            return Err(Error::InvalidParameter {
                reason: "not a permutation of 0..n".into(),
            });
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidParameter {
                reason: "signs must be +1 or -1".into(),
            });
        }
        Ok(Transform::SignedPermutation { perm, signs })
    }

    /// Construct a matrix transform, rejecting singular or ill-conditioned
    /// matrices (condition estimate above `MATRIX_COND_BOUND`).
    pub fn matrix(m: DMatrix<f64>) -> Result<Transform> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidParameter {
                reason: "matrix must be square and non-empty".into(),
            });
        }
        if m.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter {
                reason: "matrix entries must be finite".into(),
            });
        }
        let cond = condition_estimate(&m);
        if !cond.is_finite() || cond > MATRIX_COND_BOUND {
            return Err(Error::SingularMatrix {
                cond,
                bound: MATRIX_COND_BOUND,
            });
        }
        Ok(Transform::Matrix(m))
    }

    pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Transform> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter {
                reason: "matrix rows must form a square array".into(),
            });
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Transform::matrix(m)
    }

    /// Coordinatewise bijection on an alphabet. `image[i]` is the atom index
    /// that atom `i` maps to.
    pub fn atom_map(alphabet: Alphabet, image: Vec<usize>) -> Result<Transform> {
        if image.len() != alphabet.len() || !is_perm(&image) {
            return Err(Error::InvalidParameter {
                reason: "atom map image must be a bijection on the alphabet".into(),
            });
        }
        Ok(Transform::AtomMap { alphabet, image })
    }

    pub fn point_swap(x: Vec<f64>, y: Vec<f64>) -> Result<Transform> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidParameter {
                reason: "point-swap endpoints must be non-empty and equal length".into(),
            });
        }
        if x == y {
            return Err(Error::EqualPoints);
        }
        Ok(Transform::PointSwap { x, y })
    }

    /// The coordinate dimension this transform requires, if fixed.
    /// Atom maps act coordinatewise on vectors of any length.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Transform::SignedPermutation { perm, .. } => Some(perm.len()),
            Transform::Matrix(m) => Some(m.nrows()),
            Transform::AtomMap { .. } => None,
            Transform::PointSwap { x, .. } => Some(x.len()),
        }
    }

    /// Apply to a sample. Signed permutations, atom maps, and point swaps are
    /// bit-exact; matrix application carries floating-point rounding.
    pub fn apply(&self, sample: &Sample) -> Result<Sample> {
        let xs = sample.values();
        match self {
            Transform::SignedPermutation { perm, signs } => {
                if perm.len() != xs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: perm.len(),
                        found: xs.len(),
                    });
                }
                let out: Vec<f64> = (0..xs.len())
                    .map(|i| f64::from(signs[i]) * xs[perm[i]])
                    .collect();
                Sample::new(out)
            }
            Transform::Matrix(m) => {
                let n = m.nrows();
                if n != xs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: xs.len(),
                    });
                }
                // Column-major walk; avoids per-call DVector allocation.
                let data = m.as_slice();
                let mut out = vec![0.0f64; n];
                for j in 0..n {
                    let xj = xs[j];
                    let col = &data[j * n..(j + 1) * n];
                    for i in 0..n {
                        out[i] += col[i] * xj;
                    }
                }
                Sample::new(out)
            }
            Transform::AtomMap { alphabet, image } => {
                let mut out = Vec::with_capacity(xs.len());
                for v in xs {
                    let idx = alphabet.index_of(*v)?;
                    out.push(alphabet.atom(image[idx]));
                }
                Sample::new(out)
            }
            Transform::PointSwap { x, y } => {
                if x.len() != xs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: x.len(),
                        found: xs.len(),
                    });
                }
                if xs == x.as_slice() {
                    Sample::new(y.clone())
                } else if xs == y.as_slice() {
                    Sample::new(x.clone())
                } else {
                    Ok(sample.clone())
                }
            }
        }
    }

    /// Computable inverse. Matrix inversion can fail for ill-conditioned
    /// inputs that slipped past construction.
    pub fn inverse(&self) -> Result<Transform> {
        match self {
            Transform::SignedPermutation { perm, signs } => {
                let n = perm.len();
                let mut inv_perm = vec![0usize; n];
                let mut inv_signs = vec![1i8; n];
                for i in 0..n {
                    inv_perm[perm[i]] = i;
                    inv_signs[perm[i]] = signs[i];
                }
                Ok(Transform::SignedPermutation {
                    perm: inv_perm,
                    signs: inv_signs,
                })
            }
            Transform::Matrix(m) => {
                let inv = m.clone().try_inverse().ok_or(Error::SingularMatrix {
                    cond: f64::INFINITY,
                    bound: MATRIX_COND_BOUND,
                })?;
                Ok(Transform::Matrix(inv))
            }
            Transform::AtomMap { alphabet, image } => {
                let mut inv = vec![0usize; image.len()];
                for (i, &j) in image.iter().enumerate() {
                    inv[j] = i;
                }
                Ok(Transform::AtomMap {
                    alphabet: alphabet.clone(),
                    image: inv,
                })
            }
            Transform::PointSwap { .. } => Ok(self.clone()),
        }
    }

    /// Composition `self . other`, i.e. apply `other` first.
    ///
    /// Mixed signed-permutation/matrix pairs compose as matrices. Point
    /// swaps compose only with themselves (yielding the identity) or with
    /// the identity; other pairings are rejected.
    pub fn compose(&self, other: &Transform) -> Result<Transform> {
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        match (self, other) {
            (
                Transform::SignedPermutation { perm: pf, signs: sf },
                Transform::SignedPermutation { perm: pg, signs: sg },
            ) => {
                if pf.len() != pg.len() {
                    return Err(Error::DimensionMismatch {
                        expected: pf.len(),
                        found: pg.len(),
                    });
                }
                // (f.g)(x)_i = sf_i * (g x)_{pf(i)} = sf_i * sg_{pf(i)} * x_{pg(pf(i))}
                let n = pf.len();
                let perm: Vec<usize> = (0..n).map(|i| pg[pf[i]]).collect();
                let signs: Vec<i8> = (0..n).map(|i| sf[i] * sg[pf[i]]).collect();
                Ok(Transform::SignedPermutation { perm, signs })
            }
            (Transform::Matrix(a), Transform::Matrix(b)) => {
                if a.ncols() != b.nrows() {
                    return Err(Error::DimensionMismatch {
                        expected: a.ncols(),
                        found: b.nrows(),
                    });
                }
                Ok(Transform::Matrix(a * b))
            }
            (Transform::SignedPermutation { .. }, Transform::Matrix(b)) => {
                let a = self.to_matrix().expect("signed permutation has a matrix form");
                if a.ncols() != b.nrows() {
                    return Err(Error::DimensionMismatch {
                        expected: a.ncols(),
                        found: b.nrows(),
                    });
                }
                Ok(Transform::Matrix(a * b))
            }
            (Transform::Matrix(a), Transform::SignedPermutation { .. }) => {
                let b = other.to_matrix().expect("signed permutation has a matrix form");
                if a.ncols() != b.nrows() {
                    return Err(Error::DimensionMismatch {
                        expected: a.ncols(),
                        found: b.nrows(),
                    });
                }
                Ok(Transform::Matrix(a * b))
            }
            (
                Transform::AtomMap { alphabet: aa, image: ia },
                Transform::AtomMap { alphabet: ab, image: ib },
            ) => {
                if aa != ab {
                    return Err(Error::NotComposable {
                        reason: "atom maps over different alphabets".into(),
                    });
                }
                let image: Vec<usize> = ib.iter().map(|&j| ia[j]).collect();
                Ok(Transform::AtomMap {
                    alphabet: aa.clone(),
                    image,
                })
            }
            (Transform::PointSwap { x: xa, y: ya }, Transform::PointSwap { x: xb, y: yb }) => {
                let same = (xa == xb && ya == yb) || (xa == yb && ya == xb);
                if same {
                    Ok(Transform::identity(xa.len()))
                } else {
                    Err(Error::NotComposable {
                        reason: "distinct point swaps have no representable composite".into(),
                    })
                }
            }
            _ => Err(Error::NotComposable {
                reason: "unsupported transform pairing".into(),
            }),
        }
    }

    /// Whether this transform is the identity map. Exact for signed
    /// permutations, atom maps, and point swaps; within `MATRIX_KEY_GRID`
    /// per entry for matrices.
    pub fn is_identity(&self) -> bool {
        match self {
            Transform::SignedPermutation { perm, signs } => {
                perm.iter().enumerate().all(|(i, p)| i == *p) && signs.iter().all(|s| *s == 1)
            }
            Transform::Matrix(m) => {
                let n = m.nrows();
                (0..n).all(|i| {
                    (0..n).all(|j| {
                        let target = if i == j { 1.0 } else { 0.0 };
                        (m[(i, j)] - target).abs() < MATRIX_KEY_GRID
                    })
                })
            }
            Transform::AtomMap { image, .. } => image.iter().enumerate().all(|(i, j)| i == *j),
            Transform::PointSwap { .. } => false,
        }
    }

    /// Identity element of the same kind (and dimension) as this transform.
    pub fn identity_like(&self) -> Transform {
        match self {
            Transform::SignedPermutation { perm, .. } => Transform::identity(perm.len()),
            Transform::Matrix(m) => Transform::Matrix(DMatrix::identity(m.nrows(), m.ncols())),
            Transform::AtomMap { alphabet, .. } => Transform::AtomMap {
                alphabet: alphabet.clone(),
                image: (0..alphabet.len()).collect(),
            },
            Transform::PointSwap { x, .. } => Transform::identity(x.len()),
        }
    }

    /// Matrix form, when one exists.
    pub fn to_matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            Transform::SignedPermutation { perm, signs } => {
                let n = perm.len();
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    m[(i, perm[i])] = f64::from(signs[i]);
                }
                Some(m)
            }
            Transform::Matrix(m) => Some(m.clone()),
            _ => None,
        }
    }

    pub fn canonical_key(&self) -> TransformKey {
        match self {
            Transform::SignedPermutation { perm, signs } => {
                TransformKey::SignedPermutation(perm.clone(), signs.clone())
            }
            Transform::Matrix(m) => TransformKey::Matrix(
                m.nrows(),
                m.iter().map(|e| (e / MATRIX_KEY_GRID).round() as i64).collect(),
            ),
            Transform::AtomMap { alphabet, image } => TransformKey::AtomMap(
                alphabet.atoms().iter().map(|a| a.to_bits()).collect(),
                image.clone(),
            ),
            Transform::PointSwap { x, y } => {
                let xb: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
                let yb: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
                // A swap is unordered in its endpoints.
                if xb <= yb {
                    TransformKey::PointSwap(xb, yb)
                } else {
                    TransformKey::PointSwap(yb, xb)
                }
            }
        }
    }
}

/// Condition number estimate from singular values.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(f64::MIN, f64::max);
    let min = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

//! Piecewise-constant densities on disjoint closed intervals, with closed
//! form moments and CDFs plus adaptive-quadrature cross checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval [lo, hi] of positive width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidIntervals {
                reason: format!("[{lo}, {hi}] is not a finite interval of positive width"),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// A nonnegative piecewise-constant function on disjoint closed intervals,
/// sorted by position. Not necessarily normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRepr", into = "PiecewiseRepr")]
pub struct PiecewiseDensity {
    pieces: Vec<(Interval, f64)>,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseRepr {
    intervals: Vec<[f64; 2]>,
    values: Vec<f64>,
}

impl TryFrom<PiecewiseRepr> for PiecewiseDensity {
    type Error = Error;
    fn try_from(repr: PiecewiseRepr) -> Result<Self> {
        if repr.intervals.len() != repr.values.len() {
            return Err(Error::InvalidIntervals {
                reason: "interval and value counts differ".into(),
            });
        }
        let pieces: Vec<(Interval, f64)> = repr
            .intervals
            .iter()
            .zip(&repr.values)
            .map(|(iv, v)| Ok((Interval::new(iv[0], iv[1])?, *v)))
            .collect::<Result<_>>()?;
        PiecewiseDensity::new(pieces)
    }
}

impl From<PiecewiseDensity> for PiecewiseRepr {
    fn from(d: PiecewiseDensity) -> Self {
        PiecewiseRepr {
            intervals: d.pieces.iter().map(|(i, _)| [i.lo, i.hi]).collect(),
            values: d.pieces.iter().map(|(_, v)| *v).collect(),
        }
    }
}

impl PiecewiseDensity {
    /// Empty density (zero mass). Valid only as a mixture complement with
    /// zero weight.
    pub fn empty() -> PiecewiseDensity {
        PiecewiseDensity { pieces: Vec::new() }
    }

    pub fn new(mut pieces: Vec<(Interval, f64)>) -> Result<PiecewiseDensity> {
        for (_, v) in &pieces {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidIntervals {
                    reason: format!("density value {v} must be finite and nonnegative"),
                });
            }
        }
        pieces.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
        for w in pieces.windows(2) {
            if w[0].0.hi >= w[1].0.lo {
                return Err(Error::InvalidIntervals {
                    reason: format!(
                        "intervals [{}, {}] and [{}, {}] are not disjoint",
                        w[0].0.lo, w[0].0.hi, w[1].0.lo, w[1].0.hi
                    ),
                });
            }
        }
        Ok(PiecewiseDensity { pieces })
    }

    pub fn uniform(interval: Interval) -> PiecewiseDensity {
        let value = 1.0 / interval.width();
        PiecewiseDensity {
            pieces: vec![(interval, value)],
        }
    }

    pub fn pieces(&self) -> &[(Interval, f64)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn max_width(&self) -> f64 {
        self.pieces
            .iter()
            .map(|(i, _)| i.width())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        for (interval, v) in &self.pieces {
            if interval.contains(x) {
                return *v;
            }
        }
        0.0
    }

    pub fn mass(&self) -> f64 {
        self.pieces
            .iter()
            .map(|(i, v)| v * i.width())
            .sum()
    }

    /// Closed-form integral of x^t against the density.
    pub fn moment(&self, t: u32) -> f64 {
        let e = t as i32 + 1;
        self.pieces
            .iter()
            .map(|(i, v)| v * (i.hi.powi(e) - i.lo.powi(e)) / f64::from(e))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    /// Closed-form integral of the density over (-inf, q].
    pub fn cdf(&self, q: f64) -> f64 {
        self.pieces
            .iter()
            .map(|(i, v)| {
                if q <= i.lo {
                    0.0
                } else if q >= i.hi {
                    v * i.width()
                } else {
                    v * (q - i.lo)
                }
            })
            .sum()
    }

    pub fn bounding_box(&self) -> Option<Interval> {
        let lo = self.pieces.first()?.0.lo;
        let hi = self.pieces.last()?.0.hi;
        Some(Interval { lo, hi })
    }

    /// Rescale so the total mass is one.
    pub fn normalized(&self) -> Result<PiecewiseDensity> {
        let mass = self.mass();
        if mass <= 0.0 {
            return Err(Error::InvalidIntervals {
                reason: "cannot normalize a density with nonpositive mass".into(),
            });
        }
        Ok(PiecewiseDensity {
            pieces: self
                .pieces
                .iter()
                .map(|(i, v)| (*i, v / mass))
                .collect(),
        })
    }

    /// Maximal subintervals of [lo, hi] that avoid every piece.
    pub fn gaps_within(&self, lo: f64, hi: f64) -> Vec<Interval> {
        let mut gaps = Vec::new();
        let mut cursor = lo;
        for (interval, _) in &self.pieces {
            if interval.hi <= lo {
                continue;
            }
            if interval.lo >= hi {
                break;
            }
            if interval.lo > cursor {
                gaps.push(Interval {
                    lo: cursor,
                    hi: interval.lo.min(hi),
                });
            }
            cursor = cursor.max(interval.hi);
        }
        if cursor < hi {
            gaps.push(Interval { lo: cursor, hi });
        }
        gaps.retain(|g| g.width() > 0.0);
        gaps
    }

    /// True when no piece intersects any piece of `other`.
    pub fn disjoint_from(&self, other: &PiecewiseDensity) -> bool {
        for (a, _) in &self.pieces {
            for (b, _) in &other.pieces {
                if a.lo <= b.hi && b.lo <= a.hi {
                    return false;
                }
            }
        }
        true
    }
}

/// Support of a construction: the whole real line or a bounded interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSpec {
    Real,
    Bounded { lo: f64, hi: f64 },
}

/// The functional a mixture construction certifies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetFunctional {
    Moment { t: u32, beta: f64 },
    Quantile { q: f64, p: f64 },
    Variance { beta: f64 },
}

/// A mixture g = scale * base + (1 - scale) * complement whose restriction
/// to the base intervals is exactly `scale * base` and whose target
/// functional is certified.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureConstruction {
    pub scale: f64,
    pub base: PiecewiseDensity,
    pub complement: PiecewiseDensity,
    pub target: TargetFunctional,
}

impl MixtureConstruction {
    /// Mixture density value at a point.
    pub fn eval(&self, x: f64) -> f64 {
        self.scale * self.base.eval(x) + (1.0 - self.scale) * self.complement.eval(x)
    }

    /// All pieces of the mixture with their effective density values.
    pub fn mixture_pieces(&self) -> Vec<(Interval, f64)> {
        let mut pieces: Vec<(Interval, f64)> = self
            .base
            .pieces()
            .iter()
            .map(|(i, v)| (*i, self.scale * v))
            .chain(
                self.complement
                    .pieces()
                    .iter()
                    .map(|(i, v)| (*i, (1.0 - self.scale) * v)),
            )
            .collect();
        pieces.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
        pieces
    }

    pub fn mixture_mass(&self) -> f64 {
        self.scale * self.base.mass() + (1.0 - self.scale) * self.complement.mass()
    }

    pub fn mixture_moment(&self, t: u32) -> f64 {
        self.scale * self.base.moment(t) + (1.0 - self.scale) * self.complement.moment(t)
    }

    pub fn mixture_cdf(&self, q: f64) -> f64 {
        self.scale * self.base.cdf(q) + (1.0 - self.scale) * self.complement.cdf(q)
    }

    pub fn mixture_variance(&self) -> f64 {
        let m1 = self.mixture_moment(1);
        self.mixture_moment(2) - m1 * m1
    }
}

/// Adaptive Simpson quadrature with an absolute tolerance.
pub fn quad(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b))
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        whole: f64,
        depth: usize,
    ) -> f64 {
        let c = 0.5 * (a + b);
        let left = simpson(f, a, c);
        let right = simpson(f, c, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, c, 0.5 * tol, left, depth - 1)
                + recurse(f, c, b, 0.5 * tol, right, depth - 1)
        }
    }
    recurse(f, a, b, tol, simpson(f, a, b), 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn disjointness_enforced() {
        assert!(PiecewiseDensity::new(vec![(iv(0.0, 1.0), 1.0), (iv(0.5, 2.0), 1.0)]).is_err());
        assert!(PiecewiseDensity::new(vec![(iv(0.0, 1.0), 1.0), (iv(1.0, 2.0), 1.0)]).is_err());
        assert!(PiecewiseDensity::new(vec![(iv(0.0, 1.0), 1.0), (iv(1.5, 2.0), 1.0)]).is_ok());
    }

    #[test]
    fn closed_forms_on_the_unit_uniform() {
        let d = PiecewiseDensity::uniform(iv(0.0, 1.0));
        assert!((d.mass() - 1.0).abs() < 1e-15);
        assert!((d.mean() - 0.5).abs() < 1e-15);
        assert!((d.moment(2) - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.variance() - 1.0 / 12.0).abs() < 1e-15);
        assert!((d.cdf(0.25) - 0.25).abs() < 1e-15);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert!((d.cdf(5.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaps_are_the_complement() {
        let d = PiecewiseDensity::new(vec![(iv(0.2, 0.4), 1.0), (iv(0.6, 0.7), 1.0)]).unwrap();
        let gaps = d.gaps_within(0.0, 1.0);
        assert_eq!(gaps.len(), 3);
        assert_eq!(gaps[0], iv(0.0, 0.2));
        assert_eq!(gaps[1], iv(0.4, 0.6));
        assert_eq!(gaps[2], iv(0.7, 1.0));
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let d = PiecewiseDensity::new(vec![(iv(-1.0, 0.0), 0.3), (iv(1.0, 2.0), 0.7)]).unwrap();
        for (interval, _) in d.pieces() {
            let numeric = quad(&|x| x * x * d.eval(x), interval.lo, interval.hi, 1e-12);
            let exact = (interval.hi.powi(3) - interval.lo.powi(3)) / 3.0 * d.eval(interval.lo);
            assert!((numeric - exact).abs() < 1e-10);
        }
    }
}

//! Mixture constructions that hit a prescribed moment, quantile, or
//! variance while agreeing with a scaled copy of a given base density on
//! its intervals.
//!
//! Each construction places an indicator complement on the correct side of
//! the target and solves the remaining scalar equation in closed form (the
//! variance case bisects). On the real line the complement sits on integer
//! offsets beyond the base's bounding box; on bounded support it occupies
//! the widest gap between base intervals, whose existence is guaranteed by
//! the per-family width bound on the base pieces.

use serde::{Deserialize, Serialize};

use crate::density::{
    quad, Interval, MixtureConstruction, PiecewiseDensity, SupportSpec, TargetFunctional,
};
use crate::error::{Error, Result};

/// How closely the base density must be normalized on entry.
const BASE_MASS_TOL: f64 = 1e-9;
/// Tolerance for the certified target functional.
pub const TARGET_TOL: f64 = 1e-8;
/// Tolerance for total mixture mass.
pub const MASS_TOL: f64 = 1e-10;

fn validated_base(base: &PiecewiseDensity) -> Result<PiecewiseDensity> {
    if base.is_empty() {
        return Err(Error::InvalidIntervals {
            reason: "base density has no intervals".into(),
        });
    }
    let mass = base.mass();
    if (mass - 1.0).abs() > BASE_MASS_TOL {
        return Err(Error::MassNotNormalized {
            sum: mass,
            tol: BASE_MASS_TOL,
        });
    }
    base.normalized()
}

fn check_base_in_support(base: &PiecewiseDensity, lo: f64, hi: f64) -> Result<()> {
    let bbox = base.bounding_box().expect("non-empty base");
    if bbox.lo < lo || bbox.hi > hi {
        return Err(Error::InvalidIntervals {
            reason: format!(
                "base intervals [{}, {}] leave the support [{lo}, {hi}]",
                bbox.lo, bbox.hi
            ),
        });
    }
    Ok(())
}

/// Signed t-th root.
fn root(t: u32, beta: f64) -> f64 {
    beta.signum() * beta.abs().powf(1.0 / f64::from(t))
}

/// Widest gap between base pieces inside the window, shrunk if needed so
/// the complement's moment stays strictly on its side of the target.
fn widest_gap(base: &PiecewiseDensity, lo: f64, hi: f64) -> Result<Interval> {
    if hi - lo <= 0.0 {
        return Err(Error::NoGapInterval { threshold: lo });
    }
    base.gaps_within(lo, hi)
        .into_iter()
        .max_by(|a, b| a.width().total_cmp(&b.width()))
        .ok_or(Error::NoGapInterval { threshold: hi })
}

/// Solve `alpha * mu + (1 - alpha) * nu = beta` for the mixture weight.
/// Valid whenever beta lies between nu and mu (mu side inclusive).
fn solve_scale(mu: f64, nu: f64, beta: f64) -> Option<f64> {
    if mu == nu {
        return None;
    }
    let alpha = (beta - nu) / (mu - nu);
    if alpha > 0.0 && alpha <= 1.0 {
        Some(alpha)
    } else {
        None
    }
}

/// Build a mixture with E[X^t] = beta matching `scale * base` on the base
/// intervals.
pub fn match_moment_density(
    base: &PiecewiseDensity,
    t: u32,
    beta: f64,
    support: SupportSpec,
) -> Result<MixtureConstruction> {
    if t == 0 {
        return Err(Error::InvalidParameter {
            reason: "moment order t must be positive".into(),
        });
    }
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            reason: "target moment must be finite".into(),
        });
    }
    let base = validated_base(base)?;
    let odd = t % 2 == 1;
    let mu = base.moment(t);
    let bbox = base.bounding_box().expect("non-empty base");
    let m = base.piece_count() as f64;

    let complement_interval: Interval = match support {
        SupportSpec::Real => {
            if odd {
                if mu <= beta {
                    integer_interval_above(t, beta, bbox.hi)
                } else {
                    integer_interval_below(t, beta, bbox.lo)
                }
            } else {
                if beta <= 0.0 {
                    return Err(Error::TargetOutOfRange {
                        value: beta,
                        lo: 0.0,
                        hi: f64::INFINITY,
                    });
                }
                let r = root(t, beta);
                let bound = r / (m + 1.0);
                if base.max_width() >= bound {
                    return Err(Error::WidthBoundViolated {
                        width: base.max_width(),
                        bound,
                    });
                }
                if mu <= beta {
                    integer_interval_above(t, beta, bbox.hi)
                } else {
                    widest_gap(&base, 0.0, r)?
                }
            }
        }
        SupportSpec::Bounded { lo, hi } => {
            if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidIntervals {
                    reason: format!("bounded support [{lo}, {hi}] is invalid"),
                });
            }
            check_base_in_support(&base, lo, hi)?;
            if odd {
                let (plo, phi) = (lo.powi(t as i32), hi.powi(t as i32));
                if beta <= plo || beta >= phi {
                    return Err(Error::TargetOutOfRange {
                        value: beta,
                        lo: plo,
                        hi: phi,
                    });
                }
                let r = root(t, beta);
                let bound = (hi - r).min(r - lo) / (m + 1.0);
                if base.max_width() >= bound {
                    return Err(Error::WidthBoundViolated {
                        width: base.max_width(),
                        bound,
                    });
                }
                if mu > beta {
                    widest_gap(&base, lo, r)?
                } else {
                    widest_gap(&base, r, hi)?
                }
            } else {
                let max_abs = lo.abs().max(hi.abs());
                let attainable_hi = max_abs.powi(t as i32);
                if beta <= 0.0 || beta >= attainable_hi {
                    return Err(Error::TargetOutOfRange {
                        value: beta,
                        lo: 0.0,
                        hi: attainable_hi,
                    });
                }
                let r = root(t, beta);
                let bound = (max_abs - r).min(r) / (m + 1.0);
                if base.max_width() >= bound {
                    return Err(Error::WidthBoundViolated {
                        width: base.max_width(),
                        bound,
                    });
                }
                if mu > beta {
                    widest_gap(&base, lo.max(-r), hi.min(r))?
                } else if hi.abs() >= lo.abs() {
                    widest_gap(&base, r, hi)?
                } else {
                    widest_gap(&base, lo, -r)?
                }
            }
        }
    };

    // Shrink the complement toward its far end if the solved weight
    // degenerates (complement moment exactly on the target).
    let mut interval = complement_interval;
    for _ in 0..40 {
        let h = PiecewiseDensity::uniform(interval);
        let nu = h.moment(t);
        if let Some(alpha) = solve_scale(mu, nu, beta) {
            let construction = MixtureConstruction {
                scale: alpha,
                base: base.clone(),
                complement: h,
                target: TargetFunctional::Moment { t, beta },
            };
            debug_assert!((construction.mixture_moment(t) - beta).abs() < 1e-9);
            debug_assert!(construction.complement.disjoint_from(&construction.base));
            return Ok(construction);
        }
        interval = Interval {
            lo: interval.lo,
            hi: interval.lo + 0.5 * interval.width(),
        };
    }
    Err(Error::NoGapInterval {
        threshold: interval.lo,
    })
}

/// [P, P+1] with P the smallest integer whose t-th power exceeds beta,
/// clear of the bounding box by one.
fn integer_interval_above(t: u32, beta: f64, bbox_hi: f64) -> Interval {
    let mut p = (root(t, beta).floor() + 1.0)
        .max((bbox_hi + 1.0).ceil())
        .max(1.0);
    while p.powi(t as i32) <= beta {
        p += 1.0;
    }
    Interval { lo: p, hi: p + 1.0 }
}

/// [Q-1, Q] with Q the largest negative integer whose t-th power (t odd)
/// is below beta, clear of the bounding box by one.
fn integer_interval_below(t: u32, beta: f64, bbox_lo: f64) -> Interval {
    let mut q = (root(t, beta).ceil() - 1.0)
        .min((bbox_lo - 1.0).floor())
        .min(-1.0);
    while q.powi(t as i32) >= beta {
        q -= 1.0;
    }
    Interval { lo: q - 1.0, hi: q }
}

/// Build a mixture with P[X <= q] = prob matching `scale * base` on the
/// base intervals. The complement splits its mass between one interval
/// below q and one above.
pub fn match_quantile_density(
    base: &PiecewiseDensity,
    q: f64,
    prob: f64,
    support: SupportSpec,
) -> Result<MixtureConstruction> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidParameter {
            reason: format!("quantile probability must lie in (0,1), got {prob}"),
        });
    }
    if !q.is_finite() {
        return Err(Error::QuantileNotInterior { q });
    }
    let base = validated_base(base)?;
    let f_base = base.cdf(q);
    let target = TargetFunctional::Quantile { q, p: prob };

    if f_base == prob {
        // The base already satisfies the constraint; degenerate mixture.
        return Ok(MixtureConstruction {
            scale: 1.0,
            base,
            complement: PiecewiseDensity::empty(),
            target,
        });
    }

    let (below, above): (Interval, Interval) = match support {
        SupportSpec::Real => {
            let bbox = base.bounding_box().expect("non-empty base");
            let n = bbox.lo.abs().max(bbox.hi.abs()).max(q.abs()).ceil() + 1.0;
            (
                Interval {
                    lo: -n - 1.0,
                    hi: -n,
                },
                Interval { lo: n, hi: n + 1.0 },
            )
        }
        SupportSpec::Bounded { lo, hi } => {
            if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidIntervals {
                    reason: format!("bounded support [{lo}, {hi}] is invalid"),
                });
            }
            check_base_in_support(&base, lo, hi)?;
            if q <= lo || q >= hi {
                return Err(Error::QuantileNotInterior { q });
            }
            let m = base.piece_count() as f64;
            let bound = ((q - lo) / (m + 1.0)).min((hi - q) / (m + 1.0));
            if base.max_width() >= bound {
                return Err(Error::WidthBoundViolated {
                    width: base.max_width(),
                    bound,
                });
            }
            (widest_gap(&base, lo, q)?, widest_gap(&base, q, hi)?)
        }
    };

    // Weight small enough that both complement masses stay in [0, 1].
    let mut cap = f64::INFINITY;
    if f_base > 0.0 {
        cap = cap.min(prob / f_base);
    }
    if f_base < 1.0 {
        cap = cap.min((1.0 - prob) / (1.0 - f_base));
    }
    let alpha = 0.5 * cap.min(1.0);
    let w_below = (prob - alpha * f_base) / (1.0 - alpha);
    let mut pieces = Vec::new();
    if w_below > 0.0 {
        pieces.push((below, w_below / below.width()));
    }
    if w_below < 1.0 {
        pieces.push((above, (1.0 - w_below) / above.width()));
    }
    let complement = PiecewiseDensity::new(pieces)?;
    let construction = MixtureConstruction {
        scale: alpha,
        base,
        complement,
        target,
    };
    debug_assert!((construction.mixture_cdf(q) - prob).abs() < 1e-10);
    Ok(construction)
}

/// Build a mixture with variance beta matching `scale * base` on the base
/// intervals (real-line support).
///
/// The complement is a narrow indicator far to the right of the base, so
/// the variance at weight 1/2 overshoots the target while the weight-0
/// endpoint undershoots it; the weight is then found by bisection.
pub fn match_variance_density(base: &PiecewiseDensity, beta: f64) -> Result<MixtureConstruction> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::TargetOutOfRange {
            value: beta,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let base = validated_base(base)?;
    let bbox = base.bounding_box().expect("non-empty base");
    let m_hat = bbox.lo.abs().max(bbox.hi.abs());
    let width = 0.5f64.min((12.0 * beta).sqrt() / 2.0);

    let mu1 = base.mean();
    let mu2 = base.moment(2);
    let var_at = |a: f64, z: f64| -> f64 {
        let c1 = z;
        let c2 = z * z + width * width / 12.0;
        let m1 = a * mu1 + (1.0 - a) * c1;
        let m2 = a * mu2 + (1.0 - a) * c2;
        m2 - m1 * m1
    };

    let mut z = (m_hat + 2.0).ceil().max((m_hat + 2.0 + 2.0 * beta.sqrt()).ceil());
    let mut guard = 0;
    while var_at(0.5, z) <= beta {
        z += 1.0;
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::BisectionFailed);
        }
    }

    // f(0) = width^2/12 - beta < 0, f(1/2) > 0: bisect on [0, 1/2].
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    if var_at(lo, z) - beta >= 0.0 || var_at(hi, z) - beta <= 0.0 {
        return Err(Error::BisectionFailed);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if var_at(mid, z) - beta > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let complement = PiecewiseDensity::uniform(Interval {
        lo: z - 0.5 * width,
        hi: z + 0.5 * width,
    });
    let construction = MixtureConstruction {
        scale: alpha,
        base,
        complement,
        target: TargetFunctional::Variance { beta },
    };
    if (construction.mixture_variance() - beta).abs() > TARGET_TOL {
        return Err(Error::BisectionFailed);
    }
    Ok(construction)
}

/// Quadrature-based audit of a mixture construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureCheckReport {
    pub total_mass: f64,
    /// |total mass - 1|
    pub mass_residual: f64,
    /// sup over the base intervals of |g(x) - scale * base(x)|
    pub restriction_residual: f64,
    /// distance of the mixture's functional from its certified target
    pub target_residual: f64,
    pub mass_tol: f64,
    pub restriction_tol: f64,
    pub target_tol: f64,
    pub pass: bool,
}

/// Recompute mass, restriction equality, and the certified target with
/// adaptive quadrature at absolute tolerance 1e-10.
pub fn numeric_check_mixture(c: &MixtureConstruction) -> MixtureCheckReport {
    let tol = 1e-10;
    let pieces = c.mixture_pieces();
    let eval = |x: f64| c.eval(x);

    let total_mass: f64 = pieces
        .iter()
        .map(|(i, _)| quad(&eval, i.lo, i.hi, tol / pieces.len().max(1) as f64))
        .sum();
    let mass_residual = (total_mass - 1.0).abs();

    let mut restriction_residual = 0.0f64;
    for (interval, _) in c.base.pieces() {
        for step in 0..=100 {
            let x = interval.lo + interval.width() * step as f64 / 100.0;
            let residual = (c.eval(x) - c.scale * c.base.eval(x)).abs();
            restriction_residual = restriction_residual.max(residual);
        }
    }

    let target_residual = match c.target {
        TargetFunctional::Moment { t, beta } => {
            let f = |x: f64| x.powi(t as i32) * c.eval(x);
            let moment: f64 = pieces
                .iter()
                .map(|(i, _)| quad(&f, i.lo, i.hi, tol / pieces.len().max(1) as f64))
                .sum();
            (moment - beta).abs()
        }
        TargetFunctional::Quantile { q, p } => {
            let cdf: f64 = pieces
                .iter()
                .filter(|(i, _)| i.lo < q)
                .map(|(i, _)| quad(&eval, i.lo, i.hi.min(q), tol / pieces.len().max(1) as f64))
                .sum();
            (cdf - p).abs()
        }
        TargetFunctional::Variance { beta } => {
            let f1 = |x: f64| x * c.eval(x);
            let f2 = |x: f64| x * x * c.eval(x);
            let m1: f64 = pieces
                .iter()
                .map(|(i, _)| quad(&f1, i.lo, i.hi, tol / pieces.len().max(1) as f64))
                .sum();
            let m2: f64 = pieces
                .iter()
                .map(|(i, _)| quad(&f2, i.lo, i.hi, tol / pieces.len().max(1) as f64))
                .sum();
            (m2 - m1 * m1 - beta).abs()
        }
    };

    let mass_tol = MASS_TOL;
    let restriction_tol = 1e-10;
    let target_tol = TARGET_TOL;
    let pass = mass_residual < mass_tol
        && restriction_residual < restriction_tol
        && target_residual < target_tol;
    MixtureCheckReport {
        total_mass,
        mass_residual,
        restriction_residual,
        target_residual,
        mass_tol,
        restriction_tol,
        target_tol,
        pass,
    }
}

//! Utilities on the constrained probability simplex
//! `{ p >= 0, sum p = 1, sum w_i p_i = 0 }`: affine projection, feasible
//! point search, and a projected-gradient maximizer of
//! `|sum_i d_i ln p_i|` used to exhibit product-inequality counterexamples.

use rand::Rng;

/// Mass floor keeping log terms finite during optimization.
const MASS_FLOOR: f64 = 1e-9;

/// Euclidean projection onto the affine set {sum p = 1, sum w p = 0}.
/// Returns `None` when the two constraints are numerically parallel.
pub fn project_affine(p: &[f64], w: &[f64]) -> Option<Vec<f64>> {
    let k = p.len() as f64;
    let sw: f64 = w.iter().sum();
    let sww: f64 = w.iter().map(|x| x * x).sum();
    // Gram matrix of the constraint normals [1, w].
    let det = k * sww - sw * sw;
    if det.abs() < 1e-14 * (k * sww).max(1.0) {
        return None;
    }
    let r1: f64 = p.iter().sum::<f64>() - 1.0;
    let r2: f64 = p.iter().zip(w).map(|(pi, wi)| pi * wi).sum();
    // Solve [[k, sw], [sw, sww]] * lambda = (r1, r2).
    let l1 = (sww * r1 - sw * r2) / det;
    let l2 = (k * r2 - sw * r1) / det;
    Some(
        p.iter()
            .zip(w)
            .map(|(pi, wi)| pi - l1 - l2 * wi)
            .collect(),
    )
}

fn clamp_floor(p: &mut [f64], floor: f64) -> bool {
    let mut touched = false;
    for v in p.iter_mut() {
        if *v < floor {
            *v = floor;
            touched = true;
        }
    }
    touched
}

/// Alternating projection between the affine set and the floor box.
/// Produces an interior feasible point, or `None` if the iteration fails
/// to settle (e.g. the hyperplane barely clips the simplex).
pub fn feasible_point<R: Rng>(w: &[f64], rng: &mut R) -> Option<Vec<f64>> {
    let k = w.len();
    for _attempt in 0..20 {
        let mut p: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        let mut ok = false;
        for _ in 0..500 {
            p = project_affine(&p, w)?;
            if !clamp_floor(&mut p, MASS_FLOOR) {
                ok = true;
                break;
            }
        }
        if ok && constraint_residual(&p, w) < 1e-12 {
            return Some(p);
        }
    }
    None
}

/// Random member of the constrained simplex, suitable for sampling family
/// members in soundness checks.
pub fn random_constrained_point<R: Rng>(w: &[f64], rng: &mut R) -> Option<Vec<f64>> {
    feasible_point(w, rng)
}

pub fn constraint_residual(p: &[f64], w: &[f64]) -> f64 {
    let mass: f64 = p.iter().sum();
    let lin: f64 = p.iter().zip(w).map(|(pi, wi)| pi * wi).sum();
    (mass - 1.0).abs().max(lin.abs())
}

pub fn log_violation(p: &[f64], d: &[i64]) -> f64 {
    p.iter()
        .zip(d)
        .filter(|(_, di)| **di != 0)
        .map(|(pi, di)| *di as f64 * pi.ln())
        .sum()
}

/// Projected-gradient search for a feasible point with
/// `|sum d_i ln p_i| > target`. Stops at the first success; `None` after
/// all restarts fail.
pub fn maximize_violation<R: Rng>(
    d: &[i64],
    w: &[f64],
    target: f64,
    restarts: usize,
    rng: &mut R,
) -> Option<Vec<f64>> {
    for _ in 0..restarts {
        let mut p = feasible_point(w, rng)?;
        let mut value = log_violation(&p, d);
        for _ in 0..200 {
            if value.abs() > 10.0 * target {
                break;
            }
            let direction: Vec<f64> = p
                .iter()
                .zip(d)
                .map(|(pi, di)| value.signum() * (*di as f64) / pi)
                .collect();
            let scale = direction.iter().fold(0.0f64, |a, g| a.max(g.abs()));
            if scale == 0.0 {
                break;
            }
            let mut step = 0.1 / scale;
            let mut advanced = false;
            for _ in 0..8 {
                let mut cand: Vec<f64> = p
                    .iter()
                    .zip(&direction)
                    .map(|(pi, gi)| pi + step * gi)
                    .collect();
                clamp_floor(&mut cand, MASS_FLOOR);
                for _ in 0..50 {
                    cand = project_affine(&cand, w)?;
                    if !clamp_floor(&mut cand, MASS_FLOOR) {
                        break;
                    }
                }
                if constraint_residual(&cand, w) < 1e-12 {
                    let cand_value = log_violation(&cand, d);
                    if cand_value.abs() > value.abs() {
                        p = cand;
                        value = cand_value;
                        advanced = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        if value.abs() > target && p.iter().all(|v| *v > 0.0 && *v < 1.0) {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_satisfies_both_constraints() {
        let w = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
        let p = vec![0.5, 0.1, 0.1, 0.1, 0.2];
        let proj = project_affine(&p, &w).unwrap();
        assert!(constraint_residual(&proj, &w) < 1e-12);
    }

    #[test]
    fn feasible_points_are_interior_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
        for _ in 0..50 {
            let p = feasible_point(&w, &mut rng).unwrap();
            assert!(constraint_residual(&p, &w) < 1e-12);
            assert!(p.iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn maximizer_finds_a_violation_when_one_exists() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        // mean-3 family on {1..5}; d = e1 - e5 is not a witness.
        let w = vec![-2.0, -1.0, 0.0, 1.0, 2.0];
        let d = vec![1i64, 0, 0, 0, -1];
        let p = maximize_violation(&d, &w, 1e-6, 50, &mut rng).unwrap();
        assert!(log_violation(&p, &d).abs() > 1e-6);
        assert!(constraint_residual(&p, &w) < 1e-10);
    }
}

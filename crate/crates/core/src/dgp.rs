use rand::Rng;
use rand_distr::{Distribution, Exp1, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Built-in data-generating processes for the simulation harness.
///
/// The panel covers symmetric, skewed-mean-zero, Gaussian, and bounded
/// cases: N(0,1), N(3,4), uniform(0,1), uniform(-1,1), Exponential(1)-1,
/// Laplace(0,1), and a centered lognormal(0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dgp {
    StdNormal,
    /// N(3, 4): mean 3, variance 4.
    NormalThreeFour,
    Uniform01,
    /// uniform(-1, 1)
    UniformSym,
    /// Exponential(1) - 1: mean zero, skewed.
    CenteredExponential,
    Laplace,
    /// lognormal(0,1) shifted by -exp(1/2) to mean zero.
    CenteredLognormal,
}

impl Dgp {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Dgp::StdNormal => rng.sample(StandardNormal),
            Dgp::NormalThreeFour => 3.0 + 2.0 * rng.sample::<f64, _>(StandardNormal),
            Dgp::Uniform01 => rng.gen::<f64>(),
            Dgp::UniformSym => 2.0 * rng.gen::<f64>() - 1.0,
            Dgp::CenteredExponential => rng.sample::<f64, _>(Exp1) - 1.0,
            Dgp::Laplace => {
                let u: f64 = rng.gen::<f64>() - 0.5;
                -u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            Dgp::CenteredLognormal => {
                let ln = LogNormal::new(0.0, 1.0).expect("valid parameters");
                ln.sample(rng) - (0.5f64).exp()
            }
        }
    }

    pub fn sample_vec<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Whether the marginal is symmetric around zero.
    pub fn symmetric_about_zero(&self) -> bool {
        matches!(self, Dgp::StdNormal | Dgp::UniformSym | Dgp::Laplace)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Dgp::StdNormal => "std_normal",
            Dgp::NormalThreeFour => "normal_3_4",
            Dgp::Uniform01 => "uniform_0_1",
            Dgp::UniformSym => "uniform_sym",
            Dgp::CenteredExponential => "centered_exponential",
            Dgp::Laplace => "laplace",
            Dgp::CenteredLognormal => "centered_lognormal",
        }
    }

    pub fn parse(name: &str) -> Result<Dgp> {
        match name {
            "std_normal" => Ok(Dgp::StdNormal),
            "normal_3_4" => Ok(Dgp::NormalThreeFour),
            "uniform_0_1" => Ok(Dgp::Uniform01),
            "uniform_sym" => Ok(Dgp::UniformSym),
            "centered_exponential" => Ok(Dgp::CenteredExponential),
            "laplace" => Ok(Dgp::Laplace),
            "centered_lognormal" => Ok(Dgp::CenteredLognormal),
            other => Err(Error::UnknownDgp { name: other.into() }),
        }
    }

    pub const PANEL: [Dgp; 7] = [
        Dgp::StdNormal,
        Dgp::NormalThreeFour,
        Dgp::Uniform01,
        Dgp::UniformSym,
        Dgp::CenteredExponential,
        Dgp::Laplace,
        Dgp::CenteredLognormal,
    ];
}

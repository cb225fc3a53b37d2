use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A deterministic test statistic: identical input bits must produce
/// identical output bits. Built-ins cover the usual one-sample choices;
/// `Custom` is the extension point for user-supplied pure functions.
#[derive(Clone)]
pub enum TestStatistic {
    Mean,
    AbsMean,
    /// sqrt(n) * mean / sd, with the n-1 sample standard deviation.
    TStat,
    AbsTStat,
    Custom {
        name: String,
        func: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for TestStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestStatistic({})", self.name())
    }
}

fn mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in xs {
        s += v;
    }
    s / xs.len() as f64
}

fn t_stat(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let mut ss = 0.0;
    for v in xs {
        let d = v - m;
        ss += d * d;
    }
    let sd = (ss / (n - 1.0)).sqrt();
    n.sqrt() * m / sd
}

impl TestStatistic {
    pub fn evaluate(&self, xs: &[f64]) -> f64 {
        match self {
            TestStatistic::Mean => mean(xs),
            TestStatistic::AbsMean => mean(xs).abs(),
            TestStatistic::TStat => t_stat(xs),
            TestStatistic::AbsTStat => t_stat(xs).abs(),
            TestStatistic::Custom { func, .. } => func(xs),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            TestStatistic::Mean => "mean",
            TestStatistic::AbsMean => "abs_mean",
            TestStatistic::TStat => "t_stat",
            TestStatistic::AbsTStat => "abs_t_stat",
            TestStatistic::Custom { name, .. } => name,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        func: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> TestStatistic {
        TestStatistic::Custom {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    /// Largest absolute coordinate; sensitive to rotations that the mean
    /// ignores.
    pub fn max_abs() -> TestStatistic {
        TestStatistic::custom("max_abs", |xs| {
            xs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
        })
    }

    /// Resolve a statistic by name. Covers the built-ins plus `max_abs`.
    pub fn parse(name: &str) -> Result<TestStatistic> {
        match name {
            "mean" => Ok(TestStatistic::Mean),
            "abs_mean" => Ok(TestStatistic::AbsMean),
            "t_stat" => Ok(TestStatistic::TStat),
            "abs_t_stat" => Ok(TestStatistic::AbsTStat),
            "max_abs" => Ok(TestStatistic::max_abs()),
            other => Err(Error::UnknownStatistic { name: other.into() }),
        }
    }
}

impl Serialize for TestStatistic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for TestStatistic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        TestStatistic::parse(&name).map_err(D::Error::custom)
    }
}

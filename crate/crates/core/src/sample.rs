use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered vector of real observations.
///
/// Validated on construction: at least one value, every value finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampleRepr", into = "SampleRepr")]
pub struct Sample {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SampleRepr {
    values: Vec<f64>,
}

impl TryFrom<SampleRepr> for Sample {
    type Error = Error;
    fn try_from(repr: SampleRepr) -> Result<Self> {
        Sample::new(repr.values)
    }
}

impl From<Sample> for SampleRepr {
    fn from(s: Sample) -> Self {
        SampleRepr { values: s.values }
    }
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { index, value: *v });
            }
        }
        Ok(Sample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Parse a sample from CSV text with one value per line.
    /// Blank lines are skipped.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidParameter {
                reason: format!("sample read error on line {}: {e}", lineno + 1),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let v: f64 = trimmed.parse().map_err(|_| Error::InvalidParameter {
                reason: format!("line {} is not a number: {trimmed:?}", lineno + 1),
            })?;
            values.push(v);
        }
        Sample::new(values)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| Error::InvalidParameter {
            reason: format!("cannot open {}: {e}", path.as_ref().display()),
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(Sample::new(vec![]), Err(Error::EmptySample)));
        assert!(matches!(
            Sample::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 1, .. })
        ));
        assert!(matches!(
            Sample::new(vec![f64::INFINITY]),
            Err(Error::NonFiniteValue { index: 0, .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let s = Sample::new(vec![1.5, -2.0, 0.25]).unwrap();
        let text = s.to_csv();
        let back = Sample::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn csv_skips_blank_lines() {
        let s = Sample::from_csv_reader("1.0\n\n2.0\n".as_bytes()).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Scalar};

/// Node-level metric that produced a [`MetricVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "ac")]
    AverageControllability,
    #[serde(rename = "deg")]
    Degree,
    #[serde(rename = "clo")]
    Closeness,
    #[serde(rename = "bet")]
    Betweenness,
    #[serde(rename = "eig")]
    Eigenvector,
}

impl MetricKind {
    /// Raw NCT-EFA column order.
    pub const NCT_EFA: [MetricKind; 4] = [
        MetricKind::AverageControllability,
        MetricKind::Closeness,
        MetricKind::Betweenness,
        MetricKind::Eigenvector,
    ];

    /// Default block order for concatenated rank encoding.
    pub const CONCAT_DEFAULT: [MetricKind; 5] = [
        MetricKind::AverageControllability,
        MetricKind::Degree,
        MetricKind::Closeness,
        MetricKind::Betweenness,
        MetricKind::Eigenvector,
    ];

    pub fn code(self) -> &'static str {
        match self {
            MetricKind::AverageControllability => "ac",
            MetricKind::Degree => "deg",
            MetricKind::Closeness => "clo",
            MetricKind::Betweenness => "bet",
            MetricKind::Eigenvector => "eig",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "ac" => MetricKind::AverageControllability,
            "deg" => MetricKind::Degree,
            "clo" => MetricKind::Closeness,
            "bet" => MetricKind::Betweenness,
            "eig" => MetricKind::Eigenvector,
            other => return Err(Error::Contract(format!("unknown metric {other:?} (expected ac, deg, clo, bet or eig)"))),
        })
    }
}

/// Per-node values of one metric; all entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector<T: Scalar> {
    kind: MetricKind,
    values: Vec<T>,
}

impl<T: Scalar> MetricVector<T> {
    pub fn new(kind: MetricKind, values: Vec<T>) -> Result<Self> {
        if let Some(v) = values.iter().position(|&x| !is_finite(x)) {
            return Err(Error::Numeric(format!("{kind} value of node {v} is not finite")));
        }
        Ok(MetricVector { kind, values })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = MetricVector::new(MetricKind::Closeness, vec![1.0, f64::NAN]).unwrap_err();
        assert!(err.to_string().contains("node 1"));
    }

    #[test]
    fn codes_round_trip() {
        for k in MetricKind::CONCAT_DEFAULT {
            assert_eq!(k.code().parse::<MetricKind>().unwrap(), k);
        }
        assert!("pagerank".parse::<MetricKind>().is_err());
    }
}

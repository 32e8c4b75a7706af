//! Token-to-token distances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// ‖u − v‖₂.
    #[default]
    Euclidean,
    /// 1 − cos(u, v). A zero vector is at distance 1 from everything else.
    Cosine,
}

impl Metric {
    #[inline]
    pub fn distance(self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => squared_euclidean(u, v).sqrt(),
            Metric::Cosine => {
                let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
                for (a, b) in u.iter().zip(v) {
                    dot += a * b;
                    nu += a * a;
                    nv += b * b;
                }
                if nu == 0.0 || nv == 0.0 {
                    return if nu == nv { 0.0 } else { 1.0 };
                }
                (1.0 - dot / (nu.sqrt() * nv.sqrt())).max(0.0)
            }
        }
    }
}

#[inline]
pub fn squared_euclidean(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| {
            let t = a - b;
            t * t
        })
        .sum()
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::Invalid(format!("unknown metric `{other}`"))),
        }
    }
}

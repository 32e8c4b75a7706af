//! Gaussian-mixture codebooks with controlled density contrast.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::rng;

/// One isotropic Gaussian blob of `count` tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub center: Vec<f64>,
    pub scale: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub components: Vec<Component>,
    pub seed: u64,
    pub dim: usize,
}

impl SyntheticSpec {
    pub fn n_tokens(&self) -> usize {
        self.components.iter().map(|c| c.count).sum()
    }

    /// Row range occupied by each component in the generated codebook.
    pub fn row_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.components
            .iter()
            .map(|c| {
                let r = start..start + c.count;
                start = r.end;
                r
            })
            .collect()
    }

    /// The non-uniform mixture used by the evaluation suite: nine repeats of
    /// a dense blob (100 tokens, scale 0.01) next to a sparse one (20
    /// tokens, scale 1.0), 1080 tokens in all. Component `i` is centred
    /// `20·(1 + i / dim)` along axis `i mod dim`.
    pub fn standard(dim: usize, seed: u64) -> Self {
        let components = (0..18)
            .map(|i| {
                let (scale, count) = if i % 2 == 0 { (0.01, 100) } else { (1.0, 20) };
                let mut center = vec![0.0; dim];
                center[i % dim] += 20.0 * (1 + i / dim) as f64;
                Component {
                    center,
                    scale,
                    count,
                }
            })
            .collect();
        Self {
            components,
            seed,
            dim,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Synthetic("dim must be at least 1".into()));
        }
        if self.n_tokens() == 0 {
            return Err(Error::Synthetic("total token count is zero".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if !(c.scale > 0.0 && c.scale.is_finite()) {
                return Err(Error::Synthetic(format!(
                    "component {i}: scale must be positive, got {}",
                    c.scale
                )));
            }
            if c.center.len() != self.dim {
                return Err(Error::Synthetic(format!(
                    "component {i}: center has {} coordinates, dim is {}",
                    c.center.len(),
                    self.dim
                )));
            }
            if c.center.iter().any(|v| !v.is_finite()) {
                return Err(Error::Synthetic(format!("component {i}: non-finite center")));
            }
        }
        Ok(())
    }
}

/// Draws `count` points from N(center, scale²·I) per component, in
/// component order. A pure function of the spec (including its seed).
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Codebook> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let mut data = Vec::with_capacity(spec.n_tokens() * spec.dim);
    for c in &spec.components {
        for _ in 0..c.count {
            data.extend(c.center.iter().map(|&mu| {
                let z: f64 = StandardNormal.sample(&mut rng);
                mu + c.scale * z
            }));
        }
    }
    Codebook::new(data, spec.n_tokens(), spec.dim)
}

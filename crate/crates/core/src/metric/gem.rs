use crate::error::{Error, Result};

/// `H × W × C` feature map stored channel-last.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width * channels {
            return Err(Error::Dimension {
                expected: height * width * channels,
                found: data.len(),
            });
        }
        if height * width == 0 || channels == 0 {
            return Err(Error::Argument("feature map must be non-empty".into()));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn spatial(&self) -> usize {
        self.height * self.width
    }

    pub fn channel(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(c).step_by(self.channels).copied()
    }
}

/// Generalized-mean pooling: per channel `(mean vᵖ)^(1/p)` over spatial
/// positions, after clamping negative activations to zero.
///
/// Evaluated as `m · (mean (v/m)ᵖ)^(1/p)` with `m` the channel maximum, so
/// large `p` does not overflow.
pub fn gem_pool(features: &FeatureMap, p: f64) -> Result<Vec<f64>> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Argument(format!("GeM exponent must be finite and >= 1, got {p}")));
    }
    let n = features.spatial() as f64;
    Ok((0..features.channels)
        .map(|c| {
            let max = features.channel(c).fold(0.0f64, |m, v| m.max(v));
            if max == 0.0 {
                return 0.0;
            }
            let mean = features.channel(c).map(|v| (v.max(0.0) / max).powf(p)).sum::<f64>() / n;
            max * mean.powf(1.0 / p)
        })
        .collect())
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::batch::EmbeddingBatch;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    /// Base margin scaled by the similarity gap.
    pub alpha_base: f64,
    /// Margin of the fixed-margin triplet baseline.
    pub fixed_margin: f64,
    /// Negative-term margin of the contrastive baseline.
    pub gcl_margin: f64,
}

impl Default for LossParams {
    fn default() -> Self {
        Self {
            alpha_base: 0.6,
            fixed_margin: 0.6,
            gcl_margin: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    GeneralizedTriplet,
    VanillaTriplet,
    GeneralizedContrastive,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [
        LossKind::GeneralizedTriplet,
        LossKind::VanillaTriplet,
        LossKind::GeneralizedContrastive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::GeneralizedTriplet => "generalized_triplet",
            LossKind::VanillaTriplet => "vanilla_triplet",
            LossKind::GeneralizedContrastive => "generalized_contrastive",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown loss {s:?}")))
    }
}

/// Anchor / relative-positive / relative-negative indices into a batch with
/// the anchor similarities that ordered them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripletSpec {
    pub anchor: usize,
    pub rel_pos: usize,
    pub rel_neg: usize,
    pub sim_arp: f64,
    pub sim_arn: f64,
}

impl TripletSpec {
    pub fn validate(&self, batch_len: usize) -> Result<()> {
        let (a, p, n) = (self.anchor, self.rel_pos, self.rel_neg);
        if a == p || a == n || p == n {
            return Err(Error::Contract(format!("triplet indices not distinct: ({a}, {p}, {n})")));
        }
        if a.max(p).max(n) >= batch_len {
            return Err(Error::Argument(format!("triplet index out of range for batch of {batch_len}")));
        }
        if !(self.sim_arp > self.sim_arn) {
            return Err(Error::Contract(format!(
                "sim_arp ({}) must exceed sim_arn ({})",
                self.sim_arp, self.sim_arn
            )));
        }
        Ok(())
    }
}

/// Euclidean distance.
pub fn pairwise_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!("dimension mismatch: {} vs {}", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// `∂‖a − b‖/∂a`; zero at `a = b`.
fn unit_diff(a: &[f64], b: &[f64], dist: f64) -> Vec<f64> {
    if dist == 0.0 {
        return vec![0.0; a.len()];
    }
    a.iter().zip(b).map(|(x, y)| (x - y) / dist).collect()
}

/// Pre-hinge value `D(a,rp) − D(a,rn) + α·(sim_arp − sim_arn)`.
pub(crate) fn generalized_triplet_margin(spec: &TripletSpec, batch: &EmbeddingBatch, params: &LossParams) -> Result<f64> {
    spec.validate(batch.len())?;
    let a = batch.row(spec.anchor);
    let dp = pairwise_distance(a, batch.row(spec.rel_pos))?;
    let dn = pairwise_distance(a, batch.row(spec.rel_neg))?;
    Ok(dp - dn + params.alpha_base * (spec.sim_arp - spec.sim_arn))
}

/// `max(D(a,rp) − D(a,rn) + α_base·(sim_arp − sim_arn), 0)`.
pub fn generalized_triplet_loss(spec: &TripletSpec, batch: &EmbeddingBatch, params: &LossParams) -> Result<f64> {
    Ok(generalized_triplet_margin(spec, batch, params)?.max(0.0))
}

/// Gradient of [`generalized_triplet_loss`] with respect to every batch
/// entry, row-major like the batch. Zero when the hinge is inactive.
pub fn generalized_triplet_loss_grad(
    spec: &TripletSpec,
    batch: &EmbeddingBatch,
    params: &LossParams,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; batch.data().len()];
    if generalized_triplet_margin(spec, batch, params)? <= 0.0 {
        return Ok(grad);
    }
    let d = batch.dim();
    let (a, p, n) = (batch.row(spec.anchor), batch.row(spec.rel_pos), batch.row(spec.rel_neg));
    let up = unit_diff(a, p, pairwise_distance(a, p)?);
    let un = unit_diff(a, n, pairwise_distance(a, n)?);
    for k in 0..d {
        grad[spec.anchor * d + k] += up[k] - un[k];
        grad[spec.rel_pos * d + k] -= up[k];
        grad[spec.rel_neg * d + k] += un[k];
    }
    Ok(grad)
}

/// `max(D(a,p) − D(a,n) + margin, 0)`.
pub fn vanilla_triplet_loss(anchor: &[f64], pos: &[f64], neg: &[f64], margin: f64) -> Result<f64> {
    Ok((pairwise_distance(anchor, pos)? - pairwise_distance(anchor, neg)? + margin).max(0.0))
}

/// Gradients `(∂a, ∂p, ∂n)` of [`vanilla_triplet_loss`].
pub fn vanilla_triplet_loss_grad(
    anchor: &[f64],
    pos: &[f64],
    neg: &[f64],
    margin: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let dp = pairwise_distance(anchor, pos)?;
    let dn = pairwise_distance(anchor, neg)?;
    let d = anchor.len();
    if dp - dn + margin <= 0.0 {
        return Ok((vec![0.0; d], vec![0.0; d], vec![0.0; d]));
    }
    let up = unit_diff(anchor, pos, dp);
    let un = unit_diff(anchor, neg, dn);
    let ga = up.iter().zip(&un).map(|(x, y)| x - y).collect();
    let gp = up.iter().map(|x| -x).collect();
    Ok((ga, gp, un))
}

/// `sim·D²/2 + (1 − sim)·max(0, m − D)²/2`.
pub fn generalized_contrastive_loss(a: &[f64], b: &[f64], sim: f64, params: &LossParams) -> Result<f64> {
    let d = pairwise_distance(a, b)?;
    let hinge = (params.gcl_margin - d).max(0.0);
    Ok(0.5 * sim * d * d + 0.5 * (1.0 - sim) * hinge * hinge)
}

/// Gradients `(∂a, ∂b)` of [`generalized_contrastive_loss`].
pub fn generalized_contrastive_loss_grad(
    a: &[f64],
    b: &[f64],
    sim: f64,
    params: &LossParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = pairwise_distance(a, b)?;
    let hinge = (params.gcl_margin - d).max(0.0);
    // dL/dD = sim·D − (1 − sim)·hinge
    let dl_dd = sim * d - (1.0 - sim) * hinge;
    let u = unit_diff(a, b, d);
    let ga: Vec<f64> = u.iter().map(|x| dl_dd * x).collect();
    let gb = ga.iter().map(|x| -x).collect();
    Ok((ga, gb))
}

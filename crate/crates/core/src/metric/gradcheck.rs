use crate::error::Result;

use super::batch::EmbeddingBatch;
use super::loss::{
    generalized_contrastive_loss, generalized_contrastive_loss_grad, generalized_triplet_loss,
    generalized_triplet_loss_grad, generalized_triplet_margin, pairwise_distance, vanilla_triplet_loss,
    vanilla_triplet_loss_grad, LossKind, LossParams, TripletSpec,
};

/// Gradient magnitudes below this are compared absolutely.
const REL_ERROR_FLOOR: f64 = 1e-6;

/// A scalar objective of a whole embedding batch with an analytic gradient.
pub trait Differentiable {
    fn value(&self, batch: &EmbeddingBatch) -> Result<f64>;

    /// Row-major gradient, same layout as the batch data.
    fn gradient(&self, batch: &EmbeddingBatch) -> Result<Vec<f64>>;

    /// Distance of the evaluation point from the nearest non-differentiable
    /// kink, in the objective's pre-hinge units. `None` if smooth.
    fn kink_distance(&self, _batch: &EmbeddingBatch) -> Result<Option<f64>> {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GradCheck {
    Checked { max_rel_error: f64 },
    Skipped { reason: String },
}

impl GradCheck {
    pub fn max_rel_error(&self) -> Option<f64> {
        match self {
            GradCheck::Checked { max_rel_error } => Some(*max_rel_error),
            GradCheck::Skipped { .. } => None,
        }
    }
}

/// Compares the analytic gradient with central differences of step `eps`.
///
/// The error per coordinate is `|fd − analytic| / max(|fd|, |analytic|, 1e-6)`;
/// the maximum over coordinates is returned. Points within `10·eps` of a
/// hinge kink are skipped.
pub fn finite_difference_check(f: &impl Differentiable, batch: &EmbeddingBatch, eps: f64) -> Result<GradCheck> {
    if let Some(dist) = f.kink_distance(batch)? {
        if dist <= 10.0 * eps {
            return Ok(GradCheck::Skipped {
                reason: format!("evaluation point is {dist:.3e} from a hinge kink (limit {:.3e})", 10.0 * eps),
            });
        }
    }
    let analytic = f.gradient(batch)?;
    let mut x = batch.data().to_vec();
    let mut worst = 0.0f64;
    for k in 0..x.len() {
        let orig = x[k];
        x[k] = orig + eps;
        let plus = f.value(&batch.with_data(x.clone())?)?;
        x[k] = orig - eps;
        let minus = f.value(&batch.with_data(x.clone())?)?;
        x[k] = orig;
        let fd = (plus - minus) / (2.0 * eps);
        let scale = fd.abs().max(analytic[k].abs()).max(REL_ERROR_FLOOR);
        worst = worst.max((fd - analytic[k]).abs() / scale);
    }
    Ok(GradCheck::Checked { max_rel_error: worst })
}

/// Sum of one loss over a list of triplets. The contrastive loss is applied
/// to the `(anchor, rel_pos)` and `(anchor, rel_neg)` pairs with their
/// similarities.
#[derive(Debug, Clone)]
pub struct TripletObjective {
    pub kind: LossKind,
    pub triplets: Vec<TripletSpec>,
    pub params: LossParams,
}

impl TripletObjective {
    fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.triplets
            .iter()
            .flat_map(|t| [(t.anchor, t.rel_pos, t.sim_arp), (t.anchor, t.rel_neg, t.sim_arn)])
    }
}

impl Differentiable for TripletObjective {
    fn value(&self, batch: &EmbeddingBatch) -> Result<f64> {
        let mut total = 0.0;
        match self.kind {
            LossKind::GeneralizedTriplet => {
                for t in &self.triplets {
                    total += generalized_triplet_loss(t, batch, &self.params)?;
                }
            }
            LossKind::VanillaTriplet => {
                for t in &self.triplets {
                    let row = |i| batch.row(i);
                    total += vanilla_triplet_loss(row(t.anchor), row(t.rel_pos), row(t.rel_neg), self.params.fixed_margin)?;
                }
            }
            LossKind::GeneralizedContrastive => {
                for (a, b, s) in self.pairs() {
                    total += generalized_contrastive_loss(batch.row(a), batch.row(b), s, &self.params)?;
                }
            }
        }
        Ok(total)
    }

    fn gradient(&self, batch: &EmbeddingBatch) -> Result<Vec<f64>> {
        let d = batch.dim();
        let mut grad = vec![0.0; batch.data().len()];
        let mut add = |row: usize, g: &[f64]| {
            for (k, v) in g.iter().enumerate() {
                grad[row * d + k] += v;
            }
        };
        match self.kind {
            LossKind::GeneralizedTriplet => {
                for t in &self.triplets {
                    let g = generalized_triplet_loss_grad(t, batch, &self.params)?;
                    for row in [t.anchor, t.rel_pos, t.rel_neg] {
                        add(row, &g[row * d..(row + 1) * d]);
                    }
                }
            }
            LossKind::VanillaTriplet => {
                for t in &self.triplets {
                    let (ga, gp, gn) = vanilla_triplet_loss_grad(
                        batch.row(t.anchor),
                        batch.row(t.rel_pos),
                        batch.row(t.rel_neg),
                        self.params.fixed_margin,
                    )?;
                    add(t.anchor, &ga);
                    add(t.rel_pos, &gp);
                    add(t.rel_neg, &gn);
                }
            }
            LossKind::GeneralizedContrastive => {
                for (a, b, s) in self.pairs() {
                    let (ga, gb) = generalized_contrastive_loss_grad(batch.row(a), batch.row(b), s, &self.params)?;
                    add(a, &ga);
                    add(b, &gb);
                }
            }
        }
        Ok(grad)
    }

    fn kink_distance(&self, batch: &EmbeddingBatch) -> Result<Option<f64>> {
        let mut nearest = f64::INFINITY;
        match self.kind {
            LossKind::GeneralizedTriplet => {
                for t in &self.triplets {
                    nearest = nearest.min(generalized_triplet_margin(t, batch, &self.params)?.abs());
                }
            }
            LossKind::VanillaTriplet => {
                for t in &self.triplets {
                    let a = batch.row(t.anchor);
                    let pre = pairwise_distance(a, batch.row(t.rel_pos))? - pairwise_distance(a, batch.row(t.rel_neg))?
                        + self.params.fixed_margin;
                    nearest = nearest.min(pre.abs());
                }
            }
            LossKind::GeneralizedContrastive => {
                for (a, b, s) in self.pairs() {
                    if s < 1.0 {
                        let dist = pairwise_distance(batch.row(a), batch.row(b))?;
                        nearest = nearest.min((self.params.gcl_margin - dist).abs());
                    }
                }
            }
        }
        Ok(nearest.is_finite().then_some(nearest))
    }
}

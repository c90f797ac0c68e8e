//! Supervision math: pair distances, triplet and contrastive losses with
//! analytic gradients, relative-triplet mining, GeM pooling and a
//! finite-difference gradient checker.

mod batch;
mod gem;
mod gradcheck;
mod loss;
mod mining;

pub use batch::EmbeddingBatch;
pub use gem::{gem_pool, FeatureMap};
pub use gradcheck::{finite_difference_check, Differentiable, GradCheck, TripletObjective};
pub use loss::{
    generalized_contrastive_loss, generalized_contrastive_loss_grad, generalized_triplet_loss,
    generalized_triplet_loss_grad, pairwise_distance, vanilla_triplet_loss, vanilla_triplet_loss_grad,
    LossKind, LossParams, TripletSpec,
};
pub use mining::{mine_relative_triplets, PairSimilarity, DEFAULT_MIN_GAP};

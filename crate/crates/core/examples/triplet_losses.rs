//! Relative triplets mined from graded labels along a trajectory, the three
//! losses over them, and a finite-difference check of each gradient. Ends
//! with GeM pooling of a feature map into a global descriptor.
//!
//! Run with `cargo run --release --example triplet_losses`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crossvpr::metric::{
    finite_difference_check, gem_pool, mine_relative_triplets, Differentiable, EmbeddingBatch, FeatureMap, LossKind,
    LossParams, TripletObjective, DEFAULT_MIN_GAP,
};
use crossvpr::simlabel::{Labeler, SectorSpec, SimilarityParams};
use crossvpr::Pose;

fn main() -> crossvpr::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let poses: Vec<Pose> = (0..8).map(|i| Pose::planar(2.0 * i as f64, 0.0, 0.0, format!("00/{i:06}"))).collect();
    let rows: Vec<Vec<f64>> = (0..poses.len()).map(|_| (0..16).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let batch = EmbeddingBatch::from_rows(&rows)?;

    let labeler = Labeler::new(SectorSpec::default(), SimilarityParams::default())?;
    let sims: Vec<Vec<f64>> = poses
        .iter()
        .map(|a| poses.iter().map(|b| labeler.similarity(crossvpr::simlabel::LabelMethod::PointsAvg, a, b)).collect())
        .collect::<crossvpr::Result<_>>()?;
    let triplets = mine_relative_triplets(&batch, &|i: usize, j: usize| sims[i][j], DEFAULT_MIN_GAP);
    println!("{} poses, {} mined triplets", poses.len(), triplets.len());

    for kind in LossKind::ALL {
        let objective = TripletObjective {
            kind,
            triplets: triplets.clone(),
            params: LossParams::default(),
        };
        let value = objective.value(&batch)? / triplets.len() as f64;
        let check = finite_difference_check(&objective, &batch, 1e-6)?;
        let err = check.max_rel_error().map_or("skipped".to_string(), |e| format!("{e:.2e}"));
        println!("{:<24} mean loss {value:.4}   gradient rel. error {err}", kind.as_str());
    }

    let (h, w, c) = (4, 6, 8);
    let data = (0..h * w * c).map(|_| rng.random_range(0.0..2.0)).collect();
    let features = FeatureMap::new(h, w, c, data)?;
    for p in [1.0, 3.0, 50.0] {
        let pooled = gem_pool(&features, p)?;
        println!("GeM p={p:<4} first channels {:?}", pooled[..3].iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    Ok(())
}

//! Phase-1 versus fused recall on the seeded synthetic loop.
//!
//! Run with `cargo run --release --example synthetic_eval [seed]`.

use crossvpr::eval::{evaluate, generate_synthetic_descriptors, EvalParams, SyntheticScenario};
use crossvpr::kitti::build_ground_truth;
use crossvpr::retrieval::{retrieve_batch, search_batch, RerankParams, SearchIndex};

fn main() -> crossvpr::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let scenario = SyntheticScenario { seed, ..Default::default() };
    let syn = generate_synthetic_descriptors(&scenario)?;
    let params = EvalParams::default();
    let truth = build_ground_truth(&syn.poses, &syn.poses, params.t);
    let ids = syn.rgb.ids().to_vec();

    let range = SearchIndex::new(syn.range.clone());
    let bev = SearchIndex::new(syn.lidar_bev.clone());
    let phase1 = search_batch(&range, &syn.rgb, range.len())?;
    let fused = retrieve_batch(&syn.rgb, &syn.camera_bev, &range, &bev, &RerankParams::default())?;

    let db = syn.range.len();
    let none = serde_json::json!({});
    for report in [
        evaluate("phase1", "syn", &ids, &phase1, &truth, db, &params, none.clone())?,
        evaluate("fused", "syn", &ids, &fused, &truth, db, &params, none)?,
    ] {
        println!(
            "{:<8} R@1 {:.3}  R@5 {:.3}  R@1% {:.3}  ({} queries)",
            report.method, report.r_at_1, report.r_at_5, report.r_at_1pct, report.query_count
        );
    }
    Ok(())
}

//! Two-phase retrieval: image-to-range search, then rank fusion with BEV
//! similarity inside the top k. Prints a three-candidate worked example and
//! then fused rankings for a small random database.
//!
//! Run with `cargo run --release --example rerank_pipeline`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crossvpr::retrieval::{rerank, search, write_rankings_csv, RerankParams, SearchIndex};
use crossvpr::{retrieve_full, DescriptorSet, Modality};

fn set(modality: Modality, ids: &[&str], dim: usize, data: Vec<f32>) -> crossvpr::Result<DescriptorSet> {
    DescriptorSet::new(modality, dim, ids.iter().map(|s| s.to_string()).collect(), data)
}

fn main() -> crossvpr::Result<()> {
    // c1 is the best range match and the worst BEV match
    let ids = ["c1", "c2", "c3"];
    let range = SearchIndex::new(set(Modality::Range, &ids, 2, vec![1.0, 0.0, 0.8, 0.6, 0.6, 0.8])?);
    let bev = SearchIndex::new(set(Modality::LidarBev, &ids, 2, vec![0.2, 1.0, 1.0, 0.0, 1.0, 0.5])?);
    let rgb = set(Modality::Rgb, &["q"], 2, vec![1.0, 0.0])?.descriptor(0);
    let cam = set(Modality::CameraBev, &["q"], 2, vec![1.0, 0.0])?.descriptor(0);
    let phase1 = search(&range, &rgb, 3)?;
    let fused = rerank(&phase1, &cam, &bev, &RerankParams::default())?;
    println!("phase 1 {:?}", phase1.ids().collect::<Vec<_>>());
    println!("fused   {:?}", fused.ids().collect::<Vec<_>>());
    for e in &fused.entries {
        println!("  {} r1={} r2={:?} fused={:?}", e.id, e.r1, e.r2, e.fused);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let db_ids: Vec<String> = (0..200).map(|i| format!("00/{i:06}")).collect();
    let db_refs: Vec<&str> = db_ids.iter().map(String::as_str).collect();
    let mut random = |m, ids: &[&str]| set(m, ids, 32, (0..ids.len() * 32).map(|_| rng.random_range(-1.0..1.0)).collect());
    let range = SearchIndex::new(random(Modality::Range, &db_refs)?);
    let bev = SearchIndex::new(random(Modality::LidarBev, &db_refs)?);
    let rgb = random(Modality::Rgb, &["00/000010", "00/000020"])?;
    let cam = random(Modality::CameraBev, &["00/000010", "00/000020"])?;
    let params = RerankParams {
        k: 20,
        ..Default::default()
    };
    let mut rankings = Vec::new();
    for i in 0..rgb.len() {
        rankings.push(retrieve_full(&rgb.descriptor(i), &cam.descriptor(i), &range, &bev, &params)?);
    }
    println!("\ntop 3 of each fused ranking over {} candidates:", range.len());
    write_rankings_csv(
        std::io::stdout(),
        rgb.ids().iter().map(String::as_str).zip(&rankings),
        Some(3),
    )?;
    Ok(())
}

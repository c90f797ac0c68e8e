//! Ablation grid over fusion mode and BEV weight on the synthetic loop.
//!
//! Run with `cargo run --release --example ablation`.

use crossvpr::eval::{generate_synthetic_descriptors, run_ablation, AblationConfig, AblationData, SyntheticScenario};

fn main() -> crossvpr::Result<()> {
    let syn = generate_synthetic_descriptors(&SyntheticScenario::default())?;
    let mut config = AblationConfig {
        sequence: "syn".into(),
        ..Default::default()
    };
    config.set_axis("fusion", "none,rerank,concat")?;
    config.set_axis("w_bev", "0.25,0.5,0.75")?;
    config.set_axis("k", "20,60")?;
    let result = run_ablation(
        &config,
        &AblationData {
            rgb: syn.rgb,
            range: syn.range,
            camera_bev: Some(syn.camera_bev),
            lidar_bev: Some(syn.lidar_bev),
            poses: syn.poses,
            clouds: None,
        },
    )?;
    print!("{}", result.table());
    Ok(())
}

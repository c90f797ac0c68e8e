//! Descriptor files: write a set, read it back, and show the alignment
//! check that guards the paired query modalities.
//!
//! Run with `cargo run --release --example descriptor_io`.

use crossvpr::retrieval::ensure_aligned;
use crossvpr::{load_descriptor_set, save_descriptor_set, DescriptorSet, Modality, DESCRIPTOR_DIM};

fn main() -> crossvpr::Result<()> {
    let dir = std::env::temp_dir().join(format!("crossvpr-descriptor-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| crossvpr::Error::io(&dir, e))?;

    let ids: Vec<String> = (0..4).map(|i| format!("00/{i:06}")).collect();
    let data: Vec<f32> = (0..ids.len() * DESCRIPTOR_DIM).map(|i| ((i % 17) as f32) - 8.0).collect();
    let rgb = DescriptorSet::new(Modality::Rgb, DESCRIPTOR_DIM, ids.clone(), data.clone())?;
    let path = dir.join("rgb.rbdesc");
    save_descriptor_set(&rgb, &path)?;
    let bytes = std::fs::metadata(&path).map_err(|e| crossvpr::Error::io(&path, e))?.len();
    let back = load_descriptor_set(&path)?;
    println!("{} descriptors of dim {} in {bytes} bytes", back.len(), back.dim());
    println!("round trip exact: {}", back == rgb);
    println!("row norms: {:?}", (0..back.len()).map(|i| crossvpr::descriptor::l2_norm(back.row(i))).collect::<Vec<_>>());

    let mut shuffled = ids;
    shuffled.swap(1, 2);
    let camera_bev = DescriptorSet::new(Modality::CameraBev, DESCRIPTOR_DIM, shuffled, data)?;
    match ensure_aligned(&rgb, &camera_bev) {
        Ok(()) => println!("aligned"),
        Err(e) => println!("rejected: {e}"),
    }
    std::fs::remove_dir_all(&dir).map_err(|e| crossvpr::Error::io(&dir, e))?;
    Ok(())
}

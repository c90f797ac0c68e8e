//! Graded similarity labels between a reference pose and neighbours at
//! growing offsets, for every pose-based labeling method.
//!
//! Run with `cargo run --release --example similarity_labels`.

use crossvpr::simlabel::{LabelMethod, Labeler, SectorSpec, SimilarityParams};
use crossvpr::Pose;

fn main() -> crossvpr::Result<()> {
    let labeler = Labeler::new(SectorSpec::default(), SimilarityParams::default())?;
    let methods = [
        LabelMethod::PointsAvg,
        LabelMethod::AreaOverlap,
        LabelMethod::ExpNegDistance,
        LabelMethod::BinaryPoseHeading,
    ];
    let reference = Pose::planar(0.0, 0.0, 0.0, "ref");

    print!("{:<22}", "offset");
    for m in methods {
        print!("{:>20}", m.as_str());
    }
    println!();
    let offsets = [
        ("same pose", 0.0, 0.0, 0.0),
        ("2 m ahead", 2.0, 0.0, 0.0),
        ("5 m ahead", 5.0, 0.0, 0.0),
        ("5 m sideways", 0.0, 5.0, 0.0),
        ("turned 30 deg", 0.0, 0.0, 30.0),
        ("turned 90 deg", 0.0, 0.0, 90.0),
        ("10 m ahead", 10.0, 0.0, 0.0),
        ("reverse direction", 0.0, 0.0, 180.0),
        ("30 m away", 30.0, 0.0, 0.0),
    ];
    for (name, dx, dy, deg) in offsets {
        let other = Pose::planar(dx, dy, f64::to_radians(deg), "other");
        print!("{name:<22}");
        for m in methods {
            print!("{:>20.3}", labeler.similarity(m, &reference, &other)?);
        }
        println!();
    }
    Ok(())
}

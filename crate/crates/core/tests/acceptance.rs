//! Acceptance suite: one line per criterion, each with an independent
//! oracle and a runtime budget. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crossvpr::cloud::{Frame, PointCloud};
use crossvpr::descriptor::{Descriptor, DescriptorSet, Modality};
use crossvpr::eval::{
    generate_synthetic_descriptors, percent_cutoff, recall_at_n, recall_at_percent, SyntheticScenario,
};
use crossvpr::geometry::{backproject_depth, rasterize_bev, remove_ground, BevGrid, CameraModel, GroundParams};
use crossvpr::kitti::build_ground_truth;
use crossvpr::metric::{
    finite_difference_check, gem_pool, generalized_triplet_loss, mine_relative_triplets, vanilla_triplet_loss,
    EmbeddingBatch, FeatureMap, GradCheck, LossKind, LossParams, TripletObjective,
};
use crossvpr::pose::{rotation_from_axis_angle, Pose};
use crossvpr::raster::{RasterImage, RasterKind};
use crossvpr::retrieval::{rerank, retrieve_batch, search, search_batch, RankedEntry, RankedList, RerankParams, SearchIndex};
use crossvpr::simlabel::{
    points_average_distance, sample_sector_points, sim_from_average_distance, sim_sector_overlap, LabelMethod, Labeler,
    OverlapMode, SectorSpec, DEFAULT_SAMPLE_COUNT, DEFAULT_SAMPLE_SEED,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_pose(rng: &mut ChaCha8Rng, spread: f64, id: &str) -> Pose {
    let axis = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let r = rotation_from_axis_angle(axis, rng.random_range(-3.0..3.0));
    let t = nalgebra::Vector3::new(
        rng.random_range(-spread..spread),
        rng.random_range(-spread..spread),
        rng.random_range(-spread..spread),
    );
    Pose::new(r, t, id).unwrap()
}

fn mat(p: &Pose) -> ([[f64; 3]; 3], [f64; 3]) {
    let r = p.rotation();
    let t = p.translation();
    (
        [
            [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
            [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
            [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
        ],
        [t[0], t[1], t[2]],
    )
}

fn apply(m: &([[f64; 3]; 3], [f64; 3]), p: [f64; 3]) -> [f64; 3] {
    let (r, t) = m;
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2] + t[i];
    }
    out
}

fn c1_points_average_distance() -> Check {
    let pts = sample_sector_points(&SectorSpec::default(), DEFAULT_SAMPLE_COUNT, DEFAULT_SAMPLE_SEED).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_t: f64 = 0.0;
    let mut worst_sim: f64 = 0.0;
    for k in 0..200 {
        let base = random_pose(&mut rng, 50.0, "a");
        let d = [rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0), if k % 2 == 0 { 0.0 } else { rng.random_range(-1.0..1.0) }];
        let moved = Pose::new(*base.rotation(), base.translation() + nalgebra::Vector3::from(d), "b").unwrap();
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let got = points_average_distance(&base, &moved, &pts);
        worst_t = worst_t.max((got - norm).abs());
        let expect = if norm < 7.5 { (7.5 - norm) / 7.5 } else { 0.0 };
        worst_sim = worst_sim.max((sim_from_average_distance(got, 7.5) - expect).abs());
    }
    ensure(worst_t <= 1e-9, || format!("translation error {worst_t:.3e}"))?;
    ensure(worst_sim <= 1e-9, || format!("similarity error {worst_sim:.3e}"))?;

    let mut worst_rot: f64 = 0.0;
    for _ in 0..200 {
        let a = random_pose(&mut rng, 20.0, "a");
        let b = random_pose(&mut rng, 20.0, "b");
        let (ma, mb) = (mat(&a), mat(&b));
        let mut total = 0.0;
        for &[x, y] in pts.points() {
            let pa = apply(&ma, [x, y, 0.0]);
            let pb = apply(&mb, [x, y, 0.0]);
            total += ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2) + (pa[2] - pb[2]).powi(2)).sqrt();
        }
        let oracle = total / pts.len() as f64;
        worst_rot = worst_rot.max((points_average_distance(&a, &b, &pts) - oracle).abs());
    }
    ensure(worst_rot <= 1e-9, || format!("rotation oracle error {worst_rot:.3e}"))?;
    Ok(format!(
        "translation err {worst_t:.1e}, sim err {worst_sim:.1e}, rotation err {worst_rot:.1e} (400 fixtures)"
    ))
}

fn random_batch(rng: &mut ChaCha8Rng, b: usize, d: usize) -> EmbeddingBatch {
    let rows: Vec<Vec<f64>> = (0..b).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    EmbeddingBatch::from_rows(&rows).unwrap()
}

fn c2_generalized_triplet() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let params = LossParams::default();
    let mut worst_eq: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let (mut checked, mut skipped, mut triplets) = (0usize, 0usize, 0usize);
    for _ in 0..1000 {
        let b = rng.random_range(3..=6);
        let d = rng.random_range(2..=6);
        let batch = random_batch(&mut rng, b, d);
        let labels: Vec<usize> = (0..b).map(|_| rng.random_range(0..2)).collect();
        let sim = |i: usize, j: usize| if labels[i] == labels[j] { 1.0 } else { 0.0 };
        let mined = mine_relative_triplets(&batch, &sim, 0.5);
        for t in &mined {
            let g = generalized_triplet_loss(t, &batch, &params).unwrap();
            let v = vanilla_triplet_loss(batch.row(t.anchor), batch.row(t.rel_pos), batch.row(t.rel_neg), 0.6).unwrap();
            // direct evaluation of the hinge
            let dist = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let (a, p, n) = (batch.row(t.anchor), batch.row(t.rel_pos), batch.row(t.rel_neg));
            let oracle = (dist(a, p) - dist(a, n) + 0.6 * (t.sim_arp - t.sim_arn)).max(0.0);
            worst_eq = worst_eq.max((g - v).abs()).max((g - oracle).abs());
        }
        triplets += mined.len();
        if mined.is_empty() {
            continue;
        }
        let obj = TripletObjective {
            kind: LossKind::GeneralizedTriplet,
            triplets: mined,
            params,
        };
        match finite_difference_check(&obj, &batch, 1e-6).unwrap() {
            GradCheck::Checked { max_rel_error } => {
                checked += 1;
                worst_grad = worst_grad.max(max_rel_error);
            }
            GradCheck::Skipped { .. } => skipped += 1,
        }
    }
    ensure(worst_eq <= 1e-12, || format!("generalized vs vanilla differ by {worst_eq:.3e}"))?;
    ensure(worst_grad < 1e-4, || format!("gradient relative error {worst_grad:.3e}"))?;
    ensure(checked >= 500, || format!("only {checked} batches away from kinks"))?;
    Ok(format!(
        "{triplets} triplets, max |gen−vanilla| {worst_eq:.1e}; grad rel err {worst_grad:.1e} on {checked} batches ({skipped} near kinks)"
    ))
}

fn c3_gem() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_mean, mut worst_max): (f64, f64) = (0.0, 0.0);
    let ps = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0];
    for _ in 0..100 {
        let (h, w, c) = (rng.random_range(1..=8), rng.random_range(1..=8), rng.random_range(1..=6));
        let data: Vec<f64> = (0..h * w * c).map(|_| rng.random_range(0.0..1.0)).collect();
        let f = FeatureMap::new(h, w, c, data.clone()).unwrap();
        let pooled: Vec<Vec<f64>> = ps.iter().map(|&p| gem_pool(&f, p).unwrap()).collect();
        for ch in 0..c {
            let vals: Vec<f64> = data.iter().skip(ch).step_by(c).copied().collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let max = vals.iter().cloned().fold(0.0, f64::max);
            worst_mean = worst_mean.max((pooled[0][ch] - mean).abs());
            worst_max = worst_max.max((pooled[ps.len() - 1][ch] - max).abs());
            for k in 1..ps.len() {
                let (lo, hi) = (pooled[k - 1][ch], pooled[k][ch]);
                ensure(hi >= lo * (1.0 - 1e-12), || format!("not monotone in p: {lo} > {hi} at p={}", ps[k]))?;
            }
        }
    }
    ensure(worst_mean <= 1e-12, || format!("p=1 differs from mean by {worst_mean:.3e}"))?;
    ensure(worst_max <= 1e-2, || format!("p=1000 differs from max by {worst_max:.3e}"))?;
    Ok(format!("|p=1 − mean| {worst_mean:.1e}, |p=1000 − max| {worst_max:.1e}, monotone on 100 maps"))
}

fn random_unit_rows(rng: &mut ChaCha8Rng, n: usize, d: usize, quantize: bool) -> Vec<f32> {
    (0..n * d)
        .map(|_| {
            let v: f32 = rng.random_range(-1.0..1.0);
            if quantize {
                (v * 2.0).round() / 2.0
            } else {
                v
            }
        })
        .collect()
}

fn c4_retrieval_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (n, d) = (1000, 256);
    let mut tie_pairs = 0usize;
    for inst in 0..100 {
        // coarse quantization and duplicated rows create exact score ties
        let quantize = inst % 2 == 0;
        let mut data = random_unit_rows(&mut rng, n, d, quantize);
        for dup in 0..50 {
            let (src, dst) = (rng.random_range(0..n), rng.random_range(0..n));
            if src != dst && dup % 2 == 0 {
                let row: Vec<f32> = data[src * d..(src + 1) * d].to_vec();
                data[dst * d..(dst + 1) * d].copy_from_slice(&row);
            }
        }
        let mut ids: Vec<String> = (0..n).map(|i| format!("db{i:04}")).collect();
        // ids not in storage order, so the tie-break is visible
        ids.reverse();
        let db = DescriptorSet::new(Modality::Range, d, ids, data).unwrap();
        let index = SearchIndex::new(db.clone());
        let qvec: Vec<f32> = if inst % 3 == 0 {
            db.row(rng.random_range(0..n)).to_vec()
        } else {
            random_unit_rows(&mut rng, 1, d, quantize)
        };
        let q = Descriptor::new(qvec, "q", Modality::Rgb).unwrap();

        let mut oracle: Vec<(f64, String)> = (0..n)
            .map(|i| {
                let mut s = 0.0f64;
                for k in 0..d {
                    s += f64::from(q.vector()[k]) * f64::from(db.row(i)[k]);
                }
                (s, db.ids()[i].clone())
            })
            .collect();
        oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
        tie_pairs += oracle.windows(2).filter(|w| w[0].0 == w[1].0).count();
        for top_n in [1, 10, n] {
            let got = search(&index, &q, top_n).unwrap();
            let got_ids: Vec<&str> = got.ids().collect();
            let want: Vec<&str> = oracle[..top_n].iter().map(|(_, id)| id.as_str()).collect();
            ensure(got_ids == want, || format!("instance {inst}, top_n {top_n}: order differs from oracle"))?;
        }
    }
    ensure(tie_pairs > 0, || "fixtures produced no ties".to_string())?;
    Ok(format!("100 instances of 1000×256 identical to oracle ({tie_pairs} tied neighbours)"))
}

fn random_phase1(rng: &mut ChaCha8Rng, len: usize) -> RankedList {
    let mut ids: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    RankedList {
        entries: ids
            .into_iter()
            .enumerate()
            .map(|(r, i)| RankedEntry {
                id: format!("c{i:03}"),
                score: 1.0 - r as f64 / len as f64,
            })
            .collect(),
    }
}

fn c5_rerank_contracts() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for inst in 0..500 {
        let len = rng.random_range(1..=90);
        let d = 8;
        let phase1 = random_phase1(&mut rng, len);
        let ids: Vec<String> = (0..len).map(|i| format!("c{i:03}")).collect();
        let bev = SearchIndex::new(DescriptorSet::new(Modality::LidarBev, d, ids, random_unit_rows(&mut rng, len, d, false)).unwrap());
        let q = Descriptor::new(random_unit_rows(&mut rng, 1, d, false), "q", Modality::CameraBev).unwrap();
        let k = rng.random_range(1..=len + 5);
        let w_range = rng.random_range(0.05..2.0);
        let w_bev = rng.random_range(0.05..2.0);
        let p = RerankParams { k, w_range, w_bev };
        let out = rerank(&phase1, &q, &bev, &p).unwrap();

        let mut a: Vec<&str> = out.ids().collect();
        let mut b: Vec<&str> = phase1.ids().collect();
        let kk = k.min(len);
        ensure(a[kk..] == b[kk..], || format!("instance {inst}: tail reordered"))?;
        a.sort_unstable();
        b.sort_unstable();
        ensure(a == b, || format!("instance {inst}: output is not a permutation"))?;

        let block = &out.entries[..kk];
        for (i, x) in block.iter().enumerate() {
            for y in &block[..i] {
                // y precedes x; x must not dominate y
                let dominated = x.r1 < y.r1 && x.r2.unwrap() < y.r2.unwrap();
                ensure(!dominated, || format!("instance {inst}: dominance violated ({} before {})", y.id, x.id))?;
            }
        }

        let identity = rerank(&phase1, &q, &bev, &RerankParams { k, w_range, w_bev: 0.0 }).unwrap();
        ensure(identity.ids().eq(phase1.ids()), || format!("instance {inst}: w_bev=0 changed the order"))?;

        let c = rng.random_range(0.01..100.0);
        let scaled = rerank(&phase1, &q, &bev, &RerankParams { k, w_range: w_range * c, w_bev: w_bev * c }).unwrap();
        ensure(scaled.ids().eq(out.ids()), || format!("instance {inst}: weight scaling changed the order"))?;
    }

    // phase-1 ranks (1,2,3); BEV ranks (3,1,2): fused 2.0, 1.5, 2.5
    let bev = SearchIndex::new(
        DescriptorSet::new(
            Modality::LidarBev,
            2,
            vec!["1".into(), "2".into(), "3".into()],
            vec![0.2, 1.0, 1.0, 0.0, 1.0, 0.5],
        )
        .unwrap(),
    );
    let q = Descriptor::new(vec![1.0, 0.0], "q", Modality::CameraBev).unwrap();
    let phase1 = RankedList {
        entries: ["1", "2", "3"]
            .iter()
            .map(|id| RankedEntry { id: id.to_string(), score: 0.0 })
            .collect(),
    };
    let fused = rerank(&phase1, &q, &bev, &RerankParams { k: 3, w_range: 0.5, w_bev: 0.5 }).unwrap();
    let order: Vec<&str> = fused.ids().collect();
    ensure(order == ["2", "1", "3"], || format!("hand example gave {order:?}"))?;
    Ok("500 instances: permutation, dominance, w_bev=0 identity, scale invariance; hand example (2,1,3)".into())
}

fn c6_end_to_end() -> Check {
    let syn = generate_synthetic_descriptors(&SyntheticScenario::default()).map_err(|e| e.to_string())?;
    ensure(syn.poses.len() == 500, || "scenario is not a 500-pose loop".into())?;
    let truth = build_ground_truth(&syn.poses, &syn.poses, 10.0);
    let range = SearchIndex::new(syn.range.clone());
    let bev = SearchIndex::new(syn.lidar_bev.clone());
    let phase1 = search_batch(&range, &syn.rgb, range.len()).unwrap();
    let fused = retrieve_batch(&syn.rgb, &syn.camera_bev, &range, &bev, &RerankParams::default()).unwrap();
    let r1 = recall_at_n(&phase1, &truth, 1).unwrap();
    let rf = recall_at_n(&fused, &truth, 1).unwrap();
    let gain = 100.0 * (rf - r1);
    ensure(gain >= 1.0, || format!("fused R@1 {rf:.4} vs phase-1 {r1:.4}: gain {gain:.2} pp"))?;
    Ok(format!("phase-1 R@1 {:.1}%, fused R@1 {:.1}% (+{gain:.1} pp)", 100.0 * r1, 100.0 * rf))
}

fn c7_geometry() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = BevGrid::default();
    let mut total_points = 0usize;
    for inst in 0..100 {
        let n = rng.random_range(0..3000);
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.random_range(-10.0..70.0), rng.random_range(-35.0..35.0), rng.random_range(-8.0..8.0)])
            .collect();
        let in_range = pts
            .iter()
            .filter(|p| (0.0..51.2).contains(&p[0]) && (-25.6..25.6).contains(&p[1]) && (-5.0..5.0).contains(&p[2]))
            .count();
        let img = rasterize_bev(&PointCloud::new(pts, Frame::Lidar).unwrap(), &grid).unwrap();
        let sum: f64 = (0..img.height())
            .flat_map(|r| (0..img.width()).map(move |c| (r, c)))
            .filter_map(|(r, c)| img.get(r, c))
            .map(f64::from)
            .sum();
        ensure(sum as usize == in_range, || format!("cloud {inst}: BEV total {sum} vs {in_range} in range"))?;
        total_points += n;
    }

    // KITTI-like intrinsics with a rotated, offset extrinsic
    let cam_to_lidar = CameraModel::optical_to_lidar_axes()
        .compose(&Pose::new(rotation_from_axis_angle([0.3, 1.0, 0.1], 0.05), nalgebra::Vector3::new(0.27, -0.06, 0.08), "c").unwrap());
    let cam = CameraModel::new(718.856, 718.856, 607.19, 185.22, 1226, 370, cam_to_lidar).unwrap();
    let (h, w) = (370, 1226);
    let mut values = vec![f32::NAN; h * w];
    for v in values.iter_mut() {
        if rng.random_bool(0.7) {
            *v = rng.random_range(1.0f32..80.0);
        }
    }
    let depth = RasterImage::from_nan_encoded(h, w, values.clone(), RasterKind::Depth).unwrap();
    let cloud = backproject_depth(&depth, &cam).unwrap();
    let m = mat(cam.cam_to_lidar());
    let mut worst: f64 = 0.0;
    let mut k = 0;
    for row in 0..h {
        for col in 0..w {
            let d = values[row * w + col];
            if d.is_nan() {
                continue;
            }
            let d = f64::from(d);
            let pc = [(col as f64 - cam.cx) * d / cam.fx, (row as f64 - cam.cy) * d / cam.fy, d];
            let oracle = apply(&m, pc);
            let got = cloud.points()[k];
            let hit = cam.project_lidar(got).ok_or("point projected behind camera")?;
            let err_pt = ((got[0] - oracle[0]).powi(2) + (got[1] - oracle[1]).powi(2) + (got[2] - oracle[2]).powi(2)).sqrt();
            let back = cam.unproject(hit.u, hit.v, hit.depth);
            let back = apply(&m, back);
            let err_rt = ((got[0] - back[0]).powi(2) + (got[1] - back[1]).powi(2) + (got[2] - back[2]).powi(2)).sqrt();
            worst = worst.max(err_pt).max(err_rt).max((hit.depth - d).abs());
            ensure((hit.u - col as f64).abs() < 1e-6 && (hit.v - row as f64).abs() < 1e-6, || {
                format!("pixel ({row},{col}) reprojected to ({}, {})", hit.v, hit.u)
            })?;
            k += 1;
        }
    }
    ensure(k == cloud.len(), || "back-projection point count differs from valid pixels".into())?;
    ensure(worst < 1e-5, || format!("round-trip error {worst:.3e} m"))?;

    // plane z = −1.7 plus 100 points at least 0.5 m above it
    let mut pts = Vec::new();
    for i in 0..40 {
        for j in 0..25 {
            pts.push([i as f64 * 0.5, j as f64 * 0.8 - 10.0, -1.7]);
        }
    }
    let elevated: Vec<[f64; 3]> = (0..100)
        .map(|_| [rng.random_range(0.0..20.0), rng.random_range(-10.0..10.0), rng.random_range(-1.2..2.0)])
        .collect();
    pts.extend(&elevated);
    let out = remove_ground(&PointCloud::new(pts, Frame::Lidar).unwrap(), &GroundParams::default());
    let kept: BTreeSet<[u64; 3]> = out.cloud.points().iter().map(|p| p.map(f64::to_bits)).collect();
    let want: BTreeSet<[u64; 3]> = elevated.iter().map(|p| p.map(f64::to_bits)).collect();
    ensure(kept == want && out.cloud.len() == 100, || format!("ground removal kept {} points", out.cloud.len()))?;
    Ok(format!(
        "BEV conservation on 100 clouds ({total_points} pts); round trip {worst:.1e} m over {k} pixels; plane fixture exact"
    ))
}

fn c8_metrics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let db_size = 100;
    let db: Vec<String> = (0..db_size).map(|i| format!("d{i:03}")).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut rankings = Vec::new();
        let mut truth = Vec::new();
        for _ in 0..200 {
            let mut r = db.clone();
            for i in (1..r.len()).rev() {
                r.swap(i, rng.random_range(0..=i));
            }
            let t: BTreeSet<String> = if rng.random_bool(0.1) {
                BTreeSet::new()
            } else {
                (0..rng.random_range(1..6)).map(|_| db[rng.random_range(0..db_size)].clone()).collect()
            };
            rankings.push(r);
            truth.push(t);
        }
        let mut prev = 0.0;
        for n in 1..=20 {
            // set-membership oracle
            let counted: Vec<usize> = (0..200).filter(|&q| !truth[q].is_empty()).collect();
            let hits = counted
                .iter()
                .filter(|&&q| rankings[q][..n].iter().any(|id| truth[q].contains(id)))
                .count();
            let oracle = hits as f64 / counted.len() as f64;
            let got = recall_at_n(&rankings, &truth, n).unwrap();
            worst = worst.max((got - oracle).abs());
            ensure(got >= prev, || format!("recall@{n} {got} < recall@{} {prev}", n - 1))?;
            prev = got;
        }
        let r1 = recall_at_n(&rankings, &truth, 1).unwrap();
        let rp = recall_at_percent(&rankings, &truth, db_size, 1.0).unwrap();
        ensure(rp == r1, || format!("recall@1% {rp} != recall@1 {r1}"))?;
    }
    ensure(worst == 0.0, || format!("recall differs from oracle by {worst:.3e}"))?;
    ensure(percent_cutoff(4541, 1.0) == 46 && percent_cutoff(50, 1.0) == 1, || "percent cutoff arithmetic".into())?;
    Ok("20×200-query fixtures equal the oracle; recall@1% = recall@1 at 100 items; monotone over N=1..20".into())
}

fn c9_labels() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = SectorSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = Pose::planar(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-3.1..3.1), "a");
        let b = Pose::planar(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0), rng.random_range(-3.1..3.1), "b");
        let r = sim_sector_overlap(&a, &b, &spec, OverlapMode::Raster);
        let m = sim_sector_overlap(&a, &b, &spec, OverlapMode::monte_carlo());
        worst = worst.max((r - m).abs());
    }
    ensure(worst <= 0.01, || format!("raster vs Monte Carlo differ by {worst:.4}"))?;

    let labeler = Labeler::default();
    let cloud = |rng: &mut ChaCha8Rng| {
        let pts: Vec<[f64; 3]> = (0..300)
            .map(|_| [rng.random_range(0.0..10.0), rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0)])
            .collect();
        PointCloud::new(pts, Frame::Lidar).unwrap()
    };
    for _ in 0..30 {
        let a = Pose::planar(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0), rng.random_range(-3.1..3.1), "a");
        let b = Pose::planar(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0), rng.random_range(-3.1..3.1), "b");
        let (ca, cb) = (cloud(&mut rng), cloud(&mut rng));
        for method in LabelMethod::ALL {
            let ab = labeler.similarity_with_clouds(method, (&a, &ca), (&b, &cb)).unwrap();
            let ba = labeler.similarity_with_clouds(method, (&b, &cb), (&a, &ca)).unwrap();
            ensure((0.0..=1.0).contains(&ab), || format!("{method} = {ab} outside [0,1]"))?;
            ensure((ab - ba).abs() <= 1e-12, || format!("{method} asymmetric: {ab} vs {ba}"))?;
        }
    }
    Ok(format!("raster vs Monte Carlo max diff {worst:.4} on 50 pairs; 5 methods bounded and symmetric"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 9] = [
        ("points-average distance and similarity", Duration::from_secs(1), c1_points_average_distance),
        ("generalized triplet = vanilla at binary labels; gradients", Duration::from_secs(10), c2_generalized_triplet),
        ("GeM pooling properties", Duration::from_secs(1), c3_gem),
        ("retrieval exactness vs brute-force scan", Duration::from_secs(5), c4_retrieval_exactness),
        ("rerank contracts", Duration::from_secs(1), c5_rerank_contracts),
        ("end-to-end rerank gain on synthetic loop", Duration::from_secs(60), c6_end_to_end),
        ("geometry conservation", Duration::from_secs(10), c7_geometry),
        ("recall metrics oracle", Duration::from_secs(5), c8_metrics),
        ("label cross-validation", Duration::from_secs(30), c9_labels),
    ];
    let mut failed = 0;
    println!("running {} acceptance criteria", criteria.len());
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.3}s / {}s]", elapsed.as_secs_f64(), budget.as_secs()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{:.3}s / {}s]", elapsed.as_secs_f64(), budget.as_secs());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

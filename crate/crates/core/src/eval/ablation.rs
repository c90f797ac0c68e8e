//! Grid runs over label method × loss × fusion × rerank weights × k × d_th.
//!
//! Without trained networks only the fusion axes change retrieval output.
//! Label and loss cells report supervision diagnostics (triplet count, mean
//! loss, active-hinge fraction on a fixed pose batch) in their parameter
//! snapshot; their recall equals the matching fusion cell.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::recall::{evaluate, EvalParams, RecallReport};
use crate::cloud::PointCloud;
use crate::descriptor::{DescriptorSet, Modality};
use crate::error::{Error, Result};
use crate::kitti::build_ground_truth;
use crate::metric::{mine_relative_triplets, Differentiable, EmbeddingBatch, LossKind, LossParams, TripletObjective, DEFAULT_MIN_GAP};
use crate::pose::Pose;
use crate::retrieval::{concat_descriptor_sets, retrieve_batch, search_batch, Ranking, RerankParams, SearchIndex};
use crate::simlabel::{LabelMethod, Labeler, SectorSpec, SimilarityParams};

/// Number of frames in the supervision-diagnostics batch.
pub const SUPERVISION_BATCH: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// Phase 1 only.
    None,
    /// Two-phase rank fusion.
    Rerank,
    /// Single search over concatenated range and BEV descriptors.
    Concat,
}

impl FusionMode {
    pub const ALL: [FusionMode; 3] = [FusionMode::None, FusionMode::Rerank, FusionMode::Concat];

    pub fn as_str(self) -> &'static str {
        match self {
            FusionMode::None => "none",
            FusionMode::Rerank => "rerank",
            FusionMode::Concat => "concat",
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FusionMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown fusion mode {s:?}; valid: none, rerank, concat")))
    }
}

/// Named grid axes accepted by [`AblationConfig::set_axis`].
pub const AXES: [&str; 6] = ["label", "loss", "fusion", "w_bev", "k", "d_th"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub label_methods: Vec<LabelMethod>,
    pub losses: Vec<LossKind>,
    pub fusion: Vec<FusionMode>,
    /// BEV weight; the range weight is `1 − w_bev`.
    pub w_bev: Vec<f64>,
    pub k: Vec<usize>,
    pub d_th: Vec<f64>,
    pub sequence: String,
    pub eval: EvalParams,
}

impl Default for AblationConfig {
    /// A single cell at the default configuration.
    fn default() -> Self {
        let rerank = RerankParams::default();
        Self {
            label_methods: vec![LabelMethod::PointsAvg],
            losses: vec![LossKind::GeneralizedTriplet],
            fusion: vec![FusionMode::Rerank],
            w_bev: vec![rerank.w_bev],
            k: vec![rerank.k],
            d_th: vec![SimilarityParams::default().d_th],
            sequence: "00".into(),
            eval: EvalParams::default(),
        }
    }
}

impl AblationConfig {
    /// Replaces one axis from comma-separated values.
    pub fn set_axis(&mut self, axis: &str, values: &str) -> Result<()> {
        fn list<T: FromStr>(values: &str, axis: &str) -> Result<Vec<T>> {
            values
                .split(',')
                .map(|v| v.trim().parse::<T>().map_err(|_| Error::Argument(format!("bad value {v:?} for axis {axis}"))))
                .collect()
        }
        fn named<T: FromStr<Err = Error>>(values: &str) -> Result<Vec<T>> {
            values.split(',').map(|v| v.trim().parse()).collect()
        }
        match axis {
            "label" => self.label_methods = named(values)?,
            "loss" => self.losses = named(values)?,
            "fusion" => self.fusion = named(values)?,
            "w_bev" => self.w_bev = list(values, axis)?,
            "k" => self.k = list(values, axis)?,
            "d_th" => self.d_th = list(values, axis)?,
            _ => {
                return Err(Error::Argument(format!(
                    "unknown grid axis {axis:?}; valid axes: {}",
                    AXES.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.label_methods.len() * self.losses.len() * self.fusion.len() * self.w_bev.len() * self.k.len() * self.d_th.len()
    }
}

/// Inputs of an ablation run. Query and database frames are the same
/// poses.
#[derive(Debug, Clone)]
pub struct AblationData {
    pub rgb: DescriptorSet,
    pub range: DescriptorSet,
    pub camera_bev: Option<DescriptorSet>,
    pub lidar_bev: Option<DescriptorSet>,
    pub poses: Vec<Pose>,
    pub clouds: Option<Vec<PointCloud>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub cell: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct AblationResult {
    pub reports: Vec<RecallReport>,
    pub skipped: Vec<SkippedCell>,
}

impl AblationResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        super::recall::write_reports_csv(out, &self.reports)
    }

    /// Fixed-width table of the reports followed by skipped cells.
    pub fn table(&self) -> String {
        let w = self.reports.iter().map(|r| r.method.len()).max().unwrap_or(4).max(4);
        let mut s = format!("{:<w$} {:>7} {:>7} {:>7} {:>6}\n", "cell", "R@1", "R@5", "R@1%", "n");
        for r in &self.reports {
            s.push_str(&format!(
                "{:<w$} {:>7.4} {:>7.4} {:>7.4} {:>6}\n",
                r.method, r.r_at_1, r.r_at_5, r.r_at_1pct, r.query_count
            ));
        }
        for sk in &self.skipped {
            s.push_str(&format!("skipped {}: {}\n", sk.cell, sk.reason));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Cell {
    label: LabelMethod,
    loss: LossKind,
    fusion: FusionMode,
    w_bev: f64,
    k: usize,
    d_th: f64,
}

impl Cell {
    fn name(&self) -> String {
        format!(
            "label={},loss={},fusion={},w_bev={},k={},d_th={}",
            self.label, self.loss, self.fusion, self.w_bev, self.k, self.d_th
        )
    }
}

/// Supervision diagnostics of one (label method, loss, d_th) combination.
#[derive(Debug, Clone, Copy, Serialize)]
struct Supervision {
    triplets: usize,
    mean_loss: f64,
    active_fraction: f64,
}

fn supervision_indices(n: usize) -> Vec<usize> {
    let b = SUPERVISION_BATCH.min(n);
    // consecutive frames with stride 2 so labels span the similarity range
    let stride = if n >= 2 * b { 2 } else { 1 };
    (0..b).map(|i| i * stride).collect()
}

fn supervision(data: &AblationData, label: LabelMethod, loss: LossKind, d_th: f64) -> Result<Supervision> {
    let idx = supervision_indices(data.poses.len());
    let params = SimilarityParams {
        d_th,
        ..SimilarityParams::default()
    };
    let labeler = Labeler::new(SectorSpec::default(), params)?;
    let sims: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| match (&data.clouds, label.needs_clouds()) {
                    (Some(c), true) => labeler.similarity_with_clouds(label, (&data.poses[i], &c[i]), (&data.poses[j], &c[j])),
                    _ => labeler.similarity(label, &data.poses[i], &data.poses[j]),
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| data.range.row(i).iter().map(|&v| v as f64).collect())
        .collect();
    let batch = EmbeddingBatch::from_rows(&rows)?;
    let triplets = mine_relative_triplets(&batch, &|a: usize, b: usize| sims[a][b], DEFAULT_MIN_GAP);
    if triplets.is_empty() {
        return Ok(Supervision {
            triplets: 0,
            mean_loss: 0.0,
            active_fraction: 0.0,
        });
    }
    let mut active = 0usize;
    let mut total = 0.0;
    for t in &triplets {
        let obj = TripletObjective {
            kind: loss,
            triplets: vec![*t],
            params: LossParams::default(),
        };
        let v = obj.value(&batch)?;
        total += v;
        if v > 0.0 {
            active += 1;
        }
    }
    Ok(Supervision {
        triplets: triplets.len(),
        mean_loss: total / triplets.len() as f64,
        active_fraction: active as f64 / triplets.len() as f64,
    })
}

type RankingKey = (FusionMode, u64, usize);

/// Runs every cell of the grid. Rankings are computed once per distinct
/// retrieval configuration.
pub fn run_ablation(config: &AblationConfig, data: &AblationData) -> Result<AblationResult> {
    if data.rgb.len() != data.poses.len() {
        return Err(Error::Contract(format!(
            "{} query descriptors but {} poses",
            data.rgb.len(),
            data.poses.len()
        )));
    }
    crate::retrieval::ensure_aligned(&data.rgb, &data.range)?;
    if let (Some(a), Some(b)) = (&data.camera_bev, &data.lidar_bev) {
        crate::retrieval::ensure_aligned(a, b)?;
    }
    let truth: Vec<BTreeSet<String>> = build_ground_truth(&data.poses, &data.poses, config.eval.t);
    let query_ids: Vec<String> = data.rgb.ids().to_vec();
    let range_index = SearchIndex::new(data.range.clone());
    let bev_index = data.lidar_bev.clone().map(SearchIndex::new);
    let bev_present = data.camera_bev.is_some() && data.lidar_bev.is_some();

    let mut rankings: HashMap<RankingKey, Vec<Vec<String>>> = HashMap::new();
    let mut supervision_cache: HashMap<(LabelMethod, LossKind, u64), Supervision> = HashMap::new();
    let mut result = AblationResult::default();

    for &label in &config.label_methods {
        for &loss in &config.losses {
            for &fusion in &config.fusion {
                for &w_bev in &config.w_bev {
                    for &k in &config.k {
                        for &d_th in &config.d_th {
                            let cell = Cell { label, loss, fusion, w_bev, k, d_th };
                            if label.needs_clouds() && data.clouds.is_none() {
                                result.skipped.push(SkippedCell {
                                    cell: cell.name(),
                                    reason: "pointcloud_mnn needs point clouds".into(),
                                });
                                continue;
                            }
                            if fusion != FusionMode::None && !bev_present {
                                result.skipped.push(SkippedCell {
                                    cell: cell.name(),
                                    reason: "camera_bev or lidar_bev descriptors missing".into(),
                                });
                                continue;
                            }
                            let key: RankingKey = match fusion {
                                FusionMode::Rerank => (fusion, w_bev.to_bits(), k),
                                _ => (fusion, 0, 0),
                            };
                            if !rankings.contains_key(&key) {
                                let lists = match fusion {
                                    FusionMode::None => to_lists(&search_batch(&range_index, &data.rgb, range_index.len())?),
                                    FusionMode::Rerank => {
                                        let params = RerankParams { k, w_range: 1.0 - w_bev, w_bev };
                                        to_lists(&retrieve_batch(
                                            &data.rgb,
                                            data.camera_bev.as_ref().unwrap(),
                                            &range_index,
                                            bev_index.as_ref().unwrap(),
                                            &params,
                                        )?)
                                    }
                                    FusionMode::Concat => {
                                        let db = concat_descriptor_sets(&data.range, data.lidar_bev.as_ref().unwrap(), Modality::Range)?;
                                        let q = concat_descriptor_sets(&data.rgb, data.camera_bev.as_ref().unwrap(), Modality::Rgb)?;
                                        let idx = SearchIndex::new(db);
                                        to_lists(&search_batch(&idx, &q, idx.len())?)
                                    }
                                };
                                rankings.insert(key, lists);
                            }
                            let sup = match supervision_cache.get(&(label, loss, d_th.to_bits())) {
                                Some(s) => *s,
                                None => {
                                    let s = supervision(data, label, loss, d_th)?;
                                    supervision_cache.insert((label, loss, d_th.to_bits()), s);
                                    s
                                }
                            };
                            let extra = serde_json::json!({ "cell": cell, "supervision": sup });
                            result.reports.push(evaluate(
                                &cell.name(),
                                &config.sequence,
                                &query_ids,
                                &rankings[&key],
                                &truth,
                                data.range.len(),
                                &config.eval,
                                extra,
                            )?);
                        }
                    }
                }
            }
        }
    }
    Ok(result)
}

fn to_lists<R: Ranking>(rankings: &[R]) -> Vec<Vec<String>> {
    rankings
        .iter()
        .map(|r| (0..r.ranked_len()).map(|p| r.id_at(p).to_string()).collect())
        .collect()
}

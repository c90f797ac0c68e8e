//! Batch subcommands: `preprocess`, `label`, `retrieve`, `evaluate`, `ablate`.
//!
//! Exit codes: 0 success, 1 missing input, 2 bad argument, 3 data
//! inconsistency. Every run writes `<subcommand>_config.json` into the
//! output directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::descriptor::{load_descriptor_set, save_descriptor_set, DescriptorSet};
use crate::error::Error;
use crate::eval::{
    evaluate, generate_synthetic_descriptors, run_ablation, write_reports_csv, write_reports_json, AblationConfig,
    AblationData, EvalParams, ExclusionWindow, RecallReport, SyntheticScenario,
};
use crate::geometry::{EdgeMethod, GroundParams};
use crate::kitti::{build_ground_truth, parse_calib, parse_poses_with_prefix, parse_velodyne, write_poses, SequenceManifest};
use crate::pose::Pose;
use crate::preprocess::{camera_bev, lidar_rasters, PreprocessConfig, DEFAULT_KEEP_HEIGHT};
use crate::raster::{load_raster, save_raster, RasterKind};
use crate::retrieval::{ensure_aligned, read_rankings_csv, retrieve_batch, write_rankings_csv, RerankParams, SearchIndex};
use crate::simlabel::{write_label_csv, LabelMethod, LabelRow, Labeler, SectorSpec, SimilarityParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISSING_INPUT: i32 = 1;
pub const EXIT_BAD_ARGUMENT: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser, Serialize)]
#[command(name = "crossvpr", version, about = "Cross-modal image-to-LiDAR place recognition")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Dataset root holding `sequences/` and `poses/`.
    #[arg(long, env = "RB_DATA_ROOT", global = true)]
    pub data_root: Option<PathBuf>,
    #[arg(long, default_value = "out", global = true)]
    pub output_dir: PathBuf,
    /// Seed for synthetic data and RANSAC.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Range and BEV rasters for every frame of a sequence.
    Preprocess(PreprocessArgs),
    /// Pairwise similarity labels from poses.
    Label(LabelArgs),
    /// Two-phase retrieval; writes ranked lists.
    Retrieve(RetrieveArgs),
    /// Recall report from ranked lists and poses.
    Evaluate(EvaluateArgs),
    /// Ablation grid over labels, losses and fusion settings.
    Ablate(AblateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PreprocessArgs {
    #[arg(long, default_value = "00")]
    pub sequence: String,
    /// Directory of depth rasters named like the velodyne scans (`.rast`).
    #[arg(long)]
    pub depth_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_KEEP_HEIGHT)]
    pub keep_height: usize,
    #[arg(long, default_value = "sobel", value_parser = parse_edge_method)]
    pub edge: EdgeMethod,
    #[arg(long, default_value_t = 0.5)]
    pub grad_threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub dilate: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LabelArgs {
    #[arg(long, value_parser = parse_label_method)]
    pub method: LabelMethod,
    /// KITTI pose file; defaults to `<data-root>/poses/<sequence>.txt`.
    #[arg(long)]
    pub poses: Option<PathBuf>,
    #[arg(long, default_value = "00")]
    pub sequence: String,
    /// Query frame indices, e.g. `0,4,10..20`; all frames if omitted.
    #[arg(long)]
    pub queries: Option<String>,
    /// Database frame indices; all frames if omitted.
    #[arg(long)]
    pub db: Option<String>,
    #[arg(long, default_value_t = 7.5)]
    pub d_th: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DescriptorInputs {
    #[arg(long)]
    pub rgb: Option<PathBuf>,
    #[arg(long)]
    pub range: Option<PathBuf>,
    #[arg(long)]
    pub camera_bev: Option<PathBuf>,
    #[arg(long)]
    pub lidar_bev: Option<PathBuf>,
    /// Use the seeded synthetic scenario instead of descriptor files.
    #[arg(long)]
    pub synthetic: bool,
    /// Poses of the frames, used for the report; required with files.
    #[arg(long)]
    pub poses: Option<PathBuf>,
    #[arg(long, default_value = "00")]
    pub sequence: String,
}

#[derive(Debug, Args, Serialize)]
pub struct RetrieveArgs {
    #[command(flatten)]
    pub inputs: DescriptorInputs,
    #[arg(long, default_value_t = 60)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub w_range: f64,
    #[arg(long, default_value_t = 0.5)]
    pub w_bev: f64,
    /// Ranked entries written per query.
    #[arg(long, default_value_t = 100)]
    pub max_rank: usize,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Ranked-list CSV written by `retrieve`.
    #[arg(long)]
    pub rankings: PathBuf,
    /// Poses of query and database frames.
    #[arg(long)]
    pub poses: PathBuf,
    /// Frame-id prefix of the pose file; defaults to its file stem.
    #[arg(long)]
    pub sequence: Option<String>,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,5")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub pct: f64,
    #[arg(long, default_value_t = 0)]
    pub exclusion_window: usize,
    #[arg(long, default_value = "fused")]
    pub method: String,
}

#[derive(Debug, Args, Serialize)]
pub struct AblateArgs {
    #[command(flatten)]
    pub inputs: DescriptorInputs,
    /// Grid axis as `axis=v1,v2,…`; repeatable. Axes: label, loss, fusion,
    /// w_bev, k, d_th.
    #[arg(long)]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
}

fn parse_label_method(s: &str) -> std::result::Result<LabelMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_edge_method(s: &str) -> std::result::Result<EdgeMethod, String> {
    match s {
        "sobel" => Ok(EdgeMethod::Sobel),
        "canny" => Ok(EdgeMethod::Canny),
        _ => Err(format!("unknown edge method {s:?}; valid: sobel, canny")),
    }
}

/// Failure of a subcommand with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn missing(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MISSING_INPUT,
            message: message.into(),
        }
    }

    fn argument(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_ARGUMENT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_MISSING_INPUT,
            Error::Argument(_) => EXIT_BAD_ARGUMENT,
            _ => EXIT_DATA,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
        .map_err(|e| Failure::argument(format!("thread pool: {e}")))?;
    pool.install(|| {
        fs::create_dir_all(&cli.global.output_dir).map_err(|e| Error::io(&cli.global.output_dir, e))?;
        let name = match &cli.command {
            Command::Preprocess(_) => "preprocess",
            Command::Label(_) => "label",
            Command::Retrieve(_) => "retrieve",
            Command::Evaluate(_) => "evaluate",
            Command::Ablate(_) => "ablate",
        };
        write_json(&cli.global.output_dir.join(format!("{name}_config.json")), cli)?;
        match &cli.command {
            Command::Preprocess(a) => cmd_preprocess(&cli.global, a),
            Command::Label(a) => cmd_label(&cli.global, a),
            Command::Retrieve(a) => cmd_retrieve(&cli.global, a),
            Command::Evaluate(a) => cmd_evaluate(&cli.global, a),
            Command::Ablate(a) => cmd_ablate(&cli.global, a),
        }
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Data(format!("json: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e).into())
}

fn create_file(path: &Path) -> std::result::Result<fs::File, Failure> {
    fs::File::create(path).map_err(|e| Error::io(path, e).into())
}

fn data_root(g: &GlobalArgs) -> std::result::Result<&Path, Failure> {
    g.data_root
        .as_deref()
        .ok_or_else(|| Failure::missing("no data root: pass --data-root or set RB_DATA_ROOT"))
}

pub fn cmd_preprocess(g: &GlobalArgs, a: &PreprocessArgs) -> CmdResult {
    let root = data_root(g)?;
    let manifest = SequenceManifest::discover(root, &a.sequence)?;
    if manifest.frame_count == 0 {
        return Err(Failure::missing(format!(
            "no frames found in {}",
            manifest.velodyne_dir.display()
        )));
    }
    if !manifest.calib_file.is_file() {
        return Err(Failure::missing(format!("missing {}", manifest.calib_file.display())));
    }
    let cam = parse_calib(&manifest.calib_file)?;
    let mut cfg = PreprocessConfig {
        keep_height: a.keep_height,
        ..Default::default()
    };
    cfg.edge.method = a.edge;
    cfg.edge.grad_threshold = a.grad_threshold;
    cfg.edge.dilate = a.dilate;
    if let Some(seed) = g.seed {
        cfg.ground = GroundParams { seed, ..cfg.ground };
    }
    if cfg.keep_height == 0 {
        return Err(Failure::argument("--keep-height must be >= 1"));
    }

    let out = g.output_dir.join(&a.sequence);
    let mut dirs = vec!["range", "lidar_bev"];
    if a.depth_dir.is_some() {
        dirs.push("camera_bev");
    }
    for d in &dirs {
        fs::create_dir_all(out.join(d)).map_err(|e| Error::io(out.join(d), e))?;
    }

    use rayon::prelude::*;
    let failures: Vec<String> = manifest
        .frames
        .par_iter()
        .filter_map(|frame| {
            let stem = frame.file_stem().and_then(|s| s.to_str()).unwrap_or("frame").to_string();
            let result = (|| -> crate::Result<()> {
                let scan = parse_velodyne(frame)?;
                let lidar = lidar_rasters(&scan, &cam, &cfg)?;
                save_raster(&lidar.range, out.join("range").join(format!("{stem}.rast")))?;
                save_raster(&lidar.bev, out.join("lidar_bev").join(format!("{stem}.rast")))?;
                if let Some(dd) = &a.depth_dir {
                    let depth = load_raster(dd.join(format!("{stem}.rast")), RasterKind::Depth)?;
                    let bev = camera_bev(&depth, &cam, &cfg)?;
                    save_raster(&bev, out.join("camera_bev").join(format!("{stem}.rast")))?;
                }
                Ok(())
            })();
            result.err().map(|e| {
                log::error!("{}: {e}", frame.display());
                format!("{}: {e}", frame.display())
            })
        })
        .collect();
    println!(
        "preprocessed {} of {} frames into {}",
        manifest.frame_count - failures.len(),
        manifest.frame_count,
        out.display()
    );
    if failures.is_empty() {
        Ok(())
    } else {
        for f in &failures {
            eprintln!("{f}");
        }
        Err(Failure::missing(format!("{} frames failed", failures.len())))
    }
}

/// Parses `0,4,10..20` (half-open ranges) into indices.
pub fn parse_index_list(spec: &str) -> crate::Result<Vec<usize>> {
    let bad = |t: &str| Error::Argument(format!("bad index {t:?} in {spec:?}"));
    let mut out = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((lo, hi)) = tok.split_once("..") {
            let lo: usize = lo.parse().map_err(|_| bad(tok))?;
            let hi: usize = hi.parse().map_err(|_| bad(tok))?;
            out.extend(lo..hi);
        } else {
            out.push(tok.parse().map_err(|_| bad(tok))?);
        }
    }
    Ok(out)
}

fn select(poses: &[Pose], spec: Option<&str>) -> std::result::Result<Vec<usize>, Failure> {
    match spec {
        None => Ok((0..poses.len()).collect()),
        Some(s) => {
            let idx = parse_index_list(s)?;
            if let Some(i) = idx.iter().find(|&&i| i >= poses.len()) {
                return Err(Failure::argument(format!("frame index {i} out of range ({} poses)", poses.len())));
            }
            Ok(idx)
        }
    }
}

fn pose_path(g: &GlobalArgs, explicit: Option<&Path>, seq: &str) -> std::result::Result<PathBuf, Failure> {
    match explicit {
        Some(p) => Ok(p.to_path_buf()),
        None => Ok(data_root(g)?.join("poses").join(format!("{seq}.txt"))),
    }
}

fn load_poses(path: &Path, seq: &str) -> std::result::Result<Vec<Pose>, Failure> {
    if !path.is_file() {
        return Err(Failure::missing(format!("missing pose file {}", path.display())));
    }
    Ok(parse_poses_with_prefix(path, seq)?)
}

pub fn cmd_label(g: &GlobalArgs, a: &LabelArgs) -> CmdResult {
    let path = pose_path(g, a.poses.as_deref(), &a.sequence)?;
    let poses = load_poses(&path, &a.sequence)?;
    let queries = select(&poses, a.queries.as_deref())?;
    let db = select(&poses, a.db.as_deref())?;
    let params = SimilarityParams {
        d_th: a.d_th,
        ..Default::default()
    };
    let labeler = Labeler::new(SectorSpec::default(), params)?;
    let clouds = if a.method.needs_clouds() {
        let manifest = SequenceManifest::discover(data_root(g)?, &a.sequence)?;
        if manifest.frame_count != poses.len() {
            return Err(Failure::missing(format!(
                "{} needs one velodyne scan per pose ({} scans, {} poses)",
                a.method,
                manifest.frame_count,
                poses.len()
            )));
        }
        let needed: BTreeSet<usize> = queries.iter().chain(&db).copied().collect();
        let mut clouds = vec![None; poses.len()];
        for i in needed {
            clouds[i] = Some(parse_velodyne(&manifest.frames[i])?);
        }
        Some(clouds)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(queries.len() * db.len());
    for &q in &queries {
        for &d in &db {
            let sim = match &clouds {
                Some(c) => labeler.similarity_with_clouds(
                    a.method,
                    (&poses[q], c[q].as_ref().unwrap()),
                    (&poses[d], c[d].as_ref().unwrap()),
                )?,
                None => labeler.similarity(a.method, &poses[q], &poses[d])?,
            };
            rows.push(LabelRow {
                query_id: poses[q].frame_id().to_string(),
                db_id: poses[d].frame_id().to_string(),
                method: a.method,
                similarity: sim,
            });
        }
    }
    let out = g.output_dir.join(format!("labels_{}.csv", a.method));
    write_label_csv(create_file(&out)?, rows)?;
    println!("wrote {}×{} labels to {}", queries.len(), db.len(), out.display());
    Ok(())
}

struct Loaded {
    rgb: DescriptorSet,
    range: DescriptorSet,
    camera_bev: DescriptorSet,
    lidar_bev: DescriptorSet,
    poses: Option<Vec<Pose>>,
    sequence: String,
}

fn load_inputs(g: &GlobalArgs, i: &DescriptorInputs) -> std::result::Result<Loaded, Failure> {
    if i.synthetic {
        let scenario = SyntheticScenario {
            seed: g.seed.unwrap_or(SyntheticScenario::default().seed),
            ..Default::default()
        };
        let syn = generate_synthetic_descriptors(&scenario)?;
        let dir = g.output_dir.join("synthetic");
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for set in [&syn.rgb, &syn.range, &syn.camera_bev, &syn.lidar_bev] {
            save_descriptor_set(set, dir.join(format!("{}.rbdesc", set.modality())))?;
        }
        write_poses(&syn.poses, g.output_dir.join("syn.txt"))?;
        return Ok(Loaded {
            rgb: syn.rgb,
            range: syn.range,
            camera_bev: syn.camera_bev,
            lidar_bev: syn.lidar_bev,
            poses: Some(syn.poses),
            sequence: "syn".into(),
        });
    }
    let need = |p: &Option<PathBuf>, flag: &str| -> std::result::Result<DescriptorSet, Failure> {
        let p = p
            .as_ref()
            .ok_or_else(|| Failure::missing(format!("--{flag} is required without --synthetic")))?;
        if !p.is_file() {
            return Err(Failure::missing(format!("missing descriptor file {}", p.display())));
        }
        Ok(load_descriptor_set(p)?)
    };
    let rgb = need(&i.rgb, "rgb")?;
    let range = need(&i.range, "range")?;
    let camera_bev = need(&i.camera_bev, "camera-bev")?;
    let lidar_bev = need(&i.lidar_bev, "lidar-bev")?;
    ensure_aligned(&rgb, &camera_bev)?;
    ensure_aligned(&range, &lidar_bev)?;
    let poses = match &i.poses {
        Some(p) => Some(load_poses(p, &i.sequence)?),
        None => None,
    };
    Ok(Loaded {
        rgb,
        range,
        camera_bev,
        lidar_bev,
        poses,
        sequence: i.sequence.clone(),
    })
}

pub fn cmd_retrieve(g: &GlobalArgs, a: &RetrieveArgs) -> CmdResult {
    let params = RerankParams {
        k: a.k,
        w_range: a.w_range,
        w_bev: a.w_bev,
    };
    params.validate()?;
    let data = load_inputs(g, &a.inputs)?;
    let range_index = SearchIndex::new(data.range.clone());
    let bev_index = SearchIndex::new(data.lidar_bev.clone());
    let fused = retrieve_batch(&data.rgb, &data.camera_bev, &range_index, &bev_index, &params)?;

    let out = g.output_dir.join("rankings.csv");
    write_rankings_csv(
        create_file(&out)?,
        data.rgb.ids().iter().map(String::as_str).zip(&fused),
        Some(a.max_rank),
    )?;
    println!("wrote rankings for {} queries to {}", fused.len(), out.display());

    if let Some(poses) = &data.poses {
        let by_id: std::collections::HashMap<&str, &Pose> = poses.iter().map(|p| (p.frame_id(), p)).collect();
        let lookup = |set: &DescriptorSet| -> std::result::Result<Vec<Pose>, Failure> {
            set.ids()
                .iter()
                .map(|id| {
                    by_id
                        .get(id.as_str())
                        .map(|p| (*p).clone())
                        .ok_or_else(|| Failure::from(Error::MissingId(id.clone())))
                })
                .collect()
        };
        let qp = lookup(&data.rgb)?;
        let dp = lookup(&data.range)?;
        let truth = build_ground_truth(&qp, &dp, a.t);
        let eval = EvalParams {
            t: a.t,
            ..Default::default()
        };
        let ids = data.rgb.ids().to_vec();
        let phase1_params = RerankParams {
            w_range: 1.0,
            w_bev: 0.0,
            ..params
        };
        let phase1 = retrieve_batch(&data.rgb, &data.camera_bev, &range_index, &bev_index, &phase1_params)?;
        let snapshot = serde_json::json!({ "k": params.k, "w_range": params.w_range, "w_bev": params.w_bev });
        let reports = vec![
            evaluate("phase1", &data.sequence, &ids, &phase1, &truth, dp.len(), &eval, snapshot.clone())?,
            evaluate("fused", &data.sequence, &ids, &fused, &truth, dp.len(), &eval, snapshot)?,
        ];
        write_reports(&g.output_dir, "report", &reports)?;
        print_reports(&reports);
    }
    Ok(())
}

fn write_reports(dir: &Path, stem: &str, reports: &[RecallReport]) -> CmdResult {
    write_reports_csv(create_file(&dir.join(format!("{stem}.csv")))?, reports)?;
    write_reports_json(create_file(&dir.join(format!("{stem}.json")))?, reports)?;
    Ok(())
}

fn print_reports(reports: &[RecallReport]) {
    println!("{:<10} {:>7} {:>7} {:>7} {:>6}", "method", "R@1", "R@5", "R@1%", "n");
    for r in reports {
        println!(
            "{:<10} {:>7.4} {:>7.4} {:>7.4} {:>6}",
            r.method, r.r_at_1, r.r_at_5, r.r_at_1pct, r.query_count
        );
    }
}

pub fn cmd_evaluate(g: &GlobalArgs, a: &EvaluateArgs) -> CmdResult {
    if !a.rankings.is_file() {
        return Err(Failure::missing(format!("missing rankings {}", a.rankings.display())));
    }
    let seq = a
        .sequence
        .clone()
        .or_else(|| a.poses.file_stem().and_then(|s| s.to_str()).map(String::from))
        .unwrap_or_default();
    let poses = load_poses(&a.poses, &seq)?;
    let file = fs::File::open(&a.rankings).map_err(|e| Error::io(&a.rankings, e))?;
    let lists = read_rankings_csv(file)?;
    if lists.is_empty() {
        return Err(Failure::missing(format!("no rankings in {}", a.rankings.display())));
    }
    let by_id: std::collections::HashMap<&str, &Pose> = poses.iter().map(|p| (p.frame_id(), p)).collect();
    let mut query_poses = Vec::with_capacity(lists.len());
    for (q, _) in &lists {
        let p = by_id
            .get(q.as_str())
            .ok_or_else(|| Failure::from(Error::MissingId(q.clone())))?;
        query_poses.push((*p).clone());
    }
    let truth = build_ground_truth(&query_poses, &poses, a.t);
    let ids: Vec<String> = lists.iter().map(|(q, _)| q.clone()).collect();
    let rankings: Vec<Vec<String>> = lists.into_iter().map(|(_, r)| r).collect();
    let params = EvalParams {
        t: a.t,
        ns: a.n.clone(),
        pct: a.pct,
        exclusion_window: ExclusionWindow(a.exclusion_window),
    };
    if params.ns.contains(&0) {
        return Err(Failure::argument("--n values must be >= 1"));
    }
    let report = evaluate(
        &a.method,
        &seq,
        &ids,
        &rankings,
        &truth,
        poses.len(),
        &params,
        serde_json::json!({ "rankings": a.rankings }),
    )?;
    let reports = [report];
    write_reports(&g.output_dir, "evaluation", &reports)?;
    print_reports(&reports);
    for (n, r) in &reports[0].r_at_n {
        println!("R@{n} = {r:.4}");
    }
    Ok(())
}

pub fn cmd_ablate(g: &GlobalArgs, a: &AblateArgs) -> CmdResult {
    let mut config = AblationConfig::default();
    config.eval.t = a.t;
    for spec in &a.grid {
        let (axis, values) = spec
            .split_once('=')
            .ok_or_else(|| Failure::argument(format!("grid spec {spec:?} is not axis=values")))?;
        config.set_axis(axis.trim(), values)?;
    }
    let data = load_inputs(g, &a.inputs)?;
    let all = data
        .poses
        .ok_or_else(|| Failure::missing("ablation needs --poses (or --synthetic)"))?;
    let by_id: std::collections::HashMap<&str, &Pose> = all.iter().map(|p| (p.frame_id(), p)).collect();
    let poses = data
        .rgb
        .ids()
        .iter()
        .map(|id| by_id.get(id.as_str()).map(|p| (*p).clone()).ok_or_else(|| Error::MissingId(id.clone())))
        .collect::<crate::Result<Vec<Pose>>>()?;
    config.sequence = data.sequence.clone();
    let result = run_ablation(
        &config,
        &AblationData {
            rgb: data.rgb,
            range: data.range,
            camera_bev: Some(data.camera_bev),
            lidar_bev: Some(data.lidar_bev),
            poses,
            clouds: None,
        },
    )?;
    print!("{}", result.table());
    let out = g.output_dir.join("ablation.csv");
    result.write_csv(create_file(&out)?)?;
    write_reports_json(create_file(&g.output_dir.join("ablation.json"))?, &result.reports)?;
    Ok(())
}

//! Command-line interface. [`run`] parses arguments and returns the process
//! exit code: 0 on success, 2 for invalid input, 3 when a prediction frame has
//! no ground-truth counterpart.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::camera::{viewpoint_of, CameraError};
use crate::category::Category;
use crate::dataio::{
    create_output, generate_synthetic, parse_box, read_frames, read_predictions, write_frames, write_predictions,
    AzimuthMode, DataError, FrameRecord, SyntheticSpec,
};
use crate::geom::{best_symmetric_rotation, iou_3d, OrientedBox3, SymmetrySpec};
use crate::metrics::{evaluate, EvalConfig, EvalError};
use crate::oracle::{mc_iou, McConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_KEY_MISMATCH: i32 = 3;

/// Offset added before flooring a histogram coordinate, so values a rounding
/// error below a bin edge land in the bin that starts there.
const BIN_EPSILON: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "boxeval", version, about = "Oriented 3D box IoU and 3D detection evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate predictions against ground truth and write a report.
    Evaluate(EvaluateArgs),
    /// Exact IoU of two boxes given as JSON (inline or a file path).
    Iou(IouArgs),
    /// Viewpoint histograms and per-category counts of a ground-truth file.
    Stats(StatsArgs),
    /// Write a synthetic ground-truth file and matching predictions.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub ground_truth: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// JSON file with any `EvalConfig` fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub iou_threshold: Option<f64>,
    #[arg(long)]
    pub azimuth_threshold: Option<f64>,
    #[arg(long)]
    pub elevation_threshold: Option<f64>,
    /// Comma-separated categories treated as rotationally symmetric.
    #[arg(long, value_delimiter = ',', conflicts_with = "no_symmetry")]
    pub symmetric_categories: Option<Vec<Category>>,
    /// Treat no category as symmetric.
    #[arg(long)]
    pub no_symmetry: bool,
    #[arg(long)]
    pub symmetry_samples: Option<usize>,
    #[arg(long)]
    pub gate_ratio: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "BOXEVAL_WORKERS")]
    pub worker_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IouArgs {
    #[arg(long)]
    pub box_a: String,
    #[arg(long)]
    pub box_b: String,
    /// Maximize over rotations of box A about its vertical axis.
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Also estimate IoU from this many Monte-Carlo samples.
    #[arg(long)]
    pub oracle: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatsFormat {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub ground_truth: PathBuf,
    #[arg(long, default_value_t = 36)]
    pub bins: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: StatsFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// JSON synthetic spec; flags override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_gt: PathBuf,
    #[arg(long)]
    pub out_pred: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub categories: Option<Vec<Category>>,
    #[arg(long)]
    pub sequences: Option<usize>,
    #[arg(long)]
    pub frames_per_sequence: Option<usize>,
    #[arg(long)]
    pub instances_per_sequence: Option<usize>,
    #[arg(long, value_enum)]
    pub azimuth_mode: Option<AzimuthArg>,
    #[arg(long)]
    pub elevation_mean: Option<f64>,
    #[arg(long)]
    pub elevation_std: Option<f64>,
    #[arg(long)]
    pub rotation_noise: Option<f64>,
    #[arg(long)]
    pub translation_noise: Option<f64>,
    #[arg(long)]
    pub scale_noise: Option<f64>,
    #[arg(long)]
    pub yaw_offset: Option<f64>,
    #[arg(long)]
    pub yaw_offset_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AzimuthArg {
    Uniform,
    Front,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

impl From<DataError> for Failure {
    fn from(e: DataError) -> Self {
        Failure::input(e)
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::FrameKeyMismatch { .. } => EXIT_KEY_MISMATCH,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn in_file(path: &Path) -> impl Fn(DataError) -> Failure + '_ {
    move |e| Failure::input(format!("{}: {e}", path.display()))
}

/// Runs the CLI with `args` (including the program name), writing results to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Iou(a) => cmd_iou(&a, out),
        Command::Stats(a) => cmd_stats(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::input),
    }
}

/// Effective configuration: defaults, then the config file, then flags (the
/// worker count flag also reads `BOXEVAL_WORKERS`).
pub fn resolve_config(args: &EvaluateArgs) -> Result<EvalConfig, String> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => EvalConfig::default(),
    };
    if let Some(v) = args.iou_threshold {
        config.iou_threshold = v;
    }
    if let Some(v) = args.azimuth_threshold {
        config.azimuth_threshold_deg = v;
    }
    if let Some(v) = args.elevation_threshold {
        config.elevation_threshold_deg = v;
    }
    if let Some(v) = &args.symmetric_categories {
        config.symmetric_categories = v.iter().copied().collect();
    }
    if args.no_symmetry {
        config.symmetric_categories.clear();
    }
    if let Some(v) = args.symmetry_samples {
        config.symmetry_samples = v;
    }
    if let Some(v) = args.gate_ratio {
        config.gate_ratio = v;
    }
    if args.worker_count.is_some() {
        config.worker_count = args.worker_count;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = resolve_config(args).map_err(Failure::input)?;
    let gt = read_frames(&args.ground_truth).map_err(in_file(&args.ground_truth))?;
    let preds = read_predictions(&args.predictions).map_err(in_file(&args.predictions))?;
    let report = evaluate(&gt, &preds, &config)?;
    let text = match args.format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Md => report.to_markdown(),
    };
    emit(args.output.as_deref(), &text, out)
}

/// Reads a box argument: inline JSON when it starts with `{`, otherwise a
/// file path.
fn load_box(arg: &str, name: &str) -> Result<OrientedBox3, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::input(format!("{name}: {arg}: {e}")))?
    };
    parse_box(&text).map_err(|e| Failure::input(format!("{name}: {e}")))
}

fn cmd_iou(args: &IouArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let a = load_box(&args.box_a, "--box-a")?;
    let b = load_box(&args.box_b, "--box-b")?;
    let (a, result) = if args.symmetric {
        let sym = SymmetrySpec::new(args.samples).ok_or_else(|| Failure::input("--samples must be at least 1"))?;
        let (angle, result) = best_symmetric_rotation(&a, &b, &sym);
        (a.rotated_about_local_y(angle), result)
    } else {
        (a, iou_3d(&a, &b))
    };
    let mut text = format!(
        "iou: {:.6}\nintersection: {:.6}\nunion: {:.6}\n",
        result.iou, result.intersection_volume, result.union_volume
    );
    if let Some(m) = args.oracle {
        let cfg = McConfig::new(m, args.seed).ok_or_else(|| Failure::input("--oracle must be at least 1"))?;
        let est = mc_iou(&a, &b, &cfg);
        text.push_str(&format!(
            "oracle: {:.6} (standard error {:.6}, {} samples)\ndifference: {:.6}\n",
            est.iou,
            est.standard_error,
            est.samples,
            (result.iou - est.iou).abs()
        ));
    }
    emit(None, &text, out)
}

/// Counts and viewpoint histograms for one category (or all of them).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStats {
    /// Category name, or `all` for the dataset total.
    pub category: String,
    pub videos: usize,
    pub frames: usize,
    pub instances: usize,
    pub avg_instance_per_video: f64,
    /// Annotated objects over all frames, one viewpoint each.
    pub observations: usize,
    pub azimuth_histogram: Vec<u64>,
    pub elevation_histogram: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub bins: usize,
    /// `bins + 1` edges over [-180, 180).
    pub azimuth_edges: Vec<f64>,
    /// `bins + 1` edges over [-90, 90].
    pub elevation_edges: Vec<f64>,
    pub categories: Vec<CategoryStats>,
    pub total: CategoryStats,
}

pub fn azimuth_bin(azimuth: f64, bins: usize) -> usize {
    let width = 360.0 / bins as f64;
    (((azimuth + 180.0) / width + BIN_EPSILON).floor() as i64).rem_euclid(bins as i64) as usize
}

pub fn elevation_bin(elevation: f64, bins: usize) -> usize {
    let width = 180.0 / bins as f64;
    (((elevation + 90.0) / width + BIN_EPSILON).floor().max(0.0) as usize).min(bins - 1)
}

#[derive(Default)]
struct Tally {
    videos: std::collections::BTreeSet<String>,
    frames: usize,
    instances: std::collections::BTreeSet<(String, String)>,
    observations: usize,
    azimuth: Vec<u64>,
    elevation: Vec<u64>,
}

impl Tally {
    fn new(bins: usize) -> Self {
        Self {
            azimuth: vec![0; bins],
            elevation: vec![0; bins],
            ..Self::default()
        }
    }

    fn finish(self, category: String) -> CategoryStats {
        let videos = self.videos.len();
        CategoryStats {
            category,
            videos,
            frames: self.frames,
            instances: self.instances.len(),
            avg_instance_per_video: if videos == 0 { 0.0 } else { self.instances.len() as f64 / videos as f64 },
            observations: self.observations,
            azimuth_histogram: self.azimuth,
            elevation_histogram: self.elevation,
        }
    }
}

/// Per-category counts (videos are frame-id sequences, instances are unique
/// per video) and histograms of each object's viewpoint.
pub fn dataset_stats(frames: &[FrameRecord], bins: usize) -> Result<DatasetStats, CameraError> {
    assert!(bins >= 1, "at least one bin");
    let mut per_category: Vec<Tally> = Category::ALL.iter().map(|_| Tally::new(bins)).collect();
    let mut total = Tally::new(bins);
    for frame in frames {
        let seq = frame.sequence_id().to_string();
        let mut present = [false; 9];
        for obj in &frame.objects {
            let vp = viewpoint_of(&frame.camera, &obj.bbox)?;
            let ci = Category::ALL.iter().position(|&c| c == obj.category).expect("known category");
            present[ci] = true;
            for t in [&mut per_category[ci], &mut total] {
                t.videos.insert(seq.clone());
                t.instances.insert((seq.clone(), obj.instance_id.clone()));
                t.observations += 1;
                t.azimuth[azimuth_bin(vp.azimuth, bins)] += 1;
                t.elevation[elevation_bin(vp.elevation, bins)] += 1;
            }
        }
        for (t, _) in per_category.iter_mut().zip(present).filter(|(_, p)| *p) {
            t.frames += 1;
        }
        if !frame.objects.is_empty() {
            total.frames += 1;
            total.videos.insert(seq);
        }
    }
    let categories = Category::ALL
        .iter()
        .zip(per_category)
        .filter(|(_, t)| t.observations > 0)
        .map(|(c, t)| t.finish(c.to_string()))
        .collect();
    Ok(DatasetStats {
        bins,
        azimuth_edges: (0..=bins).map(|i| -180.0 + 360.0 * i as f64 / bins as f64).collect(),
        elevation_edges: (0..=bins).map(|i| -90.0 + 180.0 * i as f64 / bins as f64).collect(),
        categories,
        total: total.finish("all".into()),
    })
}

impl DatasetStats {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    /// Counts table followed by a long-format histogram table.
    pub fn to_csv(&self) -> String {
        let rows = || self.categories.iter().chain(std::iter::once(&self.total));
        let mut out = String::from("category,videos,frames,instances,avg_instance_per_video\n");
        for c in rows() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.category, c.videos, c.frames, c.instances, c.avg_instance_per_video
            ));
        }
        out.push_str("\ncategory,histogram,bin_start,bin_end,count\n");
        for c in rows() {
            for (name, edges, counts) in [
                ("azimuth", &self.azimuth_edges, &c.azimuth_histogram),
                ("elevation", &self.elevation_edges, &c.elevation_histogram),
            ] {
                for (i, n) in counts.iter().enumerate() {
                    out.push_str(&format!("{},{name},{},{},{n}\n", c.category, edges[i], edges[i + 1]));
                }
            }
        }
        out
    }

    /// Counts with categories as columns.
    pub fn to_markdown(&self) -> String {
        let cols: Vec<&CategoryStats> = self.categories.iter().chain(std::iter::once(&self.total)).collect();
        let mut out = String::from("| |");
        for c in &cols {
            out.push_str(&format!(" {} |", c.category));
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(cols.len()));
        out.push('\n');
        let rows: [(&str, fn(&CategoryStats) -> String); 4] = [
            ("No. videos", |c| c.videos.to_string()),
            ("No. frames", |c| c.frames.to_string()),
            ("No. instances", |c| c.instances.to_string()),
            ("Avg instance per video", |c| format!("{:.2}", c.avg_instance_per_video)),
        ];
        for (label, value) in rows {
            out.push_str(&format!("| {label} |"));
            for c in &cols {
                out.push_str(&format!(" {} |", value(c)));
            }
            out.push('\n');
        }
        out
    }
}

fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if args.bins == 0 {
        return Err(Failure::input("--bins must be at least 1"));
    }
    let frames = read_frames(&args.ground_truth).map_err(in_file(&args.ground_truth))?;
    let stats = dataset_stats(&frames, args.bins).map_err(Failure::input)?;
    let text = match args.format {
        StatsFormat::Json => stats.to_json(),
        StatsFormat::Csv => stats.to_csv(),
        StatsFormat::Md => stats.to_markdown(),
    };
    emit(args.output.as_deref(), &text, out)
}

/// Spec from `--spec` (if any) with flag overrides applied.
pub fn resolve_spec(args: &GenerateArgs) -> Result<SyntheticSpec, String> {
    let mut spec: SyntheticSpec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => SyntheticSpec::default(),
    };
    macro_rules! set {
        ($flag:expr => $field:expr) => {
            if let Some(v) = $flag.clone() {
                $field = v;
            }
        };
    }
    set!(args.seed => spec.seed);
    set!(args.categories => spec.categories);
    set!(args.sequences => spec.sequences);
    set!(args.frames_per_sequence => spec.frames_per_sequence);
    set!(args.instances_per_sequence => spec.instances_per_sequence);
    set!(args.elevation_mean => spec.orbit.elevation_mean_deg);
    set!(args.elevation_std => spec.orbit.elevation_std_deg);
    set!(args.rotation_noise => spec.noise.rotation_std_deg);
    set!(args.translation_noise => spec.noise.translation_std);
    set!(args.scale_noise => spec.noise.scale_std_frac);
    set!(args.yaw_offset => spec.noise.yaw_offset_deg);
    set!(args.yaw_offset_fraction => spec.noise.yaw_offset_fraction);
    if let Some(mode) = args.azimuth_mode {
        spec.orbit.azimuth = match mode {
            AzimuthArg::Uniform => AzimuthMode::Uniform,
            AzimuthArg::Front => AzimuthMode::Front,
        };
    }
    Ok(spec)
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = resolve_spec(args).map_err(Failure::input)?;
    let (gt, preds) = generate_synthetic(&spec)?;
    let write = |path: &Path, f: &dyn Fn(&mut dyn Write) -> std::io::Result<()>| {
        let mut w = create_output(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        f(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    };
    write(&args.out_gt, &|w| write_frames(w, &gt))?;
    write(&args.out_pred, &|w| write_predictions(w, &preds))?;
    let objects: usize = gt.iter().map(|f| f.objects.len()).sum();
    let text = format!(
        "wrote {} frames, {objects} objects ({} sequences, seed {}) to {} and {}\n",
        gt.len(),
        spec.sequences,
        spec.seed,
        args.out_gt.display(),
        args.out_pred.display()
    );
    emit(None, &text, out)
}

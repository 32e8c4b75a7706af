//! The `codebook-prior` command line.
//!
//! Every subcommand reads and writes plain files (NPY, JSON, JSONL, CSV)
//! and leaves a `<output>.manifest.json` sidecar next to each output,
//! holding the resolved parameters, the tool version and SHA-256 digests of
//! the inputs. Exit status is 0 on success, 1 for usage errors and 2 for
//! data errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algorithm::{self, Algorithm, RunOptions};
use crate::assignment::ClusterAssignment;
use crate::codebook::Codebook;
use crate::dcpe::{cut_trace, CapRule, MergeTrace};
use crate::error::Error;
use crate::eval::{quality_report, replacement_distortion, run_bench};
use crate::io::{self, Format, Precision};
use crate::metric::Metric;
use crate::npy::{self, NpyData};
use crate::quantize::quantize;
use crate::remap::{decode_random_selection, remap_to_clusters, TokenSequence};
use crate::synthetic::{generate_synthetic, SyntheticSpec};

pub const THREADS_ENV: &str = "CODEBOOK_PRIOR_THREADS";

#[derive(Debug, Parser)]
#[command(name = "codebook-prior", version, about = "Cluster VQ codebooks and work with clustered token sequences")]
struct Cli {
    /// Worker threads for internal parallelism (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a Gaussian-mixture codebook.
    Synth(SynthArgs),
    /// Map query vectors to their nearest codebook tokens.
    Quantize(QuantizeArgs),
    /// Cluster a codebook.
    Cluster(ClusterArgs),
    /// Derive a coarser assignment from a stored merge trace.
    Cut(CutArgs),
    /// Convert token-index sequences to cluster-index sequences.
    Remap(RemapArgs),
    /// Turn cluster-index sequences back into tokens by random selection.
    Decode(DecodeArgs),
    /// Report cluster quality metrics.
    Eval(EvalArgs),
    /// Time clustering algorithms on one codebook.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FileFormat {
    Npy,
    Csv,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Npy => Format::Npy,
            FileFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Preset {
    Standard,
}

#[derive(Debug, Args, Serialize)]
struct SynthArgs {
    /// JSON file holding a synthetic spec ({components, seed, dim}).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    spec: Option<PathBuf>,
    /// Built-in mixture instead of --spec.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Embedding dimension for --preset.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    dim: u64,
    /// Overrides the seed of --spec; seeds --preset (default 0).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "npy")]
    format: FileFormat,
    /// Write 64-bit floats instead of 32-bit.
    #[arg(long)]
    f64: bool,
    /// Create missing parent directories of --out.
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Args, Serialize)]
struct QuantizeArgs {
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    codebook: PathBuf,
    /// Token indices, NPY int32.
    #[arg(long)]
    out: PathBuf,
    /// Optional distances, NPY float64.
    #[arg(long)]
    distances_out: Option<PathBuf>,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AlgoArg {
    Dcpe,
    DcpeNaive,
    Kmeans,
    Kmeanspp,
    KmeansBalanced,
    AggCentroid,
    KmeansInstance,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Dcpe => Algorithm::Dcpe,
            AlgoArg::DcpeNaive => Algorithm::DcpeNaive,
            AlgoArg::Kmeans => Algorithm::KMeans,
            AlgoArg::Kmeanspp => Algorithm::KMeansPlusPlus,
            AlgoArg::KmeansBalanced => Algorithm::KMeansBalanced,
            AlgoArg::AggCentroid => Algorithm::AggCentroid,
            AlgoArg::KmeansInstance => Algorithm::KMeansInstance,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CapRuleArg {
    MergedSize,
    FreezeOversized,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MetricArg {
    Euclidean,
    Cosine,
}

#[derive(Debug, Args, Serialize)]
struct AlgoParams {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_cluster_size: Option<u64>,
    /// How --max-cluster-size limits merges.
    #[arg(long, value_enum, default_value = "merged-size")]
    cap_rule: CapRuleArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    max_iters: u64,
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    /// Distance between tokens (cosine is dcpe/dcpe-naive only).
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    /// Pick merges by the raw distance sum instead of the average (dcpe only).
    #[arg(long)]
    literal_sum_argmin: bool,
}

impl AlgoParams {
    fn options(&self) -> Result<RunOptions, CliError> {
        if !(self.tol >= 0.0) {
            return Err(CliError::Usage(format!("--tol must be non-negative, got {}", self.tol)));
        }
        Ok(RunOptions {
            k: self.k as usize,
            seed: self.seed,
            max_iters: self.max_iters as usize,
            tol: self.tol,
            max_cluster_size: self.max_cluster_size.map(|c| c as usize),
            cap_rule: match self.cap_rule {
                CapRuleArg::MergedSize => CapRule::MergedSize,
                CapRuleArg::FreezeOversized => CapRule::FreezeOversized,
            },
            metric: match self.metric {
                MetricArg::Euclidean => Metric::Euclidean,
                MetricArg::Cosine => Metric::Cosine,
            },
            literal_sum_argmin: self.literal_sum_argmin,
        })
    }
}

#[derive(Debug, Args, Serialize)]
struct ClusterArgs {
    /// Codebook, NPY (or CSV by extension).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "dcpe")]
    algo: AlgoArg,
    #[command(flatten)]
    params: AlgoParams,
    /// Labels, NPY int32.
    #[arg(long)]
    labels_out: PathBuf,
    /// Merge trace, JSONL (agglomerative algorithms only).
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Args, Serialize)]
struct CutArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_tokens: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long)]
    labels_out: PathBuf,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Args, Serialize)]
struct RemapArgs {
    /// Token sequence, NPY integer.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Args, Serialize)]
struct DecodeArgs {
    /// Cluster sequence, NPY integer.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// JSON report.
    #[arg(long)]
    out: PathBuf,
    /// Optional `size,count` CSV of the cluster-size histogram.
    #[arg(long)]
    histogram_csv: Option<PathBuf>,
    /// Query vectors (NPY) for the replacement-distortion metric.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug, Args, Serialize)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated algorithm ids.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dcpe,dcpe-naive")]
    algos: Vec<AlgoArg>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    repeats: u64,
    #[command(flatten)]
    params: AlgoParams,
    /// One BenchResult JSON object per line.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    create_dirs: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

#[derive(Debug, Serialize)]
struct RunManifest<'a, P: Serialize> {
    subcommand: &'a str,
    params: &'a P,
    tool_version: &'static str,
    input_digests: BTreeMap<String, String>,
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Quantize(a) => quantize_cmd(a),
        Command::Cluster(a) => cluster(a),
        Command::Cut(a) => cut(a),
        Command::Remap(a) => remap(a),
        Command::Decode(a) => decode(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
    }
}

fn digest(path: &Path) -> Result<String, Error> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn prepare_output(path: &Path, create_dirs: bool) -> Result<(), Error> {
    match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() && !parent.exists() => {
            if create_dirs {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))
            } else {
                Err(Error::io(
                    parent,
                    std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        "output directory does not exist (pass --create-dirs to create it)",
                    ),
                ))
            }
        }
        _ => Ok(()),
    }
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_manifest<P: Serialize>(output: &Path, subcommand: &str, params: &P, inputs: &[&Path]) -> Result<(), Error> {
    let input_digests = inputs
        .iter()
        .map(|p| Ok((p.display().to_string(), digest(p)?)))
        .collect::<Result<_, Error>>()?;
    let manifest = RunManifest {
        subcommand,
        params,
        tool_version: env!("CARGO_PKG_VERSION"),
        input_digests,
    };
    let path = manifest_path(output);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    eprintln!("wrote {}", output.display());
    Ok(())
}

fn load(path: &Path) -> Result<Codebook, Error> {
    io::load_codebook(path, Format::from_path(path))
}

fn load_labels(path: &Path) -> Result<ClusterAssignment, Error> {
    ClusterAssignment::from_labels(npy::read_indices(path)?)
}

fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let mut inputs = Vec::new();
    let mut spec = match (&a.spec, a.preset) {
        (Some(path), _) => {
            inputs.push(path.as_path());
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_reader::<_, SyntheticSpec>(BufReader::new(file))
                .map_err(|e| Error::Synthetic(format!("{}: {e}", path.display())))?
        }
        (None, Some(Preset::Standard)) => SyntheticSpec::standard(a.dim as usize, 0),
        (None, None) => return Err(CliError::Usage("one of --spec or --preset is required".into())),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let codebook = generate_synthetic(&spec)?;
    prepare_output(&a.out, a.create_dirs)?;
    let precision = if a.f64 { Precision::F64 } else { Precision::F32 };
    io::save_codebook_with(&codebook, &a.out, a.format.into(), precision)?;

    #[derive(Serialize)]
    struct Resolved<'a> {
        args: &'a SynthArgs,
        spec: &'a SyntheticSpec,
    }
    write_manifest(&a.out, "synth", &Resolved { args: a, spec: &spec }, &inputs)?;
    Ok(())
}

fn quantize_cmd(a: &QuantizeArgs) -> Result<(), CliError> {
    let codebook = load(&a.codebook)?;
    let queries = load(&a.queries)?.into_matrix();
    let result = quantize(&queries, &codebook)?;
    let inputs = [a.queries.as_path(), a.codebook.as_path()];

    prepare_output(&a.out, a.create_dirs)?;
    npy::write_indices(&a.out, &result.indices)?;
    write_manifest(&a.out, "quantize", a, &inputs)?;
    if let Some(path) = &a.distances_out {
        prepare_output(path, a.create_dirs)?;
        npy::write_file(path, &[result.distances.len()], &NpyData::F64(result.distances))?;
        write_manifest(path, "quantize", a, &inputs)?;
    }
    Ok(())
}

fn cluster(a: &ClusterArgs) -> Result<(), CliError> {
    let algo = Algorithm::from(a.algo);
    let opts = a.params.options()?;
    if a.trace_out.is_some() && !algo.has_trace() {
        return Err(CliError::Usage(format!("--trace-out is not available for --algo {algo}")));
    }
    if opts.metric != Metric::Euclidean && !matches!(algo, Algorithm::Dcpe | Algorithm::DcpeNaive) {
        return Err(CliError::Usage(format!("--metric {} is only supported by dcpe and dcpe-naive", opts.metric)));
    }
    if (opts.max_cluster_size.is_some() || opts.literal_sum_argmin) && algo != Algorithm::Dcpe {
        return Err(CliError::Usage(
            "--max-cluster-size and --literal-sum-argmin require --algo dcpe".into(),
        ));
    }
    let codebook = load(&a.input)?;
    eprintln!(
        "clustering {} tokens (d = {}) into {} clusters with {algo}",
        codebook.n_tokens(),
        codebook.dim(),
        opts.k
    );
    let out = algorithm::run(algo, &codebook, &opts)?;

    prepare_output(&a.labels_out, a.create_dirs)?;
    npy::write_indices(&a.labels_out, out.assignment.labels())?;
    write_manifest(&a.labels_out, "cluster", a, &[&a.input])?;
    if let (Some(path), Some(trace)) = (&a.trace_out, &out.trace) {
        prepare_output(path, a.create_dirs)?;
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        trace
            .write_jsonl(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))?;
        write_manifest(path, "cluster", a, &[&a.input])?;
    }
    Ok(())
}

fn cut(a: &CutArgs) -> Result<(), CliError> {
    let file = File::open(&a.trace).map_err(|e| Error::io(&a.trace, e))?;
    let trace = MergeTrace::read_jsonl(BufReader::new(file))?;
    let assignment = cut_trace(&trace, a.n_tokens as usize, a.k as usize)?;
    prepare_output(&a.labels_out, a.create_dirs)?;
    npy::write_indices(&a.labels_out, assignment.labels())?;
    write_manifest(&a.labels_out, "cut", a, &[&a.trace])?;
    Ok(())
}

fn remap(a: &RemapArgs) -> Result<(), CliError> {
    let assignment = load_labels(&a.labels)?;
    let seq = TokenSequence(npy::read_indices(&a.input)?);
    let out = remap_to_clusters(&seq, &assignment)?;
    prepare_output(&a.out, a.create_dirs)?;
    npy::write_indices(&a.out, out.as_slice())?;
    write_manifest(&a.out, "remap", a, &[&a.input, &a.labels])?;
    Ok(())
}

fn decode(a: &DecodeArgs) -> Result<(), CliError> {
    let assignment = load_labels(&a.labels)?;
    let seq = TokenSequence(npy::read_indices(&a.input)?);
    let out = decode_random_selection(&seq, &assignment, a.seed)?;
    prepare_output(&a.out, a.create_dirs)?;
    npy::write_indices(&a.out, out.as_slice())?;
    write_manifest(&a.out, "decode", a, &[&a.input, &a.labels])?;
    Ok(())
}

fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let codebook = load(&a.input)?;
    let assignment = load_labels(&a.labels)?;
    let report = quality_report(&codebook, &assignment)?;
    let distortion = match &a.queries {
        Some(q) => {
            let queries = load(q)?.into_matrix();
            Some(replacement_distortion(&codebook, &assignment, &queries, a.seed, a.trials as usize)?)
        }
        None => None,
    };

    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        quality: &'a crate::eval::ClusterQualityReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        replacement_distortion: Option<f64>,
    }
    let mut inputs = vec![a.input.as_path(), a.labels.as_path()];
    if let Some(q) = &a.queries {
        inputs.push(q);
    }

    prepare_output(&a.out, a.create_dirs)?;
    let mut text = serde_json::to_string_pretty(&Report {
        quality: &report,
        replacement_distortion: distortion,
    })
    .expect("report serializes");
    text.push('\n');
    fs::write(&a.out, text).map_err(|e| Error::io(&a.out, e))?;
    write_manifest(&a.out, "eval", a, &inputs)?;

    if let Some(path) = &a.histogram_csv {
        prepare_output(path, a.create_dirs)?;
        let mut csv = String::from("size,count\n");
        for (size, count) in &report.size_histogram {
            csv.push_str(&format!("{size},{count}\n"));
        }
        fs::write(path, csv).map_err(|e| Error::io(path, e))?;
        write_manifest(path, "eval", a, &inputs)?;
    }
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<(), CliError> {
    let codebook = load(&a.input)?;
    let opts = a.params.options()?;
    let algos: Vec<Algorithm> = a.algos.iter().copied().map(Algorithm::from).collect();
    let results = run_bench(&codebook, &algos, a.repeats as usize, &opts)?;

    prepare_output(&a.out, a.create_dirs)?;
    let file = File::create(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let mut w = BufWriter::new(file);
    for r in &results {
        eprintln!("{:>16}: {:.6} s (median of {})", r.algo, r.wall_time, r.timings.len());
        serde_json::to_writer(&mut w, r).expect("result serializes");
        w.write_all(b"\n").map_err(|e| Error::io(&a.out, e))?;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    write_manifest(&a.out, "bench", a, &[&a.input])?;
    Ok(())
}

//! Command-line front end: ingestion, index building, pairwise scores, and
//! the benchmark protocol, all reproducible from a single seed.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vocrel::bench::{parse_judgements, run_benchmark, BenchConfig};
use vocrel::corpus::parse_corpus;
use vocrel::graph::{GraphOptions, GraphVariant};
use vocrel::ic::{dump_ic, IcConfig, IcUniverse};
use vocrel::index::Indexes;
use vocrel::measures::{compute, Measure};
use vocrel::vocab::parse_vocabulary;

#[derive(Parser)]
#[command(
    name = "vocrel",
    version,
    about = "Publication relatedness over hierarchical controlled vocabularies"
)]
struct Cli {
    /// Bound internal parallelism; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the inputs, derive IC and graphs, and persist a binary index.
    BuildIndex(BuildIndexArgs),
    /// Score document pairs with one measure.
    Compute(ComputeArgs),
    /// Run the full evaluation protocol and write the report files.
    Bench(BenchArgs),
    /// Bin one measure's pair scores into a density histogram.
    Histogram(HistogramArgs),
    /// Dump per-term frequency, subtree mass, and information content.
    DumpIc(DumpIcArgs),
    /// Print the shortest-path distance between two terms.
    TermDistance(TermDistanceArgs),
}

/// Where the index comes from: a persisted file, or raw vocabulary + corpus
/// plus derivation knobs.
#[derive(Args, Serialize)]
struct SourceArgs {
    /// Load a persisted index instead of raw inputs.
    #[arg(long, conflicts_with_all = ["vocab", "corpus", "ic_log_base", "ic_universe", "no_virtual_root"])]
    index: Option<PathBuf>,

    /// Vocabulary file: id<TAB>name<TAB>tree_number(;tree_number)*.
    #[arg(long, required_unless_present = "index")]
    vocab: Option<PathBuf>,

    /// Corpus file: doc_id<TAB>term_entry(;term_entry)*.
    #[arg(long, required_unless_present = "index")]
    corpus: Option<PathBuf>,

    /// Logarithm base for information content ("e" or a number > 1).
    #[arg(long, default_value = "e", value_parser = parse_log_base)]
    ic_log_base: f64,

    /// Which terms the IC denominator sums over.
    #[arg(long, value_enum, default_value_t = UniverseArg::All)]
    ic_universe: UniverseArg,

    /// Drop the virtual root; cross-category distances become errors.
    #[arg(long)]
    no_virtual_root: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum UniverseArg {
    All,
    Observed,
}

fn parse_log_base(text: &str) -> Result<f64, String> {
    if text == "e" {
        return Ok(std::f64::consts::E);
    }
    let value: f64 = text.parse().map_err(|_| format!("invalid log base `{text}`"))?;
    if value > 1.0 {
        Ok(value)
    } else {
        Err(format!("log base must exceed 1, got {value}"))
    }
}

impl SourceArgs {
    fn load(&self) -> Result<Indexes> {
        if let Some(path) = &self.index {
            return Indexes::load(path)
                .with_context(|| format!("loading index {}", path.display()));
        }
        let vocab_path = self.vocab.as_ref().expect("clap enforces presence");
        let corpus_path = self.corpus.as_ref().expect("clap enforces presence");
        let vocab = parse_vocabulary(open(vocab_path)?)
            .with_context(|| format!("parsing vocabulary {}", vocab_path.display()))?;
        let corpus = parse_corpus(open(corpus_path)?, &vocab)
            .with_context(|| format!("parsing corpus {}", corpus_path.display()))?;
        let ic_config = IcConfig {
            log_base: self.ic_log_base,
            universe: match self.ic_universe {
                UniverseArg::All => IcUniverse::AllVocabulary,
                UniverseArg::Observed => IcUniverse::Observed,
            },
        };
        let options = GraphOptions {
            virtual_root: !self.no_virtual_root,
        };
        Ok(Indexes::build(vocab, corpus, ic_config, options)?)
    }
}

#[derive(Args, Serialize)]
struct BuildIndexArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output path for the versioned binary index.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ComputeArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Measure token, e.g. `boudreau`, `ahlgren`, `dist3:dic`.
    #[arg(long)]
    measure: String,
    /// Pair file: doc_id<TAB>doc_id per line.
    #[arg(long)]
    pairs: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Relevance judgements: topic_id<TAB>doc_id<TAB>grade per line.
    #[arg(long)]
    qrels: PathBuf,
    /// `all` or a comma-separated list of measure tokens.
    #[arg(long, default_value = "all")]
    measures: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    iterations: u32,
    #[arg(long, default_value_t = 10)]
    sample_size: usize,
    #[arg(long, default_value_t = 0.10)]
    topic_threshold: f64,
    #[arg(long, default_value_t = 50)]
    hist_bins: usize,
    /// Report table output path.
    #[arg(long)]
    out: PathBuf,
    /// Structured report path; defaults to the table path with `.json`.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Histogram series path; defaults to the table path with `.hist.tsv`.
    #[arg(long)]
    hist_out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct HistogramArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    measure: String,
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Lower bound; default 0.
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    /// Upper bound; defaults to 0.5 for similarities and 17.5 for distances.
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DumpIcArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TermDistanceArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Graph variant: `unit` or `dic`.
    #[arg(long, default_value = "unit")]
    graph: String,
    term_a: String,
    term_b: String,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::BuildIndex(args) => build_index(args),
        Command::Compute(args) => compute_pairs(args),
        Command::Bench(args) => bench(args),
        Command::Histogram(args) => histogram(args),
        Command::DumpIc(args) => dump_ic_cmd(args),
        Command::TermDistance(args) => term_distance(args),
    }
}

/// Every run echoes its resolved configuration to stderr.
fn echo_config<T: Serialize>(subcommand: &str, args: &T) {
    let value = serde_json::json!({ "subcommand": subcommand, "args": args });
    eprintln!("config: {value}");
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn parse_measures(text: &str) -> Result<Vec<Measure>> {
    if text == "all" {
        return Ok(Measure::ALL.to_vec());
    }
    text.split(',')
        .map(|tok| tok.trim().parse::<Measure>().map_err(Into::into))
        .collect()
}

fn parse_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match trimmed.split_once('\t') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains('\t') => {
                pairs.push((a.to_owned(), b.to_owned()));
            }
            _ => bail!(
                "{}:{}: expected `doc_id<TAB>doc_id`",
                path.display(),
                lineno + 1
            ),
        }
    }
    Ok(pairs)
}

fn build_index(args: BuildIndexArgs) -> Result<()> {
    echo_config("build-index", &args);
    let indexes = args.source.load()?;
    indexes
        .save(&args.out)
        .with_context(|| format!("writing index {}", args.out.display()))?;
    eprintln!(
        "indexed {} terms, {} records -> {}",
        indexes.vocab.len(),
        indexes.corpus.len(),
        args.out.display()
    );
    Ok(())
}

fn compute_pairs(args: ComputeArgs) -> Result<()> {
    echo_config("compute", &args);
    let measure: Measure = args.measure.parse()?;
    let indexes = args.source.load()?;
    let pairs = parse_pairs(&args.pairs)?;
    let mut out = String::new();
    for (a, b) in &pairs {
        let rec_a = indexes.corpus.record(indexes.corpus.require(a)?);
        let rec_b = indexes.corpus.record(indexes.corpus.require(b)?);
        let score = compute(measure, rec_a, rec_b, &indexes)?;
        out.push_str(&format!(
            "{a}\t{b}\t{:.6}\t{}\n",
            score.value, score.orientation
        ));
    }
    write_output(args.out.as_ref(), &out)
}

fn bench(args: BenchArgs) -> Result<()> {
    echo_config("bench", &args);
    let measures = parse_measures(&args.measures)?;
    let indexes = args.source.load()?;
    let passages = parse_judgements(open(&args.qrels)?)
        .with_context(|| format!("parsing judgements {}", args.qrels.display()))?;
    let config = BenchConfig {
        seed: args.seed,
        iterations: args.iterations,
        sample_size: args.sample_size,
        topic_threshold: args.topic_threshold,
        histogram_bins: args.hist_bins,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&measures, &indexes, &passages, &config)?;
    for topic in &report.skipped_topics {
        eprintln!(
            "warning: topic {topic} skipped (needs {} documents in both grade classes)",
            config.sample_size
        );
    }

    let json_path = args
        .json_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("json"));
    let hist_path = args
        .hist_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("hist.tsv"));
    std::fs::write(&args.out, report.to_tsv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    std::fs::write(&json_path, report.to_json())
        .with_context(|| format!("writing {}", json_path.display()))?;
    std::fs::write(&hist_path, report.histograms_tsv())
        .with_context(|| format!("writing {}", hist_path.display()))?;
    eprintln!(
        "benchmarked {} measures over {} rr / {} nr-r pairs -> {}",
        report.rows.len(),
        report.rr_pairs,
        report.nrr_pairs,
        args.out.display()
    );
    Ok(())
}

fn histogram(args: HistogramArgs) -> Result<()> {
    echo_config("histogram", &args);
    let measure: Measure = args.measure.parse()?;
    let indexes = args.source.load()?;
    let pairs = parse_pairs(&args.pairs)?;
    let mut values = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        let rec_a = indexes.corpus.record(indexes.corpus.require(a)?);
        let rec_b = indexes.corpus.record(indexes.corpus.require(b)?);
        values.push(compute(measure, rec_a, rec_b, &indexes)?.value);
    }
    let hi = args.hi.unwrap_or(match measure.orientation() {
        vocrel::measures::Orientation::Similarity => 0.5,
        vocrel::measures::Orientation::Distance => 17.5,
    });
    let hist = vocrel::stats::density_histogram(&values, args.bins, args.lo, hi)?;
    let mut out = String::from("measure\tbin_lo\tbin_hi\tcount\tdensity\n");
    for bin in &hist.bins {
        out.push_str(&format!(
            "{measure}\t{:.6}\t{:.6}\t{}\t{:.6}\n",
            bin.lo, bin.hi, bin.count, bin.density
        ));
    }
    out.push_str(&format!(
        "{measure}\t{:.6}\tinf\t{}\t0.000000\n",
        hi, hist.overflow
    ));
    write_output(args.out.as_ref(), &out)
}

fn dump_ic_cmd(args: DumpIcArgs) -> Result<()> {
    echo_config("dump-ic", &args);
    let indexes = args.source.load()?;
    let dump = dump_ic(&indexes.vocab, &indexes.freqs, &indexes.ic);
    write_output(args.out.as_ref(), &dump)
}

fn term_distance(args: TermDistanceArgs) -> Result<()> {
    echo_config("term-distance", &args);
    let variant = match args.graph.as_str() {
        "unit" => GraphVariant::Unit,
        "dic" => GraphVariant::DeltaIc,
        other => bail!("unknown graph variant `{other}` (expected `unit` or `dic`)"),
    };
    let indexes = args.source.load()?;
    let a = indexes.vocab.require(&args.term_a)?;
    let b = indexes.vocab.require(&args.term_b)?;
    let (graph, cache) = indexes.graph(variant);
    let d = graph.distance(cache, a, b)?;
    println!("{d:.6}");
    Ok(())
}

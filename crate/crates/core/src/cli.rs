//! `topk-lsh` command-line frontend.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{format_sig6, run_grid, write_csv, ExperimentGrid};
use crate::data::{
    generate, make_queries, parse_rankings, write_rankings, GeneratorSpec, Popularity, QueryMode,
    QueryWorkloadSpec,
};
use crate::engine::SearchEngine;
use crate::lshmodel::{candidate_probability, f_ratio, p1_scheme1, p1_scheme2, Scheme};
use crate::pairindex::Variant;
use crate::ranking::{Dataset, Method, QueryParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "topk-lsh",
    version,
    about = "Similarity search over top-k rankings under generalized Kendall's Tau"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic rankings file.
    Generate(GenerateArgs),
    /// Run one query against a rankings file.
    Query(QueryArgs),
    /// Run a benchmark grid and write CSV.
    Bench(BenchArgs),
    /// Emit the analytic LSH model curves as CSV.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Uniform,
    Zipf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 25_000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 6_000)]
    pub domain: usize,
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    pub dist: Dist,
    #[arg(long, default_value_t = 1.0)]
    pub zipf_exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Query items, whitespace separated, best first.
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value = "oracle", value_parser = parse_method)]
    pub method: Method,
    /// Number of pair lookups for the LSH methods, or `safe` for the
    /// overlap-guided exhaustive budget.
    #[arg(long, default_value = "1")]
    pub l: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryModeArg {
    Perturbed,
    Uniform,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
    pub thetas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,3,6,10")]
    pub ls: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "invin,invin-drop,scheme1,scheme2", value_parser = parse_method)]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = QueryModeArg::Perturbed)]
    pub query_mode: QueryModeArg,
    #[arg(long, default_value_t = 2)]
    pub swaps: usize,
    #[arg(long, default_value_t = 1)]
    pub replacements: usize,
    /// Value of the `dataset` column; defaults to the data file stem.
    #[arg(long)]
    pub label: Option<String>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run queries of a cell in parallel (noisier latency).
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
    pub thetas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub ls: Vec<u32>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(&args, stdout),
        Command::Query(args) => cmd_query(&args, stdout, stderr),
        Command::Bench(args) => cmd_bench(&args, stdout, stderr),
        Command::Analyze(args) => cmd_analyze(&args, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "I/O error: {msg}");
            EXIT_IO
        }
    }
}

fn load(path: &Path) -> Result<Dataset, Failure> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_rankings(BufReader::new(file))
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_generate(args: &GenerateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let popularity = match args.dist {
        Dist::Uniform => Popularity::Uniform,
        Dist::Zipf => Popularity::Zipf(args.zipf_exponent),
    };
    let spec = GeneratorSpec {
        n: args.n,
        k: args.k,
        domain_size: args.domain,
        popularity,
        seed: args.seed,
    };
    let dataset = generate(&spec)?;
    let file = File::create(&args.out).map_err(io_err(&args.out))?;
    write_rankings(&dataset, BufWriter::new(file)).map_err(io_err(&args.out))?;

    let mut df = vec![0usize; args.domain];
    for r in dataset.iter() {
        for item in r.items() {
            df[item.0 as usize] += 1;
        }
    }
    let max_df = df.iter().copied().max().unwrap_or(0);
    df.sort_unstable();
    let median_df = df[df.len() / 2];
    let skew = match popularity {
        Popularity::Uniform => "uniform".to_owned(),
        Popularity::Zipf(s) => format!("zipf({s})"),
    };
    writeln!(
        stdout,
        "n={} k={} domain={} distinct_items={} popularity={} max_df={} median_df={}",
        dataset.len(),
        dataset.k(),
        args.domain,
        dataset.domain().len(),
        skew,
        max_df,
        median_df
    )
    .map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_query(
    args: &QueryArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let dataset = load(&args.data)?;
    let tokens: Vec<&str> = args.q.split_whitespace().collect();
    let q = dataset.encode_query(u32::MAX, &tokens)?;
    if q.len() != dataset.k() {
        return Err(Failure::Usage(format!(
            "query has {} items but the dataset has k = {}",
            q.len(),
            dataset.k()
        )));
    }
    let k = dataset.k();
    let safe = args.l.trim().eq_ignore_ascii_case("safe");
    let l = if safe {
        1
    } else {
        args.l.trim().parse::<usize>().map_err(|_| {
            Failure::Usage(format!(
                "--l expects a positive integer or `safe`, got {:?}",
                args.l
            ))
        })?
    };
    let params = QueryParams::new(args.theta, k, l, args.seed, args.method)?;
    let engine = SearchEngine::new(dataset);
    let build = engine.prepare(args.method);
    let _ = writeln!(stderr, "index build: {:.3} ms", build.as_secs_f64() * 1e3);

    let start = Instant::now();
    let outcome = match (safe, args.method) {
        (true, Method::Scheme1) => {
            engine
                .pair_index(Variant::Unsorted)
                .query_safe(engine.dataset(), &q, &params)?
        }
        (true, Method::Scheme2) => {
            engine
                .pair_index(Variant::Sorted)
                .query_safe(engine.dataset(), &q, &params)?
        }
        _ => engine.search(&q, &params)?,
    };
    let elapsed = start.elapsed();

    let mut hits = outcome.results.clone();
    hits.sort_unstable_by_key(|h| (h.distance, h.id));
    let write = |stdout: &mut dyn Write| -> std::io::Result<()> {
        writeln!(
            stdout,
            "# method={} k={} theta={} theta_d={} candidates={} results={}",
            args.method,
            k,
            format_sig6(params.theta),
            format_sig6(params.theta_d),
            outcome.candidates.len(),
            hits.len()
        )?;
        for hit in &hits {
            writeln!(
                stdout,
                "{}\t{}",
                engine.dataset().ranking_label(hit.id),
                hit.distance
            )?;
        }
        Ok(())
    };
    write(stdout).map_err(|e| Failure::Io(e.to_string()))?;
    let _ = writeln!(stderr, "query: {:.3} ms", elapsed.as_secs_f64() * 1e3);
    Ok(())
}

fn cmd_bench(
    args: &BenchArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let dataset = load(&args.data)?;
    let mode = match args.query_mode {
        QueryModeArg::Perturbed => QueryMode::Perturbed {
            swaps: args.swaps,
            replacements: args.replacements,
        },
        QueryModeArg::Uniform => QueryMode::UniformRandom,
    };
    let queries = make_queries(
        &dataset,
        &QueryWorkloadSpec {
            count: args.queries,
            mode,
            seed: args.seed,
        },
    )?;
    let grid = ExperimentGrid {
        methods: args.methods.clone(),
        thetas: args.thetas.clone(),
        ls: args.ls.clone(),
        query_count: args.queries,
        seed: args.seed,
        parallel: args.parallel,
    };
    grid.validate()?;
    let label = args.label.clone().unwrap_or_else(|| {
        args.data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });

    let engine = SearchEngine::new(dataset);
    for &method in &args.methods {
        let build = engine.prepare(method);
        if !build.is_zero() {
            let _ = writeln!(
                stderr,
                "index build for {method}: {:.3} ms",
                build.as_secs_f64() * 1e3
            );
        }
    }
    let rows = run_grid(&engine, &label, &queries, &grid)?;
    for row in rows.iter().filter(|r| r.l_clamped) {
        let _ = writeln!(
            stderr,
            "warning: {} theta={} l clamped to {} (k = {})",
            row.method,
            format_sig6(row.theta),
            row.l.unwrap_or_default(),
            row.k
        );
    }
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            write_csv(&rows, BufWriter::new(file)).map_err(io_err(path))
        }
        None => write_csv(&rows, stdout).map_err(|e| Failure::Io(e.to_string())),
    }
}

pub const ANALYZE_HEADER: &str = "k,theta,scheme,m,l,p1,candidate_prob,f_ratio";

fn cmd_analyze(args: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if args.k.is_empty() || args.k.contains(&0) {
        return Err(Failure::Usage("k values must be positive".into()));
    }
    if let Some(t) = args.thetas.iter().find(|t| !(0.0..1.0).contains(*t)) {
        return Err(Failure::Usage(format!("theta {t} outside [0, 1)")));
    }
    if args.ls.is_empty() || args.ls.contains(&0) {
        return Err(Failure::Usage("l values must be positive".into()));
    }
    let mut out = String::new();
    out.push_str(ANALYZE_HEADER);
    out.push('\n');
    for &k in &args.k {
        for &theta in &args.thetas {
            let theta_d = theta * (k * k) as f64;
            let ratio = f_ratio(k, theta_d);
            for scheme in [Scheme::One, Scheme::Two] {
                let p1 = match scheme {
                    Scheme::One => p1_scheme1(k, theta_d),
                    Scheme::Two => p1_scheme2(k, theta_d),
                };
                for &l in &args.ls {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        k,
                        format_sig6(theta),
                        scheme.name(),
                        scheme.m(),
                        l,
                        format_sig6(p1),
                        format_sig6(candidate_probability(p1, scheme.m(), l)),
                        format_sig6(ratio)
                    ));
                }
            }
        }
    }
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))
}

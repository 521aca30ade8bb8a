mod inputs;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use treewilf_core::grammar::Grammar;
use treewilf_core::systems::{self, AlgebraicSystem, Weights};
use treewilf_core::wilf::{self, ClassifyOptions, Mode, ProgressFn};
use treewilf_core::{elim, series, EliminationOptions, Error, DEFAULT_ORDER};

use crate::inputs::{PatternArgs, ValidationError};
use crate::verify::{Suite, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "treewilf", version, about = "Wilf classes of tree patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition all binary patterns with n leaves into Wilf classes.
    Classify(ClassifyArgs),
    /// Print the truncated avoidance, enumeration or operad series of a pattern.
    Series(SeriesArgs),
    /// Run the oracle, grammar, partition, mirror and certificate checks.
    Verify(VerifyArgs),
    /// Print the unambiguous grammar of the avoiding trees.
    Grammar(GrammarArgs),
    /// Print an algebraic system for a pattern set.
    System(SystemArgs),
    /// Print an annihilating polynomial of the avoidance series.
    Eliminate(EliminateArgs),
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Number of leaves of the patterns.
    #[arg(short = 'n', long = "leaves")]
    n: usize,
    /// Truncation order, in vertices.
    #[arg(short = 'K', long = "order", default_value_t = DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value = "av")]
    mode: Mode,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "WILF_WORKERS")]
    workers: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Append a CSV summary row to this file, writing the header if it is new.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Include wall time in the JSON report.
    #[arg(long)]
    timing: bool,
    /// Solve both patterns of every mirror pair.
    #[arg(long)]
    no_mirror: bool,
    /// Solve both patterns of every mirror pair and fail if their series differ.
    #[arg(long)]
    verify_mirror: bool,
    /// Also report class counts at these smaller orders (comma separated).
    #[arg(long, value_delimiter = ',')]
    orders: Vec<usize>,
    /// Permit sweeps with 10 or more leaves.
    #[arg(long)]
    allow_long: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    Av,
    En,
    Operad,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[command(flatten)]
    patterns: PatternArgs,
    #[arg(long, value_enum, default_value = "av")]
    kind: SeriesKind,
    /// Truncation order: in vertices for av and en, in leaves for operad.
    #[arg(short = 'K', long = "order", default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Print the canonical JSON serialization instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Largest pattern size, in leaves, for the pattern sweeps.
    #[arg(long, default_value_t = 5)]
    max_leaves: usize,
    /// Oracle bound, in internal nodes.
    #[arg(long, default_value_t = 9)]
    max_nodes: usize,
    /// Restrict the grammar suite to these patterns.
    #[arg(long)]
    pattern: Option<String>,
    /// Longest word tested by the grammar suite.
    #[arg(long, default_value_t = 15)]
    max_len: usize,
    /// Series order for the certificate and cross-check suites.
    #[arg(short = 'K', long = "order", default_value_t = 100)]
    order: usize,
    #[arg(long, env = "WILF_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GrammarFormat {
    Bnf,
    Json,
}

#[derive(Args, Debug)]
struct GrammarArgs {
    #[command(flatten)]
    patterns: PatternArgs,
    #[arg(long, value_enum, default_value = "bnf")]
    format: GrammarFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// From the grammar, one unknown per nonterminal.
    Cs,
    /// One unknown per avoiding stamp.
    Stamp,
    /// Minimised matching automaton.
    Automaton,
    /// Enumeration system over truncation states (single binary pattern).
    Truncation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WeightKind {
    Vertex,
    Leaf,
}

#[derive(Args, Debug)]
struct SystemArgs {
    #[command(flatten)]
    patterns: PatternArgs,
    #[arg(long, value_enum, default_value = "cs")]
    method: Method,
    /// Weight of the terminals for the cs and stamp methods.
    #[arg(long, value_enum)]
    weights: Option<WeightKind>,
}

#[derive(Args, Debug)]
struct EliminateArgs {
    #[command(flatten)]
    patterns: PatternArgs,
    #[arg(long, default_value_t = elim::DEFAULT_MAX_UNKNOWNS)]
    max_unknowns: usize,
    /// Give up after this many seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

/// A check ran and failed.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<VerificationFailed>().is_some() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Bound(_) | Error::Deadline => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<ValidationError>().is_some() {
            return 1;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Classify(a) => classify(a),
        Command::Series(a) => print_series(a),
        Command::Verify(a) => run_verify(a),
        Command::Grammar(a) => grammar(a),
        Command::System(a) => system(a),
        Command::Eliminate(a) => eliminate(a),
    }
}

fn heartbeat(label: String) -> ProgressFn {
    let start = Instant::now();
    let last = std::sync::Mutex::new(Instant::now());
    Arc::new(move |done, total| {
        let mut last = last.lock().expect("heartbeat lock");
        if done == total || last.elapsed() >= Duration::from_secs(5) {
            *last = Instant::now();
            eprintln!("[{label}] {done}/{total} series solved, {:.1}s", start.elapsed().as_secs_f64());
        }
    })
}

fn classify(a: ClassifyArgs) -> anyhow::Result<()> {
    if a.n < 2 {
        bail!(ValidationError::new(format!("-n must be at least 2, got {}", a.n)));
    }
    if a.n >= 10 && !a.allow_long {
        bail!(ValidationError::new(format!(
            "n={} means {} patterns; pass --allow-long to run it anyway",
            a.n,
            catalan(a.n - 1)
        )));
    }
    if a.order < 2 * a.n {
        bail!(ValidationError::new(format!("-K must be at least 2n = {}, got {}", 2 * a.n, a.order)));
    }
    if a.workers == Some(0) {
        bail!(ValidationError::new("--workers must be positive"));
    }
    let mut scan: Vec<usize> = a.orders.iter().copied().filter(|&k| k < a.order).collect();
    scan.sort_unstable();
    scan.dedup();
    if let Some(&k) = scan.first() {
        if k < 2 * a.n {
            bail!(ValidationError::new(format!("scan order {k} is below 2n = {}", 2 * a.n)));
        }
    }

    let opts = ClassifyOptions {
        workers: a.workers,
        mirror_reduction: !a.no_mirror && !a.verify_mirror,
        verify_mirror: a.verify_mirror,
        progress: Some(heartbeat(format!("n={} {}", a.n, a.mode.short()))),
    };
    let report = wilf::classify(a.n, a.order, a.mode, &opts)?;
    let json = report.to_json(a.timing);
    match &a.output {
        Some(path) => {
            std::fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{json}"),
    }
    if let Some(path) = &a.csv {
        append_csv(path, &report.csv_row())?;
    }
    if !scan.is_empty() {
        scan.push(a.order);
        let counts = wilf::stabilization_scan(a.n, &scan, a.mode, &ClassifyOptions { progress: None, ..opts })?;
        for (k, c) in counts {
            eprintln!("n={} mode={} K={k} classes={c}", a.n, a.mode.short());
        }
    }
    let bound = match report.bound {
        wilf::CountBound::Exact { .. } => "exact",
        wilf::CountBound::Lower => "lower bound",
    };
    if a.output.is_some() {
        println!("{}", report.summary_line());
    } else {
        eprintln!("{}", report.summary_line());
    }
    eprintln!("class count is a {bound}");
    Ok(())
}

fn catalan(n: usize) -> u128 {
    (0..n).fold(1u128, |c, i| c * 2 * (2 * i as u128 + 1) / (i as u128 + 2))
}

fn append_csv(path: &std::path::Path, row: &str) -> anyhow::Result<()> {
    use std::io::Write;
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(f, "{}", wilf::ClassificationReport::CSV_HEADER)?;
    }
    writeln!(f, "{row}")?;
    Ok(())
}

fn print_series(a: SeriesArgs) -> anyhow::Result<()> {
    let set = a.patterns.load()?;
    if a.order < 1 {
        bail!(ValidationError::new("-K must be at least 1"));
    }
    if set.is_degenerate() {
        bail!(Error::Degenerate("the free end occurs in every tree, so no tree avoids it".into()));
    }
    let truncated = match a.kind {
        SeriesKind::Av => series::solve_target(&systems::avoidance_system(&set)?, a.order)?,
        SeriesKind::En => {
            let [p] = set.patterns() else {
                bail!(ValidationError::new("--kind en takes exactly one pattern"));
            };
            series::TruncatedSeries::Bi(series::en_series(p, a.order)?)
        }
        SeriesKind::Operad => series::solve_target(&systems::stamp_system(&set), a.order)?,
    };
    if a.json {
        println!("{}", truncated.canonical_json());
    } else {
        println!("{}", truncated.to_text());
    }
    Ok(())
}

fn run_verify(a: VerifyArgs) -> anyhow::Result<()> {
    if a.workers == Some(0) {
        bail!(ValidationError::new("--workers must be positive"));
    }
    let cfg = VerifyConfig {
        max_leaves: a.max_leaves,
        max_nodes: a.max_nodes,
        patterns: a.pattern,
        max_len: a.max_len,
        order: a.order,
        workers: a.workers,
    };
    let outcomes = verify::run(a.suite, &cfg)?;
    let mut failed = Vec::new();
    for o in &outcomes {
        println!("{}: {} ({})", o.suite, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed.push(o.suite.to_string());
        }
    }
    if failed.is_empty() {
        println!("all {} suite(s) passed", outcomes.len());
        Ok(())
    } else {
        Err(VerificationFailed(format!("failed suites: {}", failed.join(", "))).into())
    }
}

fn grammar(a: GrammarArgs) -> anyhow::Result<()> {
    let set = a.patterns.load()?;
    let g = Grammar::build(&set);
    match a.format {
        GrammarFormat::Bnf => print!("{}", g.to_bnf()),
        GrammarFormat::Json => println!("{}", serde_json::to_string_pretty(&g.to_json())?),
    }
    eprintln!("{} nonterminals including S, {} rules", g.nonterminal_count(), g.rules().len());
    Ok(())
}

fn weights(kind: WeightKind, set: &treewilf_core::PatternSet) -> Weights {
    match kind {
        WeightKind::Vertex => Weights::vertex(set.alphabet()),
        WeightKind::Leaf => Weights::leaf(set.alphabet()),
    }
}

fn build_system(
    set: &treewilf_core::PatternSet,
    method: Method,
    kind: Option<WeightKind>,
) -> anyhow::Result<AlgebraicSystem> {
    let only_vertex = |m: &str| -> anyhow::Result<()> {
        if kind.is_some_and(|k| k != WeightKind::Vertex) {
            bail!(ValidationError::new(format!("--method {m} counts vertices; --weights does not apply")));
        }
        Ok(())
    };
    Ok(match method {
        Method::Cs => systems::cs_system(&Grammar::build(set), &weights(kind.unwrap_or(WeightKind::Vertex), set))?,
        Method::Stamp => systems::stamp_system_weighted(set, &weights(kind.unwrap_or(WeightKind::Leaf), set))?,
        Method::Automaton => {
            only_vertex("automaton")?;
            systems::avoidance_system(set)?
        }
        Method::Truncation => {
            only_vertex("truncation")?;
            let [p] = set.patterns() else {
                bail!(ValidationError::new("--method truncation takes exactly one pattern"));
            };
            if set.alphabet() != &treewilf_core::Alphabet::binary() {
                bail!(ValidationError::new("--method truncation needs the binary alphabet"));
            }
            systems::enumeration_system(p)?
        }
    })
}

fn system(a: SystemArgs) -> anyhow::Result<()> {
    let set = a.patterns.load()?;
    let sys = build_system(&set, a.method, a.weights)?;
    print!("{}", sys.to_text());
    eprintln!("{} equations", sys.len());
    Ok(())
}

fn eliminate(a: EliminateArgs) -> anyhow::Result<()> {
    let set = a.patterns.load()?;
    let deadline = match a.timeout {
        Some(s) if !(s.is_finite() && s > 0.0) => bail!(ValidationError::new("--timeout must be a positive number")),
        Some(s) => Some(Instant::now() + Duration::from_secs_f64(s)),
        None => None,
    };
    let sys = systems::avoidance_system(&set)?;
    let opts = EliminationOptions { max_unknowns: a.max_unknowns, deadline, order: None };
    let p = elim::eliminate(&sys, &opts)?;
    println!("{p}");
    Ok(())
}

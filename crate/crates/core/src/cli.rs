//! The `ldp-motifs` command line.
//!
//! [`run`] parses arguments and returns the text to print, so every
//! subcommand is testable without spawning a process. Exit codes come from
//! [`Error::exit_code`]: 2 usage, 3 size guard, 4 I/O.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::graph::{load_graph_source, Graph};
use crate::harness::{self, ExperimentPlan, Query};
use crate::mechanism::{Mechanism, RunConfig};
use crate::netsim::Channel;
use crate::oracle;
use crate::pattern::{parse_pattern, PatternSpec};

#[derive(Debug, Parser)]
#[command(name = "ldp-motifs", version, about = "Edge-LDP walk, path and tree-pattern counting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exact (non-private) count.
    Exact(ExactArgs),
    /// Run a mechanism for several trials and summarize.
    Run(RunArgs),
    /// Run an experiment plan and write a CSV report.
    Bench(BenchArgs),
    /// Compare tree formulations of one pattern.
    CompareTrees(CompareArgs),
    /// Run one trial and print its transcript.
    Transcript(RunArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph source: `er:N:p[:seed]`, `file:PATH` or a path.
    #[arg(long)]
    pub graph: String,
    /// Master seed for generators and mechanisms.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// `walk:K`, `path:K`, `star:K` or an edge list like `0-1,1-2`.
    #[arg(long)]
    pub pattern: String,
    /// Count distinct instances (unoriented walks, unlabeled subgraphs).
    #[arg(long)]
    pub distinct: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// walk-basic, walk-opt (alias walk), path, pattern, star or rr.
    #[arg(long)]
    pub mech: String,
    /// Query spec; defaults to `walk:K`, `path:K` or `star:K` from --k.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Root vertex of the tree formulation.
    #[arg(long)]
    pub root: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub nrep: u32,
    #[arg(long)]
    pub distinct: bool,
    /// Unoriented walk counts (walk mechanisms; same as --distinct).
    #[arg(long)]
    pub unoriented: bool,
    #[arg(long)]
    pub noiseless: bool,
    /// File with one mark per line (marked mechanisms).
    #[arg(long)]
    pub fixed_marks: Option<PathBuf>,
    /// Known exact count, skipping the oracle.
    #[arg(long)]
    pub exact: Option<u128>,
    /// Trial index for `transcript`.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Also write the transcript of trial 0 to this file (`run` only).
    #[arg(long)]
    pub dump_transcript: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Overrides the plan's `output`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub pattern: String,
    /// Comma-separated root vertices.
    #[arg(long, value_delimiter = ',', required = true)]
    pub roots: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long)]
    pub distinct: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first) and executes the subcommand.
pub fn run<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(e.to_string()),
                _ => Err(Error::arg("usage", e.to_string().trim().to_string())),
            };
        }
    };
    match cli.command {
        Command::Exact(a) => exact(&a),
        Command::Run(a) => run_mechanism(&a),
        Command::Bench(a) => bench(&a),
        Command::CompareTrees(a) => compare(&a),
        Command::Transcript(a) => transcript(&a),
    }
}

fn load(args: &GraphArgs) -> Result<Graph> {
    load_graph_source(&args.graph, args.seed)
}

fn exact(args: &ExactArgs) -> Result<String> {
    let g = load(&args.graph)?;
    let spec: PatternSpec = args.pattern.parse()?;
    let count = match &spec {
        PatternSpec::Walk(k) if args.distinct => oracle::walk_count_unoriented(&g, *k)?,
        PatternSpec::Walk(k) => oracle::walk_count_oriented(&g, *k)?,
        PatternSpec::Star(k) => oracle::star_count(&g, *k, args.distinct)?,
        PatternSpec::Path(k) if !args.distinct => oracle::path_count_oriented(&g, *k)?,
        spec => {
            let pattern = parse_pattern(spec)?;
            if args.distinct {
                oracle::pattern_count(&g, &pattern)?
            } else {
                let tree = crate::pattern::formulate_tree(&pattern, None)?;
                oracle::ordered_embedding_count(&g, &tree)?
            }
        }
    };
    Ok(format!("{count}\n"))
}

fn query_from(args: &RunArgs) -> Result<Query> {
    let spec: PatternSpec = match (&args.pattern, args.k) {
        (Some(p), _) => p.parse()?,
        (None, Some(k)) => match args.mech.as_str() {
            "walk-basic" | "walk" | "walk-opt" | "rr" => PatternSpec::Walk(k),
            "path" => PatternSpec::Path(k),
            "star" => PatternSpec::Star(k),
            _ => return Err(Error::arg("pattern", format!("--mech {} needs --pattern", args.mech))),
        },
        (None, None) => return Err(Error::arg("k", "give --k or --pattern")),
    };
    if let (Some(k), Some(_)) = (args.k, &args.pattern) {
        if spec.k() != k {
            return Err(Error::arg("k", format!("--k {k} disagrees with --pattern {spec}")));
        }
    }
    let mechanism = Mechanism::parse(&args.mech, &spec, args.root)?;
    let is_walk = matches!(
        mechanism,
        Mechanism::WalkBasic(_) | Mechanism::WalkOpt(_) | Mechanism::Rr(crate::baseline_rr::RrTarget::Walk(_))
    );
    if args.unoriented && !is_walk {
        return Err(Error::arg("unoriented", "only applies to walk queries"));
    }
    Ok(Query {
        mechanism,
        distinct: args.distinct || args.unoriented,
    })
}

fn config_from(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(args.eps).with_n_rep(args.nrep);
    cfg.noiseless = args.noiseless;
    if let Some(path) = &args.fixed_marks {
        let text = std::fs::read_to_string(path)?;
        let marks = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<u8>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("bad mark `{}` in --fixed-marks", l.trim()),
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        cfg.fixed_marks = Some(marks);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_mechanism(args: &RunArgs) -> Result<String> {
    if args.trials == 0 {
        return Err(Error::arg("trials", "must be at least 1"));
    }
    let g = load(&args.graph)?;
    let query = query_from(args)?;
    let cfg = config_from(args)?.distinct(query.distinct);
    let exact = match args.exact {
        Some(x) => Some(x),
        None => harness::exact_or_na(&g, &query)?,
    };
    let runs = harness::worker_pool()?
        .install(|| harness::run_trials(&g, &query.mechanism, &cfg, args.graph.seed, args.trials))?;
    if let Some(path) = &args.dump_transcript {
        let traced = query
            .mechanism
            .run(&g, &cfg.clone().with_trial(args.graph.seed, 0).with_transcript())?;
        let dump = traced.transcript.map(|t| t.dump()).unwrap_or_default();
        std::fs::write(path, dump)?;
    }
    let row = harness::summarize(&args.graph.graph, &query, &cfg, exact, &runs);

    let mut lines: Vec<(String, String)> = vec![
        ("mechanism".into(), row.mechanism.clone()),
        ("query".into(), row.query.clone()),
        ("graph".into(), format!("N={} M={} d={}", g.node_count(), g.edge_count(), g.max_degree())),
        ("epsilon".into(), format!("{}  n_rep {}", row.epsilon, row.n_rep)),
        ("trials".into(), format!("{}{}", row.trials, if row.trimmed { " (trimmed mean)" } else { "" })),
        ("rounds".into(), row.rounds.to_string()),
        ("mean estimate".into(), format!("{:.6e}", row.mean_estimate)),
        ("exact".into(), row.exact.map_or("NA".into(), |e| e.to_string())),
        ("rel err".into(), row.rel_err_pct.map_or("NA".into(), |e| format!("{e:.4}%"))),
    ];
    for channel in Channel::ALL {
        let bytes = match channel {
            Channel::NodeToNode => row.bytes_node_to_node,
            Channel::NodeToAnalyzer => row.bytes_node_to_analyzer,
            Channel::AnalyzerToNode => row.bytes_analyzer_to_node,
        };
        lines.push((channel.name().into(), format!("{bytes:.0} bytes")));
    }
    lines.push(("comm total".into(), format!("{:.4} MB", row.total_bytes() / 1e6)));
    let mut out = String::new();
    for (label, value) in lines {
        let _ = writeln!(out, "{label:<18}{value}");
    }
    Ok(out)
}

fn transcript(args: &RunArgs) -> Result<String> {
    let g = load(&args.graph)?;
    let query = query_from(args)?;
    let cfg = config_from(args)?
        .distinct(query.distinct)
        .with_trial(args.graph.seed, args.trial)
        .with_transcript();
    let est = query.mechanism.run(&g, &cfg)?;
    let mut out = format!(
        "# {} {} eps={} trial={} value={}\n",
        query.mechanism.name(),
        query.mechanism.query(),
        cfg.epsilon,
        args.trial,
        est.value
    );
    match est.transcript {
        Some(t) => out.push_str(&t.dump()),
        None => out.push_str("# transcripts are kept for n_rep = 1 only\n"),
    }
    Ok(out)
}

fn bench(args: &BenchArgs) -> Result<String> {
    let mut plan = ExperimentPlan::load(&args.plan)?;
    if let Some(output) = &args.output {
        plan.output = Some(output.clone());
    }
    let rows = harness::run_plan(&plan)?;
    match &plan.output {
        Some(path) => Ok(format!("wrote {} rows to {}\n", rows.len(), path.display())),
        None => {
            let mut buf = Vec::new();
            harness::write_csv(&rows, &mut buf)?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
    }
}

fn compare(args: &CompareArgs) -> Result<String> {
    let g = load(&args.graph)?;
    let pattern = parse_pattern(&args.pattern.parse()?)?;
    let rows = harness::worker_pool()?.install(|| {
        harness::compare_trees(&g, &pattern, &args.roots, args.eps, args.trials, args.graph.seed, args.distinct)
    })?;
    let mut buf = Vec::new();
    harness::write_tree_csv(&rows, &mut buf)?;
    match &args.output {
        Some(path) => {
            std::fs::write(path, &buf)?;
            Ok(format!("wrote {} rows to {}\n", rows.len(), path.display()))
        }
        None => Ok(String::from_utf8_lossy(&buf).into_owned()),
    }
}

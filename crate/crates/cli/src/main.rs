//! `spselect`: generate instances, run mechanisms, audit strategyproofness
//! and sweep approximation ratios.
//!
//! Every command is a pure function of its flags and input files. Exit
//! codes: 0 success, 1 usage or input error, 2 exact-engine guard exceeded,
//! 3 audit found a violation.

mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spselect::audit::{
    approx_ratio_exact, approx_ratio_mc, check_gsp, check_sp, cycle_lower_bound_witness,
    gsp_lower_bound_witness, impossibility_search_with, sample_frequencies, AuditReport,
    RatioEstimate, Scope, SearchConfig, Verdict,
};
use spselect::exact::exact_distribution;
use spselect::graph::{
    gen_cycle, gen_named, gen_random, gen_single_edge, gen_sliding_counterexample, gen_star,
    parse_graph, serialize_graph,
};
use spselect::rng::SeedRng;
use spselect::{DirectedGraph, Error, MechanismSpec, Rational};

use output::{emit, render, Format, Table};

#[derive(Parser)]
#[command(
    name = "spselect",
    version,
    about = "Strategyproof k-selection toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance in edge-list format.
    Gen {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a mechanism once, over seeded trials, or exactly.
    Run(RunArgs),
    /// Approximation ratio OPT / E[selected indegree] on one graph.
    Ratio(RunArgs),
    /// Check that no agent can change its selection probability.
    AuditSp(AuditArgs),
    /// Check that no coalition can make every member strictly better off.
    AuditGsp {
        #[command(flatten)]
        audit: AuditArgs,
        #[arg(long, default_value_t = 2)]
        coalition: usize,
    },
    /// Search the star domain for deterministic SP mechanisms meeting the
    /// hub constraints.
    Impossibility {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_nodes: Option<u64>,
        #[arg(long)]
        max_candidates: Option<u64>,
        /// Seed for sampling hub candidates when there are too many to audit.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a lower-bound construction against a mechanism.
    Witness {
        #[arg(long, value_enum)]
        kind: WitnessKind,
        #[command(flatten)]
        mechanism: MechanismArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ratio of ceil(k^(1/3))-RP over a grid of k on one instance.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// star, cycle, single-edge, sliding-tree, random, figure2, figure4
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Cycle length minus one.
    #[arg(long)]
    k: Option<usize>,
    /// Edge probability for `random`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spokes of the sliding tree.
    #[arg(long)]
    t: Option<usize>,
    /// Leaves per spoke of the sliding tree.
    #[arg(long)]
    d: Option<usize>,
    /// Star leaves as a 0/1 string (default: all leaves point at the hub).
    #[arg(long)]
    bits: Option<String>,
}

#[derive(Args)]
struct MechanismArgs {
    /// optimal, random-subset, mrp:m=<int> (or mrp with --m), edge-scan,
    /// sliding-partition
    #[arg(long)]
    mechanism: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessKind {
    Cycle,
    Gsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeKind {
    All,
    File,
    Sampled,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// Edge-list file, or `-` for stdin.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// Agent count; taken from the graph files when omitted with `--scope file`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = ScopeKind::All)]
    scope: ScopeKind,
    /// True graphs for `--scope file` (repeatable).
    #[arg(long)]
    graph: Vec<PathBuf>,
    /// Number of random graphs for `--scope sampled`.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Use a graph file instead of a generated instance.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Largest k; the grid is 2, 4, 8, ... up to and including kmax.
    #[arg(long)]
    kmax: Option<usize>,
    /// Explicit comma-separated grid, overriding --kmax.
    #[arg(long, value_delimiter = ',')]
    ks: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Mc)]
    mode: Mode,
    #[arg(long)]
    trials: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::TooLarge { .. }) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

/// Parses `args` (program name first), executes, and returns the exit code.
fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("spselect: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> CliResult<u8> {
    match command {
        Command::Gen { instance, out } => {
            let (g, _) = build_instance(&instance)?;
            emit(&serialize_graph(&g), out.as_deref())?;
            Ok(0)
        }
        Command::Run(args) => cmd_run(&args),
        Command::Ratio(args) => cmd_ratio(&args),
        Command::AuditSp(args) => cmd_audit(&args, None),
        Command::AuditGsp { audit, coalition } => cmd_audit(&audit, Some(coalition)),
        Command::Impossibility {
            n,
            k,
            max_nodes,
            max_candidates,
            seed,
            output,
        } => {
            let mut config = SearchConfig {
                sample_seed: seed,
                ..SearchConfig::default()
            };
            if let Some(v) = max_nodes {
                config.max_nodes = v;
            }
            if let Some(v) = max_candidates {
                config.max_candidates = v;
            }
            let report = impossibility_search_with(n, k, &config)?;
            let json = serde_json::to_value(&report).expect("report serializes");
            write_report(&output, &json, || Table::from_object(&json))?;
            Ok(0)
        }
        Command::Witness {
            kind,
            mechanism,
            n,
            output,
        } => {
            let spec = parse_mechanism(&mechanism)?;
            let k = resolve_k(spec, mechanism.k)?;
            let json = match kind {
                WitnessKind::Cycle => serde_json::to_value(cycle_lower_bound_witness(spec, n, k)?),
                WitnessKind::Gsp => serde_json::to_value(gsp_lower_bound_witness(spec, n, k)?),
            }
            .expect("report serializes");
            write_report(&output, &json, || Table::from_object(&json))?;
            Ok(0)
        }
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

fn write_report(output: &OutputArgs, json: &Value, table: impl FnOnce() -> Table) -> CliResult<()> {
    let text = render(output.format, json, table)?;
    emit(&text, output.out.as_deref())?;
    Ok(())
}

fn parse_mechanism(args: &MechanismArgs) -> CliResult<MechanismSpec> {
    match (args.mechanism.trim(), args.m) {
        ("mrp", Some(m)) => Ok(format!("mrp:m={m}").parse()?),
        ("mrp", None) => usage("mechanism `mrp` needs --m or the form mrp:m=<int>"),
        (s, Some(_)) if !s.starts_with("mrp") => usage("--m only applies to mrp"),
        (s, m) => {
            let spec: MechanismSpec = s.parse()?;
            match (spec, m) {
                (MechanismSpec::Mrp { m: a }, Some(b)) if a != b => {
                    usage(format!("conflicting part counts: {s} and --m {b}"))
                }
                _ => Ok(spec),
            }
        }
    }
}

/// `k` is required except for Sliding Partition (always 1) and Edge Scan
/// (at most two winners; `k` only sets the OPT benchmark, default 2).
fn resolve_k(spec: MechanismSpec, k: Option<usize>) -> CliResult<usize> {
    match (spec, k) {
        (_, Some(k)) => Ok(k),
        (MechanismSpec::SlidingPartition, None) => Ok(1),
        (MechanismSpec::EdgeScan, None) => Ok(2),
        (_, None) => usage(format!("{spec} needs --k")),
    }
}

fn read_graph(path: &Path) -> CliResult<DirectedGraph> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())?
    } else {
        fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?
    };
    Ok(parse_graph(&text)?)
}

fn need<T: Copy>(v: Option<T>, flag: &str, instance: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("instance `{instance}` needs --{flag}")))
}

/// The instance and a label describing it.
fn build_instance(a: &InstanceArgs) -> CliResult<(DirectedGraph, String)> {
    let Some(name) = a.instance.as_deref() else {
        return usage("--instance is required");
    };
    let g = match name {
        "star" => {
            let bits: Vec<bool> = match &a.bits {
                Some(b) => b
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(CliError::Usage(format!("--bits must be 0/1, got {b:?}"))),
                    })
                    .collect::<CliResult<_>>()?,
                None => vec![true; need(a.n, "n", name)?.saturating_sub(1)],
            };
            if let Some(n) = a.n {
                if bits.len() + 1 != n {
                    return usage(format!("--bits has {} leaves but --n is {n}", bits.len()));
                }
            }
            gen_star(&bits)?
        }
        "cycle" => gen_cycle(need(a.k, "k", name)?, need(a.n, "n", name)?)?,
        "single-edge" => gen_single_edge(need(a.n, "n", name)?)?,
        "sliding-tree" => gen_sliding_counterexample(need(a.t, "t", name)?, need(a.d, "d", name)?)?,
        "random" => gen_random(need(a.n, "n", name)?, need(a.p, "p", name)?, a.seed)?,
        "figure2" | "figure4" => gen_named(name)?,
        other => return Err(Error::UnknownInstance(other.to_string()).into()),
    };
    let label = match name {
        "random" => format!(
            "random(n={},p={},seed={})",
            g.n(),
            a.p.unwrap_or_default(),
            a.seed
        ),
        "sliding-tree" => format!(
            "sliding-tree(t={},d={})",
            a.t.unwrap_or(0),
            a.d.unwrap_or(0)
        ),
        "cycle" => format!("cycle(k={},n={})", a.k.unwrap_or(0), g.n()),
        "figure2" | "figure4" => name.to_string(),
        _ => format!("{name}(n={})", g.n()),
    };
    Ok((g, label))
}

fn check_mode(mode: Mode, trials: Option<u64>) -> CliResult<()> {
    match (mode, trials) {
        (Mode::Exact, Some(_)) => usage("--mode exact does not take --trials"),
        (Mode::Mc, None) | (Mode::Mc, Some(0)) => usage("--mode mc needs --trials >= 1"),
        _ => Ok(()),
    }
}

fn cmd_run(args: &RunArgs) -> CliResult<u8> {
    let spec = parse_mechanism(&args.mechanism)?;
    let k = resolve_k(spec, args.mechanism.k)?;
    let g = read_graph(&args.graph)?;
    let head = json!({ "mechanism": spec.to_string(), "n": g.n(), "k": k });
    match args.mode {
        None => {
            if args.trials.is_some() {
                return usage("--trials needs --mode mc");
            }
            let s = spec.sample(&g, k, &mut SeedRng::new(args.seed))?;
            let mut json = head;
            json["seed"] = json!(args.seed);
            json["selection"] = json!(s.ids());
            json["value"] = json!(s.total_indegree(&g));
            write_report(&args.output, &json, || Table::from_object(&json))?;
        }
        Some(Mode::Exact) => {
            check_mode(Mode::Exact, args.trials)?;
            let dist = exact_distribution::<Rational>(spec, &g, k)?;
            let report = dist.report();
            let mut json = head;
            json["outcomes"] = serde_json::to_value(&report.outcomes).expect("serializes");
            json["agents"] = serde_json::to_value(&report.agents).expect("serializes");
            write_report(&args.output, &json, || {
                let mut t = Table::new(&["kind", "members", "p"]);
                for o in &report.outcomes {
                    t.push(vec![json!("outcome"), json!(o.members), json!(o.p)]);
                }
                for a in &report.agents {
                    t.push(vec![json!("agent"), json!([a.agent]), json!(a.p)]);
                }
                t
            })?;
        }
        Some(Mode::Mc) => {
            check_mode(Mode::Mc, args.trials)?;
            let trials = args.trials.unwrap_or_default();
            spec.validate(g.n(), k)?;
            // trial t draws from stream t, as in the Monte Carlo estimators
            let samples: Vec<Vec<u32>> = (0..trials)
                .map(|t| {
                    Ok(spec
                        .sample(&g, k, &mut SeedRng::with_stream(args.seed, t))?
                        .ids())
                })
                .collect::<CliResult<_>>()?;
            let freq = sample_frequencies(spec, &g, k, trials, args.seed)?;
            let frequencies: Vec<Value> = freq
                .iter()
                .map(|(s, &c)| {
                    json!({
                        "members": s.ids(),
                        "count": c,
                        "frequency": c as f64 / trials as f64,
                    })
                })
                .collect();
            let mut json = head;
            json["seed"] = json!(args.seed);
            json["trials"] = json!(trials);
            json["samples"] = json!(samples);
            json["frequencies"] = json!(frequencies);
            write_report(&args.output, &json, || {
                let mut t = Table::new(&["kind", "trial", "members", "count", "frequency"]);
                for (i, s) in samples.iter().enumerate() {
                    t.push(vec![
                        json!("sample"),
                        json!(i),
                        json!(s),
                        Value::Null,
                        Value::Null,
                    ]);
                }
                for f in &frequencies {
                    t.push(vec![
                        json!("frequency"),
                        Value::Null,
                        f["members"].clone(),
                        f["count"].clone(),
                        f["frequency"].clone(),
                    ]);
                }
                t
            })?;
        }
    }
    Ok(0)
}

fn ratio_json(
    spec: MechanismSpec,
    k: usize,
    g: &DirectedGraph,
    mode: Mode,
    trials: Option<u64>,
    seed: u64,
) -> CliResult<Value> {
    check_mode(mode, trials)?;
    let mut est = match mode {
        Mode::Exact => approx_ratio_exact::<Rational>(spec, g, k)?.to_json(),
        Mode::Mc => {
            let est: RatioEstimate<f64> = approx_ratio_mc(spec, g, k, trials.unwrap_or(0), seed)?;
            let mut v = est.to_json();
            v["seed"] = json!(seed);
            v
        }
    };
    est["mechanism"] = json!(spec.to_string());
    est["k"] = json!(k);
    est["n"] = json!(g.n());
    Ok(est)
}

fn cmd_ratio(args: &RunArgs) -> CliResult<u8> {
    let spec = parse_mechanism(&args.mechanism)?;
    let k = resolve_k(spec, args.mechanism.k)?;
    let g = read_graph(&args.graph)?;
    let mode = args.mode.unwrap_or(Mode::Exact);
    let json = ratio_json(spec, k, &g, mode, args.trials, args.seed)?;
    write_report(&args.output, &json, || Table::from_object(&json))?;
    Ok(0)
}

fn cmd_audit(args: &AuditArgs, coalition: Option<usize>) -> CliResult<u8> {
    let spec = parse_mechanism(&args.mechanism)?;
    let k = resolve_k(spec, args.mechanism.k)?;
    if args.scope != ScopeKind::File && !args.graph.is_empty() {
        return usage("--graph is only used with --scope file");
    }
    let (scope, n) = match args.scope {
        ScopeKind::All => (Scope::All, need(args.n, "n", "all")?),
        ScopeKind::Sampled => (
            Scope::Sampled {
                count: args.samples,
                seed: args.seed,
            },
            need(args.n, "n", "sampled")?,
        ),
        ScopeKind::File => {
            if args.graph.is_empty() {
                return usage("--scope file needs at least one --graph");
            }
            let graphs = args
                .graph
                .iter()
                .map(|p| read_graph(p))
                .collect::<CliResult<Vec<_>>>()?;
            let n = args.n.unwrap_or(graphs[0].n());
            (Scope::Graphs(graphs), n)
        }
    };
    let report: AuditReport = match coalition {
        None => check_sp(spec, n, k, &scope)?,
        Some(c) => check_gsp(spec, n, k, c, &scope)?,
    };
    let json = serde_json::to_value(&report).expect("report serializes");
    write_report(&args.output, &json, || Table::from_object(&json))?;
    Ok(if report.verdict == Verdict::Violated {
        3
    } else {
        0
    })
}

/// Smallest `m` with `m^3 >= k`.
fn ceil_cbrt(k: usize) -> usize {
    let mut m = 1;
    while m * m * m < k {
        m += 1;
    }
    m
}

fn sweep_grid(args: &SweepArgs) -> CliResult<Vec<usize>> {
    if !args.ks.is_empty() {
        return Ok(args.ks.clone());
    }
    let Some(kmax) = args.kmax else {
        return usage("sweep needs --kmax or --ks");
    };
    let mut grid: Vec<usize> = std::iter::successors(Some(2usize), |k| Some(k * 2))
        .take_while(|&k| k <= kmax)
        .collect();
    if grid.last() != Some(&kmax) {
        grid.push(kmax);
    }
    Ok(grid)
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<u8> {
    let (g, label) = match &args.graph {
        Some(path) => (read_graph(path)?, path.display().to_string()),
        None => build_instance(&args.instance)?,
    };
    let grid = sweep_grid(args)?;
    check_mode(args.mode, args.trials)?;
    let columns = ["k", "m", "instance", "ratio", "ci_low", "ci_high"];
    let mut rows = Vec::with_capacity(grid.len());
    for k in grid {
        let m = ceil_cbrt(k);
        let est = ratio_json(
            MechanismSpec::Mrp { m },
            k,
            &g,
            args.mode,
            args.trials,
            args.instance.seed,
        )?;
        rows.push(json!({
            "k": k,
            "m": m,
            "instance": label,
            "ratio": est["ratio"],
            "ci_low": est.get("ci_low").cloned().unwrap_or(Value::Null),
            "ci_high": est.get("ci_high").cloned().unwrap_or(Value::Null),
        }));
    }
    let json = json!({
        "instance": label,
        "n": g.n(),
        "edges": g.edge_count(),
        "mode": match args.mode { Mode::Exact => "exact", Mode::Mc => "monte_carlo" },
        "trials": args.trials,
        "seed": args.instance.seed,
        "rows": rows,
    });
    write_report(&args.output, &json, || Table::from_rows(&columns, &rows))?;
    Ok(0)
}

//! Command-line front end: argument parsing, command execution and reports.
//!
//! Every command produces a line-oriented report of `key=value` records: a
//! header echoing the command and the SHA-256 digest of its input, the
//! payload, and a closing `status=` line. The exit code is 0 for success, 1
//! when a violation was found, 2 for errors and 3 for budget refusals.

mod format;

pub use format::{
    format_nodes, format_subset, parse_instance, serialize, serialize_gt, serialize_triggering, Instance,
};

use std::fmt::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::conjecture::battery::{run_battery, run_criterion, BatteryConfig};
use crate::conjecture::{
    global_adk_check, run_campaign, Family, GenConfig, GraphKind, InstanceStatus, Verdict,
};
use crate::diffusion::{
    exact_spread, live_edge_spread, monte_carlo_spread, DirectedGraph, ExactSpread, GtInstance,
    DEFAULT_BUDGET, DEFAULT_STATE_BUDGET,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::{is_adk, Order};
use crate::transforms::{
    dag_layering, dag_to_layered, gt_to_triggering, lift_layered, triggering_to_gt, verify_transform,
    LayerAssignment, NodeMap, SpreadOracle,
};

/// Environment variable fixing the worker thread count.
pub const THREADS_ENV: &str = "ADK_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "adk",
    version,
    about = "Alternating-difference checks for threshold diffusion models"
)]
pub struct Cli {
    /// Oracle step budget (breakpoint combinations or dynamic-program states).
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check threshold functions for AD-k.
    CheckAdk(CheckAdkArgs),
    /// Expected spread of a seed set.
    Spread(SpreadArgs),
    /// Check the spread function and every activation probability for AD-k.
    GlobalAdk(GlobalAdkArgs),
    /// Convert between threshold and triggering instances.
    Convert(ConvertArgs),
    /// Lift a layered instance or layer a DAG instance, then verify the image.
    Transform(TransformArgs),
    /// Run a generated campaign of global AD-k checks.
    Search(SearchArgs),
    /// Run the theorem regression battery.
    VerifyPaper(VerifyPaperArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true).args(["node", "all"])))]
pub struct CheckAdkArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub node: Option<String>,
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub k: Order,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("method").args(["exact", "mc"])))]
pub struct SpreadArgs {
    pub file: PathBuf,
    /// Comma-separated seed labels; empty for no seeds.
    #[arg(long, allow_hyphen_values = true)]
    pub seeds: String,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GlobalAdkArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub k: Order,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Model {
    Gt,
    Triggering,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub to: Model,
    /// Also write the converted instance to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["lift", "layerize"])))]
pub struct TransformArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub lift: bool,
    #[arg(long)]
    pub layerize: bool,
    /// Order checked on the image; defaults to the largest order every input threshold passes.
    #[arg(long)]
    pub k: Option<Order>,
    /// Also write the transformed instance to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value = "general")]
    pub graph: GraphKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: Order,
    #[arg(long)]
    pub instances: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge probability as a rational.
    #[arg(long, default_value = "1/2", value_parser = parse_rational)]
    pub density: Rational,
    /// Threshold family; defaults to triggering for k=inf and rejection otherwise.
    #[arg(long)]
    pub family: Option<Family>,
    /// Require thresholds that pass AD-k but fail AD-(k+1).
    #[arg(long)]
    pub strict: bool,
    /// Defaults to max(3, k+1).
    #[arg(long)]
    pub max_in_degree: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyPaperArgs {
    /// Smaller sample sizes.
    #[arg(long)]
    pub quick: bool,
    /// Run a single criterion.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
    pub criterion: Option<u8>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    rational::parse(s).ok_or_else(|| format!("`{s}` is not a rational"))
}

/// Exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
    Error,
    Budget,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Error => 2,
            Status::Budget => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violation => "violation",
            Status::Error => "error",
            Status::Budget => "budget",
        }
    }
}

/// A finished command: its report text and exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub status: Status,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Appends the error record and returns the matching status.
fn error_record(out: &mut String, e: &Error) -> Status {
    let _ = writeln!(
        out,
        "error kind={} message=\"{}\"",
        e.kind(),
        e.to_string().replace('"', "'")
    );
    if e.is_budget() {
        Status::Budget
    } else {
        Status::Error
    }
}

fn read_input(path: &PathBuf, out: &mut String) -> Result<Instance> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let _ = writeln!(out, "input-sha256={}", digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::InvalidArgument(format!("{} is not UTF-8", path.display())))?;
    parse_instance(&text)
}

fn as_gt(inst: Instance) -> GtInstance {
    match inst {
        Instance::Gt(g) => g,
        Instance::Triggering(t) => triggering_to_gt(&t),
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn embed_instance(out: &mut String, text: &str) {
    out.push_str("begin-instance\n");
    out.push_str(text);
    out.push_str("end-instance\n");
}

fn parse_seeds(graph: &DirectedGraph, seeds: &str) -> Result<u64> {
    let labels: Vec<&str> = seeds
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    graph.mask_of(&labels)
}

fn exact_payload(out: &mut String, graph: &DirectedGraph, e: &ExactSpread) {
    let _ = writeln!(out, "sigma={}", rational::format(&e.sigma));
    for (v, p) in e.per_node.iter().enumerate() {
        let _ = writeln!(out, "node={} probability={}", graph.label(v), rational::format(p));
    }
}

fn check_adk(args: &CheckAdkArgs, out: &mut String) -> Result<Status> {
    let inst = as_gt(read_input(&args.file, out)?);
    let g = inst.graph();
    let nodes: Vec<usize> = match &args.node {
        Some(label) => vec![g
            .index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))?],
        None => (0..inst.n()).collect(),
    };
    let mut failed = 0;
    for v in nodes {
        let f = inst.threshold(v);
        let r = is_adk(f, args.k);
        let _ = write!(
            out,
            "node={} k={} checked-k={} holds={}",
            g.label(v),
            args.k,
            r.checked_k,
            r.holds
        );
        if let Some(w) = &r.witness {
            failed += 1;
            let _ = write!(
                out,
                " witness-s={} witness-a={} difference={}",
                format_subset(f.ground(), w.s),
                format_subset(f.ground(), w.a),
                rational::format(&w.value)
            );
        }
        out.push('\n');
    }
    let _ = writeln!(out, "summary failed={failed}");
    Ok(if failed == 0 {
        Status::Ok
    } else {
        Status::Violation
    })
}

fn spread(args: &SpreadArgs, budget: Option<u128>, out: &mut String) -> Result<Status> {
    let inst = read_input(&args.file, out)?;
    let g = inst.graph().clone();
    let seeds = parse_seeds(&g, &args.seeds)?;
    let _ = writeln!(out, "seeds={}", format_nodes(&g, seeds));
    if args.mc {
        let gt = as_gt(inst);
        let est = monte_carlo_spread(&gt, seeds, args.trials, args.seed)?;
        let _ = writeln!(out, "method=monte-carlo trials={} seed={}", est.trials, args.seed);
        let _ = writeln!(out, "mean={} stderr={}", est.mean, est.stderr);
        for (v, p) in est.per_node.iter().enumerate() {
            let _ = writeln!(out, "node={} frequency={p}", g.label(v));
        }
        return Ok(Status::Ok);
    }
    let budget = budget.unwrap_or(DEFAULT_BUDGET);
    let e = match &inst {
        Instance::Gt(gt) => {
            let _ = writeln!(out, "method=breakpoint");
            exact_spread(gt, seeds, budget)?
        }
        Instance::Triggering(tr) => {
            let _ = writeln!(out, "method=live-edge");
            live_edge_spread(tr, seeds, budget)?
        }
    };
    exact_payload(out, &g, &e);
    Ok(Status::Ok)
}

fn global_adk(args: &GlobalAdkArgs, budget: Option<u128>, out: &mut String) -> Result<Status> {
    let inst = as_gt(read_input(&args.file, out)?);
    let g = inst.graph();
    let node_ground = g.node_ground()?;
    let r = global_adk_check(&inst, args.k, budget.unwrap_or(DEFAULT_STATE_BUDGET))?;
    let _ = writeln!(out, "target=sigma k={} holds={}", args.k, r.sigma.holds);
    for (v, nr) in r.nodes.iter().enumerate() {
        let _ = writeln!(out, "target=node:{} k={} holds={}", g.label(v), args.k, nr.holds);
    }
    match r.first_violation() {
        Some((target, w)) => {
            let _ = writeln!(
                out,
                "violation target={} s={} a={} difference={}",
                match target {
                    crate::conjecture::Target::Sigma => "sigma".to_string(),
                    crate::conjecture::Target::Node(v) => format!("node:{}", g.label(v)),
                },
                format_subset(&node_ground, w.s),
                format_subset(&node_ground, w.a),
                rational::format(&w.value)
            );
            Ok(Status::Violation)
        }
        None => Ok(Status::Ok),
    }
}

fn convert(args: &ConvertArgs, out: &mut String) -> Result<Status> {
    let inst = read_input(&args.file, out)?;
    let converted = match (inst, args.to) {
        (Instance::Gt(g), Model::Triggering) => match gt_to_triggering(&g) {
            Ok(t) => Instance::Triggering(t),
            Err(Error::NotAdInfinity {
                node,
                subset,
                coefficient,
            }) => {
                let _ = writeln!(
                    out,
                    "not-ad-infinity node={} subset={} coefficient={}",
                    g.graph().label(node),
                    format_subset(g.threshold(node).ground(), subset),
                    rational::format(&coefficient)
                );
                return Ok(Status::Violation);
            }
            Err(e) => return Err(e),
        },
        (Instance::Triggering(t), Model::Gt) => Instance::Gt(triggering_to_gt(&t)),
        (same, _) => same,
    };
    let text = serialize(&converted);
    write_output(&args.output, &text)?;
    embed_instance(out, &text);
    Ok(Status::Ok)
}

/// Largest order passed by every threshold.
fn local_order(inst: &GtInstance) -> Order {
    let max = inst.thresholds().iter().map(|f| f.n()).max().unwrap_or(0);
    let mut k = max;
    for f in inst.thresholds() {
        let r = is_adk(f, Order::Infinity);
        if let Some(w) = r.witness {
            k = k.min(w.a.count_ones() as usize - 1);
        }
    }
    if k >= max {
        Order::Infinity
    } else {
        Order::Finite(k)
    }
}

fn map_records(out: &mut String, original: &GtInstance, image: &GtInstance, map: &NodeMap) {
    for v in 0..original.n() {
        let _ = write!(
            out,
            "map original={} image={}",
            original.graph().label(v),
            image.graph().label(map.forward[v])
        );
        if let Some(b) = &map.bottom_copy {
            let _ = write!(out, " seed-copy={}", image.graph().label(b[v]));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "counted={}", format_nodes(image.graph(), map.kept));
}

fn transform(args: &TransformArgs, budget: Option<u128>, out: &mut String) -> Result<Status> {
    let inst = as_gt(read_input(&args.file, out)?);
    let (image, layers, map): (GtInstance, LayerAssignment, NodeMap) = if args.lift {
        let layers = dag_layering(inst.graph())?;
        layers.check(inst.graph()).map_err(|e| match e {
            Error::InvalidLayering(m) => {
                Error::InvalidLayering(format!("{m}; use --layerize for graphs with skip edges"))
            }
            e => e,
        })?;
        lift_layered(&inst, &layers)?
    } else {
        dag_to_layered(&inst)?
    };
    let k = args.k.unwrap_or_else(|| local_order(&inst));
    let _ = writeln!(
        out,
        "transform={} nodes={} image-nodes={} layers={} k={k}",
        if args.lift { "lift" } else { "layerize" },
        inst.n(),
        image.n(),
        layers.m()
    );
    map_records(out, &inst, &image, &map);
    let seeds: Vec<u64> = (0..1u64 << inst.n()).collect();
    let report = verify_transform(
        &inst,
        &image,
        &map,
        &seeds,
        k,
        SpreadOracle::Rounds,
        budget.unwrap_or(DEFAULT_STATE_BUDGET),
    )?;
    let layering_valid = layers.check(image.graph()).is_ok();
    let mismatches = report
        .comparisons
        .iter()
        .filter(|c| c.original != c.image)
        .count();
    let failing = report.local.iter().filter(|r| !r.holds).count();
    let _ = writeln!(
        out,
        "verify seed-sets={} spread-mismatches={mismatches} layering-valid={layering_valid} image-thresholds-failing-adk={failing}",
        seeds.len()
    );
    let text = serialize_gt(&image);
    write_output(&args.output, &text)?;
    embed_instance(out, &text);
    Ok(if mismatches == 0 && failing == 0 && layering_valid {
        Status::Ok
    } else {
        Status::Violation
    })
}

fn search(args: &SearchArgs, budget: Option<u128>, out: &mut String) -> Result<Status> {
    let mut cfg = GenConfig::new(args.graph, args.n, args.k, args.seed);
    cfg.edge_density = args.density.clone();
    if let Some(f) = args.family {
        cfg.family = f;
    }
    cfg.strict = args.strict;
    if let Some(cap) = args.max_in_degree {
        cfg.max_in_degree = cap;
    }
    let _ = writeln!(out, "input-sha256={}", digest(cfg.to_string().as_bytes()));
    let report = run_campaign(&cfg, args.instances, budget.unwrap_or(DEFAULT_STATE_BUDGET))?;
    out.push_str(&report.to_string());
    Ok(match report.verdict() {
        Verdict::AllPass if report.count(|s| matches!(s, InstanceStatus::Budget(_))) > 0 => Status::Budget,
        Verdict::AllPass => Status::Ok,
        _ => Status::Violation,
    })
}

fn verify_paper(args: &VerifyPaperArgs, out: &mut String) -> Result<Status> {
    let mut cfg = if args.quick {
        BatteryConfig::quick()
    } else {
        BatteryConfig::full()
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let _ = writeln!(out, "input-sha256={}", digest(format!("{cfg:?}").as_bytes()));
    let outcomes = match args.criterion {
        Some(id) => vec![run_criterion(id, &cfg)?],
        None => run_battery(&cfg),
    };
    for o in &outcomes {
        let _ = writeln!(out, "{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let _ = writeln!(
        out,
        "summary criteria={} passed={} failed={failed}",
        outcomes.len(),
        outcomes.len() - failed
    );
    Ok(if failed == 0 {
        Status::Ok
    } else {
        Status::Violation
    })
}

/// Runs an already parsed command line. `echo` is recorded in the report header.
pub fn execute(cli: &Cli, echo: &str) -> Outcome {
    let mut out = String::new();
    let _ = writeln!(out, "command={echo}");
    let result = match &cli.command {
        Command::CheckAdk(a) => check_adk(a, &mut out),
        Command::Spread(a) => spread(a, cli.budget, &mut out),
        Command::GlobalAdk(a) => global_adk(a, cli.budget, &mut out),
        Command::Convert(a) => convert(a, &mut out),
        Command::Transform(a) => transform(a, cli.budget, &mut out),
        Command::Search(a) => search(a, cli.budget, &mut out),
        Command::VerifyPaper(a) => verify_paper(a, &mut out),
    };
    let status = match result {
        Ok(s) => s,
        Err(e) => error_record(&mut out, &e),
    };
    let _ = writeln!(out, "status={} exit={}", status.name(), status.code());
    Outcome { report: out, status }
}

/// Parses `args` (program name first) and runs the command.
///
/// Argument errors yield `Err` with clap's rendered message.
pub fn run<I, T>(args: I) -> std::result::Result<Outcome, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args)?;
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(execute(&cli, &format!("adk {echo}")))
}

/// Sizes the global thread pool from [`THREADS_ENV`] when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize =
        value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidArgument(format!("{THREADS_ENV}={value} is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

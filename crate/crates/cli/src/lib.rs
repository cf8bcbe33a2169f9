//! `ricci` command-line front end. [`run`] does all the work so it can be
//! driven in-process; the binary only wires up the process environment.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use ricci_core::adversarial::{run_experiment, FamilyKind, FamilyMix, Strategy};
use ricci_core::bounds::curvature_bounds;
use ricci_core::emd::{curvature_avg, curvature_edge, curvature_node, edge_curvatures};
use ricci_core::local::{approx_edge, ApproxMode};
use ricci_core::matching::{LocalMatchingConfig, MatchingBackend};
use ricci_core::numeric::{decimal_string, fraction_string, is_positive, parse_rational};
use ricci_core::oracle::{QueryCounters, QuerySession};
use ricci_core::sampling::{
    estimate_avg_curvature, estimate_node_curvature, EstimatorConfig, ExactEdgeCurvature,
};
use ricci_core::{Error, Graph};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_AN_EDGE: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_UNKNOWN_STRATEGY: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "ricci",
    version,
    about = "Ollivier-Ricci curvature of unweighted graphs"
)]
pub struct Cli {
    /// Master seed; the RICCI_SEED environment variable takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact curvature of an edge, a node, or the whole graph.
    Curvature {
        #[arg(value_enum)]
        target: ExactTarget,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Local-query estimates.
    Approx {
        #[arg(value_enum)]
        target: ApproxTarget,
        #[command(flatten)]
        graph: GraphArgs,
        /// Algorithm; edges default to equal-b.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, default_value = "0.1")]
        eps: String,
        /// Padding slack for unequal degrees.
        #[arg(long, default_value = "0.6")]
        delta: String,
        /// Radius of the edge-curvature routine for node / avg sampling.
        #[arg(long, default_value = "0.2")]
        r: String,
        /// Degree bound inside each weight class (unchecked when omitted).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value_t = Backend::Local)]
        backend: Backend,
    },
    /// Query-count experiment on hard instance families (CSV).
    Experiment {
        #[arg(long, default_value = "single-light")]
        family: String,
        #[arg(long, default_value = "pair-scan")]
        strategy: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
pub struct GraphArgs {
    /// Edge list: one `a b` pair per line, `#` comments.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub v: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactTarget {
    Edge,
    Node,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApproxTarget {
    Edge,
    Node,
    Avg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    EqualA,
    EqualB,
    Unequal,
    Node,
    Avg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Local,
    Exact,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MalformedInput { .. } | Error::SelfLoop(_) => EXIT_PARSE,
            Error::NotAnEdge(..) | Error::UnknownNode(_) => EXIT_NOT_AN_EDGE,
            Error::UnsupportedRegime(_) | Error::DegreeMismatch { .. } => EXIT_UNSUPPORTED,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = std::result::Result<Value, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// `env_seed` is the value of `RICCI_SEED`, if set.
pub fn run<I, T>(args: I, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_PARSE
                }
            };
        }
    };
    let seed = match env_seed {
        Some(s) => match s.trim().parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                let _ = writeln!(
                    err,
                    "error: RICCI_SEED must be an unsigned integer, got {s:?}"
                );
                return EXIT_PARSE;
            }
        },
        None => cli.seed,
    };
    let result = match &cli.command {
        Command::Curvature { target, graph } => cmd_curvature(*target, graph),
        Command::Approx {
            target,
            graph,
            mode,
            eps,
            delta,
            r,
            d,
            backend,
        } => cmd_approx(*target, graph, *mode, eps, delta, r, *d, *backend, seed),
        Command::Experiment {
            family,
            strategy,
            n,
            trials,
            output,
        } => {
            return match cmd_experiment(family, strategy, *n, *trials, seed, output.as_ref(), out) {
                Ok(()) => EXIT_OK,
                Err(f) => {
                    let _ = writeln!(err, "error: {}", f.message);
                    f.code
                }
            }
        }
    };
    match result {
        Ok(value) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
                Format::Csv => to_csv(&value),
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_FAILURE;
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Flattens one JSON object (nested objects become `outer.inner` columns)
/// or `{"rows": [...]}` into CSV.
fn to_csv(value: &Value) -> String {
    fn flatten(prefix: &str, v: &Value, cols: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, inner) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    flatten(&key, inner, cols);
                }
            }
            Value::String(s) => cols.push((prefix.to_string(), s.clone())),
            Value::Array(_) => {}
            other => cols.push((prefix.to_string(), other.to_string())),
        }
    }
    let rows: Vec<&Value> = match value.get("rows").and_then(Value::as_array) {
        Some(rows) => rows.iter().collect(),
        None => vec![value],
    };
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let mut cols = Vec::new();
        flatten("", row, &mut cols);
        if i == 0 {
            let header: Vec<&str> = cols.iter().map(|(k, _)| k.as_str()).collect();
            out.push_str(&header.join(","));
            out.push('\n');
        }
        let cells: Vec<String> = cols.iter().map(|(_, v)| csv_cell(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn csv_cell(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

fn load_graph(path: &PathBuf) -> std::result::Result<Graph, Failure> {
    let file = File::open(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    Ok(Graph::parse_edge_list(BufReader::new(file))?)
}

fn require<'a>(label: &'a Option<String>, flag: &str) -> std::result::Result<&'a str, Failure> {
    label
        .as_deref()
        .ok_or_else(|| Failure::new(EXIT_PARSE, format!("--{flag} is required")))
}

fn rational(text: &str, flag: &str) -> std::result::Result<BigRational, Failure> {
    let x = parse_rational(text).map_err(|e| Failure::new(EXIT_PARSE, format!("--{flag}: {e}")))?;
    if !is_positive(&x) {
        return Err(Failure::new(
            EXIT_PARSE,
            format!("--{flag} must be positive"),
        ));
    }
    Ok(x)
}

fn exact(x: &BigRational) -> Value {
    json!({ "fraction": fraction_string(x), "decimal": decimal_string(x) })
}

fn queries(c: &QueryCounters) -> Value {
    serde_json::to_value(c).expect("serializable")
}

fn cmd_curvature(target: ExactTarget, args: &GraphArgs) -> Outcome {
    let g = load_graph(&args.input)?;
    match target {
        ExactTarget::Edge => {
            let (a, b) = (require(&args.u, "u")?, require(&args.v, "v")?);
            let (u, v) = (g.id(a)?, g.id(b)?);
            let c = curvature_edge(&g, u, v)?;
            let bounds = curvature_bounds(&g, u, v)?;
            Ok(json!({
                "u": a,
                "v": b,
                "curvature": fraction_string(&c),
                "decimal": decimal_string(&c),
                "bounds": {
                    "lower": fraction_string(&bounds.lower),
                    "upper": fraction_string(&bounds.upper),
                },
            }))
        }
        ExactTarget::Node => {
            let a = require(&args.u, "u")?;
            let c = curvature_node(&g, g.id(a)?)?;
            Ok(json!({
                "node": a,
                "curvature": fraction_string(&c),
                "decimal": decimal_string(&c),
            }))
        }
        ExactTarget::Graph => {
            let avg = curvature_avg(&g)?;
            let edges: Vec<Value> = edge_curvatures(&g)
                .into_iter()
                .map(|((a, b), c)| {
                    json!({
                        "u": g.label(a),
                        "v": g.label(b),
                        "curvature": fraction_string(&c),
                        "decimal": decimal_string(&c),
                    })
                })
                .collect();
            Ok(json!({
                "avg": fraction_string(&avg),
                "decimal": decimal_string(&avg),
                "nodes": g.node_count(),
                "edge_count": g.edge_count(),
                "rows": edges,
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_approx(
    target: ApproxTarget,
    args: &GraphArgs,
    mode: Option<Mode>,
    eps: &str,
    delta: &str,
    r: &str,
    d: Option<usize>,
    backend: Backend,
    seed: u64,
) -> Outcome {
    let mode = match (target, mode) {
        (ApproxTarget::Edge, None) => Mode::EqualB,
        (ApproxTarget::Edge, Some(m @ (Mode::EqualA | Mode::EqualB | Mode::Unequal))) => m,
        (ApproxTarget::Node, None | Some(Mode::Node)) => Mode::Node,
        (ApproxTarget::Avg, None | Some(Mode::Avg)) => Mode::Avg,
        (_, Some(m)) => {
            return Err(Failure::new(
                EXIT_PARSE,
                format!(
                    "--mode {} does not apply to this target",
                    m.to_possible_value().expect("named").get_name()
                ),
            ))
        }
    };
    let mode_name = mode
        .to_possible_value()
        .expect("named")
        .get_name()
        .to_string();
    let g = load_graph(&args.input)?;
    match mode {
        Mode::EqualA | Mode::EqualB | Mode::Unequal => {
            let (eps, delta) = (rational(eps, "eps")?, rational(delta, "delta")?);
            let (a, b) = (require(&args.u, "u")?, require(&args.v, "v")?);
            let (u, v) = (g.id(a)?, g.id(b)?);
            let approx_mode = match mode {
                Mode::EqualA => ApproxMode::EqualA,
                Mode::EqualB => ApproxMode::EqualB,
                _ => ApproxMode::Unequal,
            };
            let backend = match backend {
                Backend::Exact => MatchingBackend::Exact,
                Backend::Local => MatchingBackend::Local(LocalMatchingConfig::new(seed)),
            };
            let out = approx_edge(
                &g,
                u,
                v,
                approx_mode,
                &eps,
                &delta,
                d.unwrap_or(usize::MAX),
                &backend,
                seed,
            )?;
            Ok(json!({
                "mode": mode_name,
                "u": a,
                "v": b,
                "seed": seed,
                "estimate": exact(&out.estimate),
                "guarantee": exact(&out.guarantee),
                "side": out.side,
                "case": out.case,
                "queries": queries(&out.queries),
            }))
        }
        Mode::Node | Mode::Avg => {
            let cfg = EstimatorConfig::new(rational(r, "r")?, seed)?;
            let b = ExactEdgeCurvature(&g);
            let mut s = QuerySession::on_graph(g.clone(), seed);
            let (out, subject) = if mode == Mode::Node {
                let a = require(&args.u, "u")?;
                (
                    estimate_node_curvature(&mut s, g.id(a)?, &cfg, &b)?,
                    json!(a),
                )
            } else {
                let degrees: Vec<usize> = g.nodes().map(|x| g.degree(x)).collect();
                (
                    estimate_avg_curvature(&mut s, &degrees, &cfg, &b)?,
                    Value::Null,
                )
            };
            let guarantee = cfg.r.clone() * num_bigint::BigInt::from(2);
            let mut value = json!({
                "mode": mode_name,
                "seed": seed,
                "samples": out.samples,
                "exhaustive": out.exhaustive,
                "estimate": exact(&out.estimate),
                "guarantee": exact(&guarantee),
                "queries": queries(&out.queries),
            });
            if !subject.is_null() {
                value["node"] = subject;
            }
            Ok(value)
        }
    }
}

fn cmd_experiment(
    family: &str,
    strategy: &str,
    n: usize,
    trials: usize,
    seed: u64,
    output: Option<&PathBuf>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let strategy: Strategy = strategy
        .parse()
        .map_err(|e: Error| Failure::new(EXIT_UNKNOWN_STRATEGY, e.to_string()))?;
    let family: FamilyKind = family
        .parse()
        .map_err(|e: Error| Failure::new(EXIT_UNKNOWN_STRATEGY, e.to_string()))?;
    let report = run_experiment(strategy, FamilyMix::new(family, n)?, trials, seed)?;
    let csv = report.to_csv();
    let written = match output {
        Some(path) => std::fs::write(path, csv),
        None => out.write_all(csv.as_bytes()),
    };
    written.map_err(|e| Failure::new(EXIT_FAILURE, format!("cannot write report: {e}")))
}

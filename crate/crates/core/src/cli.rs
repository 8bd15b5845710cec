//! Command-line front end. Exit codes: 0 success, 1 internal error,
//! 2 invalid input, 64 malformed flags.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::covering::{ball_covering, validate_covering, GoodCovering};
use crate::cycles::{cycle_basis, default_tree, gauge_reduce, holonomy, Cycle};
use crate::eigen::{dense_spectrum, lowest_eigenvalue, SolverOptions, DEFAULT_SEED, DEFAULT_TOLERANCE};
use crate::error::Error;
use crate::esa::{criterion_check, ladder_sweep, CoveringChoice};
use crate::family::GraphFamily;
use crate::field::lowest_eigenpair;
use crate::graph::{RawGraph, VertexId, WeightedGraph};
use crate::ladder::{classify, ladder_family, LadderParams, LadderRegime};
use crate::operator::assemble_operator;
use crate::potential::effective_potential_with;
use crate::report::{csv_with_manifest, format_real, to_json, InputDigest, RunManifest, WithManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "magspec",
    version,
    about = "Magnetic Schrödinger operators on weighted graphs"
)]
struct Cli {
    /// Seed for randomized internals; the eigensolver start vector is
    /// derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Eigensolver residual tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Record wall time in the manifest (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Field norm |B|: lowest eigenvalue with unit weights.
    Bnorm {
        graph: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalues of H on the graph's own weights, as CSV.
    Spectrum {
        graph: PathBuf,
        /// Full spectrum instead of the lowest eigenvalue.
        #[arg(long)]
        dense: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Holonomy of a closed walk, given as comma-separated vertex ids.
    Holonomy {
        graph: PathBuf,
        #[arg(long)]
        cycle: String,
        #[command(flatten)]
        output: Output,
    },
    /// Gauge that zeroes α on a BFS spanning tree, and the reduced graph.
    GaugeReduce {
        graph: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// k-ball covering with its diagnostics.
    Cover {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Per-vertex effective potential W as CSV.
    EffectivePotential {
        graph: PathBuf,
        /// Covering JSON, as written by `cover`.
        #[arg(long, conflicts_with = "k")]
        cover: Option<PathBuf>,
        /// Use the k-ball covering instead of a file.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluates the self-adjointness criterion on a truncation.
    EsaCheck {
        #[arg(long, value_enum, default_value_t = FamilyKind::Ladder)]
        family: FamilyKind,
        /// Graph JSON for `--family file`.
        #[arg(long, required_if_eq("family", "file"))]
        graph: Option<PathBuf>,
        /// Base vertex for `--family file`; defaults to the smallest id.
        #[arg(long)]
        base: Option<u64>,
        #[command(flatten)]
        ladder: LadderArgs,
        #[arg(long, default_value_t = 2000)]
        radius: usize,
        /// Ball radius of the covering. Defaults to the square covering for
        /// the ladder and to k = 1 otherwise.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Sweep of the ladder along its upper rail, as CSV.
    Ladder {
        #[command(flatten)]
        ladder: LadderArgs,
        /// Truncation radius; defaults to twice the sweep end, or 2000.
        #[arg(long)]
        radius: Option<usize>,
        /// Rung range FROM:TO; defaults to 1:R/2.
        #[arg(long, value_parser = parse_range)]
        sweep_l: Option<(usize, usize)>,
        #[command(flatten)]
        output: Output,
    },
    /// Checks a graph file and summarizes it.
    Validate {
        graph: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FamilyKind {
    Ladder,
    File,
}

#[derive(Debug, Args)]
struct LadderArgs {
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    b: f64,
    /// Flux per square: a number, or a multiple of pi such as `pi`, `0.5pi`
    /// or `pi/3`.
    #[arg(long, default_value = "pi", value_parser = parse_angle, allow_hyphen_values = true)]
    omega: f64,
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("cannot read {s:?} as an angle");
    if let Some(den) = t.strip_prefix("pi/") {
        return den
            .parse::<f64>()
            .map(|d| std::f64::consts::PI / d)
            .map_err(|_| bad());
    }
    if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let k = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        return Ok(k * std::f64::consts::PI);
    }
    t.parse::<f64>().map_err(|_| bad())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected FROM:TO, got {s:?}"))?;
    let a = a.parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b = b.parse().map_err(|_| format!("bad range end {b:?}"))?;
    Ok((a, b))
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() || matches!(e, Error::InvalidParameter(_)) {
            Failure::Validation(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(format!("serialization failed: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    let command: Vec<String> = std::iter::once("magspec".to_string())
        .chain(argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect();
    match execute(cli, command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Validation(msg)) => {
            eprintln!("magspec: invalid input: {msg}");
            EXIT_VALIDATION
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("magspec: error: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("MAGSPEC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

struct Context {
    command: Vec<String>,
    seed: u64,
    solver: SolverOptions,
    started: Option<Instant>,
}

impl Context {
    fn manifest(&self, inputs: Vec<InputDigest>) -> RunManifest {
        let mut m = RunManifest::new(self.command.clone(), inputs, self.solver, self.seed);
        m.wall_time_seconds = self.started.map(|t| t.elapsed().as_secs_f64());
        m
    }

    fn emit_json<T: Serialize>(&self, out: &Output, inputs: Vec<InputDigest>, body: &T) -> CliResult<()> {
        let manifest = self.manifest(inputs);
        write_output(
            out,
            &to_json(&WithManifest {
                body,
                manifest: &manifest,
            })?,
        )
    }

    fn emit_csv(
        &self,
        out: &Output,
        inputs: Vec<InputDigest>,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> CliResult<()> {
        write_output(out, &csv_with_manifest(&self.manifest(inputs), header, rows)?)
    }
}

fn write_output(out: &Output, text: &str) -> CliResult<()> {
    match &out.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Internal(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> CliResult<(WeightedGraph, InputDigest)> {
    let raw = RawGraph::from_json(&read_text(path)?)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let graph = raw
        .build()
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let digest = InputDigest::of(path.display().to_string(), &graph.to_raw())?;
    Ok((graph, digest))
}

fn load_covering(path: &Path) -> CliResult<(GoodCovering, InputDigest)> {
    let cover: GoodCovering = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let digest = InputDigest::of(path.display().to_string(), &cover)?;
    Ok((cover, digest))
}

fn row(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| format_real(v)).collect()
}

#[derive(Serialize)]
struct BnormReport {
    #[serde(serialize_with = "crate::report::real")]
    lambda_min: f64,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct HolonomyReport {
    cycle: Vec<VertexId>,
    holonomy: f64,
}

#[derive(Serialize)]
struct VertexPhase {
    id: VertexId,
    sigma: f64,
}

#[derive(Serialize)]
struct GaugeReport {
    root: VertexId,
    sigma: Vec<VertexPhase>,
    /// The reduced graph: zero on tree edges.
    graph: RawGraph,
    max_tree_angle: f64,
}

#[derive(Serialize)]
struct CoverReport<'a> {
    #[serde(flatten)]
    cover: &'a GoodCovering,
    diagnostics: crate::covering::CoveringDiagnostics,
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    vertices: usize,
    edges: usize,
    degree_bound: usize,
    cycle_rank: usize,
}

#[derive(Serialize)]
struct LadderInfo {
    params: LadderParams,
    regime: LadderRegime,
    known_not_esa_if_b0: bool,
}

#[derive(Serialize)]
struct EsaCheckReport {
    #[serde(flatten)]
    report: crate::esa::EsaReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder: Option<LadderInfo>,
}

fn execute(cli: Cli, command: Vec<String>) -> CliResult<()> {
    if cli.tol.is_nan() || cli.tol <= 0.0 || !cli.tol.is_finite() {
        return Err(Failure::Validation(format!(
            "--tol must be positive, got {}",
            cli.tol
        )));
    }
    let ctx = Context {
        command,
        seed: cli.seed,
        solver: SolverOptions {
            tol: cli.tol,
            seed: DEFAULT_SEED ^ cli.seed,
            ..SolverOptions::default()
        },
        started: cli.timing.then(Instant::now),
    };
    let solver = ctx.solver;

    match cli.command {
        Command::Bnorm { graph, output } => {
            let (g, digest) = load_graph(&graph)?;
            let pair = lowest_eigenpair(&g.with_unit_weights(), g.potential(), &solver)?;
            let body = BnormReport {
                lambda_min: pair.lambda_min.max(0.0),
                residual: pair.residual,
                iterations: pair.iterations,
            };
            ctx.emit_json(&output, vec![digest], &body)
        }
        Command::Spectrum { graph, dense, output } => {
            let (g, digest) = load_graph(&graph)?;
            let op = assemble_operator(&g, g.potential())?;
            let values = if dense {
                dense_spectrum(&op)
            } else {
                vec![lowest_eigenvalue(&op, &solver)?.lambda_min]
            };
            let rows: Vec<Vec<String>> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![i.to_string(), format_real(v)])
                .collect();
            ctx.emit_csv(&output, vec![digest], &["index", "lambda"], &rows)
        }
        Command::Holonomy { graph, cycle, output } => {
            let (g, digest) = load_graph(&graph)?;
            let ids = cycle
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Validation(format!("--cycle {cycle:?}: {e}")))?;
            let c = Cycle::from_ids(&ids)?;
            let body = HolonomyReport {
                holonomy: holonomy(&g, g.potential(), &c)?,
                cycle: c.vertices().to_vec(),
            };
            ctx.emit_json(&output, vec![digest], &body)
        }
        Command::GaugeReduce { graph, output } => {
            let (g, digest) = load_graph(&graph)?;
            let (gauge, reduced) = gauge_reduce(&g, g.potential())?;
            let tree = default_tree(&g);
            let max_tree_angle = tree
                .edges()
                .iter()
                .map(|&k| reduced.get(k).abs())
                .fold(0.0, f64::max);
            let body = GaugeReport {
                root: g.id(tree.root()),
                sigma: gauge
                    .sigma
                    .iter()
                    .enumerate()
                    .map(|(x, &sigma)| VertexPhase { id: g.id(x), sigma })
                    .collect(),
                graph: g.with_potential(reduced)?.to_raw(),
                max_tree_angle,
            };
            ctx.emit_json(&output, vec![digest], &body)
        }
        Command::Cover { graph, k, output } => {
            let (g, digest) = load_graph(&graph)?;
            let cover = ball_covering(&g, k)?;
            let diagnostics = validate_covering(&g, &cover);
            ctx.emit_json(
                &output,
                vec![digest],
                &CoverReport {
                    cover: &cover,
                    diagnostics,
                },
            )
        }
        Command::EffectivePotential {
            graph,
            cover,
            k,
            output,
        } => {
            let (g, digest) = load_graph(&graph)?;
            let mut inputs = vec![digest];
            let cover = match cover {
                Some(path) => {
                    let (cover, d) = load_covering(&path)?;
                    inputs.push(d);
                    cover
                }
                None => ball_covering(&g, k.unwrap_or(1))?,
            };
            let w = effective_potential_with(&g, &cover, g.potential(), &solver)?;
            let rows: Vec<Vec<String>> = (0..g.vertex_count())
                .map(|x| {
                    vec![
                        g.id(x).to_string(),
                        format_real(w.at(x)),
                        w.ball_count(x).to_string(),
                    ]
                })
                .collect();
            ctx.emit_csv(&output, inputs, &["id", "W", "ball_count"], &rows)
        }
        Command::EsaCheck {
            family,
            graph,
            base,
            ladder,
            radius,
            k,
            output,
        } => {
            let (fam, inputs, info) = match family {
                FamilyKind::Ladder => {
                    let p = LadderParams::new(ladder.a, ladder.b, ladder.omega)?;
                    let info = LadderInfo {
                        params: p,
                        regime: classify(&p),
                        known_not_esa_if_b0: p.a > 2.0,
                    };
                    let digest = InputDigest::of("ladder", &p)?;
                    (ladder_family(p), vec![digest], Some(info))
                }
                FamilyKind::File => {
                    let path = graph.expect("clap enforces --graph for --family file");
                    let (g, digest) = load_graph(&path)?;
                    let base = base.map(VertexId).unwrap_or_else(|| g.id(0));
                    (GraphFamily::from_finite(g, base)?, vec![digest], None)
                }
            };
            let choice = match (k, family) {
                (Some(k), _) => CoveringChoice::Balls(k),
                (None, FamilyKind::Ladder) => CoveringChoice::Family,
                (None, FamilyKind::File) => CoveringChoice::Balls(1),
            };
            let report = criterion_check(&fam, choice, radius, &solver)?;
            ctx.emit_json(&output, inputs, &EsaCheckReport { report, ladder: info })
        }
        Command::Ladder {
            ladder,
            radius,
            sweep_l,
            output,
        } => {
            let p = LadderParams::new(ladder.a, ladder.b, ladder.omega)?;
            let radius = radius.unwrap_or_else(|| sweep_l.map_or(2000, |(_, to)| 2 * to));
            let (from, to) = sweep_l.unwrap_or((1, (radius / 2).max(1)));
            let rows: Vec<Vec<String>> = ladder_sweep(&p, radius, from, to, &solver)?
                .iter()
                .map(|r| {
                    let mut cells = vec![r.l.to_string()];
                    cells.extend(row(&[r.w_literal, r.w_paper, r.distance, r.deficit]));
                    cells
                })
                .collect();
            let digest = InputDigest::of("ladder", &p)?;
            ctx.emit_csv(
                &output,
                vec![digest],
                &["l", "W_literal", "W_paper", "D_R", "deficit"],
                &rows,
            )
        }
        Command::Validate { graph, output } => {
            let (g, digest) = load_graph(&graph)?;
            let basis = cycle_basis(&g, &default_tree(&g))?;
            let body = ValidateReport {
                valid: true,
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                degree_bound: g.degree_bound(),
                cycle_rank: basis.len(),
            };
            ctx.emit_json(&output, vec![digest], &body)
        }
    }
}

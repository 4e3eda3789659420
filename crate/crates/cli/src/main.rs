use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ohba_lab::choose::{chi_list_exact, find_bad_assignment, ChoosabilityOptions};
use ohba_lab::compress::{compress_universe_with, replay_trace, CompressionOptions, CompressionTrace};
use ohba_lab::lab::{
    erdos_parts2, k33, lemma3, montecarlo_color_tail, montecarlo_expected_weight, ohba_counterexample, ohba_sweep,
    random_multipartite, ExperimentReport, InstanceFile, Lemma3Params, Metadata, RandomMultipartiteParams, SweepReport,
    Threshold,
};
use ohba_lab::lists::{verify_coloring, Coloring};
use ohba_lab::pipeline::{extract_bicliques, solve_via_theorem1, PipelineConfig};
use ohba_lab::solver::{find_acceptable_coloring_with, SolverOptions};
use ohba_lab::LabError;

#[derive(Parser)]
#[command(
    name = "ohba-lab",
    version,
    about = "List-colouring laboratory for complete multipartite graphs"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node / assignment budget for exact searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a generated instance.
    #[command(subcommand)]
    Generate(Generator),
    /// Exact search for an acceptable colouring.
    Solve { instance: PathBuf },
    /// Exact list-chromatic number.
    ChiList { instance: PathBuf },
    /// Random search for a bad k-list assignment on the instance's graph.
    BadSearch {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000_000)]
        trials: u64,
    },
    /// Shrink the colour universe of a bad assignment below |V|.
    Compress { instance: PathBuf },
    /// Constructive colouring with stage reports.
    Pipeline(PipelineArgs),
    /// Monte Carlo experiments on an instance with biclique structure.
    Montecarlo(MonteCarloArgs),
    /// Compare chi and chi_l over small complete multipartite graphs.
    Sweep {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Check a colouring, a bad witness, or a compression trace.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum Generator {
    K33,
    ErdosParts2 {
        #[arg(long)]
        k: usize,
    },
    OhbaCounterexample {
        #[arg(long)]
        k: usize,
    },
    Lemma3 {
        #[arg(long, default_value_t = 60)]
        c: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        t: usize,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long)]
        n: Option<usize>,
    },
    RandomMultipartite {
        #[arg(long)]
        parts: usize,
        #[arg(long)]
        max_part_size: usize,
        #[arg(long)]
        list_size: usize,
        #[arg(long)]
        universe: usize,
    },
}

#[derive(Args)]
struct PipelineArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    retry_limit: usize,
    /// Fail instead of falling back to the exact solver.
    #[arg(long)]
    no_fallback: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Weight,
    Tail,
}

#[derive(Args)]
struct MonteCarloArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Experiment::Weight)]
    experiment: Experiment,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Block sizes used when the instance has no planted system.
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 6)]
    t: usize,
    /// Colour for the tail experiment (default: first planted colour).
    #[arg(long)]
    color: Option<u32>,
    /// Absolute tail threshold; default is mean + delta/20.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "mode")]
struct VerifyModes {
    /// File holding a colouring (array, or object with a `coloring` field).
    #[arg(long, requires = "instance")]
    coloring: Option<PathBuf>,
    /// Confirm exhaustively that the instance's lists admit no colouring.
    #[arg(long, requires = "instance")]
    bad: bool,
    /// Replay a compression trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: Option<PathBuf>,
    #[command(flatten)]
    mode: VerifyModes,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let code = match &e {
            LabError::InvalidArgument(_) | LabError::Precondition(_) | LabError::Json(_) | LabError::Io(_) => 2,
            LabError::ResourceLimit { .. } => 3,
            LabError::InternalInconsistency { .. } | LabError::CounterexampleCandidate { .. } => 4,
            LabError::StageFailed { .. } => 1,
        };
        let message = match &e {
            LabError::InternalInconsistency { state, .. } | LabError::CounterexampleCandidate { state } => {
                format!("{e}\nstate: {state}")
            }
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        LabError::from(e).into()
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// A command's result: the JSON document, plus CSV rows where supported.
struct Output {
    json: Value,
    csv: Option<Vec<Vec<String>>>,
    /// Exit with verification failure after writing.
    rejected: bool,
}

impl Output {
    fn json(value: impl Serialize) -> Result<Self, Failure> {
        Ok(Output {
            json: serde_json::to_value(value)?,
            csv: None,
            rejected: false,
        })
    }
}

fn read_instance(path: &Path) -> Result<InstanceFile, Failure> {
    InstanceFile::read(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn solver_options(budget: Option<u64>) -> SolverOptions {
    let mut opts = SolverOptions::default();
    if let Some(b) = budget {
        opts.budget.max_nodes = b;
    }
    opts
}

fn choosability_options(budget: Option<u64>) -> ChoosabilityOptions {
    let mut opts = ChoosabilityOptions::default();
    if let Some(b) = budget {
        opts.max_assignments = b;
    }
    opts
}

fn generate(kind: &Generator, seed: u64) -> Result<InstanceFile, Failure> {
    Ok(match *kind {
        Generator::K33 => k33(),
        Generator::ErdosParts2 { k } => erdos_parts2(k)?,
        Generator::OhbaCounterexample { k } => ohba_counterexample(k)?,
        Generator::Lemma3 { c, m, t, delta, n } => lemma3(Lemma3Params {
            c,
            m,
            t,
            delta,
            seed,
            n,
        })?,
        Generator::RandomMultipartite {
            parts,
            max_part_size,
            list_size,
            universe,
        } => random_multipartite(
            RandomMultipartiteParams {
                parts,
                max_part_size,
                list_size,
                universe,
            },
            seed,
        )?,
    })
}

fn montecarlo(args: &MonteCarloArgs, seed: u64) -> Result<ExperimentReport, Failure> {
    let file = read_instance(&args.instance)?;
    let inst = file.multipartite()?;
    let system = match &file.planted {
        Some(s) => s.clone(),
        None => extract_bicliques(&inst, args.m, args.t).system,
    };
    if system.k() == 0 {
        return Err(invalid("no biclique structure found in the instance"));
    }
    Ok(match args.experiment {
        Experiment::Weight => montecarlo_expected_weight(&inst, &system, args.trials, seed)?,
        Experiment::Tail => {
            let color = args.color.or_else(|| system.colors().next()).expect("k > 0");
            let threshold = match args.threshold {
                Some(x) => Threshold::Absolute(x),
                None => Threshold::MeanPlus(args.delta / 20.0),
            };
            montecarlo_color_tail(&inst, &system, color, threshold, args.trials, seed, args.delta)?
        }
    })
}

fn sweep_rows(report: &SweepReport) -> Vec<Vec<String>> {
    let mut rows = vec![[
        "parts",
        "n",
        "chi",
        "chi_list",
        "verdict",
        "assignments_checked",
        "micros",
        "note",
    ]
    .map(String::from)
    .to_vec()];
    for r in &report.rows {
        rows.push(vec![
            r.parts.clone(),
            r.n.to_string(),
            r.chi.to_string(),
            r.chi_list.map_or(String::new(), |c| c.to_string()),
            serde_json::to_value(r.verdict)
                .unwrap()
                .as_str()
                .unwrap_or_default()
                .to_string(),
            r.assignments_checked.to_string(),
            r.micros.map_or(String::new(), |m| m.to_string()),
            r.note.clone(),
        ]);
    }
    rows
}

fn verify(args: &VerifyArgs, budget: Option<u64>) -> Result<Output, Failure> {
    if let Some(path) = &args.mode.trace {
        let trace: CompressionTrace = serde_json::from_value(read_json(path)?)?;
        return Ok(match replay_trace(&trace) {
            Ok(_) => Output::json(json!({"check": "trace", "valid": true, "steps": trace.steps.len()}))?,
            Err(LabError::InvalidArgument(reason)) => Output {
                rejected: true,
                ..Output::json(json!({"check": "trace", "valid": false, "reason": reason}))?
            },
            Err(e) => return Err(e.into()),
        });
    }
    let file = read_instance(args.instance.as_deref().expect("clap enforces instance"))?;
    let g = file.graph()?;
    let lists = file.list_assignment()?;
    if let Some(path) = &args.mode.coloring {
        let v = read_json(path)?;
        let colors = v.get("coloring").cloned().unwrap_or(v);
        let coloring: Coloring = serde_json::from_value(colors)
            .map_err(|e| invalid(format!("{}: expected an array of colours: {e}", path.display())))?;
        let verdict = verify_coloring(&g, &lists, &coloring)?;
        return Ok(Output {
            rejected: !verdict.is_acceptable(),
            ..Output::json(json!({"check": "coloring", "verdict": verdict}))?
        });
    }
    let found = find_acceptable_coloring_with(&g, &lists, &solver_options(budget))?;
    Ok(Output {
        rejected: found.is_some(),
        ..Output::json(json!({"check": "bad", "bad": found.is_none(), "coloring": found}))?
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| invalid(e.to_string()))?;
    }
    match &cli.command {
        Command::Generate(kind) => Output::json(generate(kind, cli.seed)?),
        Command::Solve { instance } => {
            let file = read_instance(instance)?;
            let (g, lists) = (file.graph()?, file.list_assignment()?);
            let coloring = find_acceptable_coloring_with(&g, &lists, &solver_options(cli.budget))?;
            Output::json(json!({"colorable": coloring.is_some(), "coloring": coloring}))
        }
        Command::ChiList { instance } => {
            let g = read_instance(instance)?.graph()?;
            let r = chi_list_exact(&g, &choosability_options(cli.budget))?;
            let witness = r
                .witness
                .as_ref()
                .map(|w| InstanceFile::from_graph(&g, w, Metadata::new("chi-list")));
            Output::json(json!({"result": r, "witness": witness}))
        }
        Command::BadSearch { instance, k, trials } => {
            let file = read_instance(instance)?;
            let g = file.graph()?;
            match find_bad_assignment(&g, *k, *trials, cli.seed)? {
                Some(w) => {
                    let meta = Metadata {
                        seed: Some(cli.seed),
                        ..Metadata::new("bad-search").param("k", k).param("trials", trials)
                    };
                    let mut out = file.clone();
                    out.lists = InstanceFile::from_graph(&g, &w, Metadata::new("")).lists;
                    out.planted = None;
                    out.metadata = meta;
                    Output::json(out)
                }
                None => Output::json(json!({"found": false, "k": k, "trials": trials})),
            }
        }
        Command::Compress { instance } => {
            let file = read_instance(instance)?;
            let opts = CompressionOptions {
                solver: solver_options(cli.budget),
                ..CompressionOptions::default()
            };
            let (_, trace) = compress_universe_with(&file.graph()?, &file.list_assignment()?, &opts)?;
            Output::json(trace)
        }
        Command::Pipeline(args) => {
            let file = read_instance(&args.instance)?;
            let config = PipelineConfig {
                epsilon: args.epsilon,
                m: args.m,
                retry_limit: args.retry_limit,
                seed: cli.seed,
                solver_fallback: !args.no_fallback,
                solver: solver_options(cli.budget),
                ..PipelineConfig::default()
            };
            Output::json(solve_via_theorem1(&file.graph()?, &file.list_assignment()?, &config)?)
        }
        Command::Montecarlo(args) => {
            let report = montecarlo(args, cli.seed)?;
            let mut rows = vec![vec!["trial".to_string(), "value".to_string()]];
            rows.extend(
                report
                    .values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![i.to_string(), v.to_string()]),
            );
            Ok(Output {
                csv: Some(rows),
                ..Output::json(report)?
            })
        }
        Command::Sweep { max_n } => {
            let report = ohba_sweep(*max_n, &choosability_options(cli.budget))?;
            Ok(Output {
                csv: Some(sweep_rows(&report)),
                ..Output::json(report)?
            })
        }
        Command::Verify(args) => verify(args, cli.budget),
    }
}

fn render(output: &Output, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&output.json)? + "\n"),
        Format::Csv => {
            let rows = output
                .csv
                .as_ref()
                .ok_or_else(|| invalid("csv output is only available for sweep and montecarlo"))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.write_record(row).map_err(|e| invalid(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|output| {
        let text = render(&output, cli.format)?;
        match &cli.out {
            Some(path) => std::fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))?,
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(invalid(e.to_string())),
                    _ => {}
                }
            }
        }
        Ok(output.rejected)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(4),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

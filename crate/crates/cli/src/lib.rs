//! Command-line front end for `speedscale`: instance and schedule files,
//! solver subcommands, verification and Gantt charts.
//!
//! Results go to stdout as JSON; a short human summary goes to stderr.
//! Exit codes: 0 success, 2 bad input, 3 infeasible, 4 internal audit failure.

pub mod gantt;
pub mod io;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use speedscale::greedy::{kappa_delta, kappa_delta_c, naive_per_level_sweep, naive_two_speed_sweep};
use speedscale::lp::solve_ordering;
use speedscale::metrics::{evaluate, optimality_witness, Violation};
use speedscale::oracle::{exact_optimum, DEFAULT_MAX_N};
use speedscale::problem::release_order;
use speedscale::reductions::{budget_to_fe, counterexample_instance, subsetsum_to_bidua, subsetsum_to_feidwu};
use speedscale::{ConstructionTrace, Instance, JobOrder, Rational, Schedule, Variant};
use thiserror::Error;

use crate::io::{InstanceFile, JobEntry, MetricsEntry, Provenance, ScheduleFile, VariantEntry};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("recorded metrics disagree with the schedule: {0}")]
    MetricsMismatch(String),
    #[error(transparent)]
    Core(#[from] speedscale::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use speedscale::Error as E;
        match self {
            CliError::Parse(_) | CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::MetricsMismatch(_) => 3,
            CliError::Core(E::Infeasible | E::InfeasibleSchedule(_)) => 3,
            CliError::Core(E::AuditFailed(_) | E::ReconstructionMismatch(_) | E::IterationLimit) => 4,
            CliError::Core(_) => 2,
        }
    }

    /// Variant name, for the structured error on stdout.
    pub fn kind(&self) -> String {
        match self {
            CliError::Parse(_) => "ParseError".into(),
            CliError::Io(_) => "IoError".into(),
            CliError::Usage(_) => "UsageError".into(),
            CliError::MetricsMismatch(_) => "MetricsMismatch".into(),
            CliError::Core(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
            }
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body {
            kind: String,
            message: String,
            exit_code: i32,
        }
        #[derive(Serialize)]
        struct Wrapper {
            error: Body,
        }
        io::to_json(&Wrapper { error: Body { kind: self.kind(), message: self.to_string(), exit_code: self.exit_code() } })
    }
}

#[derive(Debug, Parser)]
#[command(name = "speedscale", version, about = "Exact speed-scaling schedules for flow plus energy and budgeted flow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal schedule for a fixed completion ordering via the ordering LP.
    SolveLp {
        instance: PathBuf,
        /// `fifo` (release order) or a comma-separated 0-based permutation.
        /// Defaults to the instance's `ordering` field, then to `fifo`.
        #[arg(long)]
        ordering: Option<String>,
    },
    /// Greedy construction.
    SolveGreedy {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = GreedyVariant::Kd)]
        variant: GreedyVariant,
        /// Ordering for `kd-c`; defaults as for `solve-lp`.
        #[arg(long)]
        ordering: Option<String>,
        /// Print the construction trace to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Exact optimum by searching all completion orderings.
    Oracle {
        instance: PathBuf,
        #[arg(long, env = "SPEEDSCALE_MAX_N", default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Generate a reduction or counterexample instance.
    Reduce {
        #[command(subcommand)]
        which: Reduction,
    },
    /// Check a schedule file for feasibility and recompute its metrics.
    Verify { schedule: PathBuf },
    /// Render a schedule file as an SVG Gantt chart.
    Gantt {
        schedule: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GreedyVariant {
    Kd,
    Naive2,
    #[value(name = "naiveK")]
    NaiveK,
    KdC,
}

#[derive(Debug, Subcommand)]
pub enum Reduction {
    /// Two-speed budget instance to flow-plus-energy.
    BudgetToFe { instance: PathBuf },
    /// SubsetSum to weighted unit-size flow-plus-energy (job groups with counts).
    SsToFeidwu {
        #[arg(long, value_delimiter = ',', required = true)]
        elements: Vec<u64>,
        #[arg(long)]
        target: u64,
    },
    /// SubsetSum to unweighted budget flow.
    SsToBidua {
        #[arg(long, value_delimiter = ',', required = true)]
        elements: Vec<u64>,
        #[arg(long)]
        target: u64,
    },
    /// Three-job instance where both naive sweeps can fail.
    Counterexample {
        #[arg(long)]
        alpha: String,
    },
}

/// What a command produced. `stdout` is the machine-readable result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub summary: String,
}

fn parse_ordering(spec: Option<&str>, file: &InstanceFile, instance: &Instance) -> Result<JobOrder, CliError> {
    match spec {
        Some("fifo") => Ok(release_order(instance)),
        Some(s) => {
            let perm = s
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("--ordering: bad index {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(JobOrder::completion(perm)?)
        }
        None => Ok(file.order()?.unwrap_or_else(|| release_order(instance))),
    }
}

fn schedule_output(
    solver: &str,
    file: &InstanceFile,
    instance: &Instance,
    schedule: &Schedule,
    order: Option<&JobOrder>,
) -> Result<(String, String), CliError> {
    let m = evaluate(schedule, instance, order)?;
    let out = ScheduleFile::new(solver, file, schedule, order, &m);
    let summary = format!("{solver}: objective {} (flow {}, energy {})", m.objective, m.flow, m.energy);
    Ok((io::to_json(&out), summary))
}

fn with_trace(summary: String, trace: &ConstructionTrace, show: bool) -> String {
    if show {
        format!("{summary}\n{}", trace.to_text().trim_end())
    } else {
        format!("{summary}; {} steps", trace.steps.len())
    }
}

fn provenance_file(instance: &Instance, provenance: Provenance) -> String {
    let mut f = InstanceFile::from_instance(instance);
    f.provenance = Some(provenance);
    io::to_json(&f)
}

fn reduce(which: &Reduction) -> Result<Output, CliError> {
    let mut constants = std::collections::BTreeMap::new();
    match which {
        Reduction::BudgetToFe { instance } => {
            let (_, src) = io::read_instance(instance)?;
            let red = budget_to_fe(&src)?;
            for (key, v) in [
                ("Y", &red.y),
                ("C_max", &red.c_max),
                ("idle", &red.idle),
                ("delta_tilde_1", &red.delta_tilde),
                ("speed_scale", &red.speed_scale),
            ] {
                constants.insert(key.to_string(), v.to_string());
            }
            let prov = Provenance {
                generator: "budget-to-fe".into(),
                source: Some(Box::new(InstanceFile::from_instance(&red.normalized_source))),
                constants,
                ..Default::default()
            };
            let n = src.n();
            Ok(Output {
                stdout: provenance_file(&red.instance, prov),
                summary: format!("budget-to-fe: {} jobs ({n} source, 1 long, {n} late), Y = {}", red.instance.n(), red.y),
            })
        }
        Reduction::SsToFeidwu { elements, target } => {
            let red = subsetsum_to_feidwu::<Rational>(elements, *target)?;
            constants.insert("K".into(), red.k.to_string());
            constants.insert("K_tilde".into(), red.k_tilde.to_string());
            constants.insert("Y".into(), red.y.to_string());
            constants.insert("delta_1".into(), red.delta.to_string());
            let p = &red.profile;
            let file = InstanceFile {
                jobs: red
                    .groups
                    .iter()
                    .map(|g| JobEntry {
                        r: g.job.release.to_string(),
                        v: g.job.volume.to_string(),
                        w: g.job.weight.to_string(),
                        count: (g.count != 1).then_some(g.count),
                    })
                    .collect(),
                speeds: p.speeds().iter().map(|s| s.to_string()).collect(),
                powers: p.powers().iter().map(|s| s.to_string()).collect(),
                variant: VariantEntry::FlowEnergy,
                ordering: None,
                provenance: Some(Provenance {
                    generator: "ss-to-feidwu".into(),
                    elements: Some(elements.clone()),
                    target: Some(*target),
                    constants,
                    ..Default::default()
                }),
            };
            Ok(Output {
                stdout: io::to_json(&file),
                summary: format!(
                    "ss-to-feidwu: {} jobs in {} groups, K = {}, K~ = {}",
                    red.job_count(),
                    red.groups.len(),
                    red.k,
                    red.k_tilde
                ),
            })
        }
        Reduction::SsToBidua { elements, target } => {
            let red = subsetsum_to_bidua::<Rational>(elements, *target)?;
            let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
            constants.insert("delta".into(), red.delta.to_string());
            constants.insert("base_flow".into(), red.base_flow.to_string());
            constants.insert("yes_threshold".into(), red.yes_threshold.to_string());
            constants.insert("priority".into(), join(red.priority.perm()));
            for (i, s) in red.shifts.iter().enumerate() {
                constants.insert(format!("shift_{i}"), s.to_string());
            }
            let prov = Provenance {
                generator: "ss-to-bidua".into(),
                elements: Some(elements.clone()),
                target: Some(*target),
                constants,
                ..Default::default()
            };
            Ok(Output {
                stdout: provenance_file(&red.instance, prov),
                summary: format!("ss-to-bidua: {} jobs, YES iff optimal flow <= {}", red.instance.n(), red.yes_threshold),
            })
        }
        Reduction::Counterexample { alpha } => {
            let a = io::rat("--alpha", alpha)?;
            let inst = counterexample_instance(&a)?;
            constants.insert("alpha".into(), a.to_string());
            let prov = Provenance { generator: "counterexample".into(), constants, ..Default::default() };
            Ok(Output { stdout: provenance_file(&inst, prov), summary: format!("counterexample with alpha = {a}") })
        }
    }
}

fn verify(path: &std::path::Path) -> Result<Output, CliError> {
    #[derive(Serialize)]
    struct Report {
        feasible: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        within_budget: Option<bool>,
        metrics: MetricsEntry,
        /// Local optimality conditions that fail (FE instances only).
        #[serde(skip_serializing_if = "Option::is_none")]
        violations: Option<Vec<String>>,
    }
    let file: ScheduleFile = io::read_file(path)?;
    let instance = file.instance.to_instance()?;
    let schedule = file.schedule()?;
    let order = file.order()?;
    let m = evaluate(&schedule, &instance, order.as_ref())?;
    let recomputed = MetricsEntry::from_metrics(&m);
    if let Some(rec) = &file.metrics {
        if *rec != recomputed {
            return Err(CliError::MetricsMismatch(format!("{}", path.display())));
        }
    }
    let (within_budget, violations) = match instance.variant() {
        Variant::Budget(b) => {
            if !m.within_budget {
                return Err(speedscale::Error::InfeasibleSchedule(format!("energy {} exceeds budget {b}", m.energy)).into());
            }
            (Some(true), None)
        }
        Variant::FlowEnergy => {
            let w = optimality_witness(&schedule, &instance)?;
            let v = w
                .violations
                .iter()
                .map(|v| match v {
                    Violation::Shrink(j) => format!("shrink {j}"),
                    Violation::Expand(j) => format!("expand {j}"),
                })
                .collect::<Vec<_>>();
            (None, Some(v))
        }
    };
    let summary = format!(
        "feasible; objective {}{}",
        m.objective,
        match &violations {
            Some(v) if !v.is_empty() => format!("; {} local optimality violations", v.len()),
            _ => String::new(),
        }
    );
    let report = Report { feasible: true, within_budget, metrics: recomputed, violations };
    Ok(Output { stdout: io::to_json(&report), summary })
}

/// Runs one command. Files named by `gantt -o` are written here; everything
/// else is returned.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::SolveLp { instance, ordering } => {
            let (file, inst) = io::read_instance(instance)?;
            let order = parse_ordering(ordering.as_deref(), &file, &inst)?;
            let (sol, schedule, _) = solve_ordering(&inst, &order)?;
            let (stdout, summary) = schedule_output("lp", &file, &inst, &schedule, Some(&order))?;
            Ok(Output { stdout, summary: format!("{summary}; LP value {} in {} pivots", sol.flow_form, sol.pivots) })
        }
        Command::SolveGreedy { instance, variant, ordering, trace } => {
            let (file, inst) = io::read_instance(instance)?;
            let (name, order, (schedule, tr)) = match variant {
                GreedyVariant::Kd => ("kd", None, kappa_delta(&inst)?),
                GreedyVariant::Naive2 => ("naive2", None, naive_two_speed_sweep(&inst)?),
                GreedyVariant::NaiveK => ("naiveK", None, naive_per_level_sweep(&inst)?),
                GreedyVariant::KdC => {
                    let order = parse_ordering(ordering.as_deref(), &file, &inst)?;
                    let out = kappa_delta_c(&inst, &order)?;
                    ("kd-c", Some(order), out)
                }
            };
            let (stdout, summary) = schedule_output(name, &file, &inst, &schedule, order.as_ref())?;
            Ok(Output { stdout, summary: with_trace(summary, &tr, *trace) })
        }
        Command::Oracle { instance, max_n } => {
            let (file, inst) = io::read_instance(instance)?;
            let opt = exact_optimum(&inst, *max_n)?;
            let (stdout, summary) = schedule_output("oracle", &file, &inst, &opt.schedule, Some(&opt.order))?;
            Ok(Output {
                stdout,
                summary: format!("{summary}; ordering {:?}, {} orderings solved", opt.order.perm(), opt.orderings_solved),
            })
        }
        Command::Reduce { which } => reduce(which),
        Command::Verify { schedule } => verify(schedule),
        Command::Gantt { schedule, output } => {
            let file: ScheduleFile = io::read_file(schedule)?;
            let inst = file.instance.to_instance()?;
            let s = file.schedule()?;
            let m = evaluate(&s, &inst, None)?;
            let svg = gantt::render(&s, &inst, &m);
            std::fs::write(output, &svg).map_err(|e| CliError::Io(format!("{}: {e}", output.display())))?;
            Ok(Output { stdout: String::new(), summary: format!("wrote {}", output.display()) })
        }
    }
}

//! Argument parsing and command dispatch.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qnr_core::number_theory::{power_nonresidues, qnr_set, OddPrimeInstance};
use qnr_core::qnr::{build_instance, rotated_state, Schedule, VerificationReport};
use qnr_core::statevector::{Indicator, StateVector};
use qnr_core::{DEFAULT_MAX_QUBITS, DEFAULT_TOLERANCE};
use serde::{Deserialize, Serialize};

use crate::config::MAX_QUBITS_ENV;
use crate::io::{amplitude_rows, fmt_f64, read_marked, write_amplitudes_csv, AmplitudeRow};
use crate::report::{
    grover_demo, sample_report, set_sample_report, verify_sweep, Envelope, FrequencyRow,
    GroverDemoReport, SampleReport, SetSampleReport,
};
use crate::{CliError, OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "qnr",
    version,
    about = "Exact quantum sampling of quadratic nonresidues, simulated"
)]
pub struct Cli {
    /// Pass/fail tolerance on amplitudes and probabilities.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Largest register to simulate.
    #[arg(long, global = true, env = MAX_QUBITS_ENV, default_value_t = DEFAULT_MAX_QUBITS)]
    pub max_qubits: u32,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Fill in `elapsed_ms` in reports.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Worker threads for sampling and sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample nonresidues of a prime.
    Sample {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Check the pipeline against its closed form and brute-force oracles.
    Verify {
        #[arg(
            long,
            required_unless_present = "sweep_max",
            conflicts_with = "sweep_max"
        )]
        prime: Option<u64>,
        /// Verify every prime p = 1 mod 8 below this bound.
        #[arg(long)]
        sweep_max: Option<u64>,
    },
    /// Dump amplitudes at one stage of the pipeline.
    Trace {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum)]
        stage: TraceStage,
        #[arg(long, value_enum, default_value = "two-step")]
        schedule: ScheduleArg,
    },
    /// Grover search for one marked state, optionally made exact.
    GroverDemo {
        #[arg(long)]
        bits: u32,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Uniform sampling from a marked set of known size.
    SampleSet {
        /// Declared size of the marked set; checked against the set.
        #[arg(long)]
        size: usize,
        /// Newline-separated basis indices.
        #[arg(
            long,
            conflicts_with = "indicator",
            required_unless_present = "indicator"
        )]
        marked_file: Option<PathBuf>,
        #[arg(long, value_enum, requires = "prime")]
        indicator: Option<IndicatorKind>,
        #[arg(long)]
        prime: Option<u64>,
        /// Register width for `--marked-file` (default: smallest that fits).
        #[arg(long)]
        bits: Option<u32>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStage {
    Initial,
    Rotated,
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    TwoStep,
    Direct,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::TwoStep => Schedule::TwoStep,
            ScheduleArg::Direct => Schedule::Direct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndicatorKind {
    Qnr,
    CubicNr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub p: u64,
    pub stage: TraceStage,
    pub rows: Vec<AmplitudeRow>,
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        let seed = match self.command {
            Command::Sample { seed, .. } | Command::SampleSet { seed, .. } => Some(seed),
            Command::GroverDemo { seed, .. } => seed,
            _ => None,
        };
        RunConfig {
            tolerance: self.tolerance,
            max_qubits: self.max_qubits,
            seed,
            format: self.format.unwrap_or(match self.command {
                Command::Trace { .. } => OutputFormat::Csv,
                _ => OutputFormat::Json,
            }),
        }
    }
}

/// Runs a parsed command, writing its output to `out`. Output is written
/// before a verification failure is returned.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<(), CliError> {
    let config = cli.config();
    config.validate()?;
    match cli.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::InvalidInput(e.to_string()))?;
            let mut buf = Vec::new();
            let result = pool.install(|| dispatch(cli, &config, &mut buf));
            out.write_all(&buf)?;
            result
        }
        None => dispatch(cli, &config, out),
    }
}

fn dispatch<W: Write>(cli: &Cli, config: &RunConfig, out: &mut W) -> Result<(), CliError> {
    let opts = config.sim_options();
    match &cli.command {
        Command::Sample { prime, count, .. } => {
            let report = sample_report(*prime, config.require_seed()?, *count, &opts, cli.timing)?;
            write_sample(out, config.format, &report)
        }
        Command::Verify { prime, sweep_max } => {
            let reports = match (prime, sweep_max) {
                (Some(p), _) => vec![qnr_core::qnr::verify(*p, &opts)?],
                (None, Some(bound)) => verify_sweep(*bound, &opts)?,
                (None, None) => unreachable!("clap requires one of --prime/--sweep-max"),
            };
            write_verification(out, config.format, &reports)?;
            match reports.iter().find(|r| !r.passed) {
                Some(r) => Err(CliError::VerificationFailed {
                    p: r.p,
                    check: r
                        .first_failure()
                        .map(|c| c.name.clone())
                        .unwrap_or_default(),
                }),
                None => Ok(()),
            }
        }
        Command::Trace {
            prime,
            stage,
            schedule,
        } => {
            let state = trace_state(*prime, *stage, (*schedule).into(), &opts)?;
            write_trace(out, config.format, *prime, *stage, &state)
        }
        Command::GroverDemo {
            bits,
            target,
            deterministic,
            seed,
        } => {
            let report = grover_demo(*bits, *target, *deterministic, *seed, &opts)?;
            write_demo(out, config.format, &report)
        }
        Command::SampleSet {
            size,
            marked_file,
            indicator,
            prime,
            bits,
            count,
            ..
        } => {
            let (source, marked) = match (marked_file, indicator, prime) {
                (Some(path), _, _) => {
                    let indices = read_marked(BufReader::new(File::open(path)?))?;
                    let fit = indices
                        .iter()
                        .max()
                        .map_or(1, |&m| (usize::BITS - m.leading_zeros()).max(1));
                    let n = bits.unwrap_or(fit);
                    opts_check(n, config)?;
                    (
                        format!("file:{}", path.display()),
                        Indicator::new(n, indices)?,
                    )
                }
                (None, Some(kind), Some(p)) => indicator_set(*kind, *p, config)?,
                _ => {
                    return Err(CliError::InvalidInput(
                        "give --marked-file or --indicator with --prime".into(),
                    ))
                }
            };
            let report = set_sample_report(
                source,
                &marked,
                *size,
                config.require_seed()?,
                *count,
                &opts,
                cli.timing,
            )?;
            write_set_sample(out, config.format, &report)
        }
    }
}

fn opts_check(n: u32, config: &RunConfig) -> Result<(), CliError> {
    if n + 1 > config.max_qubits {
        return Err(CliError::ResourceCap(format!(
            "{} qubits requested, cap is {}",
            n + 1,
            config.max_qubits
        )));
    }
    Ok(())
}

fn indicator_set(
    kind: IndicatorKind,
    p: u64,
    config: &RunConfig,
) -> Result<(String, Indicator), CliError> {
    let inst = OddPrimeInstance::new(p)?;
    opts_check(inst.n(), config)?;
    let (name, values) = match kind {
        IndicatorKind::Qnr => ("qnr", qnr_set(p)),
        IndicatorKind::CubicNr => ("cubic-nr", power_nonresidues(p, 3)?),
    };
    let indices = values.into_iter().map(|v| v as usize).collect();
    Ok((format!("{name}:{p}"), Indicator::new(inst.n(), indices)?))
}

/// State of the nonresidue pipeline at `stage`.
pub fn trace_state(
    p: u64,
    stage: TraceStage,
    schedule: Schedule,
    opts: &qnr_core::SimOptions,
) -> Result<StateVector, CliError> {
    let (inst, plan) = build_instance(p, opts)?;
    let plan = plan.with_schedule(schedule);
    Ok(match stage {
        TraceStage::Initial => StateVector::uniform_capped(inst.n(), opts.max_qubits)?,
        TraceStage::Rotated => rotated_state(&inst, &plan, opts)?,
        TraceStage::Final => qnr_core::qnr::run_pipeline(&inst, &plan, opts)?,
    })
}

fn write_json_line<W: Write, T: Serialize>(out: &mut W, report: T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, &Envelope::new(report))?;
    writeln!(out)?;
    Ok(())
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn write_frequencies<W: Write>(out: &mut W, rows: &[FrequencyRow]) -> Result<(), CliError> {
    for r in rows {
        writeln!(out, "  {:>8}  {}", r.value, r.count)?;
    }
    Ok(())
}

fn write_sample<W: Write>(
    out: &mut W,
    format: OutputFormat,
    r: &SampleReport,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json_line(out, r),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["draw", "value"])?;
            for (i, s) in r.samples.iter().enumerate() {
                w.write_record([i.to_string(), s.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "p = {}  path = {:?}  seed = {}  count = {}",
                r.p, r.path, r.seed, r.count
            )?;
            writeln!(out, "samples: {}", join(&r.samples))?;
            writeln!(out, "frequencies:")?;
            write_frequencies(out, &r.frequencies)?;
            if let Some(c) = &r.chi_square {
                writeln!(
                    out,
                    "chi-square = {:.4} (df {}), p-value = {:.4}",
                    c.statistic, c.degrees_of_freedom, c.p_value
                )?;
            }
            Ok(())
        }
    }
}

fn write_set_sample<W: Write>(
    out: &mut W,
    format: OutputFormat,
    r: &SetSampleReport,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json_line(out, r),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["draw", "value"])?;
            for (i, s) in r.samples.iter().enumerate() {
                w.write_record([i.to_string(), s.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "{}: {} marked of 2^{}, {} Grover iterations, final theta = {}",
                r.source, r.size, r.bits, r.pre_iterations, r.final_theta
            )?;
            writeln!(out, "samples: {}", join(&r.samples))?;
            writeln!(out, "frequencies:")?;
            write_frequencies(out, &r.frequencies)?;
            if let Some(c) = &r.chi_square {
                writeln!(
                    out,
                    "chi-square = {:.4} (df {}), p-value = {:.4}",
                    c.statistic, c.degrees_of_freedom, c.p_value
                )?;
            }
            Ok(())
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_verification<W: Write>(
    out: &mut W,
    format: OutputFormat,
    reports: &[VerificationReport],
) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => {
            for r in reports {
                write_json_line(out, r)?;
            }
            Ok(())
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "p",
                "path",
                "passed",
                "max_deviation",
                "max_non_qnr_amplitude",
                "first_failure",
            ])?;
            for r in reports {
                w.write_record([
                    r.p.to_string(),
                    format!("{:?}", r.path).to_lowercase(),
                    r.passed.to_string(),
                    opt(r.max_deviation),
                    opt(r.max_non_qnr_amplitude),
                    r.first_failure()
                        .map(|c| c.name.clone())
                        .unwrap_or_default(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Text => {
            for r in reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                match r.classical_value {
                    Some(v) => writeln!(
                        out,
                        "p = {}: {status} (classical path, nonresidue {v}; quantum checks skipped)",
                        r.p
                    )?,
                    None => {
                        writeln!(
                            out,
                            "p = {}: {status}  n = {}  theta = {}",
                            r.p,
                            r.n,
                            opt(r.theta)
                        )?;
                        for c in &r.checks {
                            let mark = if c.passed { "ok " } else { "BAD" };
                            writeln!(
                                out,
                                "  {mark} {:<28} {:e} (limit {:e})",
                                c.name, c.value, c.threshold
                            )?;
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

fn write_trace<W: Write>(
    out: &mut W,
    format: OutputFormat,
    p: u64,
    stage: TraceStage,
    state: &StateVector,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => write_amplitudes_csv(state, out),
        OutputFormat::Json => write_json_line(
            out,
            TraceReport {
                p,
                stage,
                rows: amplitude_rows(state),
            },
        ),
        OutputFormat::Text => {
            writeln!(
                out,
                "{:>8} {:>24} {:>24} {:>24}",
                "index", "real", "imag", "prob"
            )?;
            for r in amplitude_rows(state) {
                writeln!(
                    out,
                    "{:>8} {:>24} {:>24} {:>24}",
                    r.index,
                    fmt_f64(r.real),
                    fmt_f64(r.imag),
                    fmt_f64(r.prob)
                )?;
            }
            Ok(())
        }
    }
}

fn write_demo<W: Write>(
    out: &mut W,
    format: OutputFormat,
    r: &GroverDemoReport,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json_line(out, r),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "iteration",
                "stage",
                "target_probability",
                "target_re",
                "target_im",
                "other_re",
                "other_im",
            ])?;
            for row in &r.iterations {
                w.write_record([
                    row.iteration.to_string(),
                    format!("{:?}", row.stage),
                    fmt_f64(row.target_probability),
                    fmt_f64(row.target_amplitude[0]),
                    fmt_f64(row.target_amplitude[1]),
                    fmt_f64(row.other_amplitude[0]),
                    fmt_f64(row.other_amplitude[1]),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "target {} of 2^{} ({} register of {} qubits)",
                r.target,
                r.bits,
                if r.deterministic {
                    "exact, augmented"
                } else {
                    "standard"
                },
                r.simulated_bits
            )?;
            for row in &r.iterations {
                writeln!(
                    out,
                    "  {:>4} {:<15} P(target) = {:.12}  a(target) = {:+.6}{:+.6}i  a(other) = {:+.6}{:+.6}i",
                    row.iteration,
                    format!("{:?}", row.stage),
                    row.target_probability,
                    row.target_amplitude[0],
                    row.target_amplitude[1],
                    row.other_amplitude[0],
                    row.other_amplitude[1]
                )?;
            }
            if let Some(theta) = r.final_theta {
                writeln!(out, "final theta = {theta}")?;
            }
            writeln!(out, "success probability = {:.12}", r.success_probability)?;
            if let Some(o) = r.outcome {
                writeln!(out, "observed {o}")?;
            }
            Ok(())
        }
    }
}

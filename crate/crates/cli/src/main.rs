//! `ewens-tauber`: mean values, theorem checks and sampling from the command line.

mod commands;
mod error;
mod report;
mod spec;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ewens_core::cesaro::DEFAULT_J_CAP_FACTOR;
use ewens_core::thresholds::Thresholds;

use crate::commands::{parse_grid, MeanArgs};
use crate::error::CliResult;
use crate::report::RunReport;
use crate::spec::SpecInput;

#[derive(Debug, Parser)]
#[command(name = "ewens-tauber", version, about = "Ewens mean values, Cesàro/Abel summability and kernel checks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// JSON spec document (`-` for stdin).
    #[arg(long)]
    spec: Option<String>,
    /// Family shorthand: constant:RE[,IM], unimodular:TAU, zero_on:J1,J2,..., random_disk:SEED.
    #[arg(long)]
    family: Option<String>,
    /// Symmetric-group size; overrides the spec document.
    #[arg(long)]
    n: Option<usize>,
    /// Ewens parameter as a decimal or fraction (e.g. 0.5, 5/3); overrides the spec document.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
}

impl SpecArgs {
    fn gather(&self) -> CliResult<SpecInput> {
        SpecInput::gather(self.spec.as_deref(), self.family.as_deref(), self.n, self.theta.as_deref())
    }
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    thm3_ratio_growth: Option<f64>,
    #[arg(long)]
    thm3_residual_slack: Option<f64>,
    #[arg(long)]
    thm1_ratio_spread: Option<f64>,
    #[arg(long)]
    lemma2_dyadic_spread: Option<f64>,
}

impl ThresholdArgs {
    fn resolve(&self) -> (Thresholds, Vec<&'static str>) {
        let mut th = Thresholds::default();
        let mut overridden = Vec::new();
        for (name, flag, slot) in [
            ("thm3_ratio_growth", self.thm3_ratio_growth, &mut th.thm3_ratio_growth),
            ("thm3_residual_slack", self.thm3_residual_slack, &mut th.thm3_residual_slack),
            ("thm1_ratio_spread", self.thm1_ratio_spread, &mut th.thm1_ratio_spread),
            ("lemma2_dyadic_spread", self.lemma2_dyadic_spread, &mut th.lemma2_dyadic_spread),
        ] {
            if let Some(v) = flag {
                *slot = v;
                overridden.push(name);
            }
        }
        (th, overridden)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// M_n(f), N_n and the normalizing weight for one spec.
    Mean {
        #[command(flatten)]
        spec: SpecArgs,
        /// Exact rational arithmetic (θ and cycle values read as rationals).
        #[arg(long)]
        exact: bool,
        /// Also enumerate cycle types and report the discrepancy.
        #[arg(long)]
        oracle: bool,
    },
    /// Residual/majorant tables and a PASS/FAIL verdict for one theorem.
    Verify {
        #[command(subcommand)]
        target: Target,
    },
    /// Monte-Carlo estimate from Chinese-restaurant samples.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum Target {
    /// Cesàro vs Abel means against the majorant.
    Thm1 {
        #[command(flatten)]
        spec: SpecArgs,
        /// alternating, alternating_linear, geometric:R or exp_of_l.
        #[arg(long, default_value = "alternating")]
        series: String,
        #[arg(long, default_value = "100:1600:4")]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_J_CAP_FACTOR)]
        j_cap_factor: f64,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Abel convergence plus the kernel condition imply (C,p) summability.
    Thm2 {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "alternating")]
        series: String,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, default_value = "1000:100000:2")]
        grid: String,
    },
    /// Mean value against its limit, scaled by the power mean of |f̂ − 1|.
    Thm3 {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "50:1600:2")]
        grid: String,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Kernel bounds, route agreement and dyadic asymptotics.
    Lemma2 {
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value_t = 200)]
        m_max: usize,
        #[arg(long, default_value_t = 50)]
        j_max: usize,
        /// Fixed j values for the dyadic check.
        #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
        probe_j: Vec<usize>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
}

fn run(cli: &Cli, report: &mut RunReport) -> CliResult<()> {
    match &cli.command {
        Command::Mean { spec, exact, oracle } => {
            commands::mean(&spec.gather()?, MeanArgs { exact: *exact, oracle: *oracle }, report)
        }
        Command::Sample { spec, samples, seed } => commands::sample(&spec.gather()?, *samples, *seed, report),
        Command::Verify { target } => match target {
            Target::Thm1 { spec, series, grid, j_cap_factor, thresholds } => {
                let (th, overridden) = thresholds.resolve();
                report.thresholds = Some(commands::thresholds_report(th, overridden));
                commands::verify_thm1(&spec.gather()?, series, &parse_grid(grid)?, *j_cap_factor, &th, report)
            }
            Target::Thm2 { spec, series, p, grid } => {
                commands::verify_thm2(&spec.gather()?, series, *p, &parse_grid(grid)?, report)
            }
            Target::Thm3 { spec, p, grid, thresholds } => {
                let (th, overridden) = thresholds.resolve();
                report.thresholds = Some(commands::thresholds_report(th, overridden));
                commands::verify_thm3(&spec.gather()?, *p, &parse_grid(grid)?, &th, report)
            }
            Target::Lemma2 { theta, m_max, j_max, probe_j, thresholds } => {
                let (th, overridden) = thresholds.resolve();
                report.thresholds = Some(commands::thresholds_report(th, overridden));
                let theta = spec::ThetaInput::from_flag(theta).float()?;
                commands::verify_lemma2(theta, *m_max, *j_max, probe_j, &th, report)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let outcome = run(&cli, &mut report).and_then(|()| {
        report.wall_clock_s = start.elapsed().as_secs_f64();
        let mut out = std::io::stdout().lock();
        match cli.format {
            Format::Json => report.write_json(&mut out)?,
            Format::Csv => {
                report.write_csv(&mut out)?;
                if let Some(v) = &report.verdict {
                    eprintln!("verdict: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
                }
            }
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

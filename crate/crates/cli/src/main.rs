// Copyright 2026 The qcs-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `qcs`: run clock-synchronization scenarios and write CSV tables.
//!
//! Exit codes: 0 success, 2 parse error, 3 invalid scenario or arguments,
//! 4 runtime or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcs_core::estimation::{self, EstimationError};
use qcs_core::harness::{self, HarnessError, Protocol, ResultTable, Scenario};
use qcs_core::phase::phase_difference;

#[derive(Parser)]
#[command(name = "qcs", version, about = "Entanglement-based clock synchronization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Ramsey fringe scan.
    Ramsey(Common),
    /// Measurement-based synchronization.
    Qcs(Common),
    /// Teleportation-based synchronization.
    Teleport(Common),
    /// Two-point phase over a grid of event pairs.
    PhaseMap(Common),
    /// Phase estimate from a scenario run or an existing record table.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Records to estimate from instead of running the scenario.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Transport phase assumed when converting to a clock offset.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        assumed_delta: f64,
        /// Known clock offset; enables the transport-phase estimate.
        #[arg(long, allow_negative_numbers = true)]
        known_tau: Option<f64>,
    },
    /// Checks whether two hidden parameter sets give identical records.
    AuditGauge {
        #[command(flatten)]
        common: Common,
        /// Second scenario to compare against.
        #[arg(long, conflicts_with = "shift", required_unless_present = "shift")]
        against: Option<PathBuf>,
        /// Compare against the gauge-shifted pair (tau + s, delta + omega s).
        #[arg(long, allow_negative_numbers = true)]
        shift: Option<f64>,
    },
}

#[derive(Debug)]
enum CliError {
    Harness(HarnessError),
    Estimation(EstimationError),
    Usage(String),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Harness(e)
    }
}

impl From<EstimationError> for CliError {
    fn from(e: EstimationError) -> Self {
        match e {
            EstimationError::Harness(h) => CliError::Harness(h),
            other => CliError::Estimation(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Harness(e) => e.exit_code() as u8,
            CliError::Usage(_) => 3,
            CliError::Estimation(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Harness(e) => write!(f, "{e}"),
            CliError::Estimation(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

fn load(common: &Common) -> Result<Scenario, CliError> {
    let scenario = harness::load_scenario(&common.scenario)?;
    Ok(match common.seed {
        Some(seed) => scenario.with_seed(seed),
        None => scenario,
    })
}

fn run_protocol(common: &Common, expected: Protocol) -> Result<(), CliError> {
    let scenario = load(common)?;
    if scenario.protocol() != expected {
        return Err(CliError::Usage(format!(
            "{}: scenario protocol is `{}`, this subcommand runs `{expected}`",
            common.scenario.display(),
            scenario.protocol()
        )));
    }
    let table = harness::run(&scenario)?;
    harness::emit_csv(&table, &common.out)?;
    Ok(())
}

fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

fn estimate(
    common: &Common,
    records: Option<&Path>,
    assumed_delta: f64,
    known_tau: Option<f64>,
) -> Result<(), CliError> {
    let scenario = load(common)?;
    let public = scenario.public();
    let records = match records {
        Some(path) => harness::read_csv(path)?,
        None => harness::run(&scenario)?,
    };
    let samples = harness::fringe_samples(public, &records)?;
    let est = estimation::estimate_phase(&samples)?;

    let mut table = ResultTable::new(&[
        "protocol",
        "shots",
        "phi_hat",
        "stderr",
        "c_hat",
        "s_hat",
        "assumed_delta",
        "tau_hat",
        "period",
        "known_tau",
        "delta_hat",
    ]);
    table.preamble = vec![
        format!("estimate from {}", public.protocol),
        format!("scenario = {}", common.scenario.display()),
        format!("omega = {}", cell(public.omega)),
        "tau_hat is the representative in (-period/2, period/2] of the offset class".to_owned(),
    ];
    let (tau_hat, period) = match estimation::offset_class_from_phase(&est, public.omega, assumed_delta) {
        Ok(class) => (cell(class.tau_hat), cell(class.period)),
        Err(EstimationError::DegenerateQubit(_)) => {
            table
                .preamble
                .push("omega = 0: the clock offset is unobservable".to_owned());
            ("unobservable".to_owned(), "inf".to_owned())
        }
        Err(e) => return Err(e.into()),
    };
    let (known, delta_hat) = match known_tau {
        Some(t) => (cell(t), cell(estimation::purify_phase(&est, public.omega, t))),
        None => ("none".to_owned(), "none".to_owned()),
    };
    table.rows.push(vec![
        public.protocol.to_string(),
        est.shots.to_string(),
        cell(est.phi_hat),
        cell(est.stderr),
        cell(est.quadratures.0),
        cell(est.quadratures.1),
        cell(assumed_delta),
        tau_hat,
        period,
        known,
        delta_hat,
    ]);
    harness::emit_csv(&table, &common.out)?;
    Ok(())
}

fn audit(common: &Common, against: Option<&Path>, shift: Option<f64>) -> Result<(), CliError> {
    let base = load(common)?.resolved()?;
    let other = match (against, shift) {
        (Some(path), None) => {
            let s = harness::load_scenario(path)?;
            s.with_seed(base.public().seed).resolved()?
        }
        (None, Some(shift)) => base.gauge_shifted(shift),
        _ => return Err(CliError::Usage("give exactly one of --against or --shift".into())),
    };
    if other.public() != base.public() {
        return Err(CliError::Usage(
            "the two scenarios differ in public parameters; only hidden values may differ".into(),
        ));
    }
    let identical = harness::records_identical(&base, &other)?;
    let omega = base.public().omega;
    let phase = |s: &Scenario| -omega * s.oracle().tau + s.resolved_delta();
    let mismatch = phase_difference(phase(&base), phase(&other));

    let mut table = ResultTable::new(&[
        "seed",
        "omega",
        "tau_a",
        "delta_a",
        "tau_b",
        "delta_b",
        "phase_mismatch",
        "records_identical",
    ]);
    table.preamble = vec![
        "gauge audit: records compared byte-for-byte (header and rows)".to_owned(),
        format!("a = {}", common.scenario.display()),
        match against {
            Some(p) => format!("b = {}", p.display()),
            None => format!("b = a shifted by {}", cell(shift.unwrap_or(0.0))),
        },
        "ORACLE-ONLY GROUND TRUTH in tau/delta columns".to_owned(),
    ];
    table.rows.push(vec![
        base.public().seed.to_string(),
        cell(omega),
        cell(base.oracle().tau),
        cell(base.resolved_delta()),
        cell(other.oracle().tau),
        cell(other.resolved_delta()),
        cell(mismatch),
        u8::from(identical).to_string(),
    ]);
    harness::emit_csv(&table, &common.out)?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ramsey(c) => run_protocol(&c, Protocol::Ramsey),
        Command::Qcs(c) => run_protocol(&c, Protocol::BasicQcs),
        Command::Teleport(c) => run_protocol(&c, Protocol::Teleport),
        Command::PhaseMap(c) => run_protocol(&c, Protocol::PhaseMap),
        Command::Estimate {
            common,
            records,
            assumed_delta,
            known_tau,
        } => estimate(&common, records.as_deref(), assumed_delta, known_tau),
        Command::AuditGauge { common, against, shift } => audit(&common, against.as_deref(), shift),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

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

//! Batch execution.
//!
//! | protocol    | rows            | RNG stream for row `i`          |
//! |-------------|-----------------|---------------------------------|
//! | `basic-qcs` | one per trial   | `i`                             |
//! | `teleport`  | one per trial   | `i` (both rounds, in order)     |
//! | `ramsey`    | one per T point | `i * trials + shot` per shot    |
//! | `phase-map` | one per (x1,x2) | none                            |

use rayon::prelude::*;

use super::config::{DeltaSource, Nature, Protocol, PublicView, Scenario};
use super::table::{float_cell, ResultTable};
use super::HarnessError;
use crate::estimation::{self, FringeSample, FringeTally, Preparation};
use crate::protocols::{self, BellMode, BellOutcome, ProtocolError};
use crate::rng::trial_rng;
use crate::spacetime::{self, FourVector, FourVelocity};

pub const BASIC_COLUMNS: &[&str] = &["trial", "bob_outcome", "readout_bit", "t_B", "t_A"];
pub const TELEPORT_COLUMNS: &[&str] = &[
    "trial",
    "bell_outcome_q1",
    "bell_outcome_q2",
    "readout_bit_q1",
    "readout_bit_q2",
    "t_A",
];
pub const RAMSEY_COLUMNS: &[&str] = &[
    "point",
    "interval",
    "omega_t",
    "shots",
    "excited",
    "frequency",
    "predicted",
];
pub const PHASE_MAP_COLUMNS: &[&str] = &[
    "point",
    "i",
    "j",
    "x1_t",
    "x1_x",
    "x1_y",
    "x1_z",
    "x2_t",
    "x2_x",
    "x2_y",
    "x2_z",
    "phi_raw",
    "phi_wrapped",
    "timelike",
];

/// Both rounds of one teleportation trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TeleportTrial {
    pub bell: [BellOutcome; 2],
    pub bits: [u8; 2],
}

/// One teleportation trial: a fresh singlet per round, the configured state
/// and its quadrature partner, each read out after a Hadamard.
pub fn teleport_trial(public: &PublicView, nature: &Nature, trial: u64) -> Result<TeleportTrial, ProtocolError> {
    let specs = public.teleport_specs()?;
    let mut rng = trial_rng(public.seed, trial);
    let mut bell = [BellOutcome::PsiPlus; 2];
    let mut bits = [0u8; 2];
    for (k, spec) in specs.iter().enumerate() {
        let (alice, record) = protocols::run_teleportation_qcs(
            spec,
            &nature.setting,
            &nature.clocks,
            &nature.singlet,
            BellMode::Sampled(&mut rng),
        )?;
        bell[k] = BellOutcome::try_from(record.bob_outcome as usize)?;
        bits[k] = protocols::hadamard_readout(&alice, &mut rng)?;
    }
    Ok(TeleportTrial { bell, bits })
}

/// One measurement-based trial. Returns `(bob_outcome, readout_bit, t_B, t_A)`.
pub fn basic_trial(public: &PublicView, nature: &Nature, trial: u64) -> Result<(u8, u8, f64, f64), ProtocolError> {
    let plan = public.basic_plan(trial);
    let mut rng = trial_rng(public.seed, trial);
    let record = protocols::run_basic_qcs(&plan, &nature.setting, &nature.clocks, &nature.singlet, &mut rng)?;
    Ok((
        record.bob_outcome,
        record.alice_outcome.expect("basic protocol reads Alice out"),
        record.bob_time,
        record.alice_time,
    ))
}

/// Excited count over `public.trials` shots at grid point `point`.
pub fn ramsey_point(public: &PublicView, point: u64, interval: f64) -> Result<u64, ProtocolError> {
    let mut excited = 0;
    for shot in 0..public.trials {
        let mut rng = trial_rng(public.seed, point * public.trials + shot);
        excited += u64::from(protocols::ramsey_shot(public.omega, interval, &mut rng)?);
    }
    Ok(excited)
}

fn trial_err(trial: u64) -> impl Fn(ProtocolError) -> HarnessError {
    move |source| HarnessError::Trial { trial, source }
}

/// Runs a scenario. Identical scenarios give identical tables.
pub fn run(scenario: &Scenario) -> Result<ResultTable, HarnessError> {
    let public = scenario.public();
    let nature = scenario.nature()?;
    let mut table = match public.protocol {
        Protocol::BasicQcs => {
            let rows = (0..public.trials)
                .into_par_iter()
                .map(|i| {
                    let (b, a, tb, ta) = basic_trial(public, &nature, i).map_err(trial_err(i))?;
                    Ok(vec![
                        i.to_string(),
                        b.to_string(),
                        a.to_string(),
                        float_cell(tb),
                        float_cell(ta),
                    ])
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let mut t = ResultTable::new(BASIC_COLUMNS);
            t.rows = rows;
            t
        }
        Protocol::Teleport => {
            let t_a = float_cell(public.teleport.correction_time);
            let rows = (0..public.trials)
                .into_par_iter()
                .map(|i| {
                    let r = teleport_trial(public, &nature, i).map_err(trial_err(i))?;
                    Ok(vec![
                        i.to_string(),
                        r.bell[0].index().to_string(),
                        r.bell[1].index().to_string(),
                        r.bits[0].to_string(),
                        r.bits[1].to_string(),
                        t_a.clone(),
                    ])
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let mut t = ResultTable::new(TELEPORT_COLUMNS);
            t.rows = rows;
            t
        }
        Protocol::Ramsey => {
            let grid = public.ramsey_intervals();
            let rows = grid
                .par_iter()
                .enumerate()
                .map(|(j, &interval)| {
                    let excited = ramsey_point(public, j as u64, interval).map_err(trial_err(j as u64))?;
                    let frequency = excited as f64 / public.trials as f64;
                    Ok(vec![
                        j.to_string(),
                        float_cell(interval),
                        float_cell(public.omega * interval),
                        public.trials.to_string(),
                        excited.to_string(),
                        float_cell(frequency),
                        float_cell(estimation::ramsey_excited_probability(public.omega, interval)),
                    ])
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let mut t = ResultTable::new(RAMSEY_COLUMNS);
            t.rows = rows;
            t
        }
        Protocol::PhaseMap => phase_map(public, nature.singlet.oracle_delta())?,
    };
    table.preamble = echo(scenario);
    table.summary = summarize(public, &table)?;
    Ok(table)
}

fn phase_map(public: &PublicView, delta: f64) -> Result<ResultTable, HarnessError> {
    let p = &public.phase_map;
    let u_a = FourVelocity::from_three_velocity(p.alice_velocity)
        .map_err(|e| HarnessError::invalid("phase-map.alice_velocity", e.to_string()))?;
    let u_b = FourVelocity::from_three_velocity(p.bob_velocity)
        .map_err(|e| HarnessError::invalid("phase-map.bob_velocity", e.to_string()))?;
    let event = |start: FourVector, step: FourVector, k: usize| start + step * k as f64;
    let mut t = ResultTable::new(PHASE_MAP_COLUMNS);
    for i in 0..p.x1_count {
        for j in 0..p.x2_count {
            let x1 = event(p.x1_start, p.x1_step, i);
            let x2 = event(p.x2_start, p.x2_step, j);
            let phi = spacetime::phi_delta(u_a, u_b, x1, x2, public.omega, delta);
            let mut row = vec![(i * p.x2_count + j).to_string(), i.to_string(), j.to_string()];
            row.extend(x1.components().iter().map(|c| float_cell(*c)));
            row.extend(x2.components().iter().map(|c| float_cell(*c)));
            row.push(float_cell(phi));
            row.push(float_cell(crate::phase::wrap_phase(phi)));
            row.push(u8::from(spacetime::is_timelike_separated(x1, x2)).to_string());
            t.rows.push(row);
        }
    }
    Ok(t)
}

fn echo(scenario: &Scenario) -> Vec<String> {
    let p = scenario.public();
    let mut lines = vec![
        format!("qcs-sim {} scenario echo", env!("CARGO_PKG_VERSION")),
        format!("protocol = {}", p.protocol),
        format!("omega = {}", float_cell(p.omega)),
        format!("trials = {}", p.trials),
        format!("seed = {}", p.seed),
        format!("latency = {}", float_cell(p.latency)),
        "rng = chacha8, stream = trial index (see README)".to_owned(),
    ];
    match p.protocol {
        Protocol::Teleport => {
            let t = &p.teleport;
            let tag = if t.defaulted_amplitudes { " (default)" } else { "" };
            lines.push(format!(
                "alpha = {} {}{tag}",
                float_cell(t.alpha.re),
                float_cell(t.alpha.im)
            ));
            lines.push(format!(
                "beta = {} {}{tag}",
                float_cell(t.beta.re),
                float_cell(t.beta.im)
            ));
            lines.push(format!("correction_time = {}", float_cell(t.correction_time)));
        }
        Protocol::BasicQcs => {
            let b = &p.basic;
            lines.push(format!("bob_measure_time = {}", float_cell(b.bob_measure_time)));
            lines.push(format!("alice_readout_time = {}", float_cell(b.alice_readout_time)));
            lines.push(format!("delay_steps = {}", b.delay_steps));
        }
        Protocol::Ramsey => {
            lines.push(format!("grid_points = {}", p.ramsey_intervals().len()));
        }
        Protocol::PhaseMap => {
            let m = &p.phase_map;
            let v = |a: [f64; 3]| a.iter().map(|c| float_cell(*c)).collect::<Vec<_>>().join(" ");
            let x = |e: FourVector| {
                e.components()
                    .iter()
                    .map(|c| float_cell(*c))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            lines.push(format!("alice_velocity = {}", v(m.alice_velocity)));
            lines.push(format!("bob_velocity = {}", v(m.bob_velocity)));
            lines.push(format!(
                "x1 = {} + k ({}), k < {}",
                x(m.x1_start),
                x(m.x1_step),
                m.x1_count
            ));
            lines.push(format!(
                "x2 = {} + k ({}), k < {}",
                x(m.x2_start),
                x(m.x2_step),
                m.x2_count
            ));
        }
    }
    let h = scenario.oracle();
    lines.push("ORACLE-ONLY GROUND TRUTH (never visible to party logic):".to_owned());
    lines.push(format!("hidden.tau = {}", float_cell(h.tau)));
    match h.delta {
        DeltaSource::Fixed(d) => lines.push(format!("hidden.delta = {}", float_cell(d))),
        DeltaSource::Cabrillo => lines.push(format!(
            "hidden.delta = cabrillo (drawn {})",
            float_cell(scenario.resolved_delta())
        )),
    }
    lines
}

/// Fringe samples reconstructed from a per-trial table and public data only.
pub fn fringe_samples(public: &PublicView, table: &ResultTable) -> Result<Vec<FringeSample>, HarnessError> {
    let mut tally = FringeTally::new();
    match public.protocol {
        Protocol::Teleport => {
            let specs = public.teleport_specs()?;
            for row in 0..table.rows.len() {
                for (k, spec) in specs.iter().enumerate() {
                    let q = k + 1;
                    let bell: usize = table.value(row, &format!("bell_outcome_q{q}"))?;
                    let bit: u8 = table.value(row, &format!("readout_bit_q{q}"))?;
                    let outcome = BellOutcome::try_from(bell)?;
                    let prep = Preparation::Teleported {
                        alpha: spec.alpha,
                        beta: spec.beta,
                        conjugate: outcome.is_phi(),
                    };
                    tally.record(prep, bit);
                }
            }
        }
        Protocol::BasicQcs => {
            for row in 0..table.rows.len() {
                let b: u8 = table.value(row, "bob_outcome")?;
                let a: u8 = table.value(row, "readout_bit")?;
                let t_b: f64 = table.value(row, "t_B")?;
                let t_a: f64 = table.value(row, "t_A")?;
                let prep = Preparation::ClockDelay {
                    phase: public.omega * (t_a - t_b),
                };
                tally.record(prep, u8::from(a == b));
            }
        }
        other => {
            return Err(HarnessError::Runtime(format!(
                "protocol {other} does not produce phase-estimation records"
            )))
        }
    }
    Ok(tally.into_samples())
}

fn summarize(public: &PublicView, table: &ResultTable) -> Result<Vec<String>, HarnessError> {
    match public.protocol {
        Protocol::Teleport | Protocol::BasicQcs => {
            let samples = fringe_samples(public, table)?;
            let mut lines = vec!["summary (from records and public parameters only)".to_owned()];
            match estimation::estimate_phase(&samples) {
                Ok(est) => {
                    lines.push(format!("phi_hat = {}", float_cell(est.phi_hat)));
                    lines.push(format!("stderr = {}", float_cell(est.stderr)));
                    match estimation::offset_class_from_phase(&est, public.omega, 0.0) {
                        Ok(class) => {
                            lines.push(format!("tau_hat_if_delta_zero = {}", float_cell(class.tau_hat)));
                            lines.push(format!("period = {}", float_cell(class.period)));
                        }
                        Err(e) => lines.push(format!("tau_hat unavailable: {e}")),
                    }
                }
                Err(e) => lines.push(format!("phi_hat unavailable: {e}")),
            }
            Ok(lines)
        }
        Protocol::Ramsey => {
            let mut worst: f64 = 0.0;
            for row in 0..table.rows.len() {
                let f: f64 = table.value(row, "frequency")?;
                let p: f64 = table.value(row, "predicted")?;
                worst = worst.max((f - p).abs());
            }
            Ok(vec![
                "summary".to_owned(),
                format!("max_abs_deviation = {}", float_cell(worst)),
            ])
        }
        Protocol::PhaseMap => {
            let timelike = (0..table.rows.len())
                .map(|r| table.value::<u8>(r, "timelike"))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(vec![
                "summary".to_owned(),
                format!("points = {}", timelike.len()),
                format!("timelike_pairs = {}", timelike.iter().filter(|&&t| t == 1).count()),
            ])
        }
    }
}

/// Runs both scenarios and compares their measurement records (header and
/// rows). The comment blocks differ by construction: they echo the hidden
/// parameters.
pub fn records_identical(a: &Scenario, b: &Scenario) -> Result<bool, HarnessError> {
    Ok(run(a)?.body() == run(b)?.body())
}

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

//! Scenario files.
//!
//! Scenarios are TOML. Unknown tables and keys are rejected; syntax errors
//! carry the line number, validation errors the field name.
//!
//! ```toml
//! [scenario]
//! protocol = "teleport"     # basic-qcs | teleport | ramsey | phase-map
//! omega = 1.0
//! trials = 10000
//! seed = 42                 # or a decimal string for seeds >= 2^63
//!
//! [hidden]                  # ground truth, never shown to party logic
//! tau = 0.3
//! delta = 0.1               # or "cabrillo" for a heralded random phase
//!
//! [channel]
//! latency = 0.0
//!
//! [teleport]
//! alpha = [0.7071067811865476, 0.0]   # [re, im], default 1/sqrt 2
//! beta = [0.7071067811865476, 0.0]
//! correction_time = 10.0              # Alice's clock
//!
//! [basic-qcs]
//! bob_measure_time = 0.0
//! alice_readout_time = 0.0
//! delay_steps = 8
//!
//! [ramsey]
//! grid_points = 17          # T_j = j 2 pi / (omega (n - 1)); or
//! # intervals = [0.0, 0.5, 1.0]
//!
//! [phase-map]
//! alice_velocity = [0.0, 0.0, 0.0]
//! bob_velocity = [0.0, 0.0, 0.0]
//! x1_start = [0.0, 0.0, 0.0, 0.0]     # [t, x, y, z]
//! x1_step = [1.0, 0.0, 0.0, 0.0]
//! x1_count = 5
//! x2_start = [0.0, 3.0, 0.0, 0.0]
//! x2_step = [1.0, 0.0, 0.0, 0.0]
//! x2_count = 5
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use super::HarnessError;
use crate::protocols::{self, BasicQcsPlan, PartyClocks, ProtocolError, Setting, SingletHandle, TeleportSpec};
use crate::qstate::EXACT_TOL;
use crate::rng::{trial_rng, SCENARIO_STREAM};
use crate::spacetime::{FourVector, FourVelocity};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    BasicQcs,
    Teleport,
    Ramsey,
    PhaseMap,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::BasicQcs => "basic-qcs",
            Protocol::Teleport => "teleport",
            Protocol::Ramsey => "ramsey",
            Protocol::PhaseMap => "phase-map",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "basic-qcs" | "qcs" => Some(Protocol::BasicQcs),
            "teleport" => Some(Protocol::Teleport),
            "ramsey" => Some(Protocol::Ramsey),
            "phase-map" => Some(Protocol::PhaseMap),
            _ => None,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaSource {
    Fixed(f64),
    /// Drawn once per scenario from the scenario stream, uniform on
    /// `[0, 2 pi)` in the heralded convention and converted to `delta`.
    Cabrillo,
}

/// Ground truth known only to the experimenter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hidden {
    pub tau: f64,
    pub delta: DeltaSource,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeleportParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub correction_time: f64,
    /// True when alpha and beta were not given and defaulted to 1/sqrt 2.
    pub defaulted_amplitudes: bool,
}

impl Default for TeleportParams {
    fn default() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        TeleportParams {
            alpha: h,
            beta: h,
            correction_time: 10.0,
            defaulted_amplitudes: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicParams {
    pub bob_measure_time: f64,
    pub alice_readout_time: f64,
    /// Trial `i` delays Alice's readout by `(i mod n) 2 pi / (n omega)`.
    pub delay_steps: u32,
}

impl Default for BasicParams {
    fn default() -> Self {
        BasicParams {
            bob_measure_time: 0.0,
            alice_readout_time: 0.0,
            delay_steps: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RamseyGrid {
    Points(usize),
    Intervals(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMapParams {
    pub alice_velocity: [f64; 3],
    pub bob_velocity: [f64; 3],
    pub x1_start: FourVector,
    pub x1_step: FourVector,
    pub x1_count: usize,
    pub x2_start: FourVector,
    pub x2_step: FourVector,
    pub x2_count: usize,
}

impl Default for PhaseMapParams {
    fn default() -> Self {
        PhaseMapParams {
            alice_velocity: [0.0; 3],
            bob_velocity: [0.0; 3],
            x1_start: FourVector::ZERO,
            x1_step: FourVector::new(1.0, 0.0, 0.0, 0.0),
            x1_count: 5,
            x2_start: FourVector::ZERO,
            x2_step: FourVector::new(1.0, 0.0, 0.0, 0.0),
            x2_count: 5,
        }
    }
}

/// Everything party logic may see.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicView {
    pub protocol: Protocol,
    pub omega: f64,
    pub trials: u64,
    pub seed: u64,
    pub latency: f64,
    pub teleport: TeleportParams,
    pub basic: BasicParams,
    pub ramsey: RamseyGrid,
    pub phase_map: PhaseMapParams,
}

impl PublicView {
    /// Alice's readout delay phase `omega (t_A - t_B)` for basic-QCS trial `i`.
    pub fn basic_plan(&self, trial: u64) -> BasicQcsPlan {
        let steps = u64::from(self.basic.delay_steps.max(1));
        let delay = if self.omega != 0.0 {
            (trial % steps) as f64 * 2.0 * PI / (steps as f64 * self.omega)
        } else {
            0.0
        };
        BasicQcsPlan {
            bob_measure_time: self.basic.bob_measure_time,
            alice_readout_time: self.basic.alice_readout_time + delay,
        }
    }

    /// The two teleportation rounds of a trial: the configured amplitudes and
    /// their quadrature partner `(alpha, i beta)`.
    pub fn teleport_specs(&self) -> Result<[TeleportSpec; 2], ProtocolError> {
        let t = &self.teleport;
        let q1 = TeleportSpec::new(t.alpha, t.beta, t.correction_time)?.with_latency(self.latency)?;
        let q2 = TeleportSpec::new(t.alpha, Complex64::i() * t.beta, t.correction_time)?.with_latency(self.latency)?;
        Ok([q1, q2])
    }

    pub fn ramsey_intervals(&self) -> Vec<f64> {
        match &self.ramsey {
            RamseyGrid::Intervals(v) => v.clone(),
            RamseyGrid::Points(n) => {
                let n = *n;
                if n <= 1 || self.omega == 0.0 {
                    return vec![0.0; n];
                }
                (0..n)
                    .map(|j| j as f64 * 2.0 * PI / ((n - 1) as f64 * self.omega))
                    .collect()
            }
        }
    }
}

/// A validated experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    public: PublicView,
    hidden: Hidden,
}

/// Hidden state materialized for a run. Held by the simulated universe only.
#[derive(Clone, Debug)]
pub struct Nature {
    pub clocks: PartyClocks,
    pub singlet: SingletHandle,
    pub setting: Setting,
}

impl Scenario {
    pub fn public(&self) -> &PublicView {
        &self.public
    }

    /// Ground truth. Oracle use only.
    pub fn oracle(&self) -> &Hidden {
        &self.hidden
    }

    pub fn protocol(&self) -> Protocol {
        self.public.protocol
    }

    pub fn with_seed(&self, seed: u64) -> Scenario {
        let mut s = self.clone();
        s.public.seed = seed;
        s
    }

    pub fn with_trials(&self, trials: u64) -> Scenario {
        let mut s = self.clone();
        s.public.trials = trials.max(1);
        s
    }

    pub fn with_hidden(&self, tau: f64, delta: f64) -> Scenario {
        let mut s = self.clone();
        s.hidden = Hidden {
            tau,
            delta: DeltaSource::Fixed(delta),
        };
        s
    }

    /// Transport phase, drawing the heralded phase if requested.
    pub fn resolved_delta(&self) -> f64 {
        match self.hidden.delta {
            DeltaSource::Fixed(d) => d,
            DeltaSource::Cabrillo => {
                let mut rng = trial_rng(self.public.seed, SCENARIO_STREAM);
                protocols::cabrillo_entangle(&mut rng).1.as_singlet_delta()
            }
        }
    }

    /// Copy with any random transport phase replaced by its drawn value.
    pub fn resolved(&self) -> Result<Scenario, HarnessError> {
        Ok(self.with_hidden(self.hidden.tau, self.resolved_delta()))
    }

    /// `(tau + shift, delta + omega shift)`: the same observable phase.
    pub fn gauge_shifted(&self, shift: f64) -> Scenario {
        let delta = self.resolved_delta();
        self.with_hidden(self.hidden.tau + shift, delta + self.public.omega * shift)
    }

    /// Builds the hidden side of a run.
    pub fn nature(&self) -> Result<Nature, HarnessError> {
        let setting = Setting {
            omega: self.public.omega,
            alice_velocity: velocity("phase-map.alice_velocity", self.public.phase_map.alice_velocity)?,
            bob_velocity: velocity("phase-map.bob_velocity", self.public.phase_map.bob_velocity)?,
        };
        Ok(Nature {
            clocks: PartyClocks::with_offset(self.hidden.tau)?,
            singlet: protocols::make_singlet(self.resolved_delta()),
            setting,
        })
    }

    pub fn load(path: &Path) -> Result<Scenario, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        parse_scenario(&text)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario, HarnessError> {
    Scenario::load(path)
}

fn velocity(field: &'static str, v: [f64; 3]) -> Result<FourVelocity, HarnessError> {
    FourVelocity::from_three_velocity(v).map_err(|e| HarnessError::invalid(field, e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    scenario: Option<RawScenario>,
    hidden: Option<RawHidden>,
    channel: Option<RawChannel>,
    teleport: Option<RawTeleport>,
    #[serde(rename = "basic-qcs")]
    basic: Option<RawBasic>,
    ramsey: Option<RawRamsey>,
    #[serde(rename = "phase-map")]
    phase_map: Option<RawPhaseMap>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeedValue {
    Int(u64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DeltaValue {
    Number(f64),
    Word(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    protocol: Option<String>,
    omega: Option<f64>,
    trials: Option<u64>,
    seed: Option<SeedValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHidden {
    tau: Option<f64>,
    delta: Option<DeltaValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    latency: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTeleport {
    alpha: Option<[f64; 2]>,
    beta: Option<[f64; 2]>,
    correction_time: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasic {
    bob_measure_time: Option<f64>,
    alice_readout_time: Option<f64>,
    delay_steps: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRamsey {
    grid_points: Option<usize>,
    intervals: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhaseMap {
    alice_velocity: Option<[f64; 3]>,
    bob_velocity: Option<[f64; 3]>,
    x1_start: Option<[f64; 4]>,
    x1_step: Option<[f64; 4]>,
    x1_count: Option<usize>,
    x2_start: Option<[f64; 4]>,
    x2_step: Option<[f64; 4]>,
    x2_count: Option<usize>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn required<T>(value: Option<T>, field: &str) -> Result<T, HarnessError> {
    value.ok_or_else(|| HarnessError::invalid(field, "required field is missing"))
}

fn finite(value: f64, field: &str) -> Result<f64, HarnessError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(HarnessError::invalid(field, "must be finite"))
    }
}

fn event(v: [f64; 4], field: &str) -> Result<FourVector, HarnessError> {
    for c in v {
        finite(c, field)?;
    }
    Ok(FourVector::new(v[0], v[1], v[2], v[3]))
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario, HarnessError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| HarnessError::Parse {
        line: e.span().map_or(1, |span| line_of(text, span.start)),
        message: e.message().to_owned(),
    })?;

    let sc = required(raw.scenario, "scenario")?;
    let name = required(sc.protocol, "scenario.protocol")?;
    let protocol = Protocol::parse(&name).ok_or_else(|| {
        HarnessError::invalid(
            "scenario.protocol",
            format!("`{name}` is not one of basic-qcs, teleport, ramsey, phase-map"),
        )
    })?;
    let omega = finite(required(sc.omega, "scenario.omega")?, "scenario.omega")?;
    if omega < 0.0 {
        return Err(HarnessError::invalid("scenario.omega", "must be non-negative"));
    }
    let trials = required(sc.trials, "trials")?;
    if trials == 0 {
        return Err(HarnessError::invalid("trials", "must be at least 1"));
    }
    let seed = match required(sc.seed, "seed")? {
        SeedValue::Int(n) => n,
        SeedValue::Text(t) => t
            .parse()
            .map_err(|_| HarnessError::invalid("seed", format!("`{t}` is not a 64-bit unsigned integer")))?,
    };

    let hidden = required(raw.hidden, "hidden")?;
    let tau = finite(required(hidden.tau, "hidden.tau")?, "hidden.tau")?;
    let delta = match required(hidden.delta, "hidden.delta")? {
        DeltaValue::Number(d) => DeltaSource::Fixed(finite(d, "hidden.delta")?),
        DeltaValue::Word(w) if w == "cabrillo" => DeltaSource::Cabrillo,
        DeltaValue::Word(w) => {
            return Err(HarnessError::invalid(
                "hidden.delta",
                format!("`{w}` is neither a number nor \"cabrillo\""),
            ))
        }
    };

    let latency = finite(raw.channel.and_then(|c| c.latency).unwrap_or(0.0), "channel.latency")?;
    if latency < 0.0 {
        return Err(HarnessError::invalid("channel.latency", "must be non-negative"));
    }

    let mut teleport = TeleportParams::default();
    if let Some(t) = raw.teleport {
        match (t.alpha, t.beta) {
            (None, None) => {}
            (Some([ar, ai]), Some([br, bi])) => {
                let (alpha, beta) = (Complex64::new(ar, ai), Complex64::new(br, bi));
                let norm = alpha.norm_sqr() + beta.norm_sqr();
                if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
                    return Err(HarnessError::invalid(
                        "teleport.alpha",
                        format!("|alpha|^2 + |beta|^2 = {norm}, expected 1"),
                    ));
                }
                // amplitudes typed to ~10 digits are accepted and renormalized
                let n = norm.sqrt();
                teleport.alpha = alpha / n;
                teleport.beta = beta / n;
                teleport.defaulted_amplitudes = false;
                debug_assert!((teleport.alpha.norm_sqr() + teleport.beta.norm_sqr() - 1.0).abs() <= EXACT_TOL);
            }
            (Some(_), None) => return Err(HarnessError::invalid("teleport.beta", "alpha given without beta")),
            (None, Some(_)) => return Err(HarnessError::invalid("teleport.alpha", "beta given without alpha")),
        }
        if let Some(c) = t.correction_time {
            teleport.correction_time = finite(c, "teleport.correction_time")?;
        }
    }

    let mut basic = BasicParams::default();
    if let Some(b) = raw.basic {
        if let Some(t) = b.bob_measure_time {
            basic.bob_measure_time = finite(t, "basic-qcs.bob_measure_time")?;
        }
        if let Some(t) = b.alice_readout_time {
            basic.alice_readout_time = finite(t, "basic-qcs.alice_readout_time")?;
        }
        if let Some(n) = b.delay_steps {
            if n == 0 {
                return Err(HarnessError::invalid("basic-qcs.delay_steps", "must be at least 1"));
            }
            basic.delay_steps = n;
        }
    }

    let ramsey = match raw.ramsey.map(|r| (r.grid_points, r.intervals)).unwrap_or((None, None)) {
        (Some(_), Some(_)) => {
            return Err(HarnessError::invalid(
                "ramsey.intervals",
                "give either grid_points or intervals, not both",
            ))
        }
        (None, Some(v)) if v.is_empty() => return Err(HarnessError::invalid("ramsey.intervals", "empty list")),
        (None, Some(v)) => {
            for x in &v {
                finite(*x, "ramsey.intervals")?;
            }
            RamseyGrid::Intervals(v)
        }
        (Some(0), None) => return Err(HarnessError::invalid("ramsey.grid_points", "must be at least 1")),
        (Some(n), None) => RamseyGrid::Points(n),
        (None, None) => RamseyGrid::Points(17),
    };

    let mut phase_map = PhaseMapParams::default();
    if let Some(m) = raw.phase_map {
        if let Some(v) = m.alice_velocity {
            phase_map.alice_velocity = v;
        }
        if let Some(v) = m.bob_velocity {
            phase_map.bob_velocity = v;
        }
        if let Some(x) = m.x1_start {
            phase_map.x1_start = event(x, "phase-map.x1_start")?;
        }
        if let Some(x) = m.x1_step {
            phase_map.x1_step = event(x, "phase-map.x1_step")?;
        }
        if let Some(x) = m.x2_start {
            phase_map.x2_start = event(x, "phase-map.x2_start")?;
        }
        if let Some(x) = m.x2_step {
            phase_map.x2_step = event(x, "phase-map.x2_step")?;
        }
        if let Some(n) = m.x1_count {
            phase_map.x1_count = n;
        }
        if let Some(n) = m.x2_count {
            phase_map.x2_count = n;
        }
    }
    velocity("phase-map.alice_velocity", phase_map.alice_velocity)?;
    velocity("phase-map.bob_velocity", phase_map.bob_velocity)?;
    if phase_map.x1_count == 0 {
        return Err(HarnessError::invalid("phase-map.x1_count", "must be at least 1"));
    }
    if phase_map.x2_count == 0 {
        return Err(HarnessError::invalid("phase-map.x2_count", "must be at least 1"));
    }

    Ok(Scenario {
        public: PublicView {
            protocol,
            omega,
            trials,
            seed,
            latency,
            teleport,
            basic,
            ramsey,
            phase_map,
        },
        hidden: Hidden { tau, delta },
    })
}

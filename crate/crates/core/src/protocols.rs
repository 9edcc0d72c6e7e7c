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

//! Two-party protocol engine.
//!
//! A single global inertial frame is used for comoving parties. Bob's clock
//! reads global time; Alice's clock reads `t - tau`, i.e. `t_B = t_A + tau`.
//! Physical free evolution over an interval `dt` multiplies `|1>` by
//! `e^{-i omega dt}`.
//!
//! Hidden quantities (`tau`, `delta`, the heralded-source phase) live in
//! [`PartyClocks`], [`SingletHandle`] and [`HiddenPhase`]. Party logic only
//! sees [`BasicQcsPlan`], [`TeleportSpec`], `omega` and the classical
//! messages it receives; records are built from those alone.
//!
//! Measurements on distinct parties' qubits commute, so outcomes are always
//! sampled in the fixed order Bob then Alice, whatever the global ordering of
//! the two events. This keeps record streams independent of the hidden
//! offset.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand_chacha::rand_core::RngCore;
use thiserror::Error;

use crate::phase::wrap_phase;
use crate::qstate::{
    free_evolution, hadamard_clock, measure, measure_forced, Amplitude, MeasurementBasis, QstateError, SingleQubitOp,
    StateVector, EXACT_TOL,
};
use crate::rng::unit_interval;
use crate::spacetime::{FourVelocity, GEOMETRY_TOL};

pub const ALICE: &str = "A";
pub const BOB: &str = "B";
pub const ANCILLA: &str = "B'";
pub const ALICE_PARTNER: &str = "A'";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("parties are not comoving; clock synchronization is frame dependent")]
    NotComoving,
    #[error("|alpha|^2 + |beta|^2 = {0}, expected 1")]
    NotNormalized(f64),
    #[error("{0} is not a Bell outcome index (expected 0..=3)")]
    InvalidBellOutcome(usize),
    #[error("correction at global time {correction} precedes message arrival at {arrival}")]
    CorrectionBeforeMessage { correction: f64, arrival: f64 },
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("classical latency must be non-negative, got {0}")]
    NegativeLatency(f64),
    #[error(transparent)]
    State(#[from] QstateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

/// A party's local clock: `local = global - offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartyClock {
    pub party: Party,
    offset: f64,
}

impl PartyClock {
    pub fn local_time(&self, global: f64) -> f64 {
        global - self.offset
    }

    pub fn global_time(&self, local: f64) -> f64 {
        local + self.offset
    }
}

/// Both clocks of a run. Bob's clock is the global reference; Alice's lags by
/// the hidden offset `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartyClocks {
    pub alice: PartyClock,
    pub bob: PartyClock,
}

impl PartyClocks {
    pub fn with_offset(tau: f64) -> Result<Self, ProtocolError> {
        if !tau.is_finite() {
            return Err(ProtocolError::NonFinite("tau"));
        }
        Ok(PartyClocks {
            alice: PartyClock {
                party: Party::Alice,
                offset: tau,
            },
            bob: PartyClock {
                party: Party::Bob,
                offset: 0.0,
            },
        })
    }

    /// Ground-truth offset. Oracle use only.
    pub fn oracle_offset(&self) -> f64 {
        self.alice.offset - self.bob.offset
    }
}

/// Physical setting shared by both parties: the level splitting and the
/// parties' motion. Clock offsets are carried separately in [`PartyClocks`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Setting {
    pub omega: f64,
    pub alice_velocity: FourVelocity,
    pub bob_velocity: FourVelocity,
}

impl Setting {
    pub fn at_rest(omega: f64) -> Self {
        Setting {
            omega,
            alice_velocity: FourVelocity::at_rest(),
            bob_velocity: FourVelocity::at_rest(),
        }
    }

    pub fn is_comoving(&self) -> bool {
        (self.alice_velocity.vector() - self.bob_velocity.vector()).max_abs() <= GEOMETRY_TOL
    }

    fn require_comoving(&self) -> Result<(), ProtocolError> {
        if !self.omega.is_finite() {
            return Err(ProtocolError::NonFinite("omega"));
        }
        if self.is_comoving() {
            Ok(())
        } else {
            Err(ProtocolError::NotComoving)
        }
    }

    /// Free evolution over a global interval `dt`.
    fn evolution(&self, dt: f64) -> SingleQubitOp {
        free_evolution(self.omega, -dt)
    }
}

/// A distributed singlet `(|0>_A|1>_B - e^{i delta}|1>_A|0>_B)/sqrt(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingletHandle {
    state: StateVector,
    hidden_delta: f64,
}

impl SingletHandle {
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Ground-truth transport phase. Oracle use only.
    pub fn oracle_delta(&self) -> f64 {
        self.hidden_delta
    }
}

fn singlet_state(delta: f64) -> StateVector {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    StateVector::new(
        &[ALICE, BOB],
        vec![zero, h, -Complex64::from_polar(FRAC_1_SQRT_2, delta), zero],
    )
    .expect("singlet is normalized")
}

/// Singlet carrying the transport phase `delta` on its `|1>_A|0>_B` term.
pub fn make_singlet(delta: f64) -> SingletHandle {
    SingletHandle {
        state: singlet_state(delta),
        hidden_delta: delta,
    }
}

/// Coefficients of the clock-state decomposition
/// `c_anti (|-+> - |+->) + c_corr (|++> - |-->)` of a singlet with phase
/// `delta`: `c_anti = (1 + e^{i delta})/(2 sqrt 2)`,
/// `c_corr = (1 - e^{i delta})/(2 sqrt 2)`.
pub fn clock_basis_coefficients(delta: f64) -> (Amplitude, Amplitude) {
    let e = Complex64::from_polar(1.0, delta);
    let norm = 2.0 * std::f64::consts::SQRT_2;
    ((1.0 + e) / norm, (1.0 - e) / norm)
}

/// Reassembles the singlet from its clock-state decomposition.
pub fn singlet_from_clock_basis(c_anti: Amplitude, c_corr: Amplitude) -> Result<StateVector, ProtocolError> {
    let (p_a, m_a) = (StateVector::plus(ALICE), StateVector::minus(ALICE));
    let (p_b, m_b) = (StateVector::plus(BOB), StateVector::minus(BOB));
    let terms = [
        (c_anti, m_a.tensor(&p_b)?),
        (-c_anti, p_a.tensor(&m_b)?),
        (c_corr, p_a.tensor(&p_b)?),
        (-c_corr, m_a.tensor(&m_b)?),
    ];
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    for (c, term) in &terms {
        for (a, t) in amps.iter_mut().zip(term.amplitudes()) {
            *a += c * t;
        }
    }
    Ok(StateVector::new(&[ALICE, BOB], amps)?)
}

/// Bell-measurement outcome, in the order `Psi+, Psi-, Phi+, Phi-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellOutcome {
    PsiPlus = 0,
    PsiMinus = 1,
    PhiPlus = 2,
    PhiMinus = 3,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// `Phi` outcomes leave Alice with the complex-conjugate relative phase.
    pub fn is_phi(self) -> bool {
        matches!(self, BellOutcome::PhiPlus | BellOutcome::PhiMinus)
    }
}

impl TryFrom<usize> for BellOutcome {
    type Error = ProtocolError;
    fn try_from(i: usize) -> Result<Self, ProtocolError> {
        BellOutcome::ALL
            .get(i)
            .copied()
            .ok_or(ProtocolError::InvalidBellOutcome(i))
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
        })
    }
}

/// Bob's Bell basis on `(B, B')` as it reads at his clock time zero.
pub fn bell_basis_at_reference() -> MeasurementBasis {
    let h = FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let vectors = vec![
        vec![z, r(h), r(h), z],
        vec![z, r(h), r(-h), z],
        vec![r(h), z, z, r(h)],
        vec![r(h), z, z, r(-h)],
    ]
    .into_iter()
    .map(|amps| StateVector::new(&[BOB, ANCILLA], amps).expect("Bell vectors are normalized"))
    .collect();
    MeasurementBasis::new(vectors).expect("Bell basis is orthonormal")
}

fn bell_basis() -> &'static MeasurementBasis {
    static BASIS: OnceLock<MeasurementBasis> = OnceLock::new();
    BASIS.get_or_init(bell_basis_at_reference)
}

/// Alice's outcome-conditioned correction, applied when her clock reads `t_a`.
///
/// It first undoes the free evolution her clock has accumulated since its
/// zero, `e^{+i H0 t_a}`, then applies the Pauli-type fix for the outcome:
///
/// * `Psi+-`: `+-|0><0| - e^{i omega t_a} |1><1|`
/// * `Phi+-`: `-e^{i omega t_a} |0><1| +- |1><0|`
pub fn correction_operator(outcome: BellOutcome, omega: f64, t_a: f64) -> SingleQubitOp {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let fix = match outcome {
        BellOutcome::PsiPlus => [[one, zero], [zero, -one]],
        BellOutcome::PsiMinus => [[-one, zero], [zero, -one]],
        BellOutcome::PhiPlus => [[zero, -one], [one, zero]],
        BellOutcome::PhiMinus => [[zero, -one], [-one, zero]],
    };
    SingleQubitOp::new(fix)
        .expect("Pauli-type fixes are unitary")
        .compose(&free_evolution(omega, t_a))
}

/// A classical message payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    Bell(BellOutcome),
    /// 0 for `|+>`, 1 for `|->`.
    ClockState(u8),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalMessage {
    pub sender: Party,
    pub recipient: Party,
    pub payload: Payload,
    /// Send time on the sender's clock.
    pub sent_at: f64,
}

/// One protocol round as seen by the parties.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    /// Bob's outcome: `+-` index for the basic protocol, Bell index for
    /// teleportation.
    pub bob_outcome: u8,
    /// Alice's population readout, when one was taken.
    pub alice_outcome: Option<u8>,
    /// Bob's clock at his measurement.
    pub bob_time: f64,
    /// Alice's clock at her correction or readout.
    pub alice_time: f64,
    pub messages: Vec<ClassicalMessage>,
}

/// Public schedule for the measurement-based protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicQcsPlan {
    /// Bob measures in `{|+>, |->}` when his clock reads this.
    pub bob_measure_time: f64,
    /// Alice applies a Hadamard and reads out when her clock reads this.
    pub alice_readout_time: f64,
}

/// Measurement-based synchronization round: Bob measures his half in
/// `{|+>, |->}` and announces the result; Alice's half evolves freely until
/// her readout.
///
/// Given Bob's outcome `b` (0 for `|+>`), Alice reads 0 with probability
/// `(1 - (-1)^b cos(phi - omega (t_A - t_B)))/2`, with `phi = -omega tau +
/// delta` and `t_A - t_B` the difference of the two scheduled clock readings.
pub fn run_basic_qcs<R: RngCore + ?Sized>(
    plan: &BasicQcsPlan,
    setting: &Setting,
    clocks: &PartyClocks,
    singlet: &SingletHandle,
    rng: &mut R,
) -> Result<MeasurementRecord, ProtocolError> {
    setting.require_comoving()?;
    if !plan.bob_measure_time.is_finite() || !plan.alice_readout_time.is_finite() {
        return Err(ProtocolError::NonFinite("schedule"));
    }
    let t_measure = clocks.bob.global_time(plan.bob_measure_time);
    let t_readout = clocks.alice.global_time(plan.alice_readout_time);

    // Each half evolves from the distribution reference t = 0 to its own event.
    let state = singlet
        .state
        .apply(&setting.evolution(t_measure), BOB)?
        .apply(&setting.evolution(t_readout), ALICE)?
        .apply(&hadamard_clock(), ALICE)?;

    let bob = measure(&state, &MeasurementBasis::plus_minus(BOB), rng)?;
    let alice = measure(&bob.state, &MeasurementBasis::computational(ALICE), rng)?;

    let bob_outcome = bob.outcome as u8;
    Ok(MeasurementRecord {
        bob_outcome,
        alice_outcome: Some(alice.outcome as u8),
        bob_time: plan.bob_measure_time,
        alice_time: plan.alice_readout_time,
        messages: vec![ClassicalMessage {
            sender: Party::Bob,
            recipient: Party::Alice,
            payload: Payload::ClockState(bob_outcome),
            sent_at: plan.bob_measure_time,
        }],
    })
}

/// Public parameters of a teleportation round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeleportSpec {
    pub alpha: Amplitude,
    pub beta: Amplitude,
    /// Alice's clock reading when she applies the correction.
    pub correction_time: f64,
    /// One-way classical channel delay in global time.
    pub latency: f64,
}

impl TeleportSpec {
    pub fn new(alpha: Amplitude, beta: Amplitude, correction_time: f64) -> Result<Self, ProtocolError> {
        let spec = TeleportSpec {
            alpha,
            beta,
            correction_time,
            latency: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_latency(self, latency: f64) -> Result<Self, ProtocolError> {
        let spec = TeleportSpec { latency, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > EXACT_TOL {
            return Err(ProtocolError::NotNormalized(norm));
        }
        if !self.correction_time.is_finite() {
            return Err(ProtocolError::NonFinite("correction_time"));
        }
        if self.latency < 0.0 || !self.latency.is_finite() {
            return Err(ProtocolError::NegativeLatency(self.latency));
        }
        Ok(())
    }

    /// The state Bob teleports, `alpha|0> + beta|1>`, on `label`.
    pub fn input_state(&self, label: &str) -> StateVector {
        StateVector::qubit(label, self.alpha, self.beta).expect("validated")
    }
}

/// How Bob's Bell outcome is chosen.
pub enum BellMode<'a, R: RngCore + ?Sized> {
    Sampled(&'a mut R),
    /// Project onto the given branch without sampling.
    Forced(BellOutcome),
}

/// Teleportation-based synchronization round, simulated on the full
/// `(A, B, B')` register in global time.
///
/// Bob prepares `B'` and measures `(B, B')` in [`bell_basis_at_reference`]
/// at his clock zero; Alice applies [`correction_operator`] when her clock
/// reads `spec.correction_time`. Returns Alice's qubit immediately after the
/// correction.
pub fn run_teleportation_qcs<R: RngCore + ?Sized>(
    spec: &TeleportSpec,
    setting: &Setting,
    clocks: &PartyClocks,
    singlet: &SingletHandle,
    mode: BellMode<'_, R>,
) -> Result<(StateVector, MeasurementRecord), ProtocolError> {
    setting.require_comoving()?;
    spec.validate()?;
    let bob_time = 0.0;
    let t_bell = clocks.bob.global_time(bob_time);
    let t_correct = clocks.alice.global_time(spec.correction_time);
    let arrival = t_bell + spec.latency;
    if t_correct < arrival {
        return Err(ProtocolError::CorrectionBeforeMessage {
            correction: t_correct,
            arrival,
        });
    }

    let labels = [ALICE, BOB, ANCILLA];
    let evolve_all = |state: StateVector, dt: f64| -> Result<StateVector, ProtocolError> {
        Ok(state.apply_each(&setting.evolution(dt), &labels)?)
    };

    // The singlet is at its reference phase at t = 0; B' waits in |0>.
    let mut now = 0.0;
    let mut state = singlet.state.tensor(&StateVector::basis(&[ANCILLA], 0)?)?;

    state = evolve_all(state, t_bell - now)?;
    now = t_bell;
    state = state.apply(&SingleQubitOp::preparation(spec.alpha, spec.beta)?, ANCILLA)?;
    let basis = bell_basis();
    let measured = match mode {
        BellMode::Sampled(rng) => measure(&state, basis, rng)?,
        BellMode::Forced(outcome) => measure_forced(&state, basis, outcome.index())?,
    };
    let outcome = BellOutcome::try_from(measured.outcome)?;
    state = measured.state;

    state = evolve_all(state, t_correct - now)?;
    state = state.apply(
        &correction_operator(outcome, setting.omega, spec.correction_time),
        ALICE,
    )?;

    // (B, B') evolved away from the reference Bell vector only by a phase
    // common to that branch, so contracting with the evolved vector isolates A.
    let evolved_bell =
        basis.vectors()[outcome.index()].apply_each(&setting.evolution(t_correct - t_bell), &[BOB, ANCILLA])?;
    let alice = state.contract(&evolved_bell)?;

    let record = MeasurementRecord {
        bob_outcome: outcome.index() as u8,
        alice_outcome: None,
        bob_time,
        alice_time: spec.correction_time,
        messages: vec![ClassicalMessage {
            sender: Party::Bob,
            recipient: Party::Alice,
            payload: Payload::Bell(outcome),
            sent_at: bob_time,
        }],
    };
    Ok((alice, record))
}

/// Hadamard pulse followed by a population measurement on Alice's qubit.
pub fn hadamard_readout<R: RngCore + ?Sized>(state: &StateVector, rng: &mut R) -> Result<u8, ProtocolError> {
    let rotated = state.apply(&hadamard_clock(), ALICE)?;
    Ok(measure(&rotated, &MeasurementBasis::computational(ALICE), rng)?.outcome as u8)
}

/// One Ramsey shot on a fresh atom: Hadamard, free evolution for
/// `interval`, Hadamard, population readout. Returns 1 for the excited state.
pub fn ramsey_shot<R: RngCore + ?Sized>(omega: f64, interval: f64, rng: &mut R) -> Result<u8, ProtocolError> {
    if !omega.is_finite() || !interval.is_finite() {
        return Err(ProtocolError::NonFinite("ramsey interval"));
    }
    let state = StateVector::basis(&[ALICE], 0)?
        .apply(&hadamard_clock(), ALICE)?
        .apply(&free_evolution(omega, -interval), ALICE)?;
    hadamard_readout(&state, rng)
}

/// Four-qubit state over `(A, A', B, B')` carrying one excitation per pair in
/// every term, so pairwise transport phases cancel.
pub fn make_phase_immune_state() -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    amps[0b0110] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[0b1001] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    StateVector::new(&[ALICE, ALICE_PARTNER, BOB, ANCILLA], amps).expect("normalized")
}

/// The random phase produced by heralded entanglement. Oracle use only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HiddenPhase(f64);

impl HiddenPhase {
    pub fn oracle_value(&self) -> f64 {
        self.0
    }

    /// The equivalent transport phase in the singlet convention: the state
    /// `(|01> + e^{i phi}|10>)/sqrt 2` equals the singlet with
    /// `delta = phi + pi`, reduced into `(-pi, pi]`.
    pub fn as_singlet_delta(&self) -> f64 {
        wrap_phase(self.0 + PI)
    }
}

/// Heralded two-atom entanglement `(|0>_A|1>_B + e^{i phi}|1>_A|0>_B)/sqrt 2`
/// with `phi` drawn uniformly from `[0, 2 pi)`.
pub fn cabrillo_entangle<R: RngCore + ?Sized>(rng: &mut R) -> (StateVector, HiddenPhase) {
    let phi = 2.0 * PI * unit_interval(rng);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let state = StateVector::new(
        &[ALICE, BOB],
        vec![zero, h, Complex64::from_polar(FRAC_1_SQRT_2, phi), zero],
    )
    .expect("normalized");
    (state, HiddenPhase(phi))
}

/// Singlet handle for a heralded pair, in the transport-phase convention.
pub fn singlet_from_cabrillo(phase: HiddenPhase) -> SingletHandle {
    make_singlet(phase.as_singlet_delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{equal_up_to_global_phase, outcome_probabilities};
    use crate::rng::trial_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Closed-form teleported state `alpha|0> + e^{i phi} beta|1>`.
    fn teleported(alpha: Complex64, beta: Complex64, phi: f64) -> StateVector {
        StateVector::qubit(ALICE, alpha, Complex64::from_polar(1.0, phi) * beta).unwrap()
    }

    #[test]
    fn singlet_examples() {
        let pure = make_singlet(0.0);
        let h = FRAC_1_SQRT_2;
        let expected = StateVector::new(&[ALICE, BOB], vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(equal_up_to_global_phase(pure.state(), &expected, EXACT_TOL));
        let flipped = make_singlet(PI);
        let triplet = StateVector::new(&[ALICE, BOB], vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(equal_up_to_global_phase(flipped.state(), &triplet, EXACT_TOL));
        let s = make_singlet(1.3);
        let evolved = s.state().apply_each(&free_evolution(2.2, 0.7), &[ALICE, BOB]).unwrap();
        assert!(equal_up_to_global_phase(&evolved, s.state(), EXACT_TOL));
        assert_eq!(s.oracle_delta(), 1.3);
    }

    #[test]
    fn clock_coefficients_examples() {
        let (anti, corr) = clock_basis_coefficients(0.0);
        assert_eq!(corr, c(0.0, 0.0));
        assert!((anti - c(FRAC_1_SQRT_2, 0.0)).norm() < EXACT_TOL);
        let (anti, _) = clock_basis_coefficients(PI);
        assert!(anti.norm() < EXACT_TOL);
        for delta in [0.1, 1.0, 2.5, -2.0] {
            let (a, b) = clock_basis_coefficients(delta);
            // each bracketed term has norm sqrt(2)
            assert!((2.0 * (a.norm_sqr() + b.norm_sqr()) - 1.0).abs() < EXACT_TOL);
            let rebuilt = singlet_from_clock_basis(a, b).unwrap();
            let direct = make_singlet(delta);
            let diff: f64 = rebuilt
                .amplitudes()
                .iter()
                .zip(direct.state().amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(diff < EXACT_TOL);
        }
    }

    #[test]
    fn bell_basis_examples() {
        let basis = bell_basis_at_reference();
        assert_eq!(basis.labels(), vec![BOB, ANCILLA]);
        // completeness: sum of projectors is the identity
        for i in 0..4 {
            for j in 0..4 {
                let sum: Complex64 = basis
                    .vectors()
                    .iter()
                    .map(|v| v.amplitudes()[i] * v.amplitudes()[j].conj())
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((sum - c(target, 0.0)).norm() < EXACT_TOL);
            }
        }
        let psi_minus = &basis.vectors()[BellOutcome::PsiMinus.index()];
        let pure = make_singlet(0.0);
        let relabelled = StateVector::new(&[BOB, ANCILLA], pure.state().amplitudes().to_vec()).unwrap();
        assert!(equal_up_to_global_phase(psi_minus, &relabelled, EXACT_TOL));
    }

    #[test]
    fn correction_operator_examples() {
        let m = correction_operator(BellOutcome::PsiPlus, 3.3, 0.0);
        assert!(m.distance(&SingleQubitOp::pauli_z()) < EXACT_TOL);
        let mut rng = trial_rng(11, 0);
        for _ in 0..50 {
            let omega = 10.0 * unit_interval(&mut rng);
            let t = 20.0 * unit_interval(&mut rng) - 10.0;
            for outcome in BellOutcome::ALL {
                let m = correction_operator(outcome, omega, t);
                assert!(m.unitarity_deviation() < EXACT_TOL);
                if outcome.is_phi() {
                    let mat = m.matrix();
                    assert!(mat[0][0].norm() < EXACT_TOL && mat[1][1].norm() < EXACT_TOL);
                }
            }
        }
        assert!(matches!(
            BellOutcome::try_from(4),
            Err(ProtocolError::InvalidBellOutcome(4))
        ));
    }

    fn forced(
        alpha: Complex64,
        beta: Complex64,
        omega: f64,
        tau: f64,
        delta: f64,
        t_a: f64,
        outcome: BellOutcome,
    ) -> StateVector {
        let spec = TeleportSpec::new(alpha, beta, t_a).unwrap();
        let clocks = PartyClocks::with_offset(tau).unwrap();
        run_teleportation_qcs::<crate::rng::ChaCha8Rng>(
            &spec,
            &Setting::at_rest(omega),
            &clocks,
            &make_singlet(delta),
            BellMode::Forced(outcome),
        )
        .unwrap()
        .0
    }

    #[test]
    fn teleportation_trivial_phase() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        for outcome in BellOutcome::ALL {
            let out = forced(alpha, beta, 2.0, 0.0, 0.0, 1.0, outcome);
            assert!(
                equal_up_to_global_phase(&out, &teleported(alpha, beta, 0.0), EXACT_TOL),
                "{outcome}"
            );
        }
    }

    #[test]
    fn psi_branches_match_closed_form() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let (omega, tau, delta) = (1.7, 0.45, -0.9);
        for outcome in [BellOutcome::PsiPlus, BellOutcome::PsiMinus] {
            let out = forced(alpha, beta, omega, tau, delta, 2.0, outcome);
            let expected = teleported(alpha, beta, -omega * tau + delta);
            assert!(equal_up_to_global_phase(&out, &expected, EXACT_TOL));
        }
    }

    #[test]
    fn phi_branches_carry_conjugate_phase() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let (omega, tau, delta) = (1.7, 0.45, -0.9);
        for outcome in [BellOutcome::PhiPlus, BellOutcome::PhiMinus] {
            let out = forced(alpha, beta, omega, tau, delta, 2.0, outcome);
            let expected = teleported(alpha, beta, omega * tau - delta);
            assert!(equal_up_to_global_phase(&out, &expected, EXACT_TOL));
        }
    }

    #[test]
    fn balanced_input_with_phase_pi() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let omega = 2.0;
        let tau = 0.25;
        // -omega tau + delta = pi
        let delta = PI + omega * tau;
        let out = forced(h, h, omega, tau, delta, 1.0, BellOutcome::PsiPlus);
        assert!(equal_up_to_global_phase(&out, &StateVector::minus(ALICE), EXACT_TOL));
    }

    #[test]
    fn latency_does_not_change_output() {
        let (alpha, beta) = (c(0.8, 0.0), c(0.36, 0.48));
        let clocks = PartyClocks::with_offset(0.3).unwrap();
        let setting = Setting::at_rest(1.1);
        let singlet = make_singlet(0.7);
        let base = TeleportSpec::new(alpha, beta, 5.0).unwrap();
        let fast = run_teleportation_qcs::<crate::rng::ChaCha8Rng>(
            &base,
            &setting,
            &clocks,
            &singlet,
            BellMode::Forced(BellOutcome::PsiMinus),
        )
        .unwrap()
        .0;
        let slow_spec = base.with_latency(2.0).unwrap();
        let slow = run_teleportation_qcs::<crate::rng::ChaCha8Rng>(
            &slow_spec,
            &setting,
            &clocks,
            &singlet,
            BellMode::Forced(BellOutcome::PsiMinus),
        )
        .unwrap()
        .0;
        assert!(equal_up_to_global_phase(&fast, &slow, EXACT_TOL));
        let late = base.with_latency(10.0).unwrap();
        assert!(matches!(
            run_teleportation_qcs::<crate::rng::ChaCha8Rng>(
                &late,
                &setting,
                &clocks,
                &singlet,
                BellMode::Forced(BellOutcome::PsiMinus)
            ),
            Err(ProtocolError::CorrectionBeforeMessage { .. })
        ));
    }

    #[test]
    fn teleportation_rejects_bad_input() {
        assert!(matches!(
            TeleportSpec::new(c(1.0, 0.0), c(1.0, 0.0), 0.0),
            Err(ProtocolError::NotNormalized(_))
        ));
        let spec = TeleportSpec::new(c(1.0, 0.0), c(0.0, 0.0), 1.0).unwrap();
        let setting = Setting {
            omega: 1.0,
            alice_velocity: FourVelocity::at_rest(),
            bob_velocity: FourVelocity::from_three_velocity([0.1, 0.0, 0.0]).unwrap(),
        };
        let r = run_teleportation_qcs::<crate::rng::ChaCha8Rng>(
            &spec,
            &setting,
            &PartyClocks::with_offset(0.0).unwrap(),
            &make_singlet(0.0),
            BellMode::Forced(BellOutcome::PsiPlus),
        );
        assert!(matches!(r, Err(ProtocolError::NotComoving)));
    }

    #[test]
    fn basic_qcs_immediate_readout_anticorrelates() {
        let plan = BasicQcsPlan {
            bob_measure_time: 0.0,
            alice_readout_time: 0.0,
        };
        let clocks = PartyClocks::with_offset(0.0).unwrap();
        let singlet = make_singlet(0.0);
        for trial in 0..200 {
            let mut rng = trial_rng(5, trial);
            let rec = run_basic_qcs(&plan, &Setting::at_rest(3.0), &clocks, &singlet, &mut rng).unwrap();
            // Alice's Hadamard maps |+> -> 0 and |-> -> 1; opposite of Bob.
            assert_eq!(rec.alice_outcome, Some(1 - rec.bob_outcome));
            assert_eq!(rec.messages.len(), 1);
        }
    }

    #[test]
    fn basic_qcs_rejects_non_comoving() {
        let plan = BasicQcsPlan {
            bob_measure_time: 0.0,
            alice_readout_time: 0.0,
        };
        let setting = Setting {
            omega: 1.0,
            alice_velocity: FourVelocity::from_three_velocity([0.0, 0.2, 0.0]).unwrap(),
            bob_velocity: FourVelocity::at_rest(),
        };
        let mut rng = trial_rng(0, 0);
        let r = run_basic_qcs(
            &plan,
            &setting,
            &PartyClocks::with_offset(0.0).unwrap(),
            &make_singlet(0.0),
            &mut rng,
        );
        assert!(matches!(r, Err(ProtocolError::NotComoving)));
    }

    #[test]
    fn phase_immune_state_examples() {
        let s = make_phase_immune_state();
        assert!((s.norm_sqr() - 1.0).abs() < EXACT_TOL);
        let (ta, tb) = (0.83, -2.4);
        let shifted = s
            .apply_each(&SingleQubitOp::phase(ta), &[ALICE, ALICE_PARTNER])
            .unwrap()
            .apply_each(&SingleQubitOp::phase(tb), &[BOB, ANCILLA])
            .unwrap();
        assert!(equal_up_to_global_phase(&s, &shifted, EXACT_TOL));
        let evolved = s
            .apply_each(&free_evolution(1.9, 3.1), &[ALICE, ALICE_PARTNER, BOB, ANCILLA])
            .unwrap();
        assert!(equal_up_to_global_phase(&s, &evolved, EXACT_TOL));
    }

    #[test]
    fn cabrillo_examples() {
        let (s, phi) = cabrillo_entangle(&mut trial_rng(9, 0));
        let (s2, phi2) = cabrillo_entangle(&mut trial_rng(9, 0));
        assert_eq!(s, s2);
        assert_eq!(phi, phi2);
        assert!((0.0..2.0 * PI).contains(&phi.oracle_value()));
        assert!((s.excited_population(ALICE).unwrap() - 0.5).abs() < EXACT_TOL);
        assert!((s.excited_population(BOB).unwrap() - 0.5).abs() < EXACT_TOL);
        let converted = singlet_from_cabrillo(phi);
        assert!(equal_up_to_global_phase(&s, converted.state(), EXACT_TOL));
    }

    #[test]
    fn plus_minus_probabilities_of_impure_singlet() {
        let s = make_singlet(PI / 3.0);
        let alice_basis = MeasurementBasis::plus_minus(ALICE);
        let probs = outcome_probabilities(s.state(), &alice_basis).unwrap();
        assert!((probs[0] - 0.5).abs() < EXACT_TOL);
    }
}

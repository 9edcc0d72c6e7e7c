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

//! Exact state-vector quantum core.
//!
//! Registers are ordered lists of labelled qubits. Basis index bits follow the
//! register order with the first qubit most significant, so for a register
//! `[A, B]` the amplitude of `|q_A q_B>` lives at index `2 * q_A + q_B`.
//!
//! All values are immutable: operations return new states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand_chacha::rand_core::RngCore;
use thiserror::Error;

use crate::rng::unit_interval;

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Tolerance for exact (non-statistical) state algebra.
pub const EXACT_TOL: f64 = 1e-12;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QstateError {
    #[error("unknown qubit label `{0}`")]
    UnknownQubit(String),
    #[error("duplicate qubit label `{0}` in register")]
    DuplicateLabel(String),
    #[error("register of {0} qubits exceeds the supported maximum")]
    RegisterTooLarge(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("amplitude {0} is not finite")]
    NonFinite(usize),
    #[error("state norm squared {0} differs from 1")]
    NotNormalized(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("basis vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("basis has {got} vectors but its subspace has dimension {expected}")]
    IncompleteBasis { expected: usize, got: usize },
    #[error("basis vectors act on different registers")]
    MixedBasisRegisters,
    #[error("measurement outcome {0} is out of range")]
    OutcomeOutOfRange(usize),
    #[error("measurement branch {0} has zero probability")]
    ImpossibleBranch(usize),
}

/// A labelled qubit and its position in a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitId {
    label: String,
    index: usize,
}

impl QubitId {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn build_register<S: AsRef<str>>(labels: &[S]) -> Result<Arc<[QubitId]>, QstateError> {
    if labels.len() > MAX_QUBITS {
        return Err(QstateError::RegisterTooLarge(labels.len()));
    }
    let mut register: Vec<QubitId> = Vec::with_capacity(labels.len());
    for (index, label) in labels.iter().enumerate() {
        let label = label.as_ref();
        if register.iter().any(|q| q.label == label) {
            return Err(QstateError::DuplicateLabel(label.to_owned()));
        }
        register.push(QubitId {
            label: label.to_owned(),
            index,
        });
    }
    Ok(register.into())
}

/// A normalized pure state over a labelled register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    register: Arc<[QubitId]>,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized within
    /// [`EXACT_TOL`].
    pub fn new<S: AsRef<str>>(labels: &[S], amps: Vec<Amplitude>) -> Result<Self, QstateError> {
        let state = Self::unchecked_norm(labels, amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(QstateError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Builds a state from arbitrary nonzero amplitudes, rescaling to unit norm.
    pub fn normalized<S: AsRef<str>>(labels: &[S], amps: Vec<Amplitude>) -> Result<Self, QstateError> {
        let state = Self::unchecked_norm(labels, amps)?;
        state.renormalize()
    }

    fn unchecked_norm<S: AsRef<str>>(labels: &[S], amps: Vec<Amplitude>) -> Result<Self, QstateError> {
        let register = build_register(labels)?;
        let expected = 1usize << register.len();
        if amps.len() != expected {
            return Err(QstateError::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QstateError::NonFinite(i));
        }
        Ok(StateVector { register, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis<S: AsRef<str>>(labels: &[S], index: usize) -> Result<Self, QstateError> {
        let dim = 1usize << labels.len().min(MAX_QUBITS + 1);
        if index >= dim {
            return Err(QstateError::OutcomeOutOfRange(index));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self::new(labels, amps)
    }

    /// Single-qubit state `alpha|0> + beta|1>`.
    pub fn qubit(label: &str, alpha: Amplitude, beta: Amplitude) -> Result<Self, QstateError> {
        Self::new(&[label], vec![alpha, beta])
    }

    /// `(|0> + |1>)/sqrt(2)`.
    pub fn plus(label: &str) -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        StateVector {
            register: Arc::new([QubitId {
                label: label.to_owned(),
                index: 0,
            }]),
            amps: vec![h, h],
        }
    }

    /// `(|0> - |1>)/sqrt(2)`.
    pub fn minus(label: &str) -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        StateVector {
            register: Arc::new([QubitId {
                label: label.to_owned(),
                index: 0,
            }]),
            amps: vec![h, -h],
        }
    }

    pub fn register(&self) -> &[QubitId] {
        &self.register
    }

    pub fn labels(&self) -> Vec<&str> {
        self.register.iter().map(|q| q.label.as_str()).collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn qubit_id(&self, label: &str) -> Option<&QubitId> {
        self.register.iter().find(|q| q.label == label)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`; registers must carry the same labels in the same order.
    pub fn inner(&self, other: &StateVector) -> Option<Amplitude> {
        if !self.same_register(other) {
            return None;
        }
        Some(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn same_register(&self, other: &StateVector) -> bool {
        self.register.len() == other.register.len()
            && (Arc::ptr_eq(&self.register, &other.register)
                || self
                    .register
                    .iter()
                    .zip(other.register.iter())
                    .all(|(a, b)| a.label == b.label))
    }

    /// Tensor product `self (x) other`; `self`'s qubits stay most significant.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QstateError> {
        let mut labels = self.labels();
        labels.extend(other.labels());
        let register = build_register(&labels)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { register, amps })
    }

    /// Multiplies every amplitude by `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> StateVector {
        let phase = Complex64::from_polar(1.0, theta);
        StateVector {
            register: self.register.clone(),
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    fn renormalize(mut self) -> Result<StateVector, QstateError> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QstateError::ZeroNorm);
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(self)
    }

    /// Bit shift (from the least significant end) of the qubit `label`.
    fn shift_of(&self, label: &str) -> Result<usize, QstateError> {
        let q = self
            .qubit_id(label)
            .ok_or_else(|| QstateError::UnknownQubit(label.to_owned()))?;
        Ok(self.register.len() - 1 - q.index)
    }

    /// Applies a single-qubit unitary to the qubit `label`.
    pub fn apply(&self, op: &SingleQubitOp, label: &str) -> Result<StateVector, QstateError> {
        let mask = 1usize << self.shift_of(label)?;
        let m = &op.matrix;
        let mut amps = self.amps.clone();
        for i0 in (0..amps.len()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(StateVector {
            register: self.register.clone(),
            amps,
        })
    }

    /// Applies the same single-qubit unitary to each listed qubit.
    pub fn apply_each(&self, op: &SingleQubitOp, labels: &[&str]) -> Result<StateVector, QstateError> {
        labels.iter().try_fold(self.clone(), |s, label| s.apply(op, label))
    }

    /// Bit shifts of `sub`'s qubits in this register, and of the remaining
    /// qubits, both most-significant-first.
    fn split_for(&self, sub: &StateVector) -> Result<Split, QstateError> {
        let shifts: Vec<usize> = sub
            .register
            .iter()
            .map(|q| self.shift_of(&q.label))
            .collect::<Result<_, _>>()?;
        let rest = (0..self.register.len()).rev().filter(|s| !shifts.contains(s)).collect();
        Ok(Split { shifts, rest })
    }

    /// Partial inner product `(<sub| (x) I) |self>`, unnormalized, indexed
    /// by complement basis states.
    fn partial_overlap(&self, split: &Split, sub: &StateVector) -> Vec<Amplitude> {
        let mut out = vec![ZERO; 1 << split.rest.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let (s, r) = split.index(i);
            out[r] += sub.amps[s].conj() * a;
        }
        out
    }

    /// Conditional state of the complementary qubits after the qubits of
    /// `sub` are found in state `sub`, renormalized.
    pub fn contract(&self, sub: &StateVector) -> Result<StateVector, QstateError> {
        let amps = self.partial_overlap(&self.split_for(sub)?, sub);
        let labels: Vec<&str> = self
            .register
            .iter()
            .filter(|q| sub.qubit_id(&q.label).is_none())
            .map(|q| q.label.as_str())
            .collect();
        StateVector::unchecked_norm(&labels, amps)?.renormalize()
    }

    /// Probability of finding the qubits of `sub` in state `sub`.
    pub fn probability_of(&self, sub: &StateVector) -> Result<f64, QstateError> {
        let overlap = self.partial_overlap(&self.split_for(sub)?, sub);
        Ok(overlap.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Marginal probability that qubit `label` reads 1.
    pub fn excited_population(&self, label: &str) -> Result<f64, QstateError> {
        let mask = 1usize << self.shift_of(label)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `(|b><b| (x) I) |self>` from a precomputed overlap with `sub`.
    fn project(&self, split: &Split, sub: &StateVector, overlap: &[Amplitude]) -> StateVector {
        let amps = (0..self.amps.len())
            .map(|i| {
                let (s, r) = split.index(i);
                sub.amps[s] * overlap[r]
            })
            .collect();
        StateVector {
            register: self.register.clone(),
            amps,
        }
    }
}

struct Split {
    shifts: Vec<usize>,
    rest: Vec<usize>,
}

impl Split {
    /// (sub-register index, complement index) of a full index.
    fn index(&self, index: usize) -> (usize, usize) {
        let gather = |shifts: &[usize]| shifts.iter().fold(0, |acc, &s| (acc << 1) | ((index >> s) & 1));
        (gather(&self.shifts), gather(&self.rest))
    }
}

/// A 2x2 unitary acting on one qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitOp {
    matrix: [[Complex64; 2]; 2],
}

impl SingleQubitOp {
    /// Checks unitarity within [`EXACT_TOL`].
    pub fn new(matrix: [[Complex64; 2]; 2]) -> Result<Self, QstateError> {
        let op = SingleQubitOp { matrix };
        let dev = op.unitarity_deviation();
        if !dev.is_finite() || dev > EXACT_TOL {
            return Err(QstateError::NotUnitary(dev));
        }
        Ok(op)
    }

    pub fn identity() -> Self {
        Self::diagonal(ONE, ONE)
    }

    fn diagonal(d0: Complex64, d1: Complex64) -> Self {
        SingleQubitOp {
            matrix: [[d0, ZERO], [ZERO, d1]],
        }
    }

    /// `diag(1, e^{i theta})`.
    pub fn phase(theta: f64) -> Self {
        Self::diagonal(ONE, Complex64::from_polar(1.0, theta))
    }

    pub fn pauli_x() -> Self {
        SingleQubitOp {
            matrix: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(ONE, -ONE)
    }

    /// Unitary taking `|0>` to `alpha|0> + beta|1>`.
    pub fn preparation(alpha: Amplitude, beta: Amplitude) -> Result<Self, QstateError> {
        Self::new([[alpha, -beta.conj()], [beta, alpha.conj()]])
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        let m = self.matrix;
        SingleQubitOp {
            matrix: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// Operator product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SingleQubitOp) -> Self {
        let (a, b) = (self.matrix, rhs.matrix);
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SingleQubitOp { matrix: m }
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().compose(self).matrix;
        let mut dev: f64 = 0.0;
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                dev = dev.max((v - target).norm());
            }
        }
        dev
    }

    /// Largest entry-wise distance to `other`.
    pub fn distance(&self, other: &SingleQubitOp) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.matrix[i][j] - other.matrix[i][j]).norm());
            }
        }
        d
    }
}

/// Free evolution `exp(i t H0)` with `H0 = diag(0, omega)`: `|1>` picks up
/// the phase `omega * t`.
///
/// This is the clock-reading convention. The protocol timelines evolve
/// states forward with the inverse sign, `free_evolution(omega, -t)`.
pub fn free_evolution(omega: f64, t: f64) -> SingleQubitOp {
    SingleQubitOp::phase(omega * t)
}

/// Hadamard map `|0> -> |+>`, `|1> -> |->`.
pub fn hadamard_clock() -> SingleQubitOp {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    SingleQubitOp {
        matrix: [[h, h], [h, -h]],
    }
}

/// Applies `op` to qubit `label` of `state`.
pub fn apply(op: &SingleQubitOp, label: &str, state: &StateVector) -> Result<StateVector, QstateError> {
    state.apply(op, label)
}

/// An orthonormal basis of a sub-register.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<StateVector>,
}

impl MeasurementBasis {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self, QstateError> {
        let first = vectors
            .first()
            .ok_or(QstateError::IncompleteBasis { expected: 1, got: 0 })?;
        if vectors.iter().any(|v| !v.same_register(first)) {
            return Err(QstateError::MixedBasisRegisters);
        }
        let expected = 1usize << first.num_qubits();
        if vectors.len() != expected {
            return Err(QstateError::IncompleteBasis {
                expected,
                got: vectors.len(),
            });
        }
        let mut dev: f64 = 0.0;
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                let ip = a.inner(b).expect("registers checked above");
                dev = dev.max((ip - target).norm());
            }
        }
        if dev > EXACT_TOL {
            return Err(QstateError::NotOrthonormal(dev));
        }
        Ok(MeasurementBasis { vectors })
    }

    /// `{|0>, |1>}` on one qubit.
    pub fn computational(label: &str) -> Self {
        MeasurementBasis {
            vectors: vec![
                StateVector::basis(&[label], 0).expect("one qubit"),
                StateVector::basis(&[label], 1).expect("one qubit"),
            ],
        }
    }

    /// `{|+>, |->}` on one qubit; outcome 0 is `|+>`.
    pub fn plus_minus(label: &str) -> Self {
        MeasurementBasis {
            vectors: vec![StateVector::plus(label), StateVector::minus(label)],
        }
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Labels of the measured sub-register.
    pub fn labels(&self) -> Vec<&str> {
        self.vectors[0].labels()
    }
}

/// Result of a projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub outcome: usize,
    pub state: StateVector,
    pub probability: f64,
}

/// Born probabilities of each basis outcome.
pub fn outcome_probabilities(state: &StateVector, basis: &MeasurementBasis) -> Result<Vec<f64>, QstateError> {
    Ok(overlaps(state, basis)?.1.iter().map(|o| norm_sqr(o)).collect())
}

fn norm_sqr(v: &[Amplitude]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn overlaps(state: &StateVector, basis: &MeasurementBasis) -> Result<(Split, Vec<Vec<Amplitude>>), QstateError> {
    let split = state.split_for(&basis.vectors[0])?;
    let all = basis.vectors.iter().map(|b| state.partial_overlap(&split, b)).collect();
    Ok((split, all))
}

/// Samples a projective measurement of `basis` on `state`.
///
/// One 64-bit draw is consumed and mapped to `u` in `[0, 1)`; the outcome is
/// the first index whose cumulative probability exceeds `u`.
pub fn measure<R: RngCore + ?Sized>(
    state: &StateVector,
    basis: &MeasurementBasis,
    rng: &mut R,
) -> Result<MeasurementOutcome, QstateError> {
    let (split, all) = overlaps(state, basis)?;
    let probs: Vec<f64> = all.iter().map(|o| norm_sqr(o)).collect();
    let u = unit_interval(rng);
    let mut cumulative = 0.0;
    let mut outcome = None;
    for (k, p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            outcome = Some(k);
            break;
        }
    }
    // Rounding can leave the total a hair below u; fall back to the last
    // outcome with nonzero weight.
    let outcome = outcome
        .or_else(|| probs.iter().rposition(|&p| p > 0.0))
        .ok_or(QstateError::ZeroNorm)?;
    collapse(state, basis, &split, outcome, &all[outcome])
}

/// Projects onto basis vector `outcome` without sampling.
pub fn measure_forced(
    state: &StateVector,
    basis: &MeasurementBasis,
    outcome: usize,
) -> Result<MeasurementOutcome, QstateError> {
    if outcome >= basis.len() {
        return Err(QstateError::OutcomeOutOfRange(outcome));
    }
    let split = state.split_for(&basis.vectors[outcome])?;
    let overlap = state.partial_overlap(&split, &basis.vectors[outcome]);
    collapse(state, basis, &split, outcome, &overlap)
}

fn collapse(
    state: &StateVector,
    basis: &MeasurementBasis,
    split: &Split,
    outcome: usize,
    overlap: &[Amplitude],
) -> Result<MeasurementOutcome, QstateError> {
    let probability = norm_sqr(overlap);
    if probability <= 0.0 {
        return Err(QstateError::ImpossibleBranch(outcome));
    }
    let projected = state.project(split, &basis.vectors[outcome], overlap);
    Ok(MeasurementOutcome {
        outcome,
        state: projected.renormalize()?,
        probability,
    })
}

/// Whether `a` and `b` differ only by a global phase, within `tol` in the
/// Euclidean norm.
///
/// Both vectors are rotated so that the amplitude at the largest-magnitude
/// index of `a` is real and non-negative, then compared directly.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    if !a.same_register(b) {
        return false;
    }
    let pivot = a
        .amps
        .iter()
        .enumerate()
        .fold(
            (0, -1.0),
            |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best },
        )
        .0;
    let rotate = |z: Complex64| {
        if z.norm() == 0.0 {
            ONE
        } else {
            (z / z.norm()).conj()
        }
    };
    let (ra, rb) = (rotate(a.amps[pivot]), rotate(b.amps[pivot]));
    let dist: f64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x * ra - y * rb).norm_sqr())
        .sum::<f64>()
        .sqrt();
    dist <= tol
}

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

//! Flat spacetime geometry in units with `c = 1`.
//!
//! The metric has signature `(-, +, +, +)`: `a . b = -a_t b_t + a_x b_x +
//! a_y b_y + a_z b_z`, so a four-velocity satisfies `u . u = -1` and an
//! observer at rest sees `u . x = -t`.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::phase::wrap_phase;

/// Tolerance for geometric identities.
pub const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacetimeError {
    #[error("four-vector component is not finite")]
    NonFinite,
    #[error("not a unit future-pointing timelike vector (u.u = {norm}, u_t = {t})")]
    NotFourVelocity { norm: f64, t: f64 },
    #[error("speed {0} is not below the speed of light")]
    Superluminal(f64),
    #[error("rest mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("energy gap must be non-negative, got {0}")]
    NegativeGap(f64),
    #[error("worldline needs at least one event")]
    EmptyWorldline,
    #[error("worldline segment {0} is spacelike")]
    SpacelikeSegment(usize),
    #[error("worldline segment {0} runs backwards in time")]
    PastDirected(usize),
    #[error("worldline segment {0} does not follow its stated velocity")]
    VelocityMismatch(usize),
    #[error("rotation axis has zero length")]
    ZeroAxis,
}

/// An event or displacement `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector {
        t: 0.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    pub fn components(&self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    fn from_components(c: [f64; 4]) -> Self {
        FourVector::new(c[0], c[1], c[2], c[3])
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        minkowski_dot(*self, *other)
    }

    /// Squared Minkowski norm `x . x`.
    pub fn interval(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Largest absolute component; used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector::new(self.t + rhs.t, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector::new(self.t - rhs.t, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

/// Minkowski inner product with signature `(-, +, +, +)`.
pub fn minkowski_dot(a: FourVector, b: FourVector) -> f64 {
    -a.t * b.t + a.x * b.x + a.y * b.y + a.z * b.z
}

/// A unit, future-pointing timelike four-vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVelocity(FourVector);

impl FourVelocity {
    pub fn new(u: FourVector) -> Result<Self, SpacetimeError> {
        if !u.is_finite() {
            return Err(SpacetimeError::NonFinite);
        }
        let norm = u.interval();
        // u.u = -gamma^2 (1 - v^2); rounding grows with gamma^2 = u_t^2
        if (norm + 1.0).abs() > GEOMETRY_TOL * u.t.powi(2).max(1.0) || u.t <= 0.0 {
            return Err(SpacetimeError::NotFourVelocity { norm, t: u.t });
        }
        Ok(FourVelocity(u))
    }

    pub fn at_rest() -> Self {
        FourVelocity(FourVector::new(1.0, 0.0, 0.0, 0.0))
    }

    /// Four-velocity `gamma (1, v)` of an observer with coordinate velocity `v`.
    pub fn from_three_velocity(v: [f64; 3]) -> Result<Self, SpacetimeError> {
        let speed_sq: f64 = v.iter().map(|c| c * c).sum();
        if !speed_sq.is_finite() {
            return Err(SpacetimeError::NonFinite);
        }
        if speed_sq >= 1.0 {
            return Err(SpacetimeError::Superluminal(speed_sq.sqrt()));
        }
        let gamma = 1.0 / (1.0 - speed_sq).sqrt();
        Ok(FourVelocity(FourVector::new(
            gamma,
            gamma * v[0],
            gamma * v[1],
            gamma * v[2],
        )))
    }

    pub fn vector(&self) -> FourVector {
        self.0
    }

    pub fn gamma(&self) -> f64 {
        self.0.t
    }

    pub fn three_velocity(&self) -> [f64; 3] {
        let u = self.0;
        [u.x / u.t, u.y / u.t, u.z / u.t]
    }

    pub fn transform(&self, map: &LorentzMap) -> FourVelocity {
        FourVelocity(map.apply_vector(self.0))
    }
}

/// Ground and excited wave four-vectors of a two-level atom moving with `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveVectorPair {
    pub k0: FourVector,
    pub k1: FourVector,
    pub m0: f64,
    pub omega: f64,
}

/// `k0 = m0 u`, `k1 = (m0 + omega) u`.
pub fn wave_vectors(u: FourVelocity, m0: f64, omega: f64) -> Result<WaveVectorPair, SpacetimeError> {
    if m0 <= 0.0 || !m0.is_finite() {
        return Err(SpacetimeError::NonPositiveMass(m0));
    }
    if omega < 0.0 || !omega.is_finite() {
        return Err(SpacetimeError::NegativeGap(omega));
    }
    Ok(WaveVectorPair {
        k0: u.vector() * m0,
        k1: u.vector() * (m0 + omega),
        m0,
        omega,
    })
}

/// Phase exponent `k . x` picked up by a plane wave with wave vector `k` at `x`.
pub fn plane_wave_phase(k: FourVector, x: FourVector) -> f64 {
    minkowski_dot(k, x)
}

/// Proper orthochronous Lorentz transformation with optional translation,
/// acting on events as `x -> L x + a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMap {
    matrix: [[f64; 4]; 4],
    translation: FourVector,
}

impl LorentzMap {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LorentzMap {
            matrix: m,
            translation: FourVector::ZERO,
        }
    }

    /// Pure boost taking the rest frame four-velocity to `gamma (1, v)`.
    pub fn boost(v: [f64; 3]) -> Result<Self, SpacetimeError> {
        let u = FourVelocity::from_three_velocity(v)?;
        let gamma = u.gamma();
        let speed_sq: f64 = v.iter().map(|c| c * c).sum();
        let mut m = Self::identity().matrix;
        m[0][0] = gamma;
        for i in 0..3 {
            m[0][i + 1] = gamma * v[i];
            m[i + 1][0] = gamma * v[i];
            for j in 0..3 {
                if speed_sq > 0.0 {
                    m[i + 1][j + 1] += (gamma - 1.0) * v[i] * v[j] / speed_sq;
                }
            }
        }
        Ok(LorentzMap {
            matrix: m,
            translation: FourVector::ZERO,
        })
    }

    /// Spatial rotation by `angle` about `axis` (right-handed).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self, SpacetimeError> {
        let len = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len <= 0.0 || !len.is_finite() {
            return Err(SpacetimeError::ZeroAxis);
        }
        let n = [axis[0] / len, axis[1] / len, axis[2] / len];
        let (s, c) = angle.sin_cos();
        let mut m = Self::identity().matrix;
        for i in 0..3 {
            for j in 0..3 {
                let cross = match (i, j) {
                    (0, 1) => -n[2],
                    (0, 2) => n[1],
                    (1, 0) => n[2],
                    (1, 2) => -n[0],
                    (2, 0) => -n[1],
                    (2, 1) => n[0],
                    _ => 0.0,
                };
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i + 1][j + 1] = c * delta + s * cross + (1.0 - c) * n[i] * n[j];
            }
        }
        Ok(LorentzMap {
            matrix: m,
            translation: FourVector::ZERO,
        })
    }

    pub fn translation(a: FourVector) -> Self {
        LorentzMap {
            translation: a,
            ..Self::identity()
        }
    }

    pub fn with_translation(self, a: FourVector) -> Self {
        LorentzMap { translation: a, ..self }
    }

    pub fn matrix(&self) -> [[f64; 4]; 4] {
        self.matrix
    }

    pub fn translation_part(&self) -> FourVector {
        self.translation
    }

    /// `self o rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &LorentzMap) -> LorentzMap {
        let (a, b) = (&self.matrix, &rhs.matrix);
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        LorentzMap {
            matrix: m,
            translation: self.apply_vector(rhs.translation) + self.translation,
        }
    }

    /// Linear part only; for displacements, velocities and wave vectors.
    pub fn apply_vector(&self, v: FourVector) -> FourVector {
        let c = v.components();
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| self.matrix[i][k] * c[k]).sum();
        }
        FourVector::from_components(out)
    }

    /// Full affine action on an event.
    pub fn apply_event(&self, x: FourVector) -> FourVector {
        self.apply_vector(x) + self.translation
    }

    /// Largest entry of `|L^T eta L - eta|`.
    pub fn metric_deviation(&self) -> f64 {
        let eta = [-1.0, 1.0, 1.0, 1.0];
        let mut dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let g: f64 = (0..4).map(|k| self.matrix[k][i] * eta[k] * self.matrix[k][j]).sum();
                let target = if i == j { eta[i] } else { 0.0 };
                dev = dev.max((g - target).abs());
            }
        }
        dev
    }
}

/// A piecewise-inertial worldline.
///
/// Entry `i` is the event where segment `i` starts together with the
/// four-velocity held until the next event; the velocity of the last entry
/// describes motion beyond the final event.
#[derive(Clone, Debug, PartialEq)]
pub struct Worldline {
    segments: Vec<(FourVector, FourVelocity)>,
}

impl Worldline {
    pub fn new(segments: Vec<(FourVector, FourVelocity)>) -> Result<Self, SpacetimeError> {
        if segments.is_empty() {
            return Err(SpacetimeError::EmptyWorldline);
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let (start, u) = pair[0];
            let step = pair[1].0 - start;
            if !step.is_finite() {
                return Err(SpacetimeError::NonFinite);
            }
            let scale = step.max_abs().max(1.0);
            let interval = step.interval();
            if interval > GEOMETRY_TOL * scale * scale {
                return Err(SpacetimeError::SpacelikeSegment(i));
            }
            if step.t < 0.0 {
                return Err(SpacetimeError::PastDirected(i));
            }
            let tau = (-interval).max(0.0).sqrt();
            if tau > GEOMETRY_TOL * scale {
                let direction = step * (1.0 / tau);
                if (direction - u.vector()).max_abs() > GEOMETRY_TOL * u.gamma().powi(2) * scale / tau.min(1.0) {
                    return Err(SpacetimeError::VelocityMismatch(i));
                }
            }
        }
        Ok(Worldline { segments })
    }

    /// Observer moving with `u` from `start` for proper duration `tau`.
    pub fn inertial(start: FourVector, u: FourVelocity, tau: f64) -> Result<Self, SpacetimeError> {
        Self::new(vec![(start, u), (start + u.vector() * tau, u)])
    }

    /// Worldline through the given events, velocities inferred from each step.
    /// The final event keeps the velocity of the last segment.
    pub fn through_events(events: &[FourVector]) -> Result<Self, SpacetimeError> {
        let first = *events.first().ok_or(SpacetimeError::EmptyWorldline)?;
        let mut segments = Vec::with_capacity(events.len());
        let mut u = FourVelocity::at_rest();
        for (i, pair) in events.windows(2).enumerate() {
            let step = pair[1] - pair[0];
            if step.interval() >= 0.0 {
                return Err(SpacetimeError::SpacelikeSegment(i));
            }
            if step.t < 0.0 {
                return Err(SpacetimeError::PastDirected(i));
            }
            u = FourVelocity::new(step * (1.0 / (-step.interval()).sqrt()))?;
            segments.push((pair[0], u));
        }
        segments.push((*events.last().unwrap_or(&first), u));
        Self::new(segments)
    }

    pub fn segments(&self) -> &[(FourVector, FourVelocity)] {
        &self.segments
    }

    pub fn start(&self) -> FourVector {
        self.segments[0].0
    }

    pub fn end(&self) -> FourVector {
        self.segments[self.segments.len() - 1].0
    }

    pub fn transform(&self, map: &LorentzMap) -> Worldline {
        Worldline {
            segments: self
                .segments
                .iter()
                .map(|(x, u)| (map.apply_event(*x), u.transform(map)))
                .collect(),
        }
    }
}

/// Total Lorentz length of a worldline.
pub fn proper_time(w: &Worldline) -> f64 {
    w.segments
        .windows(2)
        .map(|pair| (-(pair[1].0 - pair[0].0).interval()).max(0.0).sqrt())
        .sum()
}

/// Strictly timelike separation; coincident and null-separated events are not.
pub fn is_timelike_separated(x1: FourVector, x2: FourVector) -> bool {
    (x1 - x2).interval() < 0.0
}

/// `u . (x1 - x2)`; zero when the two events are simultaneous for the
/// comoving observers with four-velocity `u`.
pub fn synchronization_gap(u: FourVelocity, x1: FourVector, x2: FourVector) -> f64 {
    minkowski_dot(u.vector(), x1 - x2)
}

/// Relative phase `omega (u_A . x1 - u_B . x2) + delta` of a distributed
/// singlet between Alice's event `x1` and Bob's event `x2`. Not wrapped.
pub fn phi_delta(u_a: FourVelocity, u_b: FourVelocity, x1: FourVector, x2: FourVector, omega: f64, delta: f64) -> f64 {
    omega * (minkowski_dot(u_a.vector(), x1) - minkowski_dot(u_b.vector(), x2)) + delta
}

/// The two-point phase function of a singlet shared by observers moving
/// with `u_a` and `u_b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPointPhase {
    pub u_a: FourVelocity,
    pub u_b: FourVelocity,
    pub omega: f64,
    pub delta: f64,
}

impl TwoPointPhase {
    pub fn comoving(u: FourVelocity, omega: f64, delta: f64) -> Self {
        TwoPointPhase {
            u_a: u,
            u_b: u,
            omega,
            delta,
        }
    }

    pub fn is_comoving(&self) -> bool {
        (self.u_a.vector() - self.u_b.vector()).max_abs() <= GEOMETRY_TOL
    }

    pub fn value(&self, x1: FourVector, x2: FourVector) -> f64 {
        phi_delta(self.u_a, self.u_b, x1, x2, self.omega, self.delta)
    }

    /// Value reduced into `(-pi, pi]`.
    pub fn wrapped(&self, x1: FourVector, x2: FourVector) -> f64 {
        wrap_phase(self.value(x1, x2))
    }

    /// Same phase function seen from the frame produced by `map`. Only the
    /// linear part acts on the velocities.
    pub fn transform(&self, map: &LorentzMap) -> TwoPointPhase {
        TwoPointPhase {
            u_a: self.u_a.transform(map),
            u_b: self.u_b.transform(map),
            ..*self
        }
    }

    /// Gradient of the value with respect to a common translation of both
    /// events, as a vector `g` with `shift = g . a`.
    pub fn translation_gradient(&self) -> FourVector {
        (self.u_a.vector() - self.u_b.vector()) * self.omega
    }

    /// A translation `a` changing the value by exactly `shift` (up to
    /// rounding), or `None` when the value is translation invariant.
    pub fn translation_with_shift(&self, shift: f64) -> Option<FourVector> {
        let g = self.translation_gradient();
        let norm = g.interval();
        // g is spacelike whenever u_a != u_b, so g.g > 0
        if norm.is_nan() || norm <= GEOMETRY_TOL * GEOMETRY_TOL {
            return None;
        }
        Some(g * (shift / norm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= GEOMETRY_TOL * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn dot_examples() {
        let rest = FourVector::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(rest, rest), -1.0);
        let null = FourVector::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_dot(null, null), 0.0);
        assert_eq!(
            minkowski_dot(FourVector::new(2.0, 1.0, 0.0, 0.0), FourVector::new(1.0, 0.0, 1.0, 0.0)),
            -2.0
        );
    }

    #[test]
    fn four_velocity_validation() {
        assert!(FourVelocity::new(FourVector::new(1.0, 0.1, 0.0, 0.0)).is_err());
        assert!(FourVelocity::new(FourVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(matches!(
            FourVelocity::from_three_velocity([0.8, 0.7, 0.0]),
            Err(SpacetimeError::Superluminal(_))
        ));
        let u = FourVelocity::from_three_velocity([0.6, 0.0, 0.0]).unwrap();
        assert!(close(u.gamma(), 1.25));
        assert!(close(u.vector().interval(), -1.0));
    }

    #[test]
    fn wave_vector_examples() {
        let rest = FourVelocity::at_rest();
        let w = wave_vectors(rest, 2.0, 0.0).unwrap();
        assert_eq!(w.k0, FourVector::new(2.0, 0.0, 0.0, 0.0));
        assert_eq!(w.k0, w.k1);
        let w = wave_vectors(rest, 1.0, 0.5).unwrap();
        assert_eq!(w.k1, FourVector::new(1.5, 0.0, 0.0, 0.0));
        let moving = FourVelocity::from_three_velocity([0.3, -0.5, 0.2]).unwrap();
        let w = wave_vectors(moving, 1.0, 0.5).unwrap();
        assert!(close(w.k1.interval(), -(1.5f64).powi(2)));
        assert!(close(w.k0.interval(), -1.0));
        assert!(matches!(
            wave_vectors(rest, 0.0, 1.0),
            Err(SpacetimeError::NonPositiveMass(_))
        ));
        assert!(matches!(
            wave_vectors(rest, 1.0, -1.0),
            Err(SpacetimeError::NegativeGap(_))
        ));
    }

    #[test]
    fn plane_wave_phase_examples() {
        let k = FourVector::new(3.0, 1.0, -2.0, 0.5);
        assert_eq!(plane_wave_phase(k, FourVector::ZERO), 0.0);
        assert_eq!(
            plane_wave_phase(FourVector::new(2.0, 0.0, 0.0, 0.0), FourVector::new(1.5, 0.0, 0.0, 0.0)),
            -3.0
        );
    }

    #[test]
    fn phi_delta_examples() {
        let u = FourVelocity::at_rest();
        let (omega, delta, tau) = (1.7, 0.4, 0.9);
        let x = FourVector::new(0.3, 1.0, 2.0, -1.0);
        assert!(close(phi_delta(u, u, x, x, omega, delta), delta));
        let x2 = FourVector::new(0.2, 4.0, 0.0, 0.0);
        let x1 = x2 + FourVector::new(tau, 0.0, 0.0, 0.0);
        assert!(close(phi_delta(u, u, x1, x2, omega, delta), -omega * tau + delta));
    }

    #[test]
    fn non_comoving_translation_shift() {
        let phase = TwoPointPhase {
            u_a: FourVelocity::at_rest(),
            u_b: FourVelocity::from_three_velocity([0.2, 0.1, 0.0]).unwrap(),
            omega: 2.0,
            delta: 0.3,
        };
        let a = phase.translation_with_shift(0.5).unwrap();
        let (x1, x2) = (FourVector::new(1.0, 0.0, 0.0, 0.0), FourVector::new(0.5, 1.0, 0.0, 0.0));
        let shifted = phase.value(x1 + a, x2 + a) - phase.value(x1, x2);
        assert!((shifted - 0.5).abs() < 1e-12);
        assert!(TwoPointPhase::comoving(FourVelocity::at_rest(), 2.0, 0.3)
            .translation_with_shift(0.5)
            .is_none());
    }

    #[test]
    fn proper_time_examples() {
        let rest = Worldline::inertial(FourVector::ZERO, FourVelocity::at_rest(), 4.0).unwrap();
        assert!(close(proper_time(&rest), 4.0));
        let v = 0.6;
        let t = 5.0;
        let moving = Worldline::through_events(&[FourVector::ZERO, FourVector::new(t, v * t, 0.0, 0.0)]).unwrap();
        assert!(close(proper_time(&moving), t * (1.0 - v * v).sqrt()));
        let spacelike = Worldline::through_events(&[FourVector::ZERO, FourVector::new(1.0, 2.0, 0.0, 0.0)]);
        assert!(matches!(spacelike, Err(SpacetimeError::SpacelikeSegment(0))));
        let wrong_u = Worldline::new(vec![
            (FourVector::ZERO, FourVelocity::at_rest()),
            (FourVector::new(2.0, 1.0, 0.0, 0.0), FourVelocity::at_rest()),
        ]);
        assert!(matches!(wrong_u, Err(SpacetimeError::VelocityMismatch(0))));
    }

    #[test]
    fn twin_paradox_ordering() {
        let home = Worldline::through_events(&[FourVector::ZERO, FourVector::new(10.0, 0.0, 0.0, 0.0)]).unwrap();
        let trip = Worldline::through_events(&[
            FourVector::ZERO,
            FourVector::new(5.0, 4.0, 0.0, 0.0),
            FourVector::new(10.0, 0.0, 0.0, 0.0),
        ])
        .unwrap();
        assert!(close(proper_time(&home), 10.0));
        assert!(close(proper_time(&trip), 6.0));
    }

    #[test]
    fn timelike_and_sync_examples() {
        let x = FourVector::new(1.0, 2.0, 3.0, 4.0);
        assert!(!is_timelike_separated(x, x));
        assert!(is_timelike_separated(x + FourVector::new(1.0, 0.5, 0.0, 0.0), x));
        assert!(!is_timelike_separated(x + FourVector::new(1.0, 2.0, 0.0, 0.0), x));
        let u = FourVelocity::at_rest();
        assert_eq!(synchronization_gap(u, x, x), 0.0);
        assert_eq!(synchronization_gap(u, x + FourVector::new(0.0, 5.0, 0.0, 0.0), x), 0.0);
        let tau = 0.75;
        assert_eq!(synchronization_gap(u, x + FourVector::new(tau, 3.0, 0.0, 0.0), x), -tau);
    }

    #[test]
    fn rotation_and_boost_are_lorentz() {
        let r = LorentzMap::rotation([1.0, 2.0, -0.5], 0.7).unwrap();
        let b = LorentzMap::boost([0.5, -0.3, 0.6]).unwrap();
        assert!(r.metric_deviation() < 1e-12);
        assert!(b.metric_deviation() < 1e-12);
        assert!(b.compose(&r).metric_deviation() < 1e-12);
        assert!(matches!(
            LorentzMap::rotation([0.0; 3], 1.0),
            Err(SpacetimeError::ZeroAxis)
        ));
        let boosted = FourVelocity::at_rest().transform(&b);
        let expected = FourVelocity::from_three_velocity([0.5, -0.3, 0.6]).unwrap();
        assert!((boosted.vector() - expected.vector()).max_abs() < 1e-12);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let m1 = LorentzMap::boost([0.2, 0.0, 0.1])
            .unwrap()
            .with_translation(FourVector::new(1.0, 2.0, 3.0, 4.0));
        let m2 = LorentzMap::rotation([0.0, 0.0, 1.0], 1.2)
            .unwrap()
            .with_translation(FourVector::new(-1.0, 0.5, 0.0, 2.0));
        let x = FourVector::new(0.3, -0.7, 1.1, 2.0);
        let a = m1.compose(&m2).apply_event(x);
        let b = m1.apply_event(m2.apply_event(x));
        assert!((a - b).max_abs() < 1e-12);
    }

    fn velocity() -> impl Strategy<Value = [f64; 3]> {
        (
            0.0f64..0.99,
            0.0f64..std::f64::consts::PI,
            0.0f64..(2.0 * std::f64::consts::PI),
        )
            .prop_map(|(s, th, ph)| [s * th.sin() * ph.cos(), s * th.sin() * ph.sin(), s * th.cos()])
    }

    fn event() -> impl Strategy<Value = FourVector> {
        (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0)
            .prop_map(|(t, x, y, z)| FourVector::new(t, x, y, z))
    }

    proptest! {
        #[test]
        fn plane_wave_phase_is_invariant(v in velocity(), axis in velocity(), angle in -3.0f64..3.0, k in event(), x in event()) {
            let axis = if axis.iter().all(|c| *c == 0.0) { [0.0, 0.0, 1.0] } else { axis };
            let map = LorentzMap::boost(v).unwrap().compose(&LorentzMap::rotation(axis, angle).unwrap());
            let before = plane_wave_phase(k, x);
            let after = plane_wave_phase(map.apply_vector(k), map.apply_vector(x));
            let gamma2 = 1.0 / (1.0 - v.iter().map(|c| c * c).sum::<f64>());
            prop_assert!((before - after).abs() <= GEOMETRY_TOL * (1.0 + k.max_abs() * x.max_abs()) * gamma2);
        }

        #[test]
        fn proper_time_is_invariant(v in velocity(), w in velocity(), shift in event(), dur in 0.1f64..5.0) {
            let u = FourVelocity::from_three_velocity(w).unwrap();
            let line = Worldline::inertial(FourVector::ZERO, u, dur).unwrap();
            let map = LorentzMap::boost(v).unwrap().with_translation(shift);
            prop_assert!((proper_time(&line.transform(&map)) - dur).abs() <= GEOMETRY_TOL * (1.0 + dur));
        }

        #[test]
        fn comoving_phase_ignores_translation(w in velocity(), x1 in event(), x2 in event(), a in event(), omega in 0.0f64..5.0, delta in -3.0f64..3.0) {
            let phase = TwoPointPhase::comoving(FourVelocity::from_three_velocity(w).unwrap(), omega, delta);
            let before = phase.value(x1, x2);
            let after = phase.value(x1 + a, x2 + a);
            let scale = omega * phase.u_a.gamma() * (x1.max_abs() + x2.max_abs() + 2.0 * a.max_abs());
            prop_assert!((before - after).abs() <= GEOMETRY_TOL * (1.0 + scale));
        }
    }
}

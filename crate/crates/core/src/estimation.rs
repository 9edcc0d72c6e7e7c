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

//! Phase estimation from population statistics.
//!
//! Every readout in this crate is a binary outcome whose bias is linear in
//! `(cos phi, sin phi)` for the observable `phi = -omega tau + delta`:
//!
//! `P(0) - P(1) = a cos(phi) + b sin(phi)`
//!
//! with `(a, b)` fixed by the public preparation. A set of samples with at
//! least two independent rows determines `phi` by weighted least squares.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::harness::{self, HarnessError, Scenario};
use crate::phase::{phase_difference, wrap_phase};

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("fringe sample {0} has no shots")]
    EmptySample(usize),
    #[error("need at least two fringe samples, got {0}")]
    TooFewSamples(usize),
    #[error("fringe samples do not span both quadratures")]
    DegenerateDesign,
    #[error("omega = {0}: the clock offset is unobservable with degenerate qubit levels")]
    DegenerateQubit(f64),
    #[error("omega must be positive and finite, got {0}")]
    InvalidOmega(f64),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

/// Excited-state population after a Ramsey sequence of length `interval`:
/// `sin^2(omega T / 2)`.
pub fn ramsey_excited_probability(omega: f64, interval: f64) -> f64 {
    (omega * interval / 2.0).sin().powi(2)
}

/// What was prepared before a binary readout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preparation {
    /// `alpha|0> + beta|1>` teleported to Alice and read out after a
    /// Hadamard. `conjugate` marks `Phi` Bell branches, which deliver the
    /// complex-conjugate relative phase.
    Teleported {
        alpha: Complex64,
        beta: Complex64,
        conjugate: bool,
    },
    /// Measurement-based protocol; `phase` is `omega (t_A - t_B)` for the
    /// scheduled clock readings. Outcome 0 counts rounds where Alice's bit
    /// differs from Bob's `+-` index.
    ClockDelay { phase: f64 },
}

impl Preparation {
    /// Coefficients `(a, b)` of the bias model.
    pub fn model_row(&self) -> (f64, f64) {
        match *self {
            Preparation::Teleported { alpha, beta, conjugate } => {
                // P(0) = 1/2 + Re(conj(alpha) beta e^{+-i phi})
                let z = alpha.conj() * beta;
                let b = if conjugate { 2.0 * z.im } else { -2.0 * z.im };
                (2.0 * z.re, b)
            }
            Preparation::ClockDelay { phase } => (phase.cos(), phase.sin()),
        }
    }

    /// Predicted `P(0)` at phase `phi`.
    pub fn probability_zero(&self, phi: f64) -> f64 {
        let (a, b) = self.model_row();
        0.5 * (1.0 + a * phi.cos() + b * phi.sin())
    }
}

/// Outcome counts for one preparation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FringeSample {
    pub preparation: Preparation,
    pub n0: u64,
    pub n1: u64,
}

impl FringeSample {
    pub fn total(&self) -> u64 {
        self.n0 + self.n1
    }

    /// Sample whose counts equal the exact expectation for `phi` at `shots`
    /// (fractional counts rounded). Test and calibration aid.
    pub fn expected(preparation: Preparation, phi: f64, shots: u64) -> Self {
        let n0 = (preparation.probability_zero(phi) * shots as f64).round() as u64;
        FringeSample {
            preparation,
            n0,
            n1: shots - n0,
        }
    }
}

/// Accumulates binary outcomes per preparation.
#[derive(Clone, Debug, Default)]
pub struct FringeTally {
    samples: Vec<FringeSample>,
}

impl FringeTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, preparation: Preparation, outcome: u8) {
        let idx = match self.samples.iter().position(|s| s.preparation == preparation) {
            Some(i) => i,
            None => {
                self.samples.push(FringeSample {
                    preparation,
                    n0: 0,
                    n1: 0,
                });
                self.samples.len() - 1
            }
        };
        if outcome == 0 {
            self.samples[idx].n0 += 1;
        } else {
            self.samples[idx].n1 += 1;
        }
    }

    pub fn samples(&self) -> &[FringeSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<FringeSample> {
        self.samples
    }
}

/// Estimated phase observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseEstimate {
    /// In `(-pi, pi]`.
    pub phi_hat: f64,
    pub stderr: f64,
    /// Fitted `(cos phi, sin phi)` quadratures before normalization.
    pub quadratures: (f64, f64),
    pub shots: u64,
}

/// Weighted least-squares phase fit over fringe samples.
///
/// With one `alpha = beta = 1/sqrt 2` sample and one `beta = i/sqrt 2`
/// sample this is the direct two-quadrature inversion `atan2(s, c)`. The
/// standard error comes from binomial variances at the fitted phase
/// propagated through the fit (delta method), so it scales as `1/sqrt(M)`.
pub fn estimate_phase(samples: &[FringeSample]) -> Result<PhaseEstimate, EstimationError> {
    if samples.len() < 2 {
        return Err(EstimationError::TooFewSamples(samples.len()));
    }
    if let Some(i) = samples.iter().position(|s| s.total() == 0) {
        return Err(EstimationError::EmptySample(i));
    }

    let mut normal = [[0.0; 2]; 2];
    let mut rhs = [0.0; 2];
    for s in samples {
        let (a, b) = s.preparation.model_row();
        let m = s.total() as f64;
        let bias = (s.n0 as f64 - s.n1 as f64) / m;
        normal[0][0] += m * a * a;
        normal[0][1] += m * a * b;
        normal[1][1] += m * b * b;
        rhs[0] += m * a * bias;
        rhs[1] += m * b * bias;
    }
    normal[1][0] = normal[0][1];
    let det = normal[0][0] * normal[1][1] - normal[0][1] * normal[1][0];
    let trace = normal[0][0] + normal[1][1];
    if det.is_nan() || det <= 1e-12 * trace * trace {
        return Err(EstimationError::DegenerateDesign);
    }
    let inv = [
        [normal[1][1] / det, -normal[0][1] / det],
        [-normal[1][0] / det, normal[0][0] / det],
    ];
    let c = inv[0][0] * rhs[0] + inv[0][1] * rhs[1];
    let s = inv[1][0] * rhs[0] + inv[1][1] * rhs[1];
    let phi_hat = wrap_phase(s.atan2(c));

    // Sandwich covariance of (c, s) with per-sample binomial variance at the
    // fitted phase, floored at one count.
    let mut meat = [[0.0; 2]; 2];
    for smp in samples {
        let (a, b) = smp.preparation.model_row();
        let m = smp.total() as f64;
        let mu = a * phi_hat.cos() + b * phi_hat.sin();
        let var = (1.0 - mu * mu).max(1.0 / m);
        meat[0][0] += m * var * a * a;
        meat[0][1] += m * var * a * b;
        meat[1][1] += m * var * b * b;
    }
    meat[1][0] = meat[0][1];
    let cov = sandwich(&inv, &meat);
    let r2 = c * c + s * s;
    let stderr = if r2 > 0.0 {
        let g = [-s / r2, c / r2];
        let var = g[0] * (cov[0][0] * g[0] + cov[0][1] * g[1]) + g[1] * (cov[1][0] * g[0] + cov[1][1] * g[1]);
        var.max(0.0).sqrt()
    } else {
        // no phase information at all
        PI / 3f64.sqrt()
    };
    let shots = samples.iter().map(FringeSample::total).sum();
    Ok(PhaseEstimate {
        phi_hat,
        stderr: stderr.max(f64::MIN_POSITIVE),
        quadratures: (c, s),
        shots,
    })
}

fn sandwich(bread: &[[f64; 2]; 2], meat: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mul = |x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]| {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        out
    };
    mul(&mul(bread, meat), bread)
}

/// The set of offsets `{tau_hat + k period}` compatible with a phase estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffsetClass {
    /// Representative in `(-period/2, period/2]`.
    pub tau_hat: f64,
    /// `2 pi / omega`.
    pub period: f64,
}

impl OffsetClass {
    /// Distance from `tau` to the nearest member of the class.
    pub fn distance_to(&self, tau: f64) -> f64 {
        let phase = 2.0 * PI * (tau - self.tau_hat) / self.period;
        phase_difference(phase, 0.0).abs() * self.period / (2.0 * PI)
    }

    pub fn contains(&self, tau: f64, tol: f64) -> bool {
        self.distance_to(tau) <= tol
    }
}

/// Clock offset class from a phase estimate, assuming the transport phase is
/// `assumed_delta`: `tau_hat = (assumed_delta - phi_hat) / omega` modulo
/// `2 pi / omega`.
pub fn offset_class_from_phase(
    est: &PhaseEstimate,
    omega: f64,
    assumed_delta: f64,
) -> Result<OffsetClass, EstimationError> {
    if omega == 0.0 {
        return Err(EstimationError::DegenerateQubit(omega));
    }
    if omega <= 0.0 || !omega.is_finite() {
        return Err(EstimationError::InvalidOmega(omega));
    }
    Ok(OffsetClass {
        tau_hat: wrap_phase(assumed_delta - est.phi_hat) / omega,
        period: 2.0 * PI / omega,
    })
}

/// Transport phase from a phase estimate when the clock offset is known:
/// `delta_hat = phi_hat + omega * known_tau`. Valid for `omega = 0`.
pub fn purify_phase(est: &PhaseEstimate, omega: f64, known_tau: f64) -> f64 {
    wrap_phase(est.phi_hat + omega * known_tau)
}

/// Separation of two estimates in units of their combined standard error.
pub fn phase_separation_sigma(a: &PhaseEstimate, b: &PhaseEstimate) -> f64 {
    phase_difference(a.phi_hat, b.phi_hat).abs() / (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
}

/// Runs the scenario twice under its seed, once as given and once with the
/// gauge-shifted hidden pair `(tau + shift, delta + omega * shift)`, and
/// reports whether the two record tables are byte-identical.
pub fn identifiability_audit(scenario: &Scenario, gauge_shift: f64, seed: u64) -> Result<bool, EstimationError> {
    let base = scenario.with_seed(seed).resolved()?;
    let shifted = base.gauge_shifted(gauge_shift);
    Ok(harness::records_identical(&base, &shifted)?)
}

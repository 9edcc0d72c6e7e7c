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

//! Simulation and analysis of quantum clock synchronization with distributed
//! energetic singlets.
//!
//! The crate is layered bottom-up:
//!
//! * [`qstate`]: exact state vectors over small labelled qubit registers.
//! * [`spacetime`]: Minkowski four-vectors, Lorentz maps, worldlines and the
//!   invariant two-point phase of a distributed singlet.
//! * [`protocols`]: singlet sources with a hidden transport phase, the
//!   measurement-based clock synchronization protocol and its teleportation
//!   variant.
//! * [`estimation`]: Ramsey fringe model, two-quadrature phase estimation,
//!   offset equivalence classes and the gauge identifiability audit.
//! * [`harness`]: scenario files, deterministic batch execution and CSV output.
//!
//! Every observable produced by the protocols depends on the clock offset
//! `tau` and the transport phase `delta` only through `-omega * tau + delta`.

pub mod estimation;
pub mod harness;
pub mod phase;
pub mod protocols;
pub mod qstate;
pub mod rng;
pub mod spacetime;

pub use num_complex::Complex64;

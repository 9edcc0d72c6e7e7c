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

//! Experiment front-end: scenario files, seeded batch runs, CSV tables.
//!
//! Per-trial randomness comes from [`trial_rng`](crate::rng::trial_rng)
//! `(seed, trial)`; scenario-wide draws (the heralded transport phase) use
//! the reserved stream [`SCENARIO_STREAM`](crate::rng::SCENARIO_STREAM).
//! Trials run in parallel and are assembled by index, so the table does not
//! depend on scheduling.

mod config;
mod runner;
mod table;

use thiserror::Error;

use crate::protocols::ProtocolError;

pub use config::{
    load_scenario, parse_scenario, BasicParams, DeltaSource, Hidden, Nature, PhaseMapParams, Protocol, PublicView,
    RamseyGrid, Scenario, TeleportParams,
};
pub use runner::{basic_trial, fringe_samples, ramsey_point, records_identical, run, teleport_trial, TeleportTrial};
pub use table::{emit_csv, read_csv, write_csv, ResultTable};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: ProtocolError,
    },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    pub(crate) fn invalid(field: &str, message: impl Into<String>) -> Self {
        HarnessError::Invalid {
            field: field.to_owned(),
            message: message.into(),
        }
    }

    /// Process exit code for the error category: 2 parse, 3 validation,
    /// 4 runtime (including I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } => 2,
            HarnessError::Invalid { .. } => 3,
            HarnessError::Io { .. }
            | HarnessError::Trial { .. }
            | HarnessError::Protocol(_)
            | HarnessError::Runtime(_) => 4,
        }
    }
}

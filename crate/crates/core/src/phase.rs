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

//! Phase arithmetic on the principal branch `(-pi, pi]`.

use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Reduces `phase` into `(-pi, pi]`. Values on the branch cut map to `+pi`.
pub fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase - TWO_PI * ((phase - PI) / TWO_PI).ceil();
    // ceil() can land one ulp outside the interval for huge inputs
    if wrapped <= -PI {
        wrapped + TWO_PI
    } else if wrapped > PI {
        wrapped - TWO_PI
    } else {
        wrapped
    }
}

/// Signed distance `a - b` on the circle, in `(-pi, pi]`.
pub fn phase_difference(a: f64, b: f64) -> f64 {
    wrap_phase(a - b)
}

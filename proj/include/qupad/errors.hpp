// Copyright 2026 The QuPAD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qupad {

/// Bad argument to a numerical routine (index out of range, dimension mismatch, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition was violated by the caller.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Gate kind has no parameter-shift rule.
struct UnsupportedGateError : ArgumentError {
    using ArgumentError::ArgumentError;
};

/// Problem too large for a dense representation.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

/// Missing or inconsistent configuration: unknown coupling pair, missing dsr or LUT entry, bad file.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed JSON document; the message carries the offending field path.
struct SchemaError : ConfigError {
    using ConfigError::ConfigError;
};

/// Numerical failure: divergence, non-finite values, failed fit.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stretching would push the pulse amplitude past the AWG bound |A| <= 1.
struct AmplitudeSaturation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fit design cannot identify the error model. `axis` names what the grid is missing.
struct IllPosedFit : NumericError {
    IllPosedFit(const std::string &what, std::string missing_axis)
        : NumericError(what), axis(std::move(missing_axis)) {}
    std::string axis;
};

/// Training produced a non-finite loss. Carries the last parameters whose loss was finite.
struct DivergenceError : NumericError {
    DivergenceError(const std::string &what, std::vector<double> last_finite)
        : NumericError(what), last_finite_params(std::move(last_finite)) {}
    std::vector<double> last_finite_params;
};

/// No feasible calibration point was found.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qupad

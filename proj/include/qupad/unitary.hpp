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

#include <Eigen/Dense>

#include "qupad/circuit.hpp"
#include "qupad/statevector.hpp"

namespace qupad {

inline constexpr int kMaxUnitaryQubits = 6;

/// Dense unitary of the circuit, built column by column from basis states.
inline Eigen::MatrixXcd unitary_of(const Circuit &c, std::span<const double> params) {
    if (c.n > kMaxUnitaryQubits) {
        throw CapacityError("unitary_of supports at most " + std::to_string(kMaxUnitaryQubits) + " qubits");
    }
    c.validate();
    const std::size_t dim = std::size_t{1} << c.n;
    Eigen::MatrixXcd u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector s = StateVector::basis(c.n, col);
        for (const Gate &g : c.gates) {
            apply_gate_inplace(s, g.kind, g.qubits, g.param.resolve(params));
        }
        for (std::size_t row = 0; row < dim; ++row) {
            u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = s.amps[row];
        }
    }
    return u;
}

inline Eigen::MatrixXcd unitary_of(const Circuit &c) { return unitary_of(c, c.params); }

/// min over phi of ||a - e^{i phi} b||_F.
inline double phase_aligned_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    const cplx overlap = (b.adjoint() * a).trace();
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
    return (a - phase * b).norm();
}

}  // namespace qupad

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

#include <span>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/statevector.hpp"

namespace qupad {

/// <obs> of the circuit state at `params`.
inline double expectation_value(const Circuit &c, const Observable &obs, std::span<const double> params) {
    return expectation(simulate(c, params), obs);
}

/// Gradient of <obs> by the two-term shift rule, ½[f(θ+π/2) − f(θ−π/2)], applied to each
/// gate occurrence separately so shared parameters accumulate correctly.
inline std::vector<double> parameter_shift_gradient(const Circuit &c, const Observable &obs,
                                                    std::span<const double> params) {
    c.validate();
    std::vector<double> grad(params.size(), 0.0);
    Circuit shifted = c;
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const Gate &g = c.gates[k];
        if (!g.param.is_trainable()) {
            continue;
        }
        if (!is_parameterized(g.kind)) {
            throw UnsupportedGateError("no shift rule for gate kind " + std::string(gate_name(g.kind)));
        }
        const double theta = g.param.resolve(params);
        shifted.gates[k].param = Param::constant(theta + kHalfPi);
        const double plus = expectation_value(shifted, obs, params);
        shifted.gates[k].param = Param::constant(theta - kHalfPi);
        const double minus = expectation_value(shifted, obs, params);
        shifted.gates[k].param = g.param;
        grad[static_cast<std::size_t>(g.param.index)] += 0.5 * (plus - minus);
    }
    return grad;
}

namespace detail {

inline void apply_inverse(StateVector &s, const Gate &g, double theta) {
    switch (g.kind) {
        case GateKind::SX:
            apply_1q(s, g.qubits[0], {cplx{0.5, -0.5}, cplx{0.5, 0.5}, cplx{0.5, 0.5}, cplx{0.5, -0.5}});
            return;
        case GateKind::Rz:
        case GateKind::Rx:
        case GateKind::Ry:
        case GateKind::Rzx: apply_gate_inplace(s, g.kind, g.qubits, -theta); return;
        default: apply_gate_inplace(s, g.kind, g.qubits, theta);  // self-inverse
    }
}

// -i G |s> for the rotation generator G (eigenvalues ±1/2).
inline StateVector apply_minus_i_generator(const StateVector &s, const Gate &g) {
    StateVector out = s;
    switch (g.kind) {
        case GateKind::Rz: apply_pauli(out, g.qubits[0], 'Z'); break;
        case GateKind::Rx: apply_pauli(out, g.qubits[0], 'X'); break;
        case GateKind::Ry: apply_pauli(out, g.qubits[0], 'Y'); break;
        case GateKind::Rzx:
            apply_pauli(out, g.qubits[0], 'Z');
            apply_pauli(out, g.qubits[1], 'X');
            break;
        default: throw UnsupportedGateError("gate kind has no generator: " + std::string(gate_name(g.kind)));
    }
    for (cplx &a : out.amps) {
        a *= cplx{0.0, -0.5};
    }
    return out;
}

}  // namespace detail

/// Exact gradient of <obs> by reverse-mode (adjoint) differentiation on the statevector.
/// One forward and one backward sweep regardless of the parameter count.
inline std::vector<double> adjoint_gradient(const Circuit &c, const Observable &obs, std::span<const double> params) {
    c.validate();
    std::vector<double> grad(params.size(), 0.0);
    StateVector psi = simulate(c, params);
    StateVector lambda = apply_observable(psi, obs);
    for (std::size_t k = c.gates.size(); k-- > 0;) {
        const Gate &g = c.gates[k];
        const double theta = g.param.resolve(params);
        if (g.param.is_trainable()) {
            const StateVector mu = detail::apply_minus_i_generator(psi, g);
            grad[static_cast<std::size_t>(g.param.index)] += 2.0 * inner(lambda, mu).real();
        }
        detail::apply_inverse(psi, g, theta);
        detail::apply_inverse(lambda, g, theta);
    }
    return grad;
}

}  // namespace qupad

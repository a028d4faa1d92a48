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

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qupad/errors.hpp"

namespace qupad {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Representative of `theta` in (-pi, pi].
inline double wrap_angle(double theta) {
    double r = std::remainder(theta, 2.0 * kPi);
    if (r <= -kPi) {
        r += 2.0 * kPi;
    }
    return r;
}

/// Gate set. Rz is virtual (frame change, zero duration); Rx, Ry, SX, X and H are physical
/// single-qubit gates costing one fixed-length pulse; Rzx and CX are two-qubit gates.
enum class GateKind : std::uint8_t { Rz, Rx, Ry, SX, X, H, Rzx, CX, Measure };

inline std::string_view gate_name(GateKind k) {
    switch (k) {
        case GateKind::Rz: return "rz";
        case GateKind::Rx: return "rx";
        case GateKind::Ry: return "ry";
        case GateKind::SX: return "sx";
        case GateKind::X: return "x";
        case GateKind::H: return "h";
        case GateKind::Rzx: return "rzx";
        case GateKind::CX: return "cx";
        case GateKind::Measure: return "measure";
    }
    return "?";
}

inline std::optional<GateKind> gate_kind_from_name(std::string_view s) {
    for (auto k : {GateKind::Rz, GateKind::Rx, GateKind::Ry, GateKind::SX, GateKind::X, GateKind::H,
                   GateKind::Rzx, GateKind::CX, GateKind::Measure}) {
        if (gate_name(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

inline bool is_parameterized(GateKind k) {
    return k == GateKind::Rz || k == GateKind::Rx || k == GateKind::Ry || k == GateKind::Rzx;
}

inline bool is_two_qubit(GateKind k) { return k == GateKind::Rzx || k == GateKind::CX; }

/// Physical single-qubit gate, i.e. one that costs a drive pulse.
inline bool is_physical_single(GateKind k) {
    return k == GateKind::Rx || k == GateKind::Ry || k == GateKind::SX || k == GateKind::X || k == GateKind::H;
}

/// Angle source of a rotation gate: either a constant or an index into the parameter vector.
struct Param {
    int index = -1;
    double value = 0.0;

    static Param constant(double v) { return {-1, v}; }
    static Param trainable(int i) { return {i, 0.0}; }
    bool is_trainable() const { return index >= 0; }

    double resolve(std::span<const double> params) const {
        if (index < 0) {
            return value;
        }
        if (static_cast<std::size_t>(index) >= params.size()) {
            throw ArgumentError("parameter index " + std::to_string(index) + " out of range");
        }
        return params[static_cast<std::size_t>(index)];
    }

    bool operator==(const Param &) const = default;
};

/// Directed coupling pair. For Rzx/CX the Z (control) side is `control`, X side is `target`.
struct QubitPair {
    int control = 0;
    int target = 1;
    auto operator<=>(const QubitPair &) const = default;
    std::string str() const { return std::to_string(control) + "-" + std::to_string(target); }
};

struct Gate {
    GateKind kind = GateKind::Rz;
    std::vector<int> qubits;
    Param param;

    QubitPair pair() const { return {qubits.at(0), qubits.at(1)}; }
    bool operator==(const Gate &) const = default;
};

/// Gate-level program. Qubit 0 is the least significant bit of a basis-state index and the
/// rightmost character of a bitstring.
struct Circuit {
    int n = 0;
    std::vector<Gate> gates;
    std::vector<double> params;

    Circuit() = default;
    explicit Circuit(int num_qubits) : n(num_qubits) {}

    /// Appends a trainable parameter and returns a reference to it.
    Param new_param(double initial) {
        params.push_back(initial);
        return Param::trainable(static_cast<int>(params.size()) - 1);
    }

    Circuit &add(GateKind kind, std::vector<int> qubits, Param p = {}) {
        gates.push_back(Gate{kind, std::move(qubits), p});
        return *this;
    }
    Circuit &rz(int q, Param p) { return add(GateKind::Rz, {q}, p); }
    Circuit &rx(int q, Param p) { return add(GateKind::Rx, {q}, p); }
    Circuit &ry(int q, Param p) { return add(GateKind::Ry, {q}, p); }
    Circuit &rz(int q, double v) { return rz(q, Param::constant(v)); }
    Circuit &rx(int q, double v) { return rx(q, Param::constant(v)); }
    Circuit &ry(int q, double v) { return ry(q, Param::constant(v)); }
    Circuit &sx(int q) { return add(GateKind::SX, {q}); }
    Circuit &x(int q) { return add(GateKind::X, {q}); }
    Circuit &h(int q) { return add(GateKind::H, {q}); }
    Circuit &rzx(int control, int target, Param p) { return add(GateKind::Rzx, {control, target}, p); }
    Circuit &rzx(int control, int target, double v) { return rzx(control, target, Param::constant(v)); }
    Circuit &cx(int control, int target) { return add(GateKind::CX, {control, target}); }

    /// u3(theta, phi, lambda) through the virtual-Rz + SX basis, up to global phase.
    Circuit &u3(int q, double theta, double phi, double lambda) {
        rz(q, lambda);
        sx(q);
        rz(q, theta + kPi);
        sx(q);
        return rz(q, phi + kPi);
    }
    Circuit &u2(int q, double phi, double lambda) { return u3(q, kHalfPi, phi, lambda); }
    Circuit &u1(int q, double lambda) { return rz(q, lambda); }

    double angle(const Gate &g) const { return g.param.resolve(params); }

    /// Throws ArgumentError unless every qubit index is < n, every parameter index is
    /// < |params|, arities match the gate kinds, and two-qubit gates act on distinct qubits.
    void validate() const {
        if (n < 1) {
            throw ArgumentError("circuit must have at least one qubit");
        }
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const Gate &g = gates[i];
            const std::string where = "gate " + std::to_string(i) + " (" + std::string(gate_name(g.kind)) + ")";
            std::size_t arity = is_two_qubit(g.kind) ? 2 : 1;
            if (g.kind == GateKind::Measure ? g.qubits.empty() : g.qubits.size() != arity) {
                throw ArgumentError(where + ": wrong number of qubits");
            }
            for (int q : g.qubits) {
                if (q < 0 || q >= n) {
                    throw ArgumentError(where + ": qubit " + std::to_string(q) + " out of range");
                }
            }
            if (is_two_qubit(g.kind) && g.qubits[0] == g.qubits[1]) {
                throw ArgumentError(where + ": control and target must differ");
            }
            if (g.param.is_trainable() && static_cast<std::size_t>(g.param.index) >= params.size()) {
                throw ArgumentError(where + ": parameter index out of range");
            }
            if (g.param.is_trainable() && !is_parameterized(g.kind)) {
                throw ArgumentError(where + ": gate kind takes no parameter");
            }
        }
    }

    /// Distinct coupling pairs used by Rzx/CX gates, sorted.
    std::vector<QubitPair> pairs_used() const {
        std::vector<QubitPair> out;
        for (const Gate &g : gates) {
            if (is_two_qubit(g.kind)) {
                out.push_back(g.pair());
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Indices of parameters that drive at least one Rzx gate.
    std::vector<int> rzx_param_indices() const {
        std::vector<int> out;
        for (const Gate &g : gates) {
            if (g.kind == GateKind::Rzx && g.param.is_trainable()) {
                out.push_back(g.param.index);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool operator==(const Circuit &) const = default;
};

/// One weighted Pauli string. `paulis` has one character per qubit from {I, X, Y, Z};
/// like bitstrings, qubit 0 is the rightmost character.
struct PauliTerm {
    double coeff = 1.0;
    std::string paulis;

    char on(int qubit) const { return paulis[paulis.size() - 1 - static_cast<std::size_t>(qubit)]; }
    bool operator==(const PauliTerm &) const = default;
};

struct Observable {
    int n = 0;
    std::vector<PauliTerm> terms;

    void validate() const {
        for (const PauliTerm &t : terms) {
            if (static_cast<int>(t.paulis.size()) != n) {
                throw ArgumentError("Pauli string '" + t.paulis + "' does not have length " + std::to_string(n));
            }
            if (!std::isfinite(t.coeff)) {
                throw ArgumentError("non-finite observable coefficient");
            }
            for (char c : t.paulis) {
                if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                    throw ArgumentError("bad Pauli letter in '" + t.paulis + "'");
                }
            }
        }
    }

    /// Single-qubit Pauli `p` on `qubit`, coefficient `coeff`.
    static PauliTerm single(int n, int qubit, char p, double coeff = 1.0) {
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(n - 1 - qubit)] = p;
        return {coeff, s};
    }

    bool operator==(const Observable &) const = default;
};

}  // namespace qupad

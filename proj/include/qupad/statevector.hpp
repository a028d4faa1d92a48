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
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/errors.hpp"
#include "qupad/rng.hpp"

namespace qupad {

using cplx = std::complex<double>;

/// Maximum register size handled by the dense simulator.
inline constexpr int kMaxQubits = 14;

struct StateVector {
    int n = 0;
    std::vector<cplx> amps;

    StateVector() = default;
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(int num_qubits) : n(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw CapacityError("statevector supports 1.." + std::to_string(kMaxQubits) + " qubits");
        }
        amps.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
        amps[0] = 1.0;
    }

    static StateVector basis(int num_qubits, std::size_t index) {
        StateVector s(num_qubits);
        s.amps[0] = 0.0;
        s.amps.at(index) = 1.0;
        return s;
    }

    std::size_t dim() const { return amps.size(); }

    double norm() const {
        double s = 0.0;
        for (const cplx &a : amps) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) {
            p[i] = std::norm(amps[i]);
        }
        return p;
    }
};

inline cplx inner(const StateVector &a, const StateVector &b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.amps.size(); ++i) {
        s += std::conj(a.amps[i]) * b.amps[i];
    }
    return s;
}

/// Bitstring of basis index `i`; qubit 0 is the rightmost character.
inline std::string bitstring(std::size_t i, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q) {
        if ((i >> q) & 1U) {
            s[static_cast<std::size_t>(n - 1 - q)] = '1';
        }
    }
    return s;
}

inline std::size_t index_of_bitstring(const std::string &s) {
    std::size_t i = 0;
    const int n = static_cast<int>(s.size());
    for (int q = 0; q < n; ++q) {
        if (s[static_cast<std::size_t>(n - 1 - q)] == '1') {
            i |= std::size_t{1} << q;
        }
    }
    return i;
}

namespace detail {

using Mat2 = std::array<cplx, 4>;  // row-major

inline void apply_1q(StateVector &s, int q, const Mat2 &m) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < s.amps.size(); ++i) {
        if (i & bit) {
            continue;
        }
        const cplx a0 = s.amps[i];
        const cplx a1 = s.amps[i | bit];
        s.amps[i] = m[0] * a0 + m[1] * a1;
        s.amps[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

inline Mat2 single_qubit_matrix(GateKind kind, double theta) {
    const double c = std::cos(theta / 2.0);
    const double sn = std::sin(theta / 2.0);
    const cplx i1{0.0, 1.0};
    switch (kind) {
        case GateKind::Rz: return {std::exp(-i1 * (theta / 2.0)), 0.0, 0.0, std::exp(i1 * (theta / 2.0))};
        case GateKind::Rx: return {c, -i1 * sn, -i1 * sn, c};
        case GateKind::Ry: return {c, -sn, sn, c};
        case GateKind::SX: return {cplx{0.5, 0.5}, cplx{0.5, -0.5}, cplx{0.5, -0.5}, cplx{0.5, 0.5}};
        case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            return {r, r, r, -r};
        }
        default: throw ArgumentError("not a single-qubit gate: " + std::string(gate_name(kind)));
    }
}

/// exp(-i theta/2 Z_c X_t).
inline void apply_rzx(StateVector &s, int control, int target, double theta) {
    const double c = std::cos(theta / 2.0);
    const double sn = std::sin(theta / 2.0);
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < s.amps.size(); ++i) {
        if (i & tbit) {
            continue;
        }
        const double z = (i & cbit) ? -1.0 : 1.0;
        const cplx a0 = s.amps[i];
        const cplx a1 = s.amps[i | tbit];
        const cplx k{0.0, -z * sn};
        s.amps[i] = c * a0 + k * a1;
        s.amps[i | tbit] = c * a1 + k * a0;
    }
}

inline void apply_cx(StateVector &s, int control, int target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < s.amps.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(s.amps[i], s.amps[i | tbit]);
        }
    }
}

inline void check_qubits(const StateVector &s, std::span<const int> qubits) {
    for (int q : qubits) {
        if (q < 0 || q >= s.n) {
            throw ArgumentError("qubit index " + std::to_string(q) + " out of range for " + std::to_string(s.n) +
                                "-qubit state");
        }
    }
}

}  // namespace detail

/// Applies `kind` with rotation angle `theta` (ignored for fixed gates) in place.
inline void apply_gate_inplace(StateVector &s, GateKind kind, std::span<const int> qubits, double theta) {
    detail::check_qubits(s, qubits);
    switch (kind) {
        case GateKind::Measure: return;
        case GateKind::Rzx:
        case GateKind::CX:
            if (qubits.size() != 2 || qubits[0] == qubits[1]) {
                throw ArgumentError("two-qubit gate needs two distinct qubits");
            }
            if (kind == GateKind::Rzx) {
                detail::apply_rzx(s, qubits[0], qubits[1], theta);
            } else {
                detail::apply_cx(s, qubits[0], qubits[1]);
            }
            return;
        default:
            if (qubits.size() != 1) {
                throw ArgumentError("single-qubit gate needs one qubit");
            }
            detail::apply_1q(s, qubits[0], detail::single_qubit_matrix(kind, theta));
    }
}

/// U * state, with the gate angle resolved against `params`.
inline StateVector apply_gate(StateVector s, const Gate &g, std::span<const double> params = {}) {
    apply_gate_inplace(s, g.kind, g.qubits, g.param.resolve(params));
    return s;
}

/// Applies Pauli letter `p` on `qubit` in place.
inline void apply_pauli(StateVector &s, int qubit, char p) {
    switch (p) {
        case 'I': return;
        case 'X': detail::apply_1q(s, qubit, {0.0, 1.0, 1.0, 0.0}); return;
        case 'Y': detail::apply_1q(s, qubit, {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}); return;
        case 'Z': detail::apply_1q(s, qubit, {1.0, 0.0, 0.0, -1.0}); return;
        default: throw ArgumentError(std::string("bad Pauli letter ") + p);
    }
}

/// Runs the circuit from |0...0> with the given parameter vector.
inline StateVector simulate(const Circuit &c, std::span<const double> params) {
    StateVector s(c.n);
    for (const Gate &g : c.gates) {
        apply_gate_inplace(s, g.kind, g.qubits, g.param.resolve(params));
    }
    return s;
}

inline StateVector simulate(const Circuit &c) { return simulate(c, c.params); }

namespace detail {

struct PauliMasks {
    std::size_t x = 0;
    std::size_t z = 0;
    int y_count = 0;
};

inline PauliMasks masks_of(const PauliTerm &t, int n) {
    PauliMasks m;
    for (int q = 0; q < n; ++q) {
        const char p = t.on(q);
        const std::size_t bit = std::size_t{1} << q;
        if (p == 'X' || p == 'Y') {
            m.x |= bit;
        }
        if (p == 'Z' || p == 'Y') {
            m.z |= bit;
        }
        if (p == 'Y') {
            ++m.y_count;
        }
    }
    return m;
}

// P|i> = phase(i) |i ^ x> with phase(i) = i^{#Y} (-1)^{popcount(i & z)}.
inline cplx pauli_phase(const PauliMasks &m, std::size_t i) {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx base = kIPow[m.y_count % 4];
    return (std::popcount(i & m.z) & 1) ? -base : base;
}

}  // namespace detail

/// sum_i c_i <state|P_i|state>.
inline double expectation(const StateVector &s, const Observable &obs) {
    if (obs.n != s.n) {
        throw ArgumentError("observable acts on " + std::to_string(obs.n) + " qubits, state has " +
                            std::to_string(s.n));
    }
    obs.validate();
    cplx total = 0.0;
    for (const PauliTerm &t : obs.terms) {
        const auto m = detail::masks_of(t, s.n);
        cplx acc = 0.0;
        for (std::size_t i = 0; i < s.amps.size(); ++i) {
            acc += std::conj(s.amps[i ^ m.x]) * detail::pauli_phase(m, i) * s.amps[i];
        }
        total += t.coeff * acc;
    }
    return total.real();
}

/// obs * state (not normalized).
inline StateVector apply_observable(const StateVector &s, const Observable &obs) {
    if (obs.n != s.n) {
        throw ArgumentError("observable dimension mismatch");
    }
    StateVector out = s;
    std::fill(out.amps.begin(), out.amps.end(), cplx{0.0, 0.0});
    for (const PauliTerm &t : obs.terms) {
        const auto m = detail::masks_of(t, s.n);
        for (std::size_t i = 0; i < s.amps.size(); ++i) {
            out.amps[i ^ m.x] += t.coeff * detail::pauli_phase(m, i) * s.amps[i];
        }
    }
    return out;
}

using Counts = std::map<std::string, std::uint64_t>;

/// Draws `shots` samples from a probability vector over basis indices.
inline std::vector<std::uint64_t> sample_indices(std::span<const double> probs, std::uint64_t shots, Rng &rng) {
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::vector<std::uint64_t> hist(probs.size(), 0);
    for (std::uint64_t k = 0; k < shots; ++k) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), probs.size() - 1);
        ++hist[idx];
    }
    return hist;
}

inline Counts counts_from_histogram(std::span<const std::uint64_t> hist, int n) {
    Counts out;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        if (hist[i] > 0) {
            out[bitstring(i, n)] = hist[i];
        }
    }
    return out;
}

/// Measures all qubits `shots` times. Deterministic for a given (state, shots, seed).
inline Counts sample_counts(const StateVector &s, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw ArgumentError("shots must be >= 1");
    }
    Rng rng(seed);
    const auto probs = s.probabilities();
    return counts_from_histogram(sample_indices(probs, shots, rng), s.n);
}

/// Empirical distribution over basis indices.
inline std::vector<double> distribution_from_counts(const Counts &counts, int n) {
    std::vector<double> p(std::size_t{1} << n, 0.0);
    std::uint64_t total = 0;
    for (const auto &[bits, c] : counts) {
        p.at(index_of_bitstring(bits)) += static_cast<double>(c);
        total += c;
    }
    if (total > 0) {
        for (double &v : p) {
            v /= static_cast<double>(total);
        }
    }
    return p;
}

/// Total-variation distance between two distributions of equal length.
inline double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw ArgumentError("distribution sizes differ");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return 0.5 * s;
}

}  // namespace qupad

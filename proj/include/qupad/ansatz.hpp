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
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/errors.hpp"
#include "qupad/rng.hpp"

namespace qupad {

/// Single-qubit rotation layer used by the hardware-efficient ansatz.
enum class RotationLayer : std::uint8_t { Ry, Rx, RyRz };

inline std::string rotation_layer_name(RotationLayer r) {
    switch (r) {
        case RotationLayer::Ry: return "ry";
        case RotationLayer::Rx: return "rx";
        case RotationLayer::RyRz: return "ryrz";
    }
    return "?";
}

inline RotationLayer rotation_layer_from_name(const std::string &s) {
    if (s == "ry") {
        return RotationLayer::Ry;
    }
    if (s == "rx") {
        return RotationLayer::Rx;
    }
    if (s == "ryrz") {
        return RotationLayer::RyRz;
    }
    throw ConfigError("unknown rotation layer '" + s + "'");
}

namespace detail {

inline void rotation_layer(Circuit &c, RotationLayer r, Rng &rng, double spread) {
    for (int q = 0; q < c.n; ++q) {
        if (r == RotationLayer::Rx) {
            c.rx(q, c.new_param(rng.uniform(-spread, spread)));
            continue;
        }
        c.ry(q, c.new_param(rng.uniform(-spread, spread)));
        if (r == RotationLayer::RyRz) {
            c.rz(q, c.new_param(rng.uniform(-spread, spread)));
        }
    }
}

}  // namespace detail

/// Hardware-efficient ansatz: `layers` x (rotation layer, trainable Rzx on each chain pair
/// (q, q+1)), then a closing rotation layer. Initial values are uniform in [-spread, spread].
inline Circuit hea_rzx(int n, int layers, RotationLayer rot = RotationLayer::Ry, std::uint64_t seed = 0,
                       double spread = 0.3) {
    if (n < 2 || layers < 1) {
        throw ArgumentError("ansatz needs n >= 2 and layers >= 1");
    }
    Circuit c(n);
    Rng rng(seed);
    for (int l = 0; l < layers; ++l) {
        detail::rotation_layer(c, rot, rng, spread);
        for (int q = 0; q + 1 < n; ++q) {
            c.rzx(q, q + 1, c.new_param(rng.uniform(-spread, spread)));
        }
    }
    detail::rotation_layer(c, rot, rng, spread);
    return c;
}

/// The same layout with CX entanglers, the form a CNOT-basis compiler sees.
inline Circuit hea_cnot(int n, int layers, RotationLayer rot = RotationLayer::Ry, std::uint64_t seed = 0,
                        double spread = 0.3) {
    if (n < 2 || layers < 1) {
        throw ArgumentError("ansatz needs n >= 2 and layers >= 1");
    }
    Circuit c(n);
    Rng rng(seed);
    for (int l = 0; l < layers; ++l) {
        detail::rotation_layer(c, rot, rng, spread);
        for (int q = 0; q + 1 < n; ++q) {
            c.cx(q, q + 1);
        }
    }
    detail::rotation_layer(c, rot, rng, spread);
    return c;
}

/// Sets every parameter uniformly in (-pi, pi].
inline void randomize_params(Circuit &c, std::uint64_t seed) {
    Rng rng(seed);
    for (double &p : c.params) {
        p = wrap_angle(rng.uniform(-kPi, kPi));
    }
}

/// Open-chain transverse-field Ising model -J sum Z_i Z_{i+1} - h sum X_i.
inline Observable tfim(int n, double j = 1.0, double h = 1.0) {
    Observable o;
    o.n = n;
    for (int q = 0; q + 1 < n; ++q) {
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(n - 1 - q)] = 'Z';
        s[static_cast<std::size_t>(n - 2 - q)] = 'Z';
        o.terms.push_back({-j, s});
    }
    for (int q = 0; q < n; ++q) {
        o.terms.push_back(Observable::single(n, q, 'X', -h));
    }
    return o;
}

/// Dense matrix of an observable, qubit 0 as the least significant index bit.
inline Eigen::MatrixXcd observable_matrix(const Observable &o) {
    o.validate();
    const std::size_t dim = std::size_t{1} << o.n;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const PauliTerm &t : o.terms) {
        for (std::size_t col = 0; col < dim; ++col) {
            std::size_t row = col;
            std::complex<double> amp = t.coeff;
            for (int q = 0; q < o.n; ++q) {
                const bool bit = (col >> q) & 1U;
                switch (t.on(q)) {
                    case 'X': row ^= std::size_t{1} << q; break;
                    case 'Y':
                        row ^= std::size_t{1} << q;
                        amp *= bit ? std::complex<double>{0.0, -1.0} : std::complex<double>{0.0, 1.0};
                        break;
                    case 'Z': amp *= bit ? -1.0 : 1.0; break;
                    default: break;
                }
            }
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += amp;
        }
    }
    return m;
}

/// Lowest eigenvalue by dense diagonalization.
inline double ground_energy(const Observable &o) {
    if (o.n > 12) {
        throw CapacityError("dense diagonalization limited to 12 qubits");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(observable_matrix(o), Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

}  // namespace qupad

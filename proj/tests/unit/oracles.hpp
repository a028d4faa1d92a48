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

// Reference implementations used only by tests. Everything here is built from dense
// Kronecker products and textbook formulas, never from library internals.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qupad/circuit.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using C = std::complex<double>;

inline Mat pauli(char p) {
    Mat m(2, 2);
    switch (p) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: m << 1, 0, 0, 1; break;
    }
    return m;
}

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Tensor product with qubit 0 as the rightmost (least significant) factor.
inline Mat embed(int n, const std::vector<std::pair<int, Mat>> &ops) {
    Mat out = Mat::Identity(1, 1);
    for (int q = n - 1; q >= 0; --q) {
        Mat f = Mat::Identity(2, 2);
        for (const auto &[qq, m] : ops) {
            if (qq == q) {
                f = m;
            }
        }
        out = kron(out, f);
    }
    return out;
}

inline Mat pauli_string(const std::string &s) {
    const int n = static_cast<int>(s.size());
    std::vector<std::pair<int, Mat>> ops;
    for (int q = 0; q < n; ++q) {
        ops.emplace_back(q, pauli(s[s.size() - 1 - static_cast<std::size_t>(q)]));
    }
    return embed(n, ops);
}

/// exp(-i theta/2 P) for a Pauli product P.
inline Mat rotation(const Mat &p, double theta) {
    const Mat id = Mat::Identity(p.rows(), p.cols());
    return std::cos(theta / 2.0) * id - C(0, 1) * std::sin(theta / 2.0) * p;
}

inline Mat gate_matrix(int n, const qupad::Gate &g, double theta) {
    using qupad::GateKind;
    const int q = g.qubits.at(0);
    auto one = [&](char p) { return embed(n, {{q, pauli(p)}}); };
    switch (g.kind) {
        case GateKind::Rz: return rotation(one('Z'), theta);
        case GateKind::Rx: return rotation(one('X'), theta);
        case GateKind::Ry: return rotation(one('Y'), theta);
        case GateKind::X: return one('X');
        case GateKind::H: return (one('X') + one('Z')) / std::sqrt(2.0);
        case GateKind::SX: {
            Mat m(2, 2);
            m << C(0.5, 0.5), C(0.5, -0.5), C(0.5, -0.5), C(0.5, 0.5);
            return embed(n, {{q, m}});
        }
        case GateKind::Rzx: return rotation(embed(n, {{q, pauli('Z')}, {g.qubits.at(1), pauli('X')}}), theta);
        case GateKind::CX: {
            Mat p0(2, 2), p1(2, 2);
            p0 << 1, 0, 0, 0;
            p1 << 0, 0, 0, 1;
            return embed(n, {{q, p0}}) + embed(n, {{q, p1}, {g.qubits.at(1), pauli('X')}});
        }
        default: return Mat::Identity(1 << n, 1 << n);
    }
}

inline Mat circuit_matrix(const qupad::Circuit &c, const std::vector<double> &params) {
    Mat u = Mat::Identity(1 << c.n, 1 << c.n);
    for (const qupad::Gate &g : c.gates) {
        if (g.kind == qupad::GateKind::Measure) {
            continue;
        }
        u = gate_matrix(c.n, g, g.param.resolve(params)) * u;
    }
    return u;
}

inline Mat circuit_matrix(const qupad::Circuit &c) { return circuit_matrix(c, c.params); }

inline Mat observable_matrix(const qupad::Observable &o) {
    Mat h = Mat::Zero(1 << o.n, 1 << o.n);
    for (const auto &t : o.terms) {
        h += t.coeff * pauli_string(t.paulis);
    }
    return h;
}

/// min over global phase of ||a - e^{i phi} b||_F.
inline double phase_distance(const Mat &a, const Mat &b) {
    const C tr = (b.adjoint() * a).trace();
    const C phase = std::abs(tr) > 0 ? tr / std::abs(tr) : C(1, 0);
    return (a - phase * b).norm();
}

/// Random circuit over every gate kind with a mix of trainable and constant angles.
inline qupad::Circuit random_circuit(int n, int depth, std::uint64_t seed, int trainable = 0, bool with_cx = true) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> ang(-2.0 * qupad::kPi, 2.0 * qupad::kPi);
    std::uniform_int_distribution<int> pick(0, with_cx ? 8 : 7);
    std::uniform_int_distribution<int> qd(0, n - 1);
    qupad::Circuit c(n);
    for (int k = 0; k < trainable; ++k) {
        c.params.push_back(ang(g));
    }
    int next = 0;
    auto param = [&]() {
        if (next < trainable) {
            return qupad::Param::trainable(next++);
        }
        return qupad::Param::constant(ang(g));
    };
    for (int k = 0; k < depth; ++k) {
        const int q = qd(g);
        int t = qd(g);
        while (n > 1 && t == q) {
            t = qd(g);
        }
        switch (n > 1 ? pick(g) : pick(g) % 6) {
            case 0: c.rz(q, param()); break;
            case 1: c.rx(q, param()); break;
            case 2: c.ry(q, param()); break;
            case 3: c.sx(q); break;
            case 4: c.x(q); break;
            case 5: c.h(q); break;
            case 6:
            case 7: c.rzx(q, t, param()); break;
            default: c.cx(q, t); break;
        }
    }
    while (next < trainable) {
        c.ry(qd(g), param());
    }
    return c;
}

/// Composite Simpson rule with `n` (even) panels.
inline double simpson(const std::function<double(double)> &f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    }
    return s * h / 3.0;
}

/// Spearman rank correlation (average ranks on ties).
inline double spearman(const std::vector<double> &x, const std::vector<double> &y) {
    auto ranks = [](const std::vector<double> &v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            idx[i] = i;
        }
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
                ++j;
            }
            for (std::size_t k = i; k <= j; ++k) {
                r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
            }
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i] / n;
        my += ry[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle

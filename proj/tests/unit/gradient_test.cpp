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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qupad/ansatz.hpp"
#include "qupad/gradient.hpp"

namespace qupad {
namespace {

Observable mixed_observable(int n) {
    Observable o = tfim(n, 0.9, 0.6);
    o.terms.push_back(Observable::single(n, 0, 'Y', 0.4));
    return o;
}

// Richardson-extrapolated central differences, O(h^4).
std::vector<double> finite_difference(const Circuit &c, const Observable &o, std::vector<double> p) {
    std::vector<double> g(p.size());
    const double h = 1e-3;
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto f = [&](double d) {
            std::vector<double> q = p;
            q[i] += d;
            return expectation_value(c, o, q);
        };
        const double d1 = (f(h) - f(-h)) / (2 * h);
        const double d2 = (f(2 * h) - f(-2 * h)) / (4 * h);
        g[i] = (4 * d1 - d2) / 3.0;
    }
    return g;
}

TEST(ParameterShift, MatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Circuit c = oracle::random_circuit(4, 24, 1000 + seed, 8, false);
        const Observable o = mixed_observable(4);
        const auto ps = parameter_shift_gradient(c, o, c.params);
        const auto fd = finite_difference(c, o, c.params);
        for (std::size_t i = 0; i < ps.size(); ++i) {
            EXPECT_NEAR(ps[i], fd[i], 1e-8 * std::max(1.0, std::abs(fd[i])));
        }
    }
}

TEST(ParameterShift, SharedParametersAccumulate) {
    Circuit c(2);
    const Param a = c.new_param(0.4);
    c.ry(0, a).rzx(0, 1, a).rx(1, a);
    const Observable o = mixed_observable(2);
    const auto ps = parameter_shift_gradient(c, o, c.params);
    const auto fd = finite_difference(c, o, c.params);
    EXPECT_NEAR(ps[0], fd[0], 1e-9);
}

TEST(Adjoint, AgreesWithParameterShift) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Circuit c = oracle::random_circuit(4, 30, 2000 + seed, 10, true);
        const Observable o = mixed_observable(4);
        const auto ps = parameter_shift_gradient(c, o, c.params);
        const auto adj = adjoint_gradient(c, o, c.params);
        ASSERT_EQ(ps.size(), adj.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            EXPECT_NEAR(ps[i], adj[i], 1e-11);
        }
    }
}

TEST(Adjoint, ExpectationAgreesWithDenseOracle) {
    const Circuit c = oracle::random_circuit(3, 20, 77, 5);
    const Observable o = mixed_observable(3);
    const Eigen::VectorXcd psi = oracle::circuit_matrix(c).col(0);
    const double want = (psi.adjoint() * oracle::observable_matrix(o) * psi)(0, 0).real();
    EXPECT_NEAR(expectation_value(c, o, c.params), want, 1e-12);
}

}  // namespace
}  // namespace qupad

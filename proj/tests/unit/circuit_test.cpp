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

#include <set>

#include "qupad/circuit.hpp"
#include "qupad/rng.hpp"

namespace qupad {
namespace {

TEST(WrapAngle, StaysInHalfOpenInterval) {
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const double t = rng.uniform(-50.0, 50.0);
        const double w = wrap_angle(t);
        EXPECT_GT(w, -kPi);
        EXPECT_LE(w, kPi);
        const double turns = (t - w) / (2.0 * kPi);
        EXPECT_NEAR(turns, std::round(turns), 1e-9);
    }
    EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
    EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
}

TEST(GateNames, RoundTrip) {
    for (auto k : {GateKind::Rz, GateKind::Rx, GateKind::Ry, GateKind::SX, GateKind::X, GateKind::H, GateKind::Rzx,
                   GateKind::CX, GateKind::Measure}) {
        ASSERT_TRUE(gate_kind_from_name(gate_name(k)).has_value());
        EXPECT_EQ(*gate_kind_from_name(gate_name(k)), k);
    }
    EXPECT_FALSE(gate_kind_from_name("ccx").has_value());
}

TEST(Circuit, ValidateRejectsBadQubitsAndParams) {
    Circuit c(2);
    c.rzx(0, 1, 0.3);
    EXPECT_NO_THROW(c.validate());

    Circuit out_of_range(2);
    out_of_range.rx(2, 0.1);
    EXPECT_THROW(out_of_range.validate(), ArgumentError);

    Circuit same(2);
    same.cx(1, 1);
    EXPECT_THROW(same.validate(), ArgumentError);

    Circuit dangling(2);
    dangling.ry(0, Param::trainable(0));
    EXPECT_THROW(dangling.validate(), ArgumentError);

    Circuit trainable_x(1);
    trainable_x.add(GateKind::X, {0}, trainable_x.new_param(0.2));
    EXPECT_THROW(trainable_x.validate(), ArgumentError);
}

TEST(Circuit, PairsAndRzxIndices) {
    Circuit c(3);
    const Param a = c.new_param(0.1);
    const Param b = c.new_param(0.2);
    c.ry(0, a).rzx(1, 2, b).cx(0, 1).rzx(1, 2, b);
    const auto pairs = c.pairs_used();
    ASSERT_EQ(pairs.size(), 2U);
    EXPECT_EQ(pairs[0].str(), "0-1");
    EXPECT_EQ(pairs[1].str(), "1-2");
    EXPECT_EQ(c.rzx_param_indices(), std::vector<int>{1});
}

TEST(PauliTerm, QubitZeroIsRightmost) {
    const PauliTerm t = Observable::single(3, 0, 'X');
    EXPECT_EQ(t.paulis, "IIX");
    EXPECT_EQ(t.on(0), 'X');
    EXPECT_EQ(t.on(2), 'I');
}

TEST(Observable, ValidateRejectsMalformedTerms) {
    Observable o;
    o.n = 2;
    o.terms.push_back({1.0, "ZZ"});
    EXPECT_NO_THROW(o.validate());
    o.terms.push_back({1.0, "Z"});
    EXPECT_THROW(o.validate(), ArgumentError);
    o.terms.back() = {1.0, "ZQ"};
    EXPECT_THROW(o.validate(), ArgumentError);
    o.terms.back() = {std::nan(""), "ZZ"};
    EXPECT_THROW(o.validate(), ArgumentError);
}

TEST(Rng, DeterministicAndResumable) {
    Rng a(42);
    Rng b(42);
    for (int k = 0; k < 10; ++k) {
        EXPECT_EQ(a.next_u64(), b.next_u64());
    }
    Rng resumed(42, a.draws());
    EXPECT_EQ(a.next_u64(), resumed.next_u64());
    std::set<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 100; ++s) {
        seeds.insert(derive_seed(7, s));
    }
    EXPECT_EQ(seeds.size(), 100U);
}

TEST(Rng, UniformMomentsMatch) {
    Rng r(3);
    const int n = 200000;
    double m = 0.0;
    double m2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        m += u / n;
        m2 += u * u / n;
    }
    // Standard errors are about 6.5e-4 and 6.7e-4.
    EXPECT_NEAR(m, 0.5, 4e-3);
    EXPECT_NEAR(m2, 1.0 / 3.0, 4e-3);
    double g = 0.0;
    double g2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = r.normal();
        g += z / n;
        g2 += z * z / n;
    }
    EXPECT_NEAR(g, 0.0, 0.012);
    EXPECT_NEAR(g2, 1.0, 0.02);
}

}  // namespace
}  // namespace qupad

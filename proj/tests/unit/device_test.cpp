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
#include "qupad/device.hpp"

namespace qupad {
namespace {

// |observed - p| within 5 binomial standard errors.
void expect_binomial(double observed, double p, std::uint64_t shots) {
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(shots));
    EXPECT_NEAR(observed, p, 5.0 * se + 1e-12);
}

double fraction(const Counts &counts, const std::string &bits) {
    std::uint64_t total = 0;
    for (const auto &[_, c] : counts) {
        total += c;
    }
    auto it = counts.find(bits);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

TEST(Generate, DeterministicValidAndInRange) {
    const DeviceModel a = DeviceModel::generate(6, 11);
    const DeviceModel b = DeviceModel::generate(6, 11);
    EXPECT_EQ(a.pairs, b.pairs);
    EXPECT_EQ(a.qubits, b.qubits);
    EXPECT_NO_THROW(a.validate());
    EXPECT_EQ(a.pairs.size(), 5U);
    for (const auto &[_, e] : a.pairs) {
        EXPECT_GE(e.k1, 0.9);
        EXPECT_LE(e.k1, 1.0);
        EXPECT_GE(e.k2, 0.15);
        EXPECT_LE(e.k2, 0.35);
        EXPECT_LE(std::abs(e.b), 0.1);
    }
    for (const auto &q : a.qubits) {
        EXPECT_LE(q.t2_us, 2.0 * q.t1_us);
    }
    EXPECT_NE(DeviceModel::generate(6, 12).pairs, a.pairs);
}

TEST(OverRotation, SignConvention) {
    EXPECT_DOUBLE_EQ(over_rotation(0.5, 1.2, 0.3, 0.05), -(0.3 * 0.2 + 0.05));
    EXPECT_DOUBLE_EQ(over_rotation(2.5, 1.2, 0.3, 0.05), 0.3 * 0.2 + 0.05);
    EXPECT_DOUBLE_EQ(over_rotation(kHalfPi, 1.2, 0.3, 0.05), 0.0);
    EXPECT_DOUBLE_EQ(realized_rzx_angle(0.7, 1.3, PairNoise{}), 0.7);
}

TEST(Execute, NoiselessMatchesIdealDistribution) {
    const DeviceModel dev = DeviceModel::noiseless(4);
    Circuit c = hea_rzx(4, 2, RotationLayer::RyRz, 3);
    randomize_params(c, 3);
    const std::uint64_t shots = 100000;
    const auto prog = compile_rzx_nominal(c, dev.geometry);
    const auto r = execute(prog, dev, shots, 5);
    const auto ideal = simulate(c).probabilities();
    const auto p = distribution_from_counts(r.counts, 4);
    for (std::size_t i = 0; i < p.size(); ++i) {
        expect_binomial(p[i], ideal[i], shots);
    }
    EXPECT_EQ(r.duration_dt, prog.duration());
}

TEST(Execute, DeterministicPerSeed) {
    const DeviceModel dev = DeviceModel::generate(3, 4);
    Circuit c = hea_rzx(3, 1, RotationLayer::Ry, 1);
    const auto prog = compile_rzx_nominal(c, dev.geometry);
    EXPECT_EQ(execute(prog, dev, 2000, 8).counts, execute(prog, dev, 2000, 8).counts);
    EXPECT_NE(execute(prog, dev, 2000, 8).counts, execute(prog, dev, 2000, 9).counts);
    EXPECT_THROW(execute(prog, dev, 0, 1), ArgumentError);
}

TEST(Execute, CoherentOverRotationMatchesClosedForm) {
    DeviceModel dev = DeviceModel::noiseless(2);
    dev.pairs[{0, 1}] = PairNoise{0.93, 0.3, 0.07};
    const std::uint64_t shots = 200000;
    for (double theta : {0.4, 1.2, 2.1, 2.9}) {
        for (double dsr : {0.6, 1.0, 1.5}) {
            const double eps = (0.3 * (dsr - 1.0) + 0.07) * (theta > kHalfPi ? 1.0 : -1.0);
            const double realized = theta + std::asin(0.93 * std::sin(eps));
            const double c = std::cos(realized / 2.0);
            expect_binomial(benchmark_rzx(dev, {0, 1}, theta, dsr, shots, 3), c * c, shots);
        }
    }
}

TEST(Execute, ReadoutFlipRate) {
    DeviceModel dev = DeviceModel::noiseless(1);
    dev.qubits[0].readout = 0.04;
    Circuit c(1);
    c.rz(0, 0.0);
    const std::uint64_t shots = 200000;
    const auto r = execute(compile_rzx_nominal(c, dev.geometry), dev, shots, 2);
    expect_binomial(fraction(r.counts, "1"), 0.04, shots);
}

TEST(Execute, AmplitudeDampingBranch) {
    DeviceModel dev = DeviceModel::noiseless(1);
    dev.qubits[0].t1_us = 0.5;
    dev.qubits[0].t2_us = 1.0;  // 2 T1: no pure dephasing
    Circuit c(1);
    c.x(0);
    const std::uint64_t shots = 200000;
    const auto r = execute(compile_rzx_nominal(c, dev.geometry), dev, shots, 6);
    const double p = -std::expm1(-dev.geometry.to_us(160) / 0.5);
    expect_binomial(fraction(r.counts, "0"), 2.0 * p / 3.0, shots);
}

TEST(Execute, PureDephasingBranch) {
    DeviceModel dev = DeviceModel::noiseless(1);
    dev.qubits[0].t2_us = 0.3;
    Circuit c(1);
    c.h(0).h(0);
    const std::uint64_t shots = 200000;
    const auto r = execute(compile_rzx_nominal(c, dev.geometry), dev, shots, 7);
    const double pz = -0.5 * std::expm1(-dev.geometry.to_us(160) / 0.3);
    expect_binomial(fraction(r.counts, "1"), pz, shots);
}

TEST(Execute, LongerScheduleLosesMoreFidelity) {
    DeviceModel dev = DeviceModel::noiseless(2);
    dev.qubits[0] = dev.qubits[1] = QubitNoise{20.0, 20.0, 0.0};
    Circuit c(2);
    c.h(0).rzx(0, 1, 1.0);
    const auto ideal = simulate(c).probabilities();
    const std::vector<QubitPair> pairs{{0, 1}};
    const auto short_r = execute(compile_rzx(c, uniform_dsr(pairs, 0.6), dev.geometry), dev, 100000, 1);
    const auto long_r = execute(compile_rzx(c, uniform_dsr(pairs, 1.5), dev.geometry), dev, 100000, 1);
    EXPECT_GT(output_fidelity(short_r.counts, ideal, 2), output_fidelity(long_r.counts, ideal, 2));
}

TEST(Drift, ZeroDaysIsIdentityAndClockAdvances) {
    const DeviceModel dev = DeviceModel::generate(4, 2);
    const DeviceModel same = drift(dev, 0.0);
    EXPECT_EQ(same.pairs, dev.pairs);
    EXPECT_EQ(same.rng_draws, dev.rng_draws);
    const DeviceModel moved = drift(dev, 6.0);
    EXPECT_DOUBLE_EQ(moved.clock_days, 6.0);
    EXPECT_NE(moved.pairs, dev.pairs);
    EXPECT_NO_THROW(moved.validate());
    EXPECT_EQ(drift(dev, 6.0).pairs, moved.pairs);
    EXPECT_THROW(drift(dev, -1.0), ArgumentError);
}

TEST(Drift, StaysWithinClampsOverLongHorizons) {
    DeviceModel dev = DeviceModel::generate(5, 3);
    dev.drift.k2_std = 0.6;
    dev.drift.b_std = 0.3;
    dev.drift.t1_std = 200.0;
    for (int k = 0; k < 200; ++k) {
        dev = drift(dev, 3.0);
        ASSERT_NO_THROW(dev.validate());
        for (const auto &[_, e] : dev.pairs) {
            ASSERT_GE(e.k1, kK1Min);
            ASSERT_LE(std::abs(e.k2), kK2Max);
            ASSERT_LE(std::abs(e.b), kBMax);
        }
        for (const auto &q : dev.qubits) {
            ASSERT_GE(q.t1_us, kT1Min);
            ASSERT_LE(q.t1_us, kT1Max);
            ASSERT_LE(q.t2_us, 2.0 * q.t1_us);
        }
    }
}

TEST(Drift, StationaryMomentsMatchDriftSettings) {
    DeviceModel dev = DeviceModel::generate(2, 5);
    const double mean = dev.pair_means.at({0, 1}).k2;
    const int n = 3000;
    double m = 0.0;
    double v = 0.0;
    for (int k = 0; k < n; ++k) {
        dev = drift(dev, 60.0);  // decay e^-6: nearly independent samples
        const double x = dev.pairs.at({0, 1}).k2 - mean;
        m += x / n;
        v += x * x / n;
    }
    EXPECT_NEAR(m, 0.0, 5.0 * dev.drift.k2_std / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(v), dev.drift.k2_std, 0.1 * dev.drift.k2_std);
}

}  // namespace
}  // namespace qupad

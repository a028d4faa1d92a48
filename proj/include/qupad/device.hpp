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
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/compiler.hpp"
#include "qupad/errors.hpp"
#include "qupad/geometry.hpp"
#include "qupad/rng.hpp"
#include "qupad/statevector.hpp"

namespace qupad {

/// Ground-truth control error of one coupling pair.
struct PairNoise {
    double k1 = 1.0;  // contrast of the coherent over-rotation, 0 < k1 <= 1
    double k2 = 0.0;  // over-rotation slope in dsr
    double b = 0.0;   // over-rotation offset at dsr = 1
    bool operator==(const PairNoise &) const = default;
};

/// Decoherence and readout of one qubit. Infinite times mean no decoherence.
struct QubitNoise {
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    double readout = 0.0;  // symmetric bit-flip probability at measurement
    bool operator==(const QubitNoise &) const = default;
};

/// Mean-reverting drift: every parameter relaxes toward its long-run mean at rate
/// `reversion` per day with the given stationary standard deviations.
struct DriftSpec {
    double reversion = 0.1;
    double k1_std = 0.02;
    double k2_std = 0.08;
    double b_std = 0.05;
    double t1_std = 15.0;
    double t2_std = 15.0;
    double readout_std = 0.002;
    bool operator==(const DriftSpec &) const = default;
};

inline constexpr double kK1Min = 0.5;
inline constexpr double kK2Max = 0.5;
inline constexpr double kBMax = 0.2;
inline constexpr double kT1Min = 20.0;
inline constexpr double kT1Max = 500.0;
inline constexpr double kT2Min = 10.0;
inline constexpr double kReadoutMax = 0.1;

/// Synthetic device: geometry plus the true noise, its long-run means, and the drift state.
struct DeviceModel {
    DeviceGeometry geometry;
    std::map<QubitPair, PairNoise> pairs;
    std::vector<QubitNoise> qubits;
    std::map<QubitPair, PairNoise> pair_means;
    std::vector<QubitNoise> qubit_means;
    DriftSpec drift;
    std::uint64_t rng_seed = 0;
    std::uint64_t rng_draws = 0;
    double clock_days = 0.0;

    int n() const { return geometry.n; }

    const PairNoise &pair_noise(QubitPair p) const {
        auto it = pairs.find(p);
        if (it == pairs.end()) {
            throw ConfigError("pair " + p.str() + " is not in the coupling map");
        }
        return it->second;
    }

    void validate() const {
        geometry.validate();
        if (static_cast<int>(qubits.size()) != geometry.n || static_cast<int>(qubit_means.size()) != geometry.n) {
            throw ConfigError("per-qubit noise table does not match the qubit count");
        }
        for (const auto &[p, _] : geometry.cr_pulses) {
            if (!pairs.count(p) || !pair_means.count(p)) {
                throw ConfigError("no noise parameters for pair " + p.str());
            }
        }
        for (const auto *table : {&pairs, &pair_means}) {
            for (const auto &[p, e] : *table) {
                if (!geometry.has_pair(p)) {
                    throw ConfigError("noise given for pair " + p.str() + " outside the coupling map");
                }
                if (!(e.k1 > 0.0 && e.k1 <= 1.0) || std::abs(e.k2) > kK2Max || std::abs(e.b) > kBMax) {
                    throw ConfigError("pair " + p.str() + " error parameters out of range");
                }
            }
        }
        for (const auto *table : {&qubits, &qubit_means}) {
            for (const QubitNoise &q : *table) {
                if (!(q.t1_us > 0.0) || !(q.t2_us > 0.0)) {
                    throw ConfigError("T1 and T2 must be positive");
                }
                if (!(q.readout >= 0.0 && q.readout <= kReadoutMax)) {
                    throw ConfigError("readout error out of range");
                }
            }
        }
        if (!(clock_days >= 0.0) || !(drift.reversion >= 0.0)) {
            throw ConfigError("clock and drift reversion must be non-negative");
        }
    }

    /// Ideal device on a chain of n qubits.
    static DeviceModel noiseless(int n) {
        DeviceModel d;
        d.geometry = DeviceGeometry::chain(n);
        for (const QubitPair &p : d.geometry.coupling_map()) {
            d.pairs[p] = PairNoise{};
        }
        d.qubits.assign(static_cast<std::size_t>(n), QubitNoise{});
        d.pair_means = d.pairs;
        d.qubit_means = d.qubits;
        d.drift = DriftSpec{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        return d;
    }

    /// Random device on a chain of n qubits. Same (n, seed) gives the same device.
    static DeviceModel generate(int n, std::uint64_t seed) {
        DeviceModel d;
        d.geometry = DeviceGeometry::chain(n);
        Rng rng(derive_seed(seed, 0));
        for (const QubitPair &p : d.geometry.coupling_map()) {
            PairNoise e;
            e.k1 = rng.uniform(0.9, 1.0);
            e.k2 = rng.uniform(0.15, 0.35);
            e.b = rng.uniform(-0.1, 0.1);
            d.pairs[p] = e;
        }
        for (int q = 0; q < n; ++q) {
            QubitNoise e;
            e.t1_us = rng.uniform(80.0, 140.0);
            e.t2_us = std::min(rng.uniform(60.0, 120.0), 2.0 * e.t1_us);
            e.readout = rng.uniform(0.002, 0.01);
            d.qubits.push_back(e);
        }
        d.pair_means = d.pairs;
        d.qubit_means = d.qubits;
        d.rng_seed = derive_seed(seed, 1);
        return d;
    }
};

namespace detail {

inline double ou_step(double x, double mean, double stationary_std, double decay, Rng &rng, double lo, double hi) {
    const double z = rng.normal();
    if (!std::isfinite(x)) {
        return x;
    }
    const double next = mean + (x - mean) * decay + stationary_std * std::sqrt(1.0 - decay * decay) * z;
    return std::clamp(next, lo, hi);
}

}  // namespace detail

/// Advances the device clock by `days`, moving every noise parameter along its
/// Ornstein-Uhlenbeck path (exact transition) and clamping to the valid range.
/// Deterministic in the snapshot's rng state; days = 0 returns an identical snapshot.
inline DeviceModel drift(const DeviceModel &dev, double days) {
    if (!(days >= 0.0) || !std::isfinite(days)) {
        throw ArgumentError("drift days must be a non-negative finite number");
    }
    if (days == 0.0) {
        return dev;
    }
    DeviceModel out = dev;
    Rng rng(dev.rng_seed, dev.rng_draws);
    const double decay = std::exp(-dev.drift.reversion * days);
    const DriftSpec &s = dev.drift;
    for (auto &[p, e] : out.pairs) {
        const PairNoise &m = dev.pair_means.at(p);
        e.k1 = detail::ou_step(e.k1, m.k1, s.k1_std, decay, rng, kK1Min, 1.0);
        e.k2 = detail::ou_step(e.k2, m.k2, s.k2_std, decay, rng, -kK2Max, kK2Max);
        e.b = detail::ou_step(e.b, m.b, s.b_std, decay, rng, -kBMax, kBMax);
    }
    for (std::size_t q = 0; q < out.qubits.size(); ++q) {
        QubitNoise &e = out.qubits[q];
        const QubitNoise &m = dev.qubit_means[q];
        e.t1_us = detail::ou_step(e.t1_us, m.t1_us, s.t1_std, decay, rng, kT1Min, kT1Max);
        e.t2_us = detail::ou_step(e.t2_us, m.t2_us, s.t2_std, decay, rng, kT2Min, 2.0 * e.t1_us);
        e.readout = detail::ou_step(e.readout, m.readout, s.readout_std, decay, rng, 0.0, kReadoutMax);
    }
    out.rng_draws = rng.draws();
    out.clock_days = dev.clock_days + days;
    return out;
}

/// Coherent over-rotation epsilon(theta, dsr) = (k2 (dsr - 1) + b) sign(theta - pi/2), with
/// sign(0) = 0, for a gate angle theta in (0, pi).
inline double over_rotation(double theta, double dsr, double k2, double b) {
    const double d = theta - kHalfPi;
    const double sign = std::abs(d) < kAngleEps ? 0.0 : (d > 0.0 ? 1.0 : -1.0);
    return (k2 * (dsr - 1.0) + b) * sign;
}

/// Angle actually applied for a normalized Rzx(beta), |beta| <= pi/2.
///
/// beta > 0 is Rzx(theta) with theta = beta < pi/2; beta < 0 is theta = beta + pi > pi/2.
/// Either way the realized rotation loses |epsilon| in magnitude when k2 (dsr - 1) + b > 0,
/// and k1 scales sin(epsilon).
inline double realized_rzx_angle(double beta, double dsr, const PairNoise &e) {
    const double theta = beta > 0.0 ? beta : beta + kPi;
    const double eps = over_rotation(theta, dsr, e.k2, e.b);
    const double eps_r = std::asin(std::clamp(e.k1 * std::sin(eps), -1.0, 1.0));
    const double bound = std::abs(e.k2) * 0.5 + std::abs(e.b);
    if (std::abs(eps_r) > bound + 1e-12) {
        throw NumericError("over-rotation exceeds its model bound");
    }
    return beta + eps_r;
}

struct ExecutionResult {
    Counts counts;
    std::uint64_t shots = 0;
    std::int64_t duration_dt = 0;
    double duration_us = 0.0;
    double clock_days = 0.0;
};

namespace detail {

struct ErrorSite {
    std::size_t after_gate = 0;
    int qubit = 0;
    double p_pauli = 0.0;  // X, Y or Z, uniformly
    double p_dephase = 0.0;
};

inline std::vector<ErrorSite> error_sites(const CompiledProgram &prog, const DeviceModel &dev) {
    std::vector<ErrorSite> sites;
    for (std::size_t k = 0; k < prog.provenance.size(); ++k) {
        for (std::size_t idx : prog.provenance[k]) {
            const PulseInstruction &inst = prog.schedule.instructions[idx];
            const double d_us = dev.geometry.to_us(inst.duration());
            std::vector<int> qs{inst.channel.qubit};
            if (inst.channel.kind == Channel::Kind::Control) {
                qs.push_back(inst.channel.target);
            }
            for (int q : qs) {
                const QubitNoise &qn = dev.qubits.at(static_cast<std::size_t>(q));
                const double p = -std::expm1(-d_us / qn.t1_us);
                const double inv_tphi = std::max(0.0, 1.0 / qn.t2_us - 0.5 / qn.t1_us);
                const double pz = -0.5 * std::expm1(-d_us * inv_tphi);
                if (p > 0.0 || pz > 0.0) {
                    sites.push_back({k, q, p, pz});
                }
            }
        }
    }
    return sites;
}

}  // namespace detail

/// Monte-Carlo execution of a compiled program on the device, measuring all circuit qubits.
///
/// Rzx gates get their coherent over-rotation from the pair's nominal dsr. After every
/// pulse each involved qubit draws one stochastic error: a uniform Pauli with probability
/// 1 - exp(-d/T1), otherwise a Z with the pure-dephasing probability. Each measured bit then
/// flips with the qubit's readout probability. Same (program, snapshot, shots, seed) gives
/// the same counts.
inline ExecutionResult execute(const CompiledProgram &prog, const DeviceModel &dev, std::uint64_t shots,
                               std::uint64_t seed) {
    if (shots < 1) {
        throw ArgumentError("shots must be >= 1");
    }
    const Circuit &c = prog.circuit;
    if (c.n > dev.n()) {
        throw ConfigError("program needs more qubits than the device has");
    }
    std::vector<double> angles(c.gates.size(), 0.0);
    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const Gate &g = c.gates[k];
        angles[k] = g.param.resolve(c.params);
        if (is_two_qubit(g.kind)) {
            const PairNoise &e = dev.pair_noise(g.pair());
            if (g.kind == GateKind::Rzx && std::abs(angles[k]) >= kAngleEps) {
                auto it = prog.dsr.find(g.pair());
                const double dsr = it == prog.dsr.end() ? 1.0 : it->second.value();
                angles[k] = realized_rzx_angle(angles[k], dsr, e);
            }
        }
    }
    const auto sites = detail::error_sites(prog, dev);

    auto run = [&](const std::vector<std::pair<std::size_t, char>> &events) {
        StateVector s(c.n);
        std::size_t next = 0;
        for (std::size_t k = 0; k < c.gates.size(); ++k) {
            const Gate &g = c.gates[k];
            if (g.kind != GateKind::Measure) {
                apply_gate_inplace(s, g.kind, g.qubits, angles[k]);
            }
            for (; next < events.size() && sites[events[next].first].after_gate == k; ++next) {
                apply_pauli(s, sites[events[next].first].qubit, events[next].second);
            }
        }
        return s;
    };

    const auto clean = run({}).probabilities();
    std::vector<double> cdf(clean.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        acc += clean[i];
        cdf[i] = acc;
    }
    auto draw = [](const std::vector<double> &cdf_, double u) {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u * cdf_.back());
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    };

    Rng rng(derive_seed(seed, 2));
    std::vector<std::uint64_t> hist(clean.size(), 0);
    std::vector<std::pair<std::size_t, char>> events;
    std::vector<double> traj_cdf(clean.size());
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        events.clear();
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const double u = rng.uniform();
            if (u < sites[i].p_pauli) {
                const auto which = std::min<int>(2, static_cast<int>(3.0 * u / sites[i].p_pauli));
                events.emplace_back(i, "XYZ"[which]);
            } else if (u < sites[i].p_pauli + sites[i].p_dephase) {
                events.emplace_back(i, 'Z');
            }
        }
        std::size_t outcome = 0;
        if (events.empty()) {
            outcome = draw(cdf, rng.uniform());
        } else {
            const auto probs = run(events).probabilities();
            double a = 0.0;
            for (std::size_t i = 0; i < probs.size(); ++i) {
                a += probs[i];
                traj_cdf[i] = a;
            }
            outcome = draw(traj_cdf, rng.uniform());
        }
        for (int q = 0; q < c.n; ++q) {
            if (rng.uniform() < dev.qubits[static_cast<std::size_t>(q)].readout) {
                outcome ^= std::size_t{1} << q;
            }
        }
        ++hist[outcome];
    }
    ExecutionResult r;
    r.counts = counts_from_histogram(hist, c.n);
    r.shots = shots;
    r.duration_dt = prog.duration();
    r.duration_us = dev.geometry.to_us(prog.duration());
    r.clock_days = dev.clock_days;
    return r;
}

/// Prepares |0...0>, applies Rzx(theta) on `pair` at the given dsr and returns the fraction
/// of shots where both pair qubits read 0.
inline double benchmark_rzx(const DeviceModel &dev, QubitPair pair, double theta, double dsr, std::uint64_t shots,
                            std::uint64_t seed) {
    if (!dev.geometry.has_pair(pair)) {
        throw ConfigError("pair " + pair.str() + " is not in the coupling map");
    }
    Circuit c(std::max(pair.control, pair.target) + 1);
    c.rzx(pair.control, pair.target, theta);
    DsrAssignment assignment;
    assignment[pair] = Dsr(dsr);
    const ExecutionResult r = execute(compile_rzx(c, assignment, dev.geometry), dev, shots, seed);
    std::uint64_t hits = 0;
    for (const auto &[bits, count] : r.counts) {
        const std::size_t idx = index_of_bitstring(bits);
        if (((idx >> pair.control) & 1U) == 0 && ((idx >> pair.target) & 1U) == 0) {
            hits += count;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(shots);
}

/// 1 - total-variation distance between measured counts and an ideal distribution.
inline double output_fidelity(const Counts &counts, std::span<const double> ideal, int n) {
    const auto p = distribution_from_counts(counts, n);
    return 1.0 - total_variation(p, ideal);
}

}  // namespace qupad

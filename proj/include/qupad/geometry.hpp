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
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/errors.hpp"
#include "qupad/pulse.hpp"

namespace qupad {

/// Calibrated CNOT-equivalent cross-resonance tone, Rzx(pi/2): 960 dt.
inline GaussianSquarePulse default_cr_pulse() { return {0.25, 0.0, 64.0, 704.0, 128.0}; }

/// Static, noise-free part of a device: what the compiler needs to build pulse programs.
struct DeviceGeometry {
    int n = 0;
    std::map<QubitPair, GaussianSquarePulse> cr_pulses;  // keys form the coupling map
    std::int64_t sq_duration = 160;
    double dt_ns = 0.2222;

    /// Directed linear chain 0->1->...->n-1 with default pulses.
    static DeviceGeometry chain(int n) {
        DeviceGeometry g;
        g.n = n;
        for (int q = 0; q + 1 < n; ++q) {
            g.cr_pulses[{q, q + 1}] = default_cr_pulse();
        }
        return g;
    }

    bool has_pair(QubitPair p) const { return cr_pulses.count(p) != 0; }

    const GaussianSquarePulse &cr_pulse(QubitPair p) const {
        auto it = cr_pulses.find(p);
        if (it == cr_pulses.end()) {
            throw ConfigError("pair " + p.str() + " is not in the coupling map");
        }
        return it->second;
    }

    std::vector<QubitPair> coupling_map() const {
        std::vector<QubitPair> out;
        for (const auto &[p, _] : cr_pulses) {
            out.push_back(p);
        }
        return out;
    }

    double to_us(std::int64_t ticks) const { return static_cast<double>(ticks) * dt_ns * 1e-3; }

    void validate() const {
        if (n < 1) {
            throw ConfigError("device must have at least one qubit");
        }
        if (sq_duration <= 0 || sq_duration % kDurationQuantum != 0) {
            throw ConfigError("sq_duration must be a positive multiple of 16");
        }
        if (!(dt_ns > 0.0)) {
            throw ConfigError("dt must be positive");
        }
        for (const auto &[p, pulse] : cr_pulses) {
            if (p.control < 0 || p.control >= n || p.target < 0 || p.target >= n || p.control == p.target) {
                throw ConfigError("invalid coupling pair " + p.str());
            }
            check_pulse(pulse);
            if (std::llround(pulse.duration()) % kDurationQuantum != 0) {
                throw ConfigError("CR pulse for " + p.str() + " is not a multiple of 16 dt");
            }
        }
    }
};

/// Per-pair duration stretch ratio.
using DsrAssignment = std::map<QubitPair, Dsr>;

inline DsrAssignment uniform_dsr(const std::vector<QubitPair> &pairs, double value) {
    DsrAssignment out;
    for (const QubitPair &p : pairs) {
        out[p] = Dsr(value);
    }
    return out;
}

}  // namespace qupad

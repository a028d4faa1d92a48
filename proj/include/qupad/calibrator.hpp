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

#include "qupad/cmaes.hpp"
#include "qupad/compiler.hpp"
#include "qupad/errors.hpp"
#include "qupad/geometry.hpp"
#include "qupad/lut.hpp"

namespace qupad {

struct CalibConfig {
    double alpha = 10.0;
    int generations = 30;
    int population = 0;  // 0: 4 + floor(3 ln dim)
    double sigma0 = 0.15;
    std::uint64_t seed = 0;
    double penalty = 10.0;

    void validate() const {
        if (!(alpha >= 0.0)) {
            throw ConfigError("alpha must be >= 0");
        }
        if (generations < 1 || !(sigma0 > 0.0) || (population != 0 && population < 4)) {
            throw ConfigError("calibration needs generations >= 1, sigma0 > 0 and population >= 4");
        }
    }
};

/// Angle in (0, pi) that a normalized Rzx(beta) stands for in the LUT's benchmark frame.
inline double lut_angle(double beta) { return beta > 0.0 ? beta : beta + kPi; }

/// Pairs that carry at least one CR tone once the circuit is normalized, sorted.
inline std::vector<QubitPair> calibration_pairs(const Circuit &c) {
    const Circuit norm = normalize_rzx_gates(rewrite_cnot_to_rzx(c));
    std::vector<QubitPair> out;
    for (const Gate &g : norm.gates) {
        if (g.kind == GateKind::Rzx) {
            out.push_back(g.pair());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Breakdown of the calibration objective.
struct CalibLoss {
    double duration_norm = 1.0;  // schedule length over its dsr = 1 length
    double error_sum = 0.0;      // sum over pairs of the largest predicted gate error
    double total = 0.0;
};

/// duration(dsr) / duration(1) + alpha * sum over pairs of max predicted Er of the pair's gates.
/// Returns total = +inf when a stretch saturates the pulse amplitude.
inline CalibLoss calib_loss_terms(const DsrAssignment &dsr, const Circuit &c, const Lut &lut,
                                  const DeviceGeometry &dev, double alpha) {
    const Circuit norm = normalize_rzx_gates(rewrite_cnot_to_rzx(c));
    std::map<QubitPair, double> worst;
    for (const Gate &g : norm.gates) {
        if (g.kind != GateKind::Rzx) {
            continue;
        }
        const QubitPair p = g.pair();
        auto it = dsr.find(p);
        if (it == dsr.end()) {
            throw ConfigError("no dsr assigned to pair " + p.str());
        }
        const double er = gate_error(lut_angle(g.param.value), it->second.value(), lut.at(p));
        double &slot = worst[p];
        slot = std::max(slot, er);
    }
    CalibLoss out;
    for (const auto &[_, er] : worst) {
        out.error_sum += er;
    }
    try {
        const auto nominal = static_cast<double>(schedule_asap(norm, uniform_dsr(calibration_pairs(c), 1.0), dev).duration());
        const auto stretched = static_cast<double>(schedule_asap(norm, dsr, dev).duration());
        out.duration_norm = nominal > 0.0 ? stretched / nominal : 1.0;
    } catch (const AmplitudeSaturation &) {
        out.duration_norm = std::numeric_limits<double>::infinity();
    }
    out.total = out.duration_norm + alpha * out.error_sum;
    return out;
}

inline double calib_loss(const DsrAssignment &dsr, const Circuit &c, const Lut &lut, const DeviceGeometry &dev,
                         double alpha) {
    return calib_loss_terms(dsr, c, lut, dev, alpha).total;
}

struct CalibrationResult {
    std::vector<QubitPair> pairs;
    DsrAssignment dsr;
    double loss = 0.0;
    double loss_at_unit = 0.0;  // objective at dsr = 1 everywhere
    CmaesResult search;
};

/// Searches one dsr per used pair with CMA-ES from dsr = 1, within [0.6, 1.5].
/// Throws InfeasibleError if no candidate had a finite loss.
inline CalibrationResult calibrate(const Circuit &c, const Lut &lut, const DeviceGeometry &dev,
                                   const CalibConfig &cfg) {
    cfg.validate();
    CalibrationResult res;
    res.pairs = calibration_pairs(c);
    const DsrAssignment unit = uniform_dsr(res.pairs, 1.0);
    res.loss_at_unit = calib_loss(unit, c, lut, dev, cfg.alpha);
    if (res.pairs.empty()) {
        res.loss = res.loss_at_unit;
        return res;
    }
    const std::size_t dim = res.pairs.size();
    auto to_assignment = [&](const std::vector<double> &x) {
        DsrAssignment a;
        for (std::size_t i = 0; i < dim; ++i) {
            a[res.pairs[i]] = Dsr(x[i]);
        }
        return a;
    };
    auto objective = [&](const std::vector<double> &x) { return calib_loss(to_assignment(x), c, lut, dev, cfg.alpha); };
    CmaesOptions opt;
    opt.generations = cfg.generations;
    opt.population = cfg.population;
    opt.sigma0 = cfg.sigma0;
    opt.seed = cfg.seed;
    opt.penalty = cfg.penalty;
    res.search = cma_es_minimize(objective, std::vector<double>(dim, 1.0), std::vector<double>(dim, kDsrMin),
                                 std::vector<double>(dim, kDsrMax), opt);
    if (res.search.best.empty() || !std::isfinite(res.search.best_loss)) {
        throw InfeasibleError("every dsr candidate saturated the pulse amplitude");
    }
    if (res.loss_at_unit <= res.search.best_loss) {
        res.dsr = unit;
        res.loss = res.loss_at_unit;
    } else {
        res.dsr = to_assignment(res.search.best);
        res.loss = res.search.best_loss;
    }
    return res;
}

}  // namespace qupad

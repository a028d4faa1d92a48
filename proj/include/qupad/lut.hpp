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
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/device.hpp"
#include "qupad/errors.hpp"
#include "qupad/rng.hpp"

namespace qupad {

/// Fitted error model of one coupling pair, with the data that produced it.
struct ErrorFitParams {
    QubitPair pair;
    double k1 = 1.0;
    double k2 = 0.0;
    double b = 0.0;
    double residual_rms = 0.0;
    double clock_days = 0.0;
    int n1 = 0;
    int n2 = 0;
    std::uint64_t shots = 0;
    bool ok = true;
    std::string failure;  // set when ok is false
};

inline constexpr double kFitK1Min = 1e-6;
inline constexpr double kFitK1Max = 1.5;
inline constexpr double kFitK2Max = 0.5;
inline constexpr double kFitBMax = 0.2;

/// sign(theta - pi/2) with sign(0) = 0.
inline double side_of_half_pi(double theta) {
    const double d = theta - kHalfPi;
    return std::abs(d) < 1e-12 ? 0.0 : (d > 0.0 ? 1.0 : -1.0);
}

/// Unclamped model value (cos theta - k1 sin theta sin(eps) + 1) / 2.
inline double model_p00(double theta, double dsr, double k1, double k2, double b) {
    const double eps = (k2 * (dsr - 1.0) + b) * side_of_half_pi(theta);
    return (std::cos(theta) - k1 * std::sin(theta) * std::sin(eps) + 1.0) / 2.0;
}

/// Predicted P(00) after Rzx(theta) on |00>, clamped to [0, 1].
inline double predict_p00(double theta, double dsr, const ErrorFitParams &fit) {
    return std::clamp(model_p00(theta, dsr, fit.k1, fit.k2, fit.b), 0.0, 1.0);
}

/// Predicted deviation from the ideal P(00): |k1 sin theta sin eps| / 2.
inline double gate_error(double theta, double dsr, const ErrorFitParams &fit) {
    const double eps = (fit.k2 * (dsr - 1.0) + fit.b) * side_of_half_pi(theta);
    return std::abs(fit.k1 * std::sin(theta) * std::sin(eps)) / 2.0;
}

/// Benchmark angles: n1 + 1 evenly spaced points over [pi/8, 7pi/8] with the one nearest
/// pi/2 removed (the lower one on a tie), so exactly n1 remain and none equals pi/2.
inline std::vector<double> lut_theta_grid(int n1) {
    if (n1 < 3) {
        throw ArgumentError("n1 must be >= 3");
    }
    std::vector<double> pts;
    const double lo = kPi / 8.0;
    const double hi = 7.0 * kPi / 8.0;
    for (int i = 0; i <= n1; ++i) {
        pts.push_back(lo + (hi - lo) * i / n1);
    }
    std::size_t drop = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (std::abs(pts[i] - kHalfPi) < std::abs(pts[drop] - kHalfPi) - 1e-12) {
            drop = i;
        }
    }
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(drop));
    return pts;
}

/// n2 evenly spaced stretch ratios over [0.6, 1.5].
inline std::vector<double> lut_dsr_grid(int n2) {
    if (n2 < 2) {
        throw ArgumentError("n2 must be >= 2");
    }
    std::vector<double> out;
    for (int j = 0; j < n2; ++j) {
        out.push_back(j + 1 == n2 ? kDsrMax : kDsrMin + (kDsrMax - kDsrMin) * j / (n2 - 1));
    }
    return out;
}

struct GridPoint {
    QubitPair pair;
    double theta = 0.0;
    double dsr = 1.0;
};

/// Every (pair, theta, dsr) benchmark, pairs outermost, then theta, then dsr.
inline std::vector<GridPoint> build_grid(const std::vector<QubitPair> &pairs, int n1, int n2) {
    const auto thetas = lut_theta_grid(n1);
    const auto dsrs = lut_dsr_grid(n2);
    std::vector<GridPoint> out;
    out.reserve(pairs.size() * thetas.size() * dsrs.size());
    for (const QubitPair &p : pairs) {
        for (double t : thetas) {
            for (double d : dsrs) {
                out.push_back({p, t, d});
            }
        }
    }
    return out;
}

struct Measurement {
    double theta = 0.0;
    double dsr = 1.0;
    double p00 = 0.0;
    std::uint64_t shots = 1;
};

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 project_fit(Vec3 x) {
    x[0] = std::clamp(x[0], kFitK1Min, kFitK1Max);
    x[1] = std::clamp(x[1], -kFitK2Max, kFitK2Max);
    x[2] = std::clamp(x[2], -kFitBMax, kFitBMax);
    return x;
}

struct FitProblem {
    const std::vector<Measurement> &data;

    double cost(const Vec3 &x) const {
        double s = 0.0;
        for (const Measurement &m : data) {
            const double r = m.p00 - model_p00(m.theta, m.dsr, x[0], x[1], x[2]);
            s += static_cast<double>(m.shots) * r * r;
        }
        return s;
    }

    // Best k1 for fixed (k2, b): the model is affine in k1.
    double solve_k1(const Vec3 &x) const {
        double num = 0.0;
        double den = 0.0;
        for (const Measurement &m : data) {
            const double eps = (x[1] * (m.dsr - 1.0) + x[2]) * side_of_half_pi(m.theta);
            const double g = -std::sin(m.theta) * std::sin(eps) / 2.0;
            const double r0 = m.p00 - (std::cos(m.theta) + 1.0) / 2.0;
            num += static_cast<double>(m.shots) * g * r0;
            den += static_cast<double>(m.shots) * g * g;
        }
        return den > 0.0 ? num / den : x[0];
    }

    // Golden-section search of coordinate `i` over [lo, hi].
    double line_min(Vec3 x, int i, double lo, double hi) const {
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo;
        double b = hi;
        double c = b - phi * (b - a);
        double d = a + phi * (b - a);
        x[static_cast<std::size_t>(i)] = c;
        double fc = cost(x);
        x[static_cast<std::size_t>(i)] = d;
        double fd = cost(x);
        for (int it = 0; it < 60; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                x[static_cast<std::size_t>(i)] = c;
                fc = cost(x);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                x[static_cast<std::size_t>(i)] = d;
                fd = cost(x);
            }
        }
        return fc < fd ? c : d;
    }

    Vec3 coordinate_descent(Vec3 x, int sweeps) const {
        for (int s = 0; s < sweeps; ++s) {
            x[0] = std::clamp(solve_k1(x), kFitK1Min, kFitK1Max);
            x[1] = line_min(x, 1, -kFitK2Max, kFitK2Max);
            x[2] = line_min(x, 2, -kFitBMax, kFitBMax);
        }
        return x;
    }

    // Projected Levenberg-Marquardt in the coordinates (k1, k1 k2, k1 b). For small epsilon
    // the data pins the two products far more tightly than k1 itself, so in the original
    // coordinates the valley is a hyperbola that Gauss-Newton steps keep overshooting; here
    // it is nearly straight. Each step solves the damped problem by QR of the stacked
    // weighted Jacobian, which stays accurate when J^T J is near-singular.
    Vec3 levenberg_marquardt(Vec3 x, int max_iter) const {
        const auto m = static_cast<Eigen::Index>(data.size());
        double f = cost(x);
        double lambda = 1e-3;
        for (int it = 0; it < max_iter; ++it) {
            Eigen::MatrixXd a(m + 3, 3);
            Eigen::VectorXd rhs(m + 3);
            for (Eigen::Index i = 0; i < m; ++i) {
                const Measurement &d = data[static_cast<std::size_t>(i)];
                const double w = std::sqrt(static_cast<double>(d.shots));
                const double sgn = side_of_half_pi(d.theta);
                const double eps = (x[1] * (d.dsr - 1.0) + x[2]) * sgn;
                const double half_st = std::sin(d.theta) / 2.0;
                a(i, 0) = -w * half_st * (std::sin(eps) - eps * std::cos(eps));
                a(i, 1) = -w * half_st * std::cos(eps) * sgn * (d.dsr - 1.0);
                a(i, 2) = -w * half_st * std::cos(eps) * sgn;
                rhs(i) = w * (d.p00 - model_p00(d.theta, d.dsr, x[0], x[1], x[2]));
            }
            const Eigen::VectorXd scale = a.topRows(m).colwise().norm().transpose().cwiseMax(1e-300);
            const Eigen::Vector3d y{x[0], x[0] * x[1], x[0] * x[2]};
            bool improved = false;
            for (int tries = 0; tries < 30 && !improved; ++tries) {
                a.bottomRows(3).setZero();
                for (int j = 0; j < 3; ++j) {
                    a(m + j, j) = std::sqrt(lambda) * scale(j);
                }
                rhs.tail(3).setZero();
                const Eigen::Vector3d yt = y + a.colPivHouseholderQr().solve(rhs);
                const Vec3 trial = yt(0) > 0.0 ? project_fit({yt(0), yt(1) / yt(0), yt(2) / yt(0)})
                                               : project_fit({kFitK1Min, x[1], x[2]});
                const double ft = cost(trial);
                if (ft < f) {
                    const double moved = std::abs(trial[0] - x[0]) + std::abs(trial[1] - x[1]) + std::abs(trial[2] - x[2]);
                    x = trial;
                    const double gain = f - ft;
                    f = ft;
                    lambda = std::max(lambda / 10.0, 1e-15);
                    improved = true;
                    if (moved < 1e-15 || gain <= 1e-16 * f) {
                        return x;
                    }
                } else {
                    lambda *= 10.0;
                }
            }
            if (!improved) {
                return x;
            }
        }
        return x;
    }
};

}  // namespace detail

/// Weighted least-squares fit of (k1, k2, b) with weights equal to shots.
///
/// Multi-start coordinate descent, then projected Levenberg-Marquardt from the best start.
/// Throws IllPosedFit if the data has fewer than 6 points (axis "count"), angles on only one
/// side of pi/2 (axis "theta"), or a single dsr value (axis "dsr").
inline ErrorFitParams fit_error_params(const std::vector<Measurement> &data, QubitPair pair) {
    if (data.size() < 6) {
        throw IllPosedFit("need at least 6 measurements, got " + std::to_string(data.size()), "count");
    }
    bool below = false;
    bool above = false;
    std::set<double> dsrs;
    for (const Measurement &m : data) {
        if (!std::isfinite(m.p00) || !std::isfinite(m.theta) || !std::isfinite(m.dsr) || m.shots == 0) {
            throw ArgumentError("non-finite measurement or zero shots");
        }
        below |= side_of_half_pi(m.theta) < 0.0;
        above |= side_of_half_pi(m.theta) > 0.0;
        dsrs.insert(m.dsr);
    }
    if (!below || !above) {
        throw IllPosedFit("benchmark angles lie on one side of pi/2", "theta");
    }
    if (dsrs.size() < 2) {
        throw IllPosedFit("benchmark uses a single dsr value", "dsr");
    }

    const detail::FitProblem prob{data};
    detail::Vec3 best{1.0, 0.0, 0.0};
    double best_cost = std::numeric_limits<double>::infinity();
    for (double k1 : {0.5, 1.0, 1.4}) {
        for (double k2 : {-0.3, 0.0, 0.3}) {
            for (double b : {-0.1, 0.0, 0.1}) {
                const detail::Vec3 x = prob.coordinate_descent({k1, k2, b}, 4);
                const double c = prob.cost(x);
                if (c < best_cost) {
                    best_cost = c;
                    best = x;
                }
            }
        }
    }
    best = prob.levenberg_marquardt(best, 500);

    ErrorFitParams out;
    out.pair = pair;
    out.k1 = best[0];
    out.k2 = best[1];
    out.b = best[2];
    double wsum = 0.0;
    for (const Measurement &m : data) {
        wsum += static_cast<double>(m.shots);
    }
    out.residual_rms = std::sqrt(prob.cost(best) / wsum);
    if (!std::isfinite(out.residual_rms)) {
        throw NumericError("fit produced a non-finite residual");
    }
    return out;
}

/// Fitted error models keyed by pair, stamped with the device clock at build time.
struct Lut {
    double device_clock = 0.0;
    std::map<QubitPair, ErrorFitParams> entries;
    std::uint64_t executions = 0;

    const ErrorFitParams &at(QubitPair p) const {
        auto it = entries.find(p);
        if (it == entries.end()) {
            throw ConfigError("LUT has no entry for pair " + p.str());
        }
        if (!it->second.ok) {
            throw ConfigError("LUT entry for pair " + p.str() + " failed: " + it->second.failure);
        }
        return it->second;
    }
};

/// Benchmarks every grid point on the device and fits each pair.
///
/// Pairs whose fit fails are kept with ok = false. The number of device executions is
/// recorded and checked against |pairs| n1 n2.
inline Lut build_lut(const DeviceModel &dev, std::vector<QubitPair> pairs, int n1, int n2, std::uint64_t shots,
                     std::uint64_t seed) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const QubitPair &p : pairs) {
        if (!dev.geometry.has_pair(p)) {
            throw ConfigError("pair " + p.str() + " is not in the coupling map");
        }
    }
    const auto grid = build_grid(pairs, n1, n2);
    Lut lut;
    lut.device_clock = dev.clock_days;
    std::map<QubitPair, std::vector<Measurement>> data;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const GridPoint &g = grid[i];
        const double p = benchmark_rzx(dev, g.pair, g.theta, g.dsr, shots, derive_seed(seed, i));
        ++lut.executions;
        data[g.pair].push_back({g.theta, g.dsr, p, shots});
    }
    const std::uint64_t expected = static_cast<std::uint64_t>(pairs.size()) * static_cast<std::uint64_t>(n1) *
                                   static_cast<std::uint64_t>(n2);
    if (lut.executions != expected) {
        throw ContractViolation("LUT build ran " + std::to_string(lut.executions) + " benchmarks, expected " +
                                std::to_string(expected));
    }
    for (const QubitPair &p : pairs) {
        ErrorFitParams e;
        try {
            e = fit_error_params(data[p], p);
        } catch (const NumericError &err) {
            e.pair = p;
            e.ok = false;
            e.failure = err.what();
        }
        e.clock_days = dev.clock_days;
        e.n1 = n1;
        e.n2 = n2;
        e.shots = shots;
        lut.entries[p] = e;
    }
    return lut;
}

}  // namespace qupad

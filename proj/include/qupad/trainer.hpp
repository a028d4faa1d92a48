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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/compiler.hpp"
#include "qupad/errors.hpp"
#include "qupad/geometry.hpp"
#include "qupad/gradient.hpp"
#include "qupad/rng.hpp"
#include "qupad/statevector.hpp"

namespace qupad {

// ---------------------------------------------------------------------------------------
// Duration regularizer

/// round(theta / pi) with halves away from zero.
inline double nearest_pi_multiple(double theta) { return std::round(theta / kPi) * kPi; }

/// Mean distance of the masked parameters to the nearest multiple of pi. 0 for an empty mask.
inline double regu_loss(std::span<const double> params, std::span<const int> mask) {
    if (mask.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (int i : mask) {
        const double t = params[static_cast<std::size_t>(i)];
        s += std::abs(t - nearest_pi_multiple(t));
    }
    return s / static_cast<double>(mask.size());
}

/// Subgradient of regu_loss: sign(theta - round(theta/pi) pi) / n, zero at the kinks
/// (multiples of pi and odd multiples of pi/2).
inline std::vector<double> regu_gradient(std::span<const double> params, std::span<const int> mask) {
    std::vector<double> g(params.size(), 0.0);
    if (mask.empty()) {
        return g;
    }
    const double inv_n = 1.0 / static_cast<double>(mask.size());
    for (int i : mask) {
        const double t = params[static_cast<std::size_t>(i)];
        const double d = t - nearest_pi_multiple(t);
        if (d == 0.0 || std::abs(std::abs(d) - kHalfPi) < 1e-15) {
            continue;
        }
        g[static_cast<std::size_t>(i)] += (d > 0.0 ? 1.0 : -1.0) * inv_n;
    }
    return g;
}

// ---------------------------------------------------------------------------------------
// Tasks

struct Sample {
    std::vector<double> features;
    int label = 0;
};

/// Angle-encoded classification: feature i drives Ry(x_i) on qubit i before the ansatz;
/// class scores are scale * readout * (<Z_0>, ..., <Z_{n-1}>) fed to a softmax.
struct Classifier {
    std::vector<Sample> data;
    std::vector<std::vector<double>> readout;  // classes x qubits
    double scale = 2.0;

    int classes() const { return static_cast<int>(readout.size()); }
};

struct TaskSpec {
    enum class Kind : std::uint8_t { Vqe, Classify };
    Kind kind = Kind::Vqe;
    Observable observable;
    Classifier classifier;

    static TaskSpec vqe(Observable o) {
        TaskSpec t;
        t.kind = Kind::Vqe;
        t.observable = std::move(o);
        return t;
    }
    static TaskSpec classify(Classifier c) {
        TaskSpec t;
        t.kind = Kind::Classify;
        t.classifier = std::move(c);
        return t;
    }

    void validate(const Circuit &c) const {
        if (kind == Kind::Vqe) {
            if (observable.n != c.n) {
                throw ArgumentError("observable width does not match the circuit");
            }
            observable.validate();
            return;
        }
        if (classifier.data.empty() || classifier.readout.empty()) {
            throw ArgumentError("classification task needs data and a readout map");
        }
        for (const auto &row : classifier.readout) {
            if (static_cast<int>(row.size()) != c.n) {
                throw ArgumentError("readout row width does not match the qubit count");
            }
        }
        for (const Sample &s : classifier.data) {
            if (static_cast<int>(s.features.size()) > c.n) {
                throw ArgumentError("sample has more features than the encoding has qubits");
            }
            if (s.label < 0 || s.label >= classifier.classes()) {
                throw ArgumentError("sample label out of range");
            }
        }
    }
};

/// Synthetic 3-class problem on 4 features: Gaussian blobs around fixed centers in [0, pi]^4.
inline Classifier synthetic_classifier(int samples_per_class, std::uint64_t seed, double noise = 0.25) {
    const std::array<std::array<double, 4>, 3> centers{{{0.4, 0.4, 2.6, 2.6}, {2.6, 0.4, 0.4, 2.6}, {1.5, 2.7, 1.5, 0.4}}};
    Classifier c;
    c.readout = {{1.0, 1.0, -1.0, -1.0}, {-1.0, 1.0, 1.0, -1.0}, {0.0, -1.0, 0.0, 1.0}};
    Rng rng(seed);
    for (int k = 0; k < samples_per_class; ++k) {
        for (int label = 0; label < 3; ++label) {
            Sample s;
            s.label = label;
            for (double mu : centers[static_cast<std::size_t>(label)]) {
                s.features.push_back(mu + noise * rng.normal());
            }
            c.data.push_back(std::move(s));
        }
    }
    return c;
}

namespace detail {

inline Circuit encoded(const Circuit &ansatz, const Sample &s) {
    Circuit c(ansatz.n);
    c.params = ansatz.params;
    for (std::size_t q = 0; q < s.features.size(); ++q) {
        c.ry(static_cast<int>(q), s.features[q]);
    }
    c.gates.insert(c.gates.end(), ansatz.gates.begin(), ansatz.gates.end());
    return c;
}

inline std::vector<double> class_probabilities(const Classifier &cl, const StateVector &psi) {
    std::vector<double> z(static_cast<std::size_t>(psi.n));
    for (int q = 0; q < psi.n; ++q) {
        Observable o{psi.n, {Observable::single(psi.n, q, 'Z')}};
        z[static_cast<std::size_t>(q)] = expectation(psi, o);
    }
    std::vector<double> scores;
    for (const auto &row : cl.readout) {
        scores.push_back(cl.scale * std::inner_product(row.begin(), row.end(), z.begin(), 0.0));
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    double norm = 0.0;
    for (double &s : scores) {
        s = std::exp(s - top);
        norm += s;
    }
    for (double &s : scores) {
        s /= norm;
    }
    return scores;
}

}  // namespace detail

enum class GradientSource : std::uint8_t { Adjoint, ParameterShift };

/// Energy for VQE; mean cross-entropy for classification.
inline double task_loss(const TaskSpec &task, const Circuit &c, std::span<const double> params) {
    if (task.kind == TaskSpec::Kind::Vqe) {
        return expectation_value(c, task.observable, params);
    }
    double total = 0.0;
    for (const Sample &s : task.classifier.data) {
        const auto p = detail::class_probabilities(task.classifier, simulate(detail::encoded(c, s), params));
        total -= std::log(std::max(p[static_cast<std::size_t>(s.label)], 1e-300));
    }
    return total / static_cast<double>(task.classifier.data.size());
}

inline std::vector<double> task_gradient(const TaskSpec &task, const Circuit &c, std::span<const double> params,
                                         GradientSource src = GradientSource::Adjoint) {
    auto grad_of = [&](const Circuit &circ, const Observable &o) {
        return src == GradientSource::Adjoint ? adjoint_gradient(circ, o, params)
                                              : parameter_shift_gradient(circ, o, params);
    };
    if (task.kind == TaskSpec::Kind::Vqe) {
        return grad_of(c, task.observable);
    }
    // d CE / d theta = sum_c (p_c - y_c) scale d<O_c>/d theta, one weighted observable per sample.
    const Classifier &cl = task.classifier;
    std::vector<double> g(params.size(), 0.0);
    for (const Sample &s : cl.data) {
        const Circuit circ = detail::encoded(c, s);
        const auto p = detail::class_probabilities(cl, simulate(circ, params));
        Observable o;
        o.n = c.n;
        for (int q = 0; q < c.n; ++q) {
            double w = 0.0;
            for (int k = 0; k < cl.classes(); ++k) {
                const double y = k == s.label ? 1.0 : 0.0;
                w += (p[static_cast<std::size_t>(k)] - y) * cl.scale *
                     cl.readout[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)];
            }
            o.terms.push_back(Observable::single(c.n, q, 'Z', w));
        }
        const auto gs = grad_of(circ, o);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += gs[i];
        }
    }
    for (double &v : g) {
        v /= static_cast<double>(cl.data.size());
    }
    return g;
}

/// Fraction of samples whose most probable class is the label.
inline double accuracy(const TaskSpec &task, const Circuit &c, std::span<const double> params) {
    if (task.kind != TaskSpec::Kind::Classify) {
        throw ArgumentError("accuracy is defined for classification tasks");
    }
    int hits = 0;
    for (const Sample &s : task.classifier.data) {
        const auto p = detail::class_probabilities(task.classifier, simulate(detail::encoded(c, s), params));
        hits += static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) == s.label;
    }
    return static_cast<double>(hits) / static_cast<double>(task.classifier.data.size());
}

/// task_loss + beta * regu_loss over the Rzx parameters.
inline double total_loss(std::span<const double> params, const TaskSpec &task, const Circuit &c, double beta) {
    const double t = task_loss(task, c, params);
    if (beta == 0.0) {
        return t;
    }
    const auto mask = c.rzx_param_indices();
    return t + beta * regu_loss(params, mask);
}

inline std::vector<double> total_gradient(std::span<const double> params, const TaskSpec &task, const Circuit &c,
                                          double beta, GradientSource src = GradientSource::Adjoint) {
    auto g = task_gradient(task, c, params, src);
    if (beta != 0.0) {
        const auto mask = c.rzx_param_indices();
        const auto r = regu_gradient(params, mask);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] += beta * r[i];
        }
    }
    return g;
}

// ---------------------------------------------------------------------------------------
// Training

enum class OptimizerKind : std::uint8_t { Adam, GradientDescent, NelderMead };

inline std::string optimizer_name(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::GradientDescent: return "gd";
        case OptimizerKind::NelderMead: return "nelder-mead";
    }
    return "?";
}

inline OptimizerKind optimizer_from_name(const std::string &s) {
    for (auto k : {OptimizerKind::Adam, OptimizerKind::GradientDescent, OptimizerKind::NelderMead}) {
        if (optimizer_name(k) == s) {
            return k;
        }
    }
    throw ConfigError("unknown optimizer '" + s + "'");
}

struct TrainConfig {
    double beta = 0.0;
    double lr = 0.05;
    double lr_decay = 1.0;  // learning rate multiplier per iteration
    int iterations = 300;
    OptimizerKind optimizer = OptimizerKind::Adam;
    GradientSource gradient = GradientSource::Adjoint;
    std::uint64_t seed = 0;
    int duration_every = 1;  // compile and record the dsr = 1 duration every k iterations

    void validate() const {
        if (!(beta >= 0.0) || !(lr > 0.0) || !(lr_decay > 0.0 && lr_decay <= 1.0) || iterations < 0 ||
            duration_every < 1) {
            throw ConfigError("invalid training configuration");
        }
    }
};

struct TraceRow {
    int iteration = 0;
    double task_loss = 0.0;
    double regu_loss = 0.0;
    std::int64_t duration = -1;  // dsr = 1 schedule length in dt, -1 when not recorded
};

struct TrainResult {
    std::vector<double> params;
    std::vector<TraceRow> trace;
    double task_loss = 0.0;
    double regu_loss = 0.0;
    std::int64_t duration = 0;
};

/// Schedule length of the circuit at `params` with every pair at dsr = 1.
inline std::int64_t nominal_duration(const Circuit &c, std::span<const double> params, const DeviceGeometry &dev) {
    Circuit bound = c;
    bound.params.assign(params.begin(), params.end());
    return compile_rzx_nominal(bound, dev).duration();
}

namespace detail {

// Nelder-Mead on f with the standard coefficients; one iteration per call of `step`.
struct NelderMead {
    std::vector<std::vector<double>> pts;
    std::vector<double> vals;

    void init(const std::vector<double> &x0, double spread, const std::function<double(const std::vector<double> &)> &f) {
        pts = {x0};
        for (std::size_t i = 0; i < x0.size(); ++i) {
            auto p = x0;
            p[i] += spread;
            pts.push_back(p);
        }
        vals.clear();
        for (const auto &p : pts) {
            vals.push_back(f(p));
        }
    }

    void step(const std::function<double(const std::vector<double> &)> &f) {
        const std::size_t m = pts.size();
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2;
        std::vector<double> v2;
        for (std::size_t i : idx) {
            p2.push_back(pts[i]);
            v2.push_back(vals[i]);
        }
        pts = std::move(p2);
        vals = std::move(v2);
        const std::size_t dim = pts[0].size();
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                centroid[j] += pts[i][j] / static_cast<double>(m - 1);
            }
        }
        auto along = [&](double t) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                x[j] = centroid[j] + t * (pts[m - 1][j] - centroid[j]);
            }
            return x;
        };
        const auto xr = along(-1.0);
        const double fr = f(xr);
        if (fr < vals[0]) {
            const auto xe = along(-2.0);
            const double fe = f(xe);
            pts[m - 1] = fe < fr ? xe : xr;
            vals[m - 1] = std::min(fe, fr);
            return;
        }
        if (fr < vals[m - 2]) {
            pts[m - 1] = xr;
            vals[m - 1] = fr;
            return;
        }
        const auto xc = fr < vals[m - 1] ? along(-0.5) : along(0.5);
        const double fc = f(xc);
        if (fc < std::min(fr, vals[m - 1])) {
            pts[m - 1] = xc;
            vals[m - 1] = fc;
            return;
        }
        for (std::size_t i = 1; i < m; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
            }
            vals[i] = f(pts[i]);
        }
    }

    const std::vector<double> &best() const {
        return pts[static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin())];
    }
};

}  // namespace detail

/// Minimizes task_loss + beta * regu_loss from the circuit's current parameters on the
/// noiseless statevector. Throws DivergenceError on a non-finite loss.
inline TrainResult train(const Circuit &c, const TaskSpec &task, const TrainConfig &cfg,
                         const DeviceGeometry &dev) {
    cfg.validate();
    c.validate();
    task.validate(c);
    if (c.params.empty()) {
        throw ArgumentError("circuit has no trainable parameters");
    }
    const auto mask = c.rzx_param_indices();
    std::vector<double> x = c.params;
    std::vector<double> last_finite = x;
    TrainResult res;

    auto record = [&](int it, const std::vector<double> &p) {
        TraceRow row;
        row.iteration = it;
        row.task_loss = task_loss(task, c, p);
        row.regu_loss = regu_loss(p, mask);
        if (!std::isfinite(row.task_loss)) {
            throw DivergenceError("non-finite loss at iteration " + std::to_string(it), last_finite);
        }
        last_finite = p;
        if (it % cfg.duration_every == 0 || it == cfg.iterations) {
            row.duration = nominal_duration(c, p, dev);
        }
        res.trace.push_back(row);
    };

    if (cfg.optimizer == OptimizerKind::NelderMead) {
        std::function<double(const std::vector<double> &)> f = [&](const std::vector<double> &p) {
            return total_loss(p, task, c, cfg.beta);
        };
        detail::NelderMead nm;
        nm.init(x, cfg.lr * 10.0, f);
        record(0, nm.best());
        for (int it = 1; it <= cfg.iterations; ++it) {
            nm.step(f);
            record(it, nm.best());
        }
        x = nm.best();
    } else {
        std::vector<double> m(x.size(), 0.0);
        std::vector<double> v(x.size(), 0.0);
        const double b1 = 0.9;
        const double b2 = 0.999;
        double lr = cfg.lr;
        record(0, x);
        for (int it = 1; it <= cfg.iterations; ++it) {
            const auto g = total_gradient(x, task, c, cfg.beta, cfg.gradient);
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (!std::isfinite(g[i])) {
                    throw DivergenceError("non-finite gradient at iteration " + std::to_string(it), last_finite);
                }
                if (cfg.optimizer == OptimizerKind::GradientDescent) {
                    x[i] -= lr * g[i];
                    continue;
                }
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                const double mh = m[i] / (1.0 - std::pow(b1, it));
                const double vh = v[i] / (1.0 - std::pow(b2, it));
                x[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
            }
            lr *= cfg.lr_decay;
            record(it, x);
        }
    }
    res.params = x;
    res.task_loss = res.trace.back().task_loss;
    res.regu_loss = res.trace.back().regu_loss;
    res.duration = nominal_duration(c, x, dev);
    return res;
}

}  // namespace qupad

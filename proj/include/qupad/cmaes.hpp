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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "qupad/errors.hpp"
#include "qupad/rng.hpp"

namespace qupad {

struct CmaesOptions {
    int generations = 30;
    int population = 0;  // 0: 4 + floor(3 ln dim)
    double sigma0 = 0.15;
    std::uint64_t seed = 0;
    double penalty = 1e3;  // weight of the squared distance outside the box
};

struct GenerationRecord {
    int generation = 0;
    double best_in_generation = 0.0;
    double best_so_far = 0.0;
    double sigma = 0.0;
    int infeasible = 0;  // candidates whose loss was +inf
};

struct CmaesResult {
    std::vector<double> best;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<GenerationRecord> trace;
    std::uint64_t evaluations = 0;
};

inline int default_population(int dim) { return 4 + static_cast<int>(std::floor(3.0 * std::log(dim))); }

/// (mu/mu_w, lambda) CMA-ES with cumulative step-size adaptation and rank-one plus rank-mu
/// covariance updates.
///
/// Candidates outside [lo, hi] are evaluated at their clipped point and charged
/// penalty * |x - clip(x)|^2 on top. The distribution update uses the unclipped samples.
/// The returned point is the best clipped candidate seen. Deterministic per seed.
inline CmaesResult cma_es_minimize(const std::function<double(const std::vector<double> &)> &loss,
                                   std::vector<double> x0, const std::vector<double> &lo,
                                   const std::vector<double> &hi, const CmaesOptions &opt) {
    const int n = static_cast<int>(x0.size());
    if (n < 1) {
        throw ArgumentError("CMA-ES needs dimension >= 1");
    }
    if (lo.size() != x0.size() || hi.size() != x0.size()) {
        throw ArgumentError("bounds must match the dimension");
    }
    if (!(opt.sigma0 > 0.0) || opt.generations < 1) {
        throw ArgumentError("CMA-ES needs sigma0 > 0 and at least one generation");
    }
    const int lambda = opt.population > 0 ? opt.population : default_population(n);
    if (lambda < 4) {
        throw ArgumentError("population must be >= 4");
    }
    const int mu = lambda / 2;
    Eigen::VectorXd w(mu);
    for (int i = 0; i < mu; ++i) {
        w(i) = std::log(mu + 0.5) - std::log(i + 1.0);
    }
    w /= w.sum();
    const double mueff = 1.0 / w.squaredNorm();
    const double dn = n;
    const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
    const double ds = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
    const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
    const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
    const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

    Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    double sigma = opt.sigma0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);
    Rng rng(opt.seed);

    CmaesResult res;
    auto clipped = [&](const Eigen::VectorXd &x, double *outside) {
        std::vector<double> v(static_cast<std::size_t>(n));
        double d2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            v[iu] = std::clamp(x(i), lo[iu], hi[iu]);
            d2 += (x(i) - v[iu]) * (x(i) - v[iu]);
        }
        *outside = d2;
        return v;
    };

    Eigen::MatrixXd ys(n, lambda);
    std::vector<double> fit(static_cast<std::size_t>(lambda));
    for (int g = 0; g < opt.generations; ++g) {
        GenerationRecord rec;
        rec.generation = g;
        rec.best_in_generation = std::numeric_limits<double>::infinity();
        for (int k = 0; k < lambda; ++k) {
            Eigen::VectorXd z(n);
            for (int i = 0; i < n; ++i) {
                z(i) = rng.normal();
            }
            ys.col(k) = basis * scales.cwiseProduct(z);
            const Eigen::VectorXd x = mean + sigma * ys.col(k);
            double outside = 0.0;
            const std::vector<double> v = clipped(x, &outside);
            const double f = loss(v);
            ++res.evaluations;
            const auto ku = static_cast<std::size_t>(k);
            if (std::isinf(f) && f > 0.0) {
                ++rec.infeasible;
            }
            fit[ku] = std::isnan(f) ? std::numeric_limits<double>::infinity() : f + opt.penalty * outside;
            if (fit[ku] < rec.best_in_generation) {
                rec.best_in_generation = fit[ku];
            }
            if (f < res.best_loss) {
                res.best_loss = f;
                res.best = v;
            }
        }
        std::vector<int> order(static_cast<std::size_t>(lambda));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fit[static_cast<std::size_t>(a)] < fit[static_cast<std::size_t>(b)];
        });

        Eigen::VectorXd yw = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < mu; ++i) {
            yw += w(i) * ys.col(order[static_cast<std::size_t>(i)]);
        }
        mean += sigma * yw;

        // C^{-1/2} yw = B D^{-1} B^T yw
        const Eigen::VectorXd inv_sqrt_yw = basis * (basis.transpose() * yw).cwiseQuotient(scales);
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_yw;
        const double ps_norm = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (g + 1)));
        const bool hsig = ps_norm < (1.4 + 2.0 / (dn + 1.0)) * chi_n;
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const auto y = ys.col(order[static_cast<std::size_t>(i)]);
            rank_mu += w(i) * y * y.transpose();
        }
        const double hsig_fix = hsig ? 0.0 : cc * (2.0 - cc);
        cov = (1.0 - c1 - cmu) * cov + c1 * (pc * pc.transpose() + hsig_fix * cov) + cmu * rank_mu;
        cov = 0.5 * (cov + cov.transpose());
        sigma *= std::exp((cs / ds) * (ps.norm() / chi_n - 1.0));

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        basis = eig.eigenvectors();
        scales = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();

        rec.best_so_far = res.best_loss;
        rec.sigma = sigma;
        res.trace.push_back(rec);
        if (sigma * scales.maxCoeff() < 1e-14 * (1.0 + mean.cwiseAbs().maxCoeff())) {
            break;
        }
    }
    return res;
}

}  // namespace qupad

// Binary (grouped binomial) regression with logit or probit link,
// including the cumulant tensors and the modified-IRLS iterate.
#pragma once

#include <cmath>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <vector>

#include "medscore/model.hpp"

namespace medscore {

enum class BinaryLink { logit, probit };

struct BinaryDesign {
    std::vector<std::vector<double>> x;  // n rows, p columns
    std::vector<double> successes;       // y_i in [0, trials_i]
    std::vector<double> trials;          // >= 1; all ones for Bernoulli data
    BinaryLink link = BinaryLink::logit;
};

namespace detail {

// Per-observation link quantities. h(eta) = F'/F and h(-eta) = F'/(1-F)
// carry all tail-stable pieces.
struct LinkPoint {
    double F, dF;
    double hpos;   // F'/F
    double hneg;   // F'/(1-F)
    double w;      // A F' = hpos * hneg
    double c3;     // A^3 F(1-F)(1-2F) = w * (hpos - hneg)
    double bdf;    // B F'
    double logF, log1mF;
};

inline LinkPoint link_point(BinaryLink link, double eta) {
    LinkPoint q{};
    if (link == BinaryLink::logit) {
        // F' = F(1-F); A = 1, B = 0.
        if (eta >= 0.0) {
            const double e = std::exp(-eta);
            q.F = 1.0 / (1.0 + e);
            q.log1mF = -eta - std::log1p(e);
            q.logF = -std::log1p(e);
        } else {
            const double e = std::exp(eta);
            q.F = e / (1.0 + e);
            q.logF = eta - std::log1p(e);
            q.log1mF = -std::log1p(e);
        }
        q.dF = q.F * (1.0 - q.F);
        q.hpos = 1.0 - q.F;
        q.hneg = q.F;
        q.w = q.dF;
        q.c3 = q.dF * (1.0 - 2.0 * q.F);
        q.bdf = 0.0;
    } else {
        q.F = norm_cdf(eta);
        q.dF = norm_pdf(eta);
        q.logF = log_norm_cdf(eta);
        q.log1mF = log_norm_cdf(-eta);
        q.hpos = mills_ratio_inv(eta);
        q.hneg = mills_ratio_inv(-eta);
        q.w = q.hpos * q.hneg;
        q.c3 = q.w * (q.hpos - q.hneg);
        q.bdf = q.w * (-eta - (q.hpos - q.hneg));
    }
    return q;
}

}  // namespace detail

inline ModelSpec make_binary(BinaryDesign design) {
    const int n = static_cast<int>(design.x.size());
    if (n == 0) throw std::invalid_argument("make_binary: empty design");
    const int p = static_cast<int>(design.x[0].size());
    if (design.trials.empty()) design.trials.assign(n, 1.0);
    if (static_cast<int>(design.successes.size()) != n ||
        static_cast<int>(design.trials.size()) != n)
        throw std::invalid_argument("make_binary: row count mismatch");
    for (int i = 0; i < n; ++i) {
        if (design.trials[i] < 1.0)
            throw std::invalid_argument("make_binary: trials must be >= 1");
        if (design.successes[i] < 0.0 || design.successes[i] > design.trials[i])
            throw std::invalid_argument("make_binary: successes out of range");
    }
    // Rank check on X^T X; deficiency is a warning, not an error.
    {
        Matrix xtx(p, p);
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < p; ++r)
                for (int s = 0; s < p; ++s)
                    xtx(r, s) += design.x[i][r] * design.x[i][s];
        try {
            cholesky(xtx);
        } catch (const SingularInformationError&) {
            std::cerr << "make_binary: design matrix is rank deficient\n";
        }
    }

    auto shared = std::make_shared<BinaryDesign>(std::move(design));
    ModelSpec m;
    m.p = p;
    m.labels.resize(p);
    for (int r = 0; r < p; ++r) m.labels[r] = "beta" + std::to_string(r + 1);
    m.default_start.assign(p, 0.0);
    m.log_likelihood = [shared, n](const ParameterPoint& beta) {
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            double eta = 0.0;
            for (std::size_t r = 0; r < beta.size(); ++r)
                eta += shared->x[i][r] * beta[r];
            const auto q = detail::link_point(shared->link, eta);
            ll += shared->successes[i] * q.logF +
                  (shared->trials[i] - shared->successes[i]) * q.log1mF;
        }
        return ll;
    };
    m.cumulant_bundle = [shared, n, p](const ParameterPoint& beta) {
        CumulantBundle b(p);
        for (int i = 0; i < n; ++i) {
            const auto& x = shared->x[i];
            double eta = 0.0;
            for (int r = 0; r < p; ++r) eta += x[r] * beta[r];
            const auto q = detail::link_point(shared->link, eta);
            const double y = shared->successes[i];
            const double mt = shared->trials[i];
            // score: y h(eta) - (m-y) h(-eta), tail stable
            const double u = y * q.hpos - (mt - y) * q.hneg;
            for (int r = 0; r < p; ++r) {
                b.score[r] += x[r] * u;
                for (int s = 0; s < p; ++s) {
                    b.info(r, s) += mt * x[r] * x[s] * q.w;
                    for (int t = 0; t < p; ++t) {
                        const double xxx = x[r] * x[s] * x[t];
                        b.nu3(r, s, t) += mt * xxx * q.c3;
                        b.numix(r, s, t) += mt * xxx * q.bdf;
                    }
                }
            }
        }
        return b;
    };
    return m;
}

// One modified-IRLS iterate for binary regression:
//   beta+ = (X^T W X)^{-1} X^T W [X(beta + M1) + v],  v_i = (ybar_i - F)/F'.
// With M1 = 0 this is plain Fisher scoring for the MLE; with the median
// adjustment it reproduces the generic modified scoring step exactly.
inline ParameterPoint binary_irls_step(const BinaryDesign& design,
                                       const ParameterPoint& beta,
                                       const std::vector<double>& m1) {
    const int n = static_cast<int>(design.x.size());
    const int p = static_cast<int>(design.x[0].size());
    Matrix xtwx(p, p);
    std::vector<double> xtwz(p, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto& x = design.x[i];
        double eta = 0.0;
        for (int r = 0; r < p; ++r) eta += x[r] * beta[r];
        const auto q = detail::link_point(design.link, eta);
        const double mt = design.trials.empty() ? 1.0 : design.trials[i];
        const double ybar = design.successes[i] / mt;
        const double v = (ybar - q.F) / q.dF;
        double shifted = v;
        for (int r = 0; r < p; ++r) shifted += x[r] * (beta[r] + m1[r]);
        for (int r = 0; r < p; ++r) {
            xtwz[r] += mt * q.w * x[r] * shifted;
            for (int s = 0; s < p; ++s) xtwx(r, s) += mt * q.w * x[r] * x[s];
        }
    }
    return solve_spd(xtwx, xtwz);
}

}  // namespace medscore

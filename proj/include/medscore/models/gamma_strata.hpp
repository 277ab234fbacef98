// Gamma samples with a common shape parameter psi and stratum rates
// lambda_a. Parameter order (psi, lambda_1, ..., lambda_q).
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "medscore/model.hpp"

namespace medscore {

struct GammaStrataDesign {
    // observations[a][j] > 0, a = 1..q strata, j = 1..m per stratum
    std::vector<std::vector<double>> observations;
};

inline ModelSpec make_gamma_strata(GammaStrataDesign design) {
    const int q = static_cast<int>(design.observations.size());
    if (q < 1) throw std::invalid_argument("make_gamma_strata: need q >= 1");
    const int m = static_cast<int>(design.observations[0].size());
    if (m < 2) throw std::invalid_argument("make_gamma_strata: need m >= 2");
    std::vector<double> sum_y(q, 0.0), sum_log_y(q, 0.0);
    for (int a = 0; a < q; ++a) {
        if (static_cast<int>(design.observations[a].size()) != m)
            throw std::invalid_argument("make_gamma_strata: ragged strata");
        for (double y : design.observations[a]) {
            if (!(y > 0.0))
                throw std::invalid_argument(
                    "make_gamma_strata: observations must be positive");
            sum_y[a] += y;
            sum_log_y[a] += std::log(y);
        }
    }

    const int p = q + 1;
    ModelSpec spec;
    spec.p = p;
    spec.labels.resize(p);
    spec.labels[0] = "psi";
    for (int a = 0; a < q; ++a) spec.labels[a + 1] = "lambda" + std::to_string(a + 1);
    spec.in_domain = [](const ParameterPoint& th) {
        for (double v : th)
            if (!(v > 0.0)) return false;
        return true;
    };
    spec.default_start.resize(p);
    spec.default_start[0] = 1.0;
    for (int a = 0; a < q; ++a) spec.default_start[a + 1] = m / sum_y[a];

    spec.log_likelihood = [q, m, sum_y, sum_log_y](const ParameterPoint& th) {
        const double psi = th[0];
        double ll = 0.0;
        for (int a = 0; a < q; ++a) {
            const double lam = th[a + 1];
            ll += m * psi * std::log(lam) + (psi - 1.0) * sum_log_y[a] -
                  lam * sum_y[a] - m * std::lgamma(psi);
        }
        return ll;
    };
    spec.cumulant_bundle = [q, m, p, sum_y, sum_log_y](const ParameterPoint& th) {
        const double psi = th[0];
        CumulantBundle b(p);
        const double pg0 = polygamma(0, psi);
        const double pg1 = polygamma(1, psi);
        const double pg2 = polygamma(2, psi);
        b.info(0, 0) = static_cast<double>(m) * q * pg1;
        b.nu3(0, 0, 0) = static_cast<double>(m) * q * pg2;
        for (int a = 0; a < q; ++a) {
            const double lam = th[a + 1];
            const int ia = a + 1;
            b.score[0] += sum_log_y[a] + m * std::log(lam) - m * pg0;
            b.score[ia] = m * psi / lam - sum_y[a];
            b.info(0, ia) = b.info(ia, 0) = -m / lam;
            b.info(ia, ia) = m * psi / (lam * lam);
            const double c_aap = m / (lam * lam);
            b.nu3(ia, ia, 0) = b.nu3(ia, 0, ia) = b.nu3(0, ia, ia) = c_aap;
            b.nu3(ia, ia, ia) = -2.0 * m * psi / (lam * lam * lam);
            // canonical exponential family: numix is identically zero
        }
        return b;
    };
    return spec;
}

}  // namespace medscore

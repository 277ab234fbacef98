// Skew-normal shape parameter model, density 2 phi(y) Phi(theta y).
// Expected quantities are the integrals a_kh(theta) = E{Y^k zeta1(theta Y)^h}
// evaluated by adaptive quadrature.
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "medscore/model.hpp"
#include "medscore/numerics.hpp"

namespace medscore {

// E{Y^k zeta1(theta Y)^h} under the skew-normal density.
inline double skew_normal_a(int k, int h, double theta,
                            const QuadratureSettings& settings = {}) {
    return integrate_real_line(
        [k, h, theta](double y) {
            const double z = mills_ratio_inv(theta * y);
            double zh = 1.0;
            for (int j = 0; j < h; ++j) zh *= z;
            double yk = 1.0;
            for (int j = 0; j < k; ++j) yk *= y;
            return yk * zh * 2.0 * norm_pdf(y) * norm_cdf(theta * y);
        },
        settings);
}

inline ModelSpec make_skew_normal(std::vector<double> data,
                                  QuadratureSettings settings = {}) {
    const int n = static_cast<int>(data.size());
    if (n < 1) throw std::invalid_argument("make_skew_normal: need n >= 1");
    auto y = std::make_shared<std::vector<double>>(std::move(data));

    ModelSpec m;
    m.p = 1;
    m.labels = {"theta"};
    m.default_start = {0.0};
    m.log_likelihood = [y](const ParameterPoint& th) {
        const double theta = th[0];
        double ll = 0.0;
        for (double yi : *y)
            ll += std::log(2.0) - 0.5 * yi * yi -
                  0.5 * std::log(2.0 * pi) + log_norm_cdf(theta * yi);
        return ll;
    };
    m.cumulant_bundle = [y, n, settings](const ParameterPoint& th) {
        const double theta = th[0];
        CumulantBundle b(1);
        for (double yi : *y) b.score[0] += yi * mills_ratio_inv(theta * yi);
        const double a22 = skew_normal_a(2, 2, theta, settings);
        const double a33 = skew_normal_a(3, 3, theta, settings);
        const double a42 = skew_normal_a(4, 2, theta, settings);
        b.info(0, 0) = n * a22;
        b.nu3(0, 0, 0) = n * a33;
        // Firth's U* = U - theta a42/(2 a22) fixes nu_{theta,theta theta}:
        b.numix(0, 0, 0) = -n * (theta * a42 + a33);
        return b;
    };
    return m;
}

}  // namespace medscore

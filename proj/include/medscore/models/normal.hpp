// Normal models with variance as the parameter of interest: known mean
// (p = 1 in psi) and unknown mean (p = 2 in (mu, psi)).
#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "medscore/model.hpp"

namespace medscore {

inline ModelSpec make_normal(std::optional<double> known_mean,
                             std::vector<double> data) {
    const int n = static_cast<int>(data.size());
    if (known_mean) {
        if (n < 2) throw std::invalid_argument("make_normal: need n >= 2");
        const double mu = *known_mean;
        double s = 0.0;
        for (double y : data) s += (y - mu) * (y - mu);

        ModelSpec m;
        m.p = 1;
        m.labels = {"psi"};
        m.in_domain = [](const ParameterPoint& th) { return th[0] > 0.0; };
        m.default_start = {s / n};
        m.log_likelihood = [n, s](const ParameterPoint& th) {
            const double psi = th[0];
            return -0.5 * n * std::log(2.0 * pi * psi) - s / (2.0 * psi);
        };
        m.cumulant_bundle = [n, s](const ParameterPoint& th) {
            const double psi = th[0];
            CumulantBundle b(1);
            b.score[0] = -0.5 * n / psi + s / (2.0 * psi * psi);
            b.info(0, 0) = 0.5 * n / (psi * psi);
            b.nu3(0, 0, 0) = n / (psi * psi * psi);
            b.numix(0, 0, 0) = -n / (psi * psi * psi);
            return b;
        };
        return m;
    }

    if (n < 3) throw std::invalid_argument("make_normal: need n >= 3");
    const double ybar = std::accumulate(data.begin(), data.end(), 0.0) / n;
    double s = 0.0;
    for (double y : data) s += (y - ybar) * (y - ybar);

    ModelSpec m;
    m.p = 2;
    m.labels = {"mu", "psi"};
    m.in_domain = [](const ParameterPoint& th) { return th[1] > 0.0; };
    m.default_start = {ybar, s / n};
    m.log_likelihood = [n, s, ybar](const ParameterPoint& th) {
        const double mu = th[0], psi = th[1];
        const double ss = s + n * (ybar - mu) * (ybar - mu);
        return -0.5 * n * std::log(2.0 * pi * psi) - ss / (2.0 * psi);
    };
    m.cumulant_bundle = [n, s, ybar](const ParameterPoint& th) {
        const double mu = th[0], psi = th[1];
        const double ss = s + n * (ybar - mu) * (ybar - mu);
        CumulantBundle b(2);
        b.score[0] = n * (ybar - mu) / psi;
        b.score[1] = -0.5 * n / psi + ss / (2.0 * psi * psi);
        b.info(0, 0) = n / psi;
        b.info(1, 1) = 0.5 * n / (psi * psi);
        const double psi2 = psi * psi, psi3 = psi2 * psi;
        // nu_{mu,mu,psi} = n/psi^2 in all permutations; nu_{psi^3} = n/psi^3
        b.nu3(0, 0, 1) = b.nu3(0, 1, 0) = b.nu3(1, 0, 0) = n / psi2;
        b.nu3(1, 1, 1) = n / psi3;
        // nu_{mu,mu psi} = -n/psi^2; nu_{psi,psi psi} = -n/psi^3
        b.numix(0, 0, 1) = b.numix(0, 1, 0) = -n / psi2;
        b.numix(1, 1, 1) = -n / psi3;
        return b;
    };
    return m;
}

}  // namespace medscore

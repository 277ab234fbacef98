// Beta regression with mean link (logit) and precision parameter phi.
// Parameter order (beta_1, ..., beta_p, phi).
#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "medscore/model.hpp"
#include "medscore/numerics.hpp"

namespace medscore {

struct BetaRegDesign {
    std::vector<std::vector<double>> x;  // n rows, k columns
    std::vector<double> response;        // strictly inside (0,1)
};

inline ModelSpec make_beta_regression(BetaRegDesign design) {
    const int n = static_cast<int>(design.x.size());
    if (n == 0) throw std::invalid_argument("make_beta_regression: empty design");
    const int k = static_cast<int>(design.x[0].size());
    if (static_cast<int>(design.response.size()) != n)
        throw std::invalid_argument("make_beta_regression: row count mismatch");
    for (double yi : design.response)
        if (!(yi > 0.0 && yi < 1.0))
            throw std::invalid_argument(
                "make_beta_regression: responses must lie strictly in (0,1)");

    auto shared = std::make_shared<BetaRegDesign>(std::move(design));
    const int p = k + 1;

    ModelSpec m;
    m.p = p;
    m.labels.resize(p);
    for (int r = 0; r < k; ++r) m.labels[r] = "beta" + std::to_string(r + 1);
    m.labels[k] = "phi";
    m.in_domain = [k](const ParameterPoint& th) { return th[k] > 0.0; };
    // Start from least squares of the link-transformed response and a
    // method-of-moments dispersion; Fisher scoring from a flat start with
    // phi = 1 crawls when the true dispersion is large.
    m.default_start.assign(p, 0.0);
    m.default_start[k] = 1.0;
    {
        Matrix xtx(k, k);
        std::vector<double> xtz(k, 0.0);
        for (int i = 0; i < n; ++i) {
            const double y = std::min(std::max(shared->response[i], 1e-6), 1.0 - 1e-6);
            const double z = std::log(y / (1.0 - y));
            for (int r = 0; r < k; ++r) {
                xtz[r] += shared->x[i][r] * z;
                for (int s = 0; s < k; ++s)
                    xtx(r, s) += shared->x[i][r] * shared->x[i][s];
            }
        }
        try {
            const std::vector<double> beta0 = solve_spd(xtx, xtz);
            double ssr = 0.0, vsum = 0.0;
            for (int i = 0; i < n; ++i) {
                double eta = 0.0;
                for (int r = 0; r < k; ++r) eta += shared->x[i][r] * beta0[r];
                const double mu = 1.0 / (1.0 + std::exp(-eta));
                const double e = shared->response[i] - mu;
                ssr += e * e;
                vsum += mu * (1.0 - mu);
            }
            const double phi0 =
                ssr > 0.0 ? vsum / ssr - 1.0 : 1.0;  // var = mu(1-mu)/(1+phi)
            for (int r = 0; r < k; ++r) m.default_start[r] = beta0[r];
            m.default_start[k] = std::max(1.0, phi0);
        } catch (const SingularInformationError&) {
            // keep the flat start
        }
    }

    auto mean_of = [shared, k](const ParameterPoint& th, int i) {
        double eta = 0.0;
        for (int r = 0; r < k; ++r) eta += shared->x[i][r] * th[r];
        // logit link
        return 1.0 / (1.0 + std::exp(-eta));
    };

    m.log_likelihood = [shared, mean_of, n, k](const ParameterPoint& th) {
        const double phi = th[k];
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            const double mu = mean_of(th, i);
            const double a = phi * mu, b = phi * (1.0 - mu);
            ll += std::lgamma(phi) - std::lgamma(a) - std::lgamma(b) +
                  (a - 1.0) * std::log(shared->response[i]) +
                  (b - 1.0) * std::log1p(-shared->response[i]);
        }
        return ll;
    };
    m.cumulant_bundle = [shared, mean_of, n, k, p](const ParameterPoint& th) {
        const double phi = th[k];
        CumulantBundle out(p);
        const double pg1_phi = polygamma(1, phi);
        const double pg2_phi = polygamma(2, phi);
        const double pg0_phi = polygamma(0, phi);
        for (int i = 0; i < n; ++i) {
            const auto& x = shared->x[i];
            const double mu = mean_of(th, i);
            const double d1 = mu * (1.0 - mu);             // dmu/deta (logit)
            const double d2 = d1 * (1.0 - 2.0 * mu);       // d2mu/deta2
            const double a = phi * mu, b = phi * (1.0 - mu);
            const double p1a = polygamma(1, a), p1b = polygamma(1, b);
            const double p2a = polygamma(2, a), p2b = polygamma(2, b);
            const double tbar = std::log(shared->response[i]) -
                                polygamma(0, a) + pg0_phi;
            const double zbar = std::log1p(-shared->response[i]) -
                                polygamma(0, b) + pg0_phi;

            // score
            for (int r = 0; r < k; ++r)
                out.score[r] += phi * x[r] * (tbar - zbar) * d1;
            out.score[k] += mu * (tbar - zbar) + zbar;

            // expected information
            const double v_tz = p1a + p1b;                  // var(tbar - zbar)
            const double c_tz = mu * p1a - (1.0 - mu) * p1b;
            const double v_phi = mu * mu * p1a +
                                 (1.0 - mu) * (1.0 - mu) * p1b - pg1_phi;
            for (int r = 0; r < k; ++r) {
                for (int s = 0; s < k; ++s)
                    out.info(r, s) += phi * phi * x[r] * x[s] * v_tz * d1 * d1;
                out.info(r, k) += phi * x[r] * c_tz * d1;
            }
            out.info(k, k) += v_phi;

            // third cumulants; joint cumulants of (tbar, zbar) give, for
            // coefficient pairs c = (ct, cz):
            //   cum3 = ct1 ct2 ct3 pg2(a) + cz1 cz2 cz3 pg2(b)
            //          - pg2(phi) (ct1+cz1)(ct2+cz2)(ct3+cz3)
            const double s3_bbb = p2a - p2b;                       // (1,-1)^3
            const double s3_bbp = mu * p2a + (1.0 - mu) * p2b;     // (1,-1)^2 (mu,1-mu)
            const double s3_bpp = mu * mu * p2a -
                                  (1.0 - mu) * (1.0 - mu) * p2b;
            const double s3_ppp = mu * mu * mu * p2a +
                                  (1.0 - mu) * (1.0 - mu) * (1.0 - mu) * p2b -
                                  pg2_phi;
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    for (int t = 0; t < k; ++t)
                        out.nu3(r, s, t) += phi * phi * phi * x[r] * x[s] * x[t] *
                                            s3_bbb * d1 * d1 * d1;
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s) {
                    const double v = phi * phi * x[r] * x[s] * s3_bbp * d1 * d1;
                    out.nu3(r, s, k) += v;
                    out.nu3(r, k, s) += v;
                    out.nu3(k, r, s) += v;
                }
            for (int r = 0; r < k; ++r) {
                const double v = phi * x[r] * s3_bpp * d1;
                out.nu3(r, k, k) += v;
                out.nu3(k, r, k) += v;
                out.nu3(k, k, r) += v;
            }
            out.nu3(k, k, k) += s3_ppp;

            // numix(r, s, t) = E(U_r U_st)
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s) {
                    for (int t = 0; t < k; ++t)
                        out.numix(r, s, t) += phi * phi * x[r] * x[s] * x[t] *
                                              v_tz * d1 * d2;
                    const double v = phi * x[r] * x[s] * v_tz * d1 * d1;
                    out.numix(r, s, k) += v;
                    out.numix(r, k, s) += v;
                }
            for (int s = 0; s < k; ++s) {
                for (int t = 0; t < k; ++t)
                    out.numix(k, s, t) += phi * x[s] * x[t] * c_tz * d2;
                const double v = x[s] * c_tz * d1;
                out.numix(k, s, k) += v;
                out.numix(k, k, s) += v;
            }
            // nu_{beta_r, phi phi} = nu_{phi, phi phi} = 0: U_phiphi is
            // non-random.
        }
        for (int r = 0; r < k; ++r) out.info(k, r) = out.info(r, k);
        return out;
    };
    return m;
}

}  // namespace medscore

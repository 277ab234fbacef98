// Model plugin contract: log-likelihood plus the cumulant bundle the
// adjustment machinery consumes.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "medscore/numerics.hpp"

namespace medscore {

using ParameterPoint = std::vector<double>;

struct ParameterDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense rank-3 tensor, p x p x p.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int p) : p_(p), a_(static_cast<std::size_t>(p) * p * p, 0.0) {}
    double& operator()(int r, int s, int t) {
        return a_[(static_cast<std::size_t>(r) * p_ + s) * p_ + t];
    }
    double operator()(int r, int s, int t) const {
        return a_[(static_cast<std::size_t>(r) * p_ + s) * p_ + t];
    }
    int dim() const { return p_; }

private:
    int p_ = 0;
    std::vector<double> a_;
};

// Score, expected information and the two third-order cumulant tensors
// at a parameter point.
//
// Index convention: nu3(r,s,t) = E(U_r U_s U_t), fully symmetric;
// numix(r,s,t) = E(U_r U_st) with the score component first and the two
// Hessian indices last, so numix is symmetric in (s,t) only.
struct CumulantBundle {
    int p = 0;
    std::vector<double> score;
    Matrix info;
    Tensor3 nu3;
    Tensor3 numix;

    explicit CumulantBundle(int dim)
        : p(dim), score(dim, 0.0), info(dim, dim), nu3(dim), numix(dim) {}
};

struct ModelSpec {
    int p = 0;
    std::vector<std::string> labels;
    std::function<double(const ParameterPoint&)> log_likelihood;
    std::function<CumulantBundle(const ParameterPoint&)> cumulant_bundle;
    std::function<bool(const ParameterPoint&)> in_domain;
    ParameterPoint default_start;

    void check_domain(const ParameterPoint& theta) const {
        if (static_cast<int>(theta.size()) != p)
            throw ParameterDomainError("parameter dimension mismatch");
        for (int r = 0; r < p; ++r)
            if (!std::isfinite(theta[r]))
                throw ParameterDomainError("non-finite component " +
                                           (r < static_cast<int>(labels.size())
                                                ? labels[r]
                                                : std::to_string(r)));
        if (in_domain && !in_domain(theta))
            throw ParameterDomainError("parameter outside model domain");
    }

    bool domain_ok(const ParameterPoint& theta) const {
        if (static_cast<int>(theta.size()) != p) return false;
        for (double v : theta)
            if (!std::isfinite(v)) return false;
        return !in_domain || in_domain(theta);
    }
};

// Componentwise monotone reparameterization theta_r = g_r(omega_r).
// Each transform supplies g, dg/domega and d2g/domega2 plus the inverse
// map; identity components may pass empty functions.
struct ComponentTransform {
    std::function<double(double)> to_theta;    // g
    std::function<double(double)> d1;          // g'
    std::function<double(double)> d2;          // g''
    std::function<double(double)> from_theta;  // g^{-1}
};

inline ComponentTransform identity_transform() {
    return {[](double w) { return w; }, [](double) { return 1.0; },
            [](double) { return 0.0; }, [](double t) { return t; }};
}

inline ModelSpec reparameterize_componentwise(
    const ModelSpec& model, std::vector<ComponentTransform> transforms) {
    if (static_cast<int>(transforms.size()) != model.p)
        throw std::invalid_argument("one transform per component required");
    auto to_theta = [model, transforms](const ParameterPoint& omega) {
        ParameterPoint theta(model.p);
        for (int r = 0; r < model.p; ++r) theta[r] = transforms[r].to_theta(omega[r]);
        return theta;
    };
    ModelSpec out;
    out.p = model.p;
    out.labels = model.labels;
    out.log_likelihood = [model, to_theta](const ParameterPoint& omega) {
        return model.log_likelihood(to_theta(omega));
    };
    out.cumulant_bundle = [model, transforms, to_theta](const ParameterPoint& omega) {
        const ParameterPoint theta = to_theta(omega);
        const CumulantBundle b = model.cumulant_bundle(theta);
        const int p = model.p;
        std::vector<double> j1(p), j2(p);
        for (int r = 0; r < p; ++r) {
            j1[r] = transforms[r].d1(omega[r]);
            j2[r] = transforms[r].d2(omega[r]);
        }
        CumulantBundle o(p);
        for (int r = 0; r < p; ++r) o.score[r] = b.score[r] * j1[r];
        for (int r = 0; r < p; ++r)
            for (int s = 0; s < p; ++s) o.info(r, s) = b.info(r, s) * j1[r] * j1[s];
        for (int r = 0; r < p; ++r)
            for (int s = 0; s < p; ++s)
                for (int t = 0; t < p; ++t) {
                    o.nu3(r, s, t) = b.nu3(r, s, t) * j1[r] * j1[s] * j1[t];
                    // U^w_st = U_st g'_s g'_t + [s==t] U_s g''_s
                    double v = b.numix(r, s, t) * j1[r] * j1[s] * j1[t];
                    if (s == t) v += b.info(r, s) * j1[r] * j2[s];
                    o.numix(r, s, t) = v;
                }
        return o;
    };
    out.in_domain = [model, to_theta](const ParameterPoint& omega) {
        for (double v : omega)
            if (!std::isfinite(v)) return false;
        return model.domain_ok(to_theta(omega));
    };
    out.default_start.resize(model.p);
    for (int r = 0; r < model.p; ++r)
        out.default_start[r] = transforms[r].from_theta(model.default_start[r]);
    return out;
}

}  // namespace medscore

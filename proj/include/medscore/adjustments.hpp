// Profile-score cumulants and the median and Firth score adjustments,
// all computed from a CumulantBundle.
#pragma once

#include <vector>

#include "medscore/model.hpp"
#include "medscore/numerics.hpp"

namespace medscore {

// First three approximate cumulants of the profile score for component
// r, together with the nuisance regression coefficients gamma_ra.
struct ProfileCumulants {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    std::vector<double> gamma;  // indexed by nuisance position, size p-1
};

// kappa1 = -1/2 nu^{ab} {(nu_{r,ab} - gamma_c nu_{c,ab})
//                        + (nu_{r,a,b} - gamma_c nu_{a,b,c})}
// kappa2 = nu_{r,r} - gamma_a nu_{r,a}
// kappa3 = nu_{r,r,r} - 3 gamma_a nu_{r,r,a} + 3 gamma_a gamma_b nu_{r,a,b}
//          - gamma_a gamma_b gamma_c nu_{a,b,c}
inline ProfileCumulants profile_cumulants(const CumulantBundle& bundle, int r) {
    const int p = bundle.p;
    ProfileCumulants out;
    if (p == 1) {
        out.kappa2 = bundle.info(0, 0);
        out.kappa3 = bundle.nu3(0, 0, 0);
        return out;
    }

    std::vector<int> nuis;
    nuis.reserve(p - 1);
    for (int s = 0; s < p; ++s)
        if (s != r) nuis.push_back(s);
    const int q = p - 1;

    Matrix nab(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) nab(i, j) = bundle.info(nuis[i], nuis[j]);
    const Matrix nab_inv = spd_inverse(nab);

    // gamma_ra = nu^{ab} nu_{r,b}
    out.gamma.assign(q, 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            out.gamma[i] += nab_inv(i, j) * bundle.info(r, nuis[j]);

    out.kappa2 = bundle.info(r, r);
    for (int i = 0; i < q; ++i)
        out.kappa2 -= out.gamma[i] * bundle.info(r, nuis[i]);

    double k1 = 0.0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
            const int a = nuis[i], b = nuis[j];
            double mix = bundle.numix(r, a, b);
            double triple = bundle.nu3(r, a, b);
            for (int k = 0; k < q; ++k) {
                const int c = nuis[k];
                mix -= out.gamma[k] * bundle.numix(c, a, b);
                triple -= out.gamma[k] * bundle.nu3(a, b, c);
            }
            k1 += nab_inv(i, j) * (mix + triple);
        }
    out.kappa1 = -0.5 * k1;

    double k3 = bundle.nu3(r, r, r);
    for (int i = 0; i < q; ++i) {
        const int a = nuis[i];
        k3 -= 3.0 * out.gamma[i] * bundle.nu3(r, r, a);
        for (int j = 0; j < q; ++j) {
            const int b = nuis[j];
            k3 += 3.0 * out.gamma[i] * out.gamma[j] * bundle.nu3(r, a, b);
            for (int k = 0; k < q; ++k)
                k3 -= out.gamma[i] * out.gamma[j] * out.gamma[k] *
                      bundle.nu3(a, b, nuis[k]);
        }
    }
    out.kappa3 = k3;
    return out;
}

// Per-component median adjustment: M_r = -kappa1_r + kappa3_r/(6 kappa2_r)
// and M1_r = M_r / kappa2_r, the vector entering the modified Fisher
// scoring step.
struct MedianAdjustment {
    std::vector<double> M;
    std::vector<double> M1;
};

inline MedianAdjustment median_adjustment(const CumulantBundle& bundle) {
    const int p = bundle.p;
    MedianAdjustment out;
    out.M.resize(p);
    out.M1.resize(p);
    for (int r = 0; r < p; ++r) {
        const ProfileCumulants k = profile_cumulants(bundle, r);
        if (!(k.kappa2 > 0.0))
            throw SingularInformationError(r);
        out.M[r] = -k.kappa1 + k.kappa3 / (6.0 * k.kappa2);
        out.M1[r] = out.M[r] / k.kappa2;
    }
    return out;
}

// Firth adjustment A_r = 1/2 i^{st} (nu_{r,s,t} + nu_{r,st}); the
// modified score is U + A.
inline std::vector<double> firth_adjustment(const CumulantBundle& bundle) {
    const int p = bundle.p;
    const Matrix inv = spd_inverse(bundle.info);
    std::vector<double> adj(p, 0.0);
    for (int r = 0; r < p; ++r) {
        double acc = 0.0;
        for (int s = 0; s < p; ++s)
            for (int t = 0; t < p; ++t)
                acc += inv(s, t) * (bundle.nu3(r, s, t) + bundle.numix(r, s, t));
        adj[r] = 0.5 * acc;
    }
    return adj;
}

}  // namespace medscore

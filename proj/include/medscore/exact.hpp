// Exact median-unbiased estimation for ratio-scale parameters of
// discrete exponential-family designs, by complete enumeration of the
// sample space in log probability space.
//
// For a scalar canonical parameter theta with sufficient statistic T the
// estimate is (theta* + theta**)/2 where
//   P_{theta*} (T >= t_obs) = 1/2   (the smaller root) and
//   P_{theta**}(T <= t_obs) = 1/2   (the larger root).
// At the extremes of the support one of the two tail probabilities is
// identically 1, so only one root exists and the estimate is that root
// alone; the exact estimate therefore stays finite even where the MLE
// diverges.
//
// The conditional variant fixes the remaining sufficient statistics at
// their observed values, which eliminates the nuisance parameters from
// the distribution of T (Hirji-style conditional enumeration).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "medscore/numerics.hpp"

namespace medscore {

// One enumerable binomial-type observation group: `trials` exchangeable
// Bernoulli trials sharing the integer sufficient-statistic contributions
// `t_weight` (for the parameter of interest) and `s_weights` (for the
// conditioning statistics). The base log-probability of y successes is
//   log C(trials, y) + y * offset
// where `offset` collects the nuisance linear predictor when no
// conditioning is used (zero under conditioning, where it cancels).
struct EnumerationGroup {
    int trials = 0;
    int t_weight = 0;
    std::vector<int> s_weights;
    double offset = 0.0;
};

struct EnumerableDesign {
    std::vector<EnumerationGroup> groups;
};

struct ExactResult {
    double estimate = std::numeric_limits<double>::quiet_NaN();
    // theta*: root of P(T >= t_obs) = 1/2, absent (NaN) at the support
    // minimum; theta**: root of P(T <= t_obs) = 1/2, absent at the
    // support maximum.
    double theta_lower = std::numeric_limits<double>::quiet_NaN();
    double theta_upper = std::numeric_limits<double>::quiet_NaN();
    bool at_support_minimum = false;
    bool at_support_maximum = false;
};

namespace detail {

inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Distribution of T as log "base weights" c(t): the probability of T = t
// under theta is proportional to c(t) * exp(theta * t). Built by direct
// convolution over groups, optionally restricted to a conditioning slice
// S = s_obs.
class SupportWeights {
public:
    // Key: (t, s_1, ..., s_k); value: log sum of base weights.
    std::map<std::vector<int>, double> table;

    static SupportWeights build(const EnumerableDesign& design, bool conditional) {
        SupportWeights sw;
        const std::size_t k =
            design.groups.empty() ? 0 : design.groups.front().s_weights.size();
        std::vector<int> zero(1 + (conditional ? k : 0), 0);
        sw.table[zero] = 0.0;
        for (const auto& g : design.groups) {
            std::map<std::vector<int>, double> next;
            for (int y = 0; y <= g.trials; ++y) {
                const double lw = std::lgamma(g.trials + 1.0) -
                                  std::lgamma(y + 1.0) -
                                  std::lgamma(g.trials - y + 1.0) +
                                  y * g.offset;
                for (const auto& [key, lv] : sw.table) {
                    std::vector<int> nk = key;
                    nk[0] += y * g.t_weight;
                    if (conditional)
                        for (std::size_t j = 0; j < k; ++j)
                            nk[1 + j] += y * g.s_weights[j];
                    auto it = next.find(nk);
                    if (it == next.end())
                        next.emplace(std::move(nk), lw + lv);
                    else
                        it->second = log_add(it->second, lw + lv);
                }
            }
            sw.table = std::move(next);
        }
        return sw;
    }

    // Collapse to the marginal (or conditional-slice) weights over t.
    std::map<int, double> t_weights(const std::vector<int>* s_obs) const {
        std::map<int, double> out;
        for (const auto& [key, lv] : table) {
            if (s_obs) {
                bool match = true;
                for (std::size_t j = 0; j < s_obs->size(); ++j)
                    if (key[1 + j] != (*s_obs)[j]) {
                        match = false;
                        break;
                    }
                if (!match) continue;
            }
            auto it = out.find(key[0]);
            if (it == out.end())
                out.emplace(key[0], lv);
            else
                it->second = log_add(it->second, lv);
        }
        return out;
    }
};

// log P(T <= t | theta) - log P(T >= t | theta), and the two tail CDFs,
// from the weight table.
struct TailProbs {
    double log_le;
    double log_ge;
};

inline TailProbs tail_probs(const std::map<int, double>& weights, int t_obs,
                            double theta) {
    double log_le = -std::numeric_limits<double>::infinity();
    double log_ge = log_le, log_all = log_le;
    for (const auto& [t, lw] : weights) {
        const double lp = lw + theta * t;
        log_all = log_add(log_all, lp);
        if (t <= t_obs) log_le = log_add(log_le, lp);
        if (t >= t_obs) log_ge = log_add(log_ge, lp);
    }
    return {log_le - log_all, log_ge - log_all};
}

inline double half_prob_root(const std::map<int, double>& weights, int t_obs,
                             bool lower_tail) {
    // Root of P(T <= t_obs) = 1/2 (lower_tail) or P(T >= t_obs) = 1/2.
    auto g = [&](double theta) {
        const TailProbs tp = tail_probs(weights, t_obs, theta);
        return (lower_tail ? tp.log_le : tp.log_ge) - std::log(0.5);
    };
    double lo = -30.0, hi = 30.0;
    double flo = g(lo), fhi = g(hi);
    for (int k = 0; k < 20 && flo * fhi > 0.0; ++k) {
        lo *= 2.0;
        hi *= 2.0;
        flo = g(lo);
        fhi = g(hi);
    }
    if (flo * fhi > 0.0)
        throw BracketError("exact estimate: half-probability equation has no "
                           "root in the search range");
    return find_root(g, lo, hi, 1e-8);
}

inline ExactResult exact_from_weights(const std::map<int, double>& weights,
                                      int t_obs) {
    ExactResult res;
    if (weights.empty())
        throw BracketError("exact estimate: empty sample space");
    const int t_min = weights.begin()->first;
    const int t_max = weights.rbegin()->first;
    res.at_support_minimum = (t_obs <= t_min);
    res.at_support_maximum = (t_obs >= t_max);
    if (t_obs < t_min || t_obs > t_max)
        throw BracketError("exact estimate: observed statistic outside the "
                           "support of T");
    // P(T >= t_obs) is increasing in theta and identically 1 at the
    // support minimum, where theta* does not exist; symmetrically
    // P(T <= t_obs) == 1 at the support maximum and theta** is absent.
    if (!res.at_support_minimum)
        res.theta_lower = half_prob_root(weights, t_obs, /*lower_tail=*/false);
    if (!res.at_support_maximum)
        res.theta_upper = half_prob_root(weights, t_obs, /*lower_tail=*/true);

    if (res.at_support_minimum && res.at_support_maximum)
        throw BracketError("exact estimate: degenerate single-point support");
    if (res.at_support_minimum)
        res.estimate = res.theta_upper;
    else if (res.at_support_maximum)
        res.estimate = res.theta_lower;
    else
        res.estimate = 0.5 * (res.theta_lower + res.theta_upper);
    return res;
}

}  // namespace detail

// Unconditional exact median-unbiased estimate of the canonical scalar
// parameter: nuisance contributions enter through the group offsets.
inline ExactResult exact_median_unbiased(const EnumerableDesign& design,
                                         int t_obs) {
    const auto sw = detail::SupportWeights::build(design, /*conditional=*/false);
    return detail::exact_from_weights(sw.t_weights(nullptr), t_obs);
}

// Conditional exact median-unbiased estimate given the conditioning
// statistics fixed at s_obs: the nuisance parameters cancel from the
// conditional distribution, so group offsets are ignored.
inline ExactResult exact_conditional_median_unbiased(
    const EnumerableDesign& design, int t_obs, const std::vector<int>& s_obs) {
    EnumerableDesign d = design;
    for (auto& g : d.groups) g.offset = 0.0;
    const auto sw = detail::SupportWeights::build(d, /*conditional=*/true);
    const auto weights = sw.t_weights(&s_obs);
    return detail::exact_from_weights(weights, t_obs);
}

}  // namespace medscore

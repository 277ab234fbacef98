// Fitting machinery: Fisher scoring for the MLE, Firth bias-reduced and
// median bias-reduced estimates, the profile median fit, and Wald/score
// confidence intervals.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "medscore/adjustments.hpp"
#include "medscore/model.hpp"
#include "medscore/numerics.hpp"

namespace medscore {

enum class Method { mle, firth, median_br };

inline std::string method_name(Method m) {
    switch (m) {
    case Method::mle: return "mle";
    case Method::firth: return "firth";
    default: return "median-br";
    }
}

struct FitOptions {
    int max_iterations = 100;
    double score_tolerance = 1e-8;
    int step_halvings = 10;
    std::optional<ParameterPoint> start;
    double divergence_threshold = 50.0;
    // Use the MLE as starting value for the adjusted methods when it is
    // finite; fall back to the model default otherwise.
    bool start_from_mle = true;
};

struct IterationRecord {
    ParameterPoint theta;
    double adjusted_score_norm;
};

struct FitResult {
    Method method = Method::mle;
    ParameterPoint estimates;
    std::vector<double> std_errors;
    Matrix vcov;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;  // infinite-estimate detector fired
    std::vector<bool> finite;
    std::vector<IterationRecord> trace;
    double log_likelihood = std::numeric_limits<double>::quiet_NaN();

    bool all_finite() const {
        return std::all_of(finite.begin(), finite.end(), [](bool b) { return b; });
    }
};

namespace detail {

struct ScoringState {
    CumulantBundle bundle;
    std::vector<double> adjusted;  // U (+ i M1 / + firth term)
    double scaled_norm = 0.0;
};

inline ScoringState scoring_state(const ModelSpec& model, Method method,
                                  const ParameterPoint& theta) {
    ScoringState st{model.cumulant_bundle(theta), {}, 0.0};
    const int p = st.bundle.p;
    st.adjusted = st.bundle.score;
    if (method == Method::median_br) {
        const MedianAdjustment adj = median_adjustment(st.bundle);
        for (int r = 0; r < p; ++r)
            for (int s = 0; s < p; ++s)
                st.adjusted[r] += st.bundle.info(r, s) * adj.M1[s];
    } else if (method == Method::firth) {
        const std::vector<double> adj = firth_adjustment(st.bundle);
        for (int r = 0; r < p; ++r) st.adjusted[r] += adj[r];
    }
    for (int r = 0; r < p; ++r) {
        const double d = st.bundle.info(r, r);
        const double scaled = std::abs(st.adjusted[r]) / std::sqrt(std::max(d, 1e-300));
        st.scaled_norm = std::max(st.scaled_norm, scaled);
    }
    return st;
}

inline double inf_norm(const ParameterPoint& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

inline FitResult fit(const ModelSpec& model, Method method,
                     const FitOptions& opts = {});

namespace detail {

inline FitResult fit_impl(const ModelSpec& model, Method method,
                          const ParameterPoint& start, const FitOptions& opts) {
    FitResult res;
    res.method = method;
    ParameterPoint theta = start;
    model.check_domain(theta);

    ScoringState st = scoring_state(model, method, theta);
    double prev_ll = model.log_likelihood(theta);
    const double start_ll = prev_ll;
    int rising_ll = 0;
    int ridge_streak = 0;
    double best_norm = st.scaled_norm;
    int stalled = 0;
    std::vector<double> last_step(model.p, 0.0);

    // Confirms a suspected monotone-likelihood escape by probing the
    // likelihood far out along the current step direction: under true
    // separation it keeps rising, while a quasi-separated sample with a
    // finite (if remote) maximum eventually turns it down.
    const auto escape_confirmed = [&](const ParameterPoint& th,
                                      const std::vector<double>& stp) {
        const double sn = inf_norm(stp);
        if (sn == 0.0) return false;
        try {
            double prev = model.log_likelihood(th);
            // Distances are multiples of the iterate scale, not the step
            // size: a stalled crawl has tiny steps while the remote finite
            // maximum of a quasi-separated sample sits many iterate-norms
            // away.
            const double unit = (1.0 + inf_norm(th)) / sn;
            for (double k : {4.0, 64.0, 1024.0}) {
                ParameterPoint far = th;
                for (std::size_t r = 0; r < far.size(); ++r)
                    far[r] += k * unit * stp[r];
                if (!model.domain_ok(far)) return false;
                const double ll = model.log_likelihood(far);
                if (!(ll >= prev - 1e-6 * (1.0 + std::abs(prev))))
                    return false;
                prev = ll;
            }
            return true;
        } catch (...) {
            return false;
        }
    };

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        res.trace.push_back({theta, st.scaled_norm});

        std::vector<double> step;
        try {
            step = solve_spd(st.bundle.info, st.adjusted);
        } catch (const SingularInformationError&) {
            // Information collapsing mid-iteration after a net likelihood
            // improvement is the separation endgame (the Fisher weights
            // underflow along the escaping direction). A singular matrix
            // at the very first iterate is a rank problem instead and is
            // rethrown.
            if (method == Method::mle && iter > 0 &&
                (inf_norm(theta) > opts.divergence_threshold ||
                 rising_ll >= 5 || prev_ll >= start_ll)) {
                res.diverged = true;
                break;
            }
            throw;
        }
        last_step = step;

        // Convergence: the adjusted score is solved. For the MLE we also
        // require the scoring step itself to be negligible — under data
        // separation the scaled score underflows the tolerance while the
        // iterates still march along a flat likelihood ridge with O(1)
        // steps, and stopping there would disguise an infinite estimate
        // as a finite stationary point.
        const bool ridge = method == Method::mle &&
                           st.scaled_norm <= opts.score_tolerance &&
                           inf_norm(step) > 1e-6 * (1.0 + inf_norm(theta));
        if (st.scaled_norm <= opts.score_tolerance && !ridge) {
            res.converged = true;
            break;
        }
        ridge_streak = ridge ? ridge_streak + 1 : 0;

        // Divergence: the likelihood has risen monotonically for several
        // iterations while either the iterate left the trust region or
        // the ridge condition persisted (the iterate norm alone can stay
        // below any fixed threshold once the information underflows).
        if (method == Method::mle && rising_ll >= 5 &&
            (inf_norm(theta) > opts.divergence_threshold || ridge_streak >= 5) &&
            escape_confirmed(theta, step)) {
            res.diverged = true;
            break;
        }

        ParameterPoint cand(theta.size());
        bool accepted = false;
        ScoringState cand_state = st;
        double scale = 1.0;
        for (int h = 0; h <= opts.step_halvings; ++h, scale *= 0.5) {
            for (std::size_t r = 0; r < theta.size(); ++r)
                cand[r] = theta[r] + scale * step[r];
            if (!model.domain_ok(cand)) continue;
            std::optional<ScoringState> next;
            try {
                next = scoring_state(model, method, cand);
            } catch (...) {
                continue;
            }
            // Accept a step that does not worsen the adjusted-score norm
            // (non-strict: on a separation ridge the norm sits at its
            // floating-point floor and full steps must still be taken);
            // after the last halving take any finite evaluation.
            if (std::isfinite(next->scaled_norm) &&
                (next->scaled_norm <= st.scaled_norm || h == opts.step_halvings)) {
                cand_state = std::move(*next);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // no usable step

        theta = cand;
        st = std::move(cand_state);
        if (st.scaled_norm < 0.9 * best_norm) {
            best_norm = st.scaled_norm;
            stalled = 0;
        } else if (++stalled >= 10) {
            // Scoring has stopped making progress. For the MLE a stall
            // far from tolerance with a monotonically climbing likelihood
            // is a monotone-likelihood escape (e.g. a one-signed
            // skew-normal sample): |U|/sqrt(i) plateaus at O(1) while the
            // iterate drifts without bound. Otherwise try Newton polish.
            if (method == Method::mle && rising_ll >= 5 &&
                st.scaled_norm > opts.score_tolerance &&
                escape_confirmed(theta, last_step)) {
                res.diverged = true;
            }
            break;
        }
        const double ll = model.log_likelihood(theta);
        // Non-strict comparison: near the supremum the per-iteration
        // gains underflow to exact ties, which still count as a
        // monotonically non-decreasing stretch.
        rising_ll = (ll >= prev_ll) ? rising_ll + 1 : 0;
        prev_ll = ll;
    }

    // Iteration budget exhausted while the likelihood kept climbing and
    // the scoring step was still pushing: monotone-likelihood escape
    // whose iterate grows without bound but too slowly to cross the
    // trust region within the budget.
    if (!res.converged && !res.diverged && method == Method::mle &&
        iter >= opts.max_iterations && rising_ll >= 5 &&
        inf_norm(last_step) > 1e-6 * (1.0 + inf_norm(theta)) &&
        escape_confirmed(theta, last_step))
        res.diverged = true;

    // Scalar adjusted-score equations that stall short of tolerance are
    // finished by bracketed root finding: near-flat stretches make the
    // finite-difference Jacobian noise-dominated while the sign change
    // of the field stays reliable.
    if (!res.converged && !res.diverged && model.p == 1 &&
        method != Method::mle) {
        try {
            auto g = [&](double x) {
                ParameterPoint t{x};
                if (!model.domain_ok(t))
                    throw BracketError("bracket left the parameter domain");
                return scoring_state(model, method, t).adjusted[0];
            };
            const double w = std::max(1.0, 0.1 * std::abs(theta[0]));
            const auto [lo, hi] = expand_bracket(g, theta[0] - w, theta[0] + w);
            const double xtol = 1e-10 * (1.0 + std::abs(theta[0]));
            const double root = find_root(g, lo, hi, xtol);
            ParameterPoint cand{root};
            const ScoringState cst = scoring_state(model, method, cand);
            if (cst.scaled_norm <= st.scaled_norm) {
                theta = cand;
                st = cst;
                // The root is pinned by a sign change to xtol accuracy;
                // that localizes the estimate even when the score scale
                // keeps the scaled norm above the nominal tolerance.
                res.converged = true;
            }
        } catch (...) {
            // fall through to the Newton polish below
        }
    }

    // Scoring with the expected information is only linearly convergent
    // and can orbit short of tolerance when the information approximates
    // the Jacobian of the adjusted score field badly (seen near
    // quasi-separated data). Polish with damped Newton on the field
    // itself, using a finite-difference Jacobian.
    if (!res.converged && !res.diverged) {
        try {
            for (int k = 0; k < 40 && st.scaled_norm > opts.score_tolerance; ++k) {
                Matrix jac(model.p, model.p);
                for (int c = 0; c < model.p; ++c) {
                    const double h = 1e-6 * (1.0 + std::abs(theta[c]));
                    ParameterPoint tp = theta, tm = theta;
                    tp[c] += h;
                    tm[c] -= h;
                    if (!model.domain_ok(tm)) tm = theta;  // one-sided at edge
                    const auto gp = scoring_state(model, method, tp).adjusted;
                    const auto gm = scoring_state(model, method, tm).adjusted;
                    for (int r = 0; r < model.p; ++r)
                        jac(r, c) = (gp[r] - gm[r]) / (tp[c] - tm[c]);
                }
                std::vector<double> step = solve_linear(jac, st.adjusted);
                double scale = 1.0;
                bool moved = false;
                for (int h2 = 0; h2 <= opts.step_halvings; ++h2, scale *= 0.5) {
                    ParameterPoint cand = theta;
                    for (int r = 0; r < model.p; ++r) cand[r] -= scale * step[r];
                    if (!model.domain_ok(cand)) continue;
                    ScoringState next = scoring_state(model, method, cand);
                    if (std::isfinite(next.scaled_norm) &&
                        next.scaled_norm < st.scaled_norm) {
                        theta = cand;
                        st = std::move(next);
                        moved = true;
                        break;
                    }
                }
                ++iter;
                res.trace.push_back({theta, st.scaled_norm});
                if (!moved) break;
            }
            if (st.scaled_norm <= opts.score_tolerance) res.converged = true;
        } catch (const SingularInformationError&) {
            // leave the best scoring iterate as the (non-converged) result
        }
    }

    const int p = model.p;
    res.estimates = theta;
    res.iterations = iter;
    res.log_likelihood = model.log_likelihood(theta);
    res.finite.assign(p, true);
    if (res.diverged || !res.converged) {
        // A component escapes to infinity when it left the trust region,
        // or — for a confirmed divergence — when pushing it outward on
        // its own keeps the likelihood rising (the step direction alone
        // is unreliable: near-singular solves put O(1) noise into flat
        // directions while the escaping coordinate may crawl).
        for (int r = 0; r < p; ++r) {
            if (std::abs(theta[r]) > opts.divergence_threshold) {
                res.finite[r] = false;
                continue;
            }
            if (!res.diverged) continue;
            const double tol_r = 1e-6 * (1.0 + std::abs(theta[r]));
            // Suspicion signal: the recent drift of this coordinate (a
            // crawl shows up here even when the final step was noise), or
            // failing that the last scoring step.
            double drift = 0.0;
            if (res.trace.size() > 1) {
                const std::size_t back =
                    res.trace.size() > 10 ? res.trace.size() - 11 : 0;
                drift = theta[r] - res.trace[back].theta[r];
            }
            const double signal =
                std::abs(drift) > std::abs(last_step[r]) ? drift : last_step[r];
            if (std::abs(signal) <= tol_r) continue;
            const double dir = signal > 0 ? 1.0 : -1.0;
            bool infinite = true;
            try {
                double prev = res.log_likelihood;
                for (double k : {4.0, 64.0, 1024.0}) {
                    ParameterPoint far = theta;
                    far[r] += dir * k * (1.0 + std::abs(theta[r]));
                    if (!model.domain_ok(far)) {
                        infinite = false;
                        break;
                    }
                    const double ll = model.log_likelihood(far);
                    if (!(ll >= prev - 1e-6 * (1.0 + std::abs(prev)))) {
                        infinite = false;
                        break;
                    }
                    prev = ll;
                }
            } catch (...) {
                infinite = false;
            }
            if (infinite) res.finite[r] = false;
        }
        // A confirmed divergence can escape along a joint direction in
        // which no single coordinate raises the likelihood on its own
        // (e.g. a conditional-support boundary where the interest and
        // nuisance coordinates run off together). If the marginal probes
        // flagged nothing, fall back to the drift pattern: coordinates
        // moving persistently in one direction over the recent window
        // are the escaping ones.
        if (res.diverged &&
            std::none_of(res.finite.begin(), res.finite.end(),
                         [](bool b) { return !b; }) &&
            res.trace.size() > 3) {
            const std::size_t end = res.trace.size() - 1;
            const std::size_t back = end > 10 ? end - 10 : 0;
            std::vector<double> ndrift(p, 0.0);
            std::vector<bool> monotone(p, false);
            double max_nd = 0.0;
            for (int r = 0; r < p; ++r) {
                int moves = 0, aligned = 0;
                const double drift = theta[r] - res.trace[back].theta[r];
                for (std::size_t k2 = back; k2 < end; ++k2) {
                    const double d =
                        res.trace[k2 + 1].theta[r] - res.trace[k2].theta[r];
                    if (std::abs(d) > 1e-9 * (1.0 + std::abs(theta[r]))) {
                        ++moves;
                        if (d * drift > 0.0) ++aligned;
                    }
                }
                ndrift[r] = std::abs(drift) / (1.0 + std::abs(theta[r]));
                monotone[r] = moves >= 3 && aligned >= (7 * moves + 9) / 10;
                max_nd = std::max(max_nd, ndrift[r]);
            }
            bool any = false;
            for (int r = 0; r < p; ++r)
                if (monotone[r] && ndrift[r] >= 0.05 * max_nd) {
                    res.finite[r] = false;
                    any = true;
                }
            if (!any && max_nd > 0.0)
                for (int r = 0; r < p; ++r)
                    if (ndrift[r] == max_nd) res.finite[r] = false;
        }
    }
    res.std_errors.assign(p, std::numeric_limits<double>::infinity());
    res.vcov = Matrix(p, p);
    for (int r = 0; r < p; ++r)
        for (int s = 0; s < p; ++s)
            res.vcov(r, s) = std::numeric_limits<double>::quiet_NaN();
    // Infinite components carry no curvature (their information row
    // underflows), so invert only the finite-component block; that is
    // also the limiting covariance of the finite components.
    std::vector<int> fin;
    for (int r = 0; r < p; ++r)
        if (res.finite[r]) fin.push_back(r);
    if (!fin.empty()) {
        try {
            const CumulantBundle b = model.cumulant_bundle(theta);
            const int q = static_cast<int>(fin.size());
            Matrix sub(q, q);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) sub(i, j) = b.info(fin[i], fin[j]);
            const Matrix inv = spd_inverse(sub);
            for (int i = 0; i < q; ++i) {
                for (int j = 0; j < q; ++j) res.vcov(fin[i], fin[j]) = inv(i, j);
                res.std_errors[fin[i]] = std::sqrt(inv(i, i));
            }
        } catch (const SingularInformationError&) {
            // leave NaN/inf entries
        }
    }
    return res;
}

}  // namespace detail

inline FitResult fit(const ModelSpec& model, Method method,
                     const FitOptions& opts) {
    ParameterPoint start = opts.start.value_or(model.default_start);
    if (!opts.start && method != Method::mle && opts.start_from_mle) {
        FitOptions mle_opts = opts;
        mle_opts.start_from_mle = false;
        try {
            const FitResult ml = detail::fit_impl(model, Method::mle,
                                                  model.default_start, mle_opts);
            if (ml.converged && ml.all_finite()) start = ml.estimates;
        } catch (...) {
            // fall back to the model default
        }
    }
    return detail::fit_impl(model, method, start, opts);
}

// ---------------------------------------------------------------------
// Profile median fit: solve the median modified profile score
// U_P(psi) - kappa1 + kappa3/(6 kappa2) = 0 with the nuisance block at
// its constrained MLE.

struct ProfileFitResult {
    int component = 0;
    double estimate = 0.0;
    double std_error = 0.0;  // 1/sqrt(kappa2) at the estimate
    bool converged = false;
    int evaluations = 0;
    ParameterPoint nuisance;  // constrained MLE at the estimate (full theta)
};

namespace detail {

// Constrained MLE of the nuisance block with component r fixed.
// Warm-started from `theta`; returns false on inner non-convergence.
inline bool constrained_nuisance_fit(const ModelSpec& model, int r,
                                     ParameterPoint& theta,
                                     const FitOptions& opts) {
    const int p = model.p;
    if (p == 1) return true;
    std::vector<int> nuis;
    for (int s = 0; s < p; ++s)
        if (s != r) nuis.push_back(s);
    const int q = p - 1;
    const auto eval = [&](const ParameterPoint& at, Matrix& info,
                          std::vector<double>& score) {
        const CumulantBundle b = model.cumulant_bundle(at);
        double norm = 0.0;
        for (int i = 0; i < q; ++i) {
            score[i] = b.score[nuis[i]];
            for (int j = 0; j < q; ++j) info(i, j) = b.info(nuis[i], nuis[j]);
            norm = std::max(norm, std::abs(score[i]) /
                                      std::sqrt(std::max(info(i, i), 1e-300)));
        }
        return norm;
    };
    Matrix info(q, q);
    std::vector<double> score(q);
    double norm = eval(theta, info, score);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (norm <= opts.score_tolerance) return true;
        const std::vector<double> step = solve_spd(info, score);
        double scale = 1.0;
        ParameterPoint cand = theta;
        Matrix cinfo(q, q);
        std::vector<double> cscore(q);
        bool ok = false;
        for (int h = 0; h <= opts.step_halvings; ++h, scale *= 0.5) {
            for (int i = 0; i < q; ++i)
                cand[nuis[i]] = theta[nuis[i]] + scale * step[i];
            if (!model.domain_ok(cand)) continue;
            double cnorm;
            try {
                cnorm = eval(cand, cinfo, cscore);
            } catch (...) {
                continue;  // overshot into a numerically degenerate region
            }
            if (std::isfinite(cnorm) && (cnorm <= norm || h == opts.step_halvings)) {
                theta = cand;
                info = cinfo;
                score = cscore;
                norm = cnorm;
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return norm <= opts.score_tolerance;
}

struct ProfileEval {
    double modified_score;
    double kappa2;
};

inline ProfileEval profile_eval(const ModelSpec& model, int r, double psi,
                                ParameterPoint& warm, const FitOptions& opts) {
    warm[r] = psi;
    if (!constrained_nuisance_fit(model, r, warm, opts))
        throw BracketError("profile fit: inner nuisance fit failed at psi=" +
                           std::to_string(psi));
    const CumulantBundle b = model.cumulant_bundle(warm);
    const ProfileCumulants k = profile_cumulants(b, r);
    if (!(k.kappa2 > 0.0)) throw SingularInformationError(r);
    return {b.score[r] - k.kappa1 + k.kappa3 / (6.0 * k.kappa2), k.kappa2};
}

}  // namespace detail

inline ProfileFitResult profile_median_fit(const ModelSpec& model, int r,
                                           const FitOptions& opts = {}) {
    ProfileFitResult res;
    res.component = r;
    ParameterPoint warm = opts.start.value_or(model.default_start);
    if (!opts.start && opts.start_from_mle) {
        try {
            const FitResult ml = fit(model, Method::mle, opts);
            if (ml.converged && ml.all_finite()) warm = ml.estimates;
        } catch (...) {
        }
    }
    model.check_domain(warm);

    int evals = 0;
    auto f = [&](double psi) {
        ++evals;
        return detail::profile_eval(model, r, psi, warm, opts).modified_score;
    };

    const double psi0 = warm[r];
    const double f0 = f(psi0);
    double se0 = 1.0;
    try {
        se0 = 1.0 / std::sqrt(detail::profile_eval(model, r, psi0, warm, opts).kappa2);
    } catch (...) {
    }

    // Outward search in both directions, step doubling, respecting the
    // parameter domain.
    double lo = psi0, hi = psi0, flo = f0, fhi = f0;
    double step = std::max(se0, 1e-8);
    bool bracketed = false;
    for (int k = 0; k < 60 && !bracketed; ++k) {
        {
            double s = step;
            double cand = lo - s;
            ParameterPoint probe = warm;
            probe[r] = cand;
            int guard = 0;
            while (!model.domain_ok(probe) && guard++ < 50) {
                s *= 0.5;
                cand = lo - s;
                probe[r] = cand;
            }
            if (model.domain_ok(probe) && cand < lo) {
                const double fc = f(cand);
                if (fc * flo <= 0.0) {
                    hi = lo;
                    fhi = flo;
                    lo = cand;
                    flo = fc;
                    bracketed = true;
                } else {
                    lo = cand;
                    flo = fc;
                }
            }
        }
        if (bracketed) break;
        {
            const double cand = hi + step;
            ParameterPoint probe = warm;
            probe[r] = cand;
            if (model.domain_ok(probe)) {
                const double fc = f(cand);
                if (fc * fhi <= 0.0) {
                    lo = hi;
                    flo = fhi;
                    hi = cand;
                    fhi = fc;
                    bracketed = true;
                } else {
                    hi = cand;
                    fhi = fc;
                }
            }
        }
        step *= 2.0;
    }
    if (!bracketed)
        throw BracketError("profile_median_fit: no sign change of the modified "
                           "profile score; estimate at the boundary?");

    res.estimate = find_root(f, lo, hi, 1e-10 * std::max(1.0, std::abs(psi0)));
    const auto at_root = detail::profile_eval(model, r, res.estimate, warm, opts);
    res.std_error = 1.0 / std::sqrt(at_root.kappa2);
    res.converged = true;
    res.evaluations = evals;
    res.nuisance = warm;
    res.nuisance[r] = res.estimate;
    return res;
}

// ---------------------------------------------------------------------
// Confidence intervals.

struct ConfidenceInterval {
    int component = 0;
    double level = 0.95;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    std::string kind = "wald";
    bool complete = true;  // false when an endpoint search failed
};

inline ConfidenceInterval wald_interval(const FitResult& fit, int r,
                                        double level) {
    ConfidenceInterval ci;
    ci.component = r;
    ci.level = level;
    ci.kind = "wald";
    if (!fit.finite[r]) {
        ci.complete = false;
        return ci;
    }
    if (level <= 0.0) {
        ci.lower = ci.upper = fit.estimates[r];
        return ci;
    }
    const double z = norm_quantile(0.5 * (1.0 + level));
    ci.lower = fit.estimates[r] - z * fit.std_errors[r];
    ci.upper = fit.estimates[r] + z * fit.std_errors[r];
    return ci;
}

// Endpoints solve \tilde U_P(psi)^2 / kappa2(psi) = z^2, bracketing
// outward from the profile estimate in steps of 2 s.e.
inline ConfidenceInterval score_interval(const ModelSpec& model, int r,
                                         double level,
                                         const FitOptions& opts = {},
                                         const ProfileFitResult* profile = nullptr) {
    ProfileFitResult local;
    if (!profile) {
        local = profile_median_fit(model, r, opts);
        profile = &local;
    }
    const double z = norm_quantile(0.5 * (1.0 + level));
    ConfidenceInterval ci;
    ci.component = r;
    ci.level = level;
    ci.kind = "score";
    ParameterPoint warm = profile->nuisance;

    auto statistic = [&](double psi, double sign) {
        const auto e = detail::profile_eval(model, r, psi, warm, opts);
        return e.modified_score + sign * z * std::sqrt(e.kappa2);
    };

    const double step = 2.0 * profile->std_error;
    // The modified profile score decreases through zero at the estimate,
    // so the lower endpoint (score = +z sqrt(kappa2) ... statistic
    // "score - z sqrt(kappa2)" = 0) lies to the left and the upper
    // endpoint ("score + z sqrt(kappa2)" = 0) to the right.
    for (int side = 0; side < 2; ++side) {
        const double dir = side == 0 ? -1.0 : 1.0;
        auto g = [&](double psi) { return statistic(psi, dir); };
        double a = profile->estimate;
        double fa = g(a);
        bool found = false;
        for (int k = 1; k <= 20 && !found; ++k) {
            double b = profile->estimate + dir * k * step;  // walk away
            ParameterPoint probe = warm;
            probe[r] = b;
            if (!model.domain_ok(probe)) {
                ParameterPoint inner = warm;
                double t = b;
                int guard = 0;
                while (!model.domain_ok(inner) || guard == 0) {
                    t = 0.5 * (t + a);
                    inner[r] = t;
                    if (++guard > 60) break;
                }
                b = t;
            }
            double fb;
            try {
                fb = g(b);
            } catch (...) {
                break;
            }
            if (fa * fb <= 0.0) {
                const double root =
                    find_root(g, std::min(a, b), std::max(a, b),
                              1e-9 * std::max(1.0, std::abs(profile->estimate)));
                if (side == 0)
                    ci.lower = root;
                else
                    ci.upper = root;
                found = true;
            } else {
                a = b;
                fa = fb;
            }
        }
        if (!found) ci.complete = false;
    }
    return ci;
}

}  // namespace medscore

// Seeded Monte Carlo engine reproducing the comparison metrics
// (PU, MAE, B, RMSE, Wald/score coverage, %finite) for any built-in
// model family and method list. Replications are deterministic for a
// given (config, seed) regardless of the worker count: replication r
// draws from its own counter-derived substream and writes into slot r,
// and aggregation runs serially in replication order.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "medscore/adjustments.hpp"
#include "medscore/model.hpp"
#include "medscore/models.hpp"
#include "medscore/solver.hpp"

namespace medscore {

// ---------------------------------------------------------------------
// Replication RNG: splitmix64 substream per replication.

class RepRng {
public:
    // The start state is scrambled through the output mixer so that
    // distinct replications land at unrelated positions of the
    // counter orbit rather than one step apart.
    RepRng(std::uint64_t seed, std::uint64_t rep)
        : state_(mix(seed + 0x9E3779B97F4A7C15ULL * (rep + 1))) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(state_ += 0x9E3779B97F4A7C15ULL); }

    double uniform() {  // (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Marsaglia–Tsang; shape < 1 boosted via G(a) = G(a+1) U^{1/a}.
    double gamma(double shape, double rate = 1.0) {
        if (shape < 1.0)
            return gamma(shape + 1.0, rate) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
                return d * v / rate;
        }
    }

    double beta(double a, double b) {
        const double g1 = gamma(a);
        const double g2 = gamma(b);
        return g1 / (g1 + g2);
    }

    int binomial(int trials, double p) {
        int k = 0;
        for (int i = 0; i < trials; ++i)
            if (uniform() < p) ++k;
        return k;
    }

    double skew_normal(double theta) {
        const double delta = theta / std::sqrt(1.0 + theta * theta);
        return delta * std::abs(normal()) +
               std::sqrt(1.0 - delta * delta) * normal();
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------
// Configuration.

struct SimulationConfig {
    std::string model;  // binary | beta | gamma-strata | skew-normal | normal
    BinaryLink link = BinaryLink::logit;
    std::vector<std::vector<double>> design;  // binary / beta rows
    std::vector<int> trials;                  // binary (default all-ones)
    int q = 0, m = 0;                         // gamma-strata layout
    int n = 0;                                // skew-normal / normal sample size
    std::optional<double> known_mean;         // normal variant
    std::vector<double> truth;                // full parameter vector
    int replications = 1000;
    std::uint64_t seed = 0;
    double level = 0.95;
    std::vector<std::string> methods;  // mle | firth | median-br | median-br-profile
    int profile_component = 0;  // interest component (profile fit, score test)
    bool score_coverage = true;
    int threads = 0;  // 0: MEDSCORE_THREADS or hardware concurrency
};

namespace detail {

inline Method parse_method(const std::string& s) {
    if (s == "mle") return Method::mle;
    if (s == "firth") return Method::firth;
    if (s == "median-br" || s == "mbr" || s == "median-br-profile" ||
        s == "mbr-profile")
        return Method::median_br;
    throw std::invalid_argument("unknown method '" + s + "'");
}

inline bool is_profile_method(const std::string& s) {
    return s == "median-br-profile" || s == "mbr-profile";
}

}  // namespace detail

// ---------------------------------------------------------------------
// Summary.

struct ComponentSummary {
    std::string label;
    double pu = 0.0, pu_se = 0.0;
    double mae = 0.0;
    double b = 0.0, rmse = 0.0;
    double wald = 0.0, wald_se = 0.0;
    double score = std::numeric_limits<double>::quiet_NaN();
    double score_se = std::numeric_limits<double>::quiet_NaN();
    bool score_defined = false;
    double pct_finite = 100.0;
    int n_conditional = 0;  // replications entering B/RMSE/coverage
};

struct MethodSummary {
    std::string method;
    std::vector<ComponentSummary> components;
    double pct_separated = 0.0;  // replications with any non-finite component
    int fit_failures = 0;
};

struct SimulationSummary {
    std::string model;
    int replications = 0;
    std::uint64_t seed = 0;
    double level = 0.95;
    int profile_component = 0;
    std::vector<MethodSummary> methods;
};

// ---------------------------------------------------------------------
// Model/sampler bridge.

namespace detail {

struct RepProblem {
    ModelSpec model;
};

inline ModelSpec draw_model(const SimulationConfig& cfg, RepRng& rng) {
    if (cfg.model == "binary") {
        BinaryDesign d;
        d.link = cfg.link;
        d.x = cfg.design;
        const std::size_t n = cfg.design.size();
        if (cfg.trials.empty())
            d.trials.assign(n, 1.0);
        else
            d.trials.assign(cfg.trials.begin(), cfg.trials.end());
        d.successes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0.0;
            for (std::size_t j = 0; j < cfg.design[i].size(); ++j)
                eta += cfg.design[i][j] * cfg.truth[j];
            const double p = link_point(cfg.link, eta).F;
            d.successes[i] =
                rng.binomial(static_cast<int>(d.trials[i]), p);
        }
        return make_binary(std::move(d));
    }
    if (cfg.model == "beta") {
        BetaRegDesign d;
        d.x = cfg.design;
        const int k = static_cast<int>(cfg.truth.size()) - 1;
        const double phi = cfg.truth[k];
        for (const auto& row : cfg.design) {
            double eta = 0.0;
            for (int j = 0; j < k; ++j) eta += row[j] * cfg.truth[j];
            const double mu = 1.0 / (1.0 + std::exp(-eta));
            double y = rng.beta(phi * mu, phi * (1.0 - mu));
            // guard against underflow to the boundary in extreme draws
            y = std::min(std::max(y, 1e-12), 1.0 - 1e-12);
            d.response.push_back(y);
        }
        return make_beta_regression(d);
    }
    if (cfg.model == "gamma-strata") {
        GammaStrataDesign d;
        const double psi = cfg.truth[0];
        d.observations.assign(cfg.q, std::vector<double>(cfg.m));
        for (int a = 0; a < cfg.q; ++a) {
            const double lambda = cfg.truth[1 + a];
            for (int j = 0; j < cfg.m; ++j)
                d.observations[a][j] = rng.gamma(psi, lambda);
        }
        return make_gamma_strata(d);
    }
    if (cfg.model == "skew-normal") {
        std::vector<double> y(cfg.n);
        for (int i = 0; i < cfg.n; ++i) y[i] = rng.skew_normal(cfg.truth[0]);
        return make_skew_normal(std::move(y));
    }
    if (cfg.model == "normal") {
        std::vector<double> y(cfg.n);
        const double mu = cfg.known_mean ? *cfg.known_mean
                                         : cfg.truth[0];
        const double psi = cfg.known_mean ? cfg.truth[0] : cfg.truth[1];
        for (int i = 0; i < cfg.n; ++i)
            y[i] = mu + std::sqrt(psi) * rng.normal();
        return make_normal(cfg.known_mean, std::move(y));
    }
    throw std::invalid_argument("unknown simulation model '" + cfg.model + "'");
}

// Profile score test of H0: theta_r = value (median-modified or plain),
// used to score-cover without per-endpoint root searches: the interval
// inverts this test, so coverage == acceptance at the true value.
inline bool score_test_accepts(const ModelSpec& model, int r, double value,
                               bool median_modified, double z,
                               const FitOptions& opts, ParameterPoint warm) {
    warm[r] = value;
    if (!constrained_nuisance_fit(model, r, warm, opts))
        throw BracketError("score test: inner nuisance fit failed");
    const CumulantBundle b = model.cumulant_bundle(warm);
    const ProfileCumulants k = profile_cumulants(b, r);
    if (!(k.kappa2 > 0.0)) throw SingularInformationError(r);
    double stat = b.score[r];
    if (median_modified) stat += -k.kappa1 + k.kappa3 / (6.0 * k.kappa2);
    return std::abs(stat) <= z * std::sqrt(k.kappa2);
}

struct RepRecord {
    // per method: estimates, finiteness, wald cover, score accept
    std::vector<ParameterPoint> estimates;
    std::vector<std::vector<bool>> finite;
    std::vector<std::vector<bool>> wald_cover;
    std::vector<char> score_accept;  // -1 failure, 0 reject, 1 accept
    std::vector<char> failed;
};

inline double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace detail

inline SimulationSummary run_simulation(const SimulationConfig& cfg) {
    if (cfg.replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    if (cfg.methods.empty())
        throw std::invalid_argument("methods list must be nonempty");
    const int p = static_cast<int>(cfg.truth.size());
    const int nm = static_cast<int>(cfg.methods.size());
    const double z = norm_quantile(0.5 * (1.0 + cfg.level));

    int threads = cfg.threads;
    if (threads <= 0) {
        if (const char* env = std::getenv("MEDSCORE_THREADS"))
            threads = std::atoi(env);
        if (threads <= 0)
            threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, cfg.replications);

    // Representative draw only for labels / shape validation.
    const std::vector<std::string> labels = [&] {
        RepRng rng0(cfg.seed, 0);
        const ModelSpec proto = detail::draw_model(cfg, rng0);
        if (proto.p != p)
            throw std::invalid_argument(
                "truth length does not match the model dimension");
        return proto.labels;
    }();

    std::vector<detail::RepRecord> records(cfg.replications);

    auto run_rep = [&](int rep) {
        RepRng rng(cfg.seed, static_cast<std::uint64_t>(rep));
        const ModelSpec model = detail::draw_model(cfg, rng);
        detail::RepRecord rec;
        rec.estimates.assign(nm, ParameterPoint(p, detail::nan_value()));
        rec.finite.assign(nm, std::vector<bool>(p, false));
        rec.wald_cover.assign(nm, std::vector<bool>(p, false));
        rec.score_accept.assign(nm, -1);
        rec.failed.assign(nm, 0);

        for (int mi = 0; mi < nm; ++mi) {
            const std::string& name = cfg.methods[mi];
            try {
                if (detail::is_profile_method(name)) {
                    const int r = cfg.profile_component;
                    const ProfileFitResult pf = profile_median_fit(model, r);
                    rec.estimates[mi][r] = pf.estimate;
                    rec.finite[mi][r] = true;
                    rec.wald_cover[mi][r] =
                        std::abs(pf.estimate - cfg.truth[r]) <= z * pf.std_error;
                } else {
                    const Method method = detail::parse_method(name);
                    const FitResult f = fit(model, method);
                    if (!f.converged && !f.diverged)
                        throw BracketError("fit did not converge");
                    rec.estimates[mi] = f.estimates;
                    for (int r = 0; r < p; ++r) {
                        rec.finite[mi][r] = f.finite[r];
                        rec.wald_cover[mi][r] =
                            f.finite[r] && std::isfinite(f.std_errors[r]) &&
                            std::abs(f.estimates[r] - cfg.truth[r]) <=
                                z * f.std_errors[r];
                    }
                }
                if (cfg.score_coverage) {
                    const Method method = detail::parse_method(name);
                    if (method != Method::firth) {
                        const int r = cfg.profile_component;
                        ParameterPoint warm = rec.estimates[mi];
                        for (int s = 0; s < p; ++s)
                            if (!rec.finite[mi][s] || !std::isfinite(warm[s]))
                                warm[s] = model.default_start[s];
                        try {
                            rec.score_accept[mi] = detail::score_test_accepts(
                                model, r, cfg.truth[r],
                                method == Method::median_br, z, {}, warm);
                        } catch (...) {
                            rec.score_accept[mi] = -1;
                        }
                    }
                }
            } catch (...) {
                rec.failed[mi] = 1;
            }
        }
        records[rep] = std::move(rec);
    };

    if (threads <= 1) {
        for (int rep = 0; rep < cfg.replications; ++rep) run_rep(rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const int rep = next.fetch_add(1);
                    if (rep >= cfg.replications) return;
                    run_rep(rep);
                }
            });
        for (auto& th : pool) th.join();
    }

    // Serial aggregation in replication order.
    SimulationSummary out;
    out.model = cfg.model;
    out.replications = cfg.replications;
    out.seed = cfg.seed;
    out.level = cfg.level;
    out.profile_component = cfg.profile_component;
    for (int mi = 0; mi < nm; ++mi) {
        MethodSummary ms;
        ms.method = cfg.methods[mi];
        const Method method = detail::parse_method(cfg.methods[mi]);
        const bool condition_on_finite = method == Method::mle;
        int separated = 0, ok = 0;
        for (const auto& rec : records) {
            if (rec.failed[mi]) {
                ++ms.fit_failures;
                continue;
            }
            ++ok;
            bool all_fin = true;
            for (int r = 0; r < p; ++r)
                if (!std::isnan(rec.estimates[mi][r]) && !rec.finite[mi][r])
                    all_fin = false;
            if (!all_fin) ++separated;
        }
        ms.pct_separated = ok ? 100.0 * separated / ok : 0.0;

        for (int r = 0; r < p; ++r) {
            ComponentSummary cs;
            cs.label = labels[r];
            const bool interest = (r == cfg.profile_component);
            int n_all = 0, n_le = 0, n_fin = 0;
            std::vector<double> abs_err;
            double sum_err = 0.0, sum_sq = 0.0;
            int n_cond = 0, n_wald = 0;
            for (const auto& rec : records) {
                if (rec.failed[mi]) continue;
                const double e = rec.estimates[mi][r];
                if (std::isnan(e)) continue;  // profile method, other comps
                ++n_all;
                if (e <= cfg.truth[r]) ++n_le;
                abs_err.push_back(std::abs(e - cfg.truth[r]));
                if (rec.finite[mi][r]) ++n_fin;
                if (!condition_on_finite || rec.finite[mi][r]) {
                    ++n_cond;
                    sum_err += e - cfg.truth[r];
                    sum_sq += (e - cfg.truth[r]) * (e - cfg.truth[r]);
                    if (rec.wald_cover[mi][r]) ++n_wald;
                }
            }
            if (n_all == 0) {
                ms.components.push_back(cs);
                continue;
            }
            cs.pu = 100.0 * n_le / n_all;
            cs.pu_se = 100.0 * std::sqrt(cs.pu / 100.0 * (1.0 - cs.pu / 100.0) /
                                         n_all);
            std::sort(abs_err.begin(), abs_err.end());
            const std::size_t h = abs_err.size() / 2;
            cs.mae = abs_err.size() % 2 ? abs_err[h]
                                        : 0.5 * (abs_err[h - 1] + abs_err[h]);
            cs.pct_finite = 100.0 * n_fin / n_all;
            cs.n_conditional = n_cond;
            if (n_cond > 0) {
                cs.b = sum_err / n_cond;
                cs.rmse = std::sqrt(sum_sq / n_cond);
                cs.wald = 100.0 * n_wald / n_cond;
                cs.wald_se = 100.0 * std::sqrt(cs.wald / 100.0 *
                                               (1.0 - cs.wald / 100.0) / n_cond);
            }
            if (interest && cfg.score_coverage && method != Method::firth) {
                int n_sc = 0, n_acc = 0;
                for (const auto& rec : records) {
                    if (rec.failed[mi] || rec.score_accept[mi] < 0) continue;
                    if (condition_on_finite && !rec.finite[mi][r]) continue;
                    ++n_sc;
                    if (rec.score_accept[mi] == 1) ++n_acc;
                }
                if (n_sc > 0) {
                    cs.score = 100.0 * n_acc / n_sc;
                    cs.score_se = 100.0 * std::sqrt(cs.score / 100.0 *
                                                    (1.0 - cs.score / 100.0) /
                                                    n_sc);
                    cs.score_defined = true;
                }
            }
            ms.components.push_back(cs);
        }
        out.methods.push_back(std::move(ms));
    }
    return out;
}

// ---------------------------------------------------------------------
// JSON / CSV bridges.

inline SimulationConfig parse_simulation_config(const nlohmann::json& j) {
    SimulationConfig cfg;
    cfg.model = j.at("model").get<std::string>();
    if (cfg.model != "binary" && cfg.model != "beta" &&
        cfg.model != "gamma-strata" && cfg.model != "skew-normal" &&
        cfg.model != "normal")
        throw std::invalid_argument("model: unknown value '" + cfg.model + "'");
    if (j.contains("link")) {
        const std::string l = j["link"].get<std::string>();
        if (l == "logit")
            cfg.link = BinaryLink::logit;
        else if (l == "probit")
            cfg.link = BinaryLink::probit;
        else
            throw std::invalid_argument("unknown link '" + l + "'");
    }
    if (j.contains("design"))
        cfg.design = j["design"].get<std::vector<std::vector<double>>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::vector<int>>();
    cfg.q = j.value("q", 0);
    cfg.m = j.value("m", 0);
    cfg.n = j.value("n", 0);
    if (j.contains("known-mean")) cfg.known_mean = j["known-mean"].get<double>();
    cfg.truth = j.at("truth").get<std::vector<double>>();
    cfg.replications = j.value("replications", 1000);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.level = j.value("level", 0.95);
    if (cfg.truth.empty())
        throw std::invalid_argument("truth: must be a non-empty array");
    if (cfg.replications < 1)
        throw std::invalid_argument("replications: must be at least 1");
    cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (cfg.methods.empty())
        throw std::invalid_argument("methods: must name at least one method");
    for (const auto& m : cfg.methods) detail::parse_method(m);
    cfg.profile_component = j.value("profile-component", 0);
    cfg.score_coverage = j.value("score-coverage", true);
    cfg.threads = j.value("threads", 0);
    return cfg;
}

inline nlohmann::json to_json(const SimulationSummary& s) {
    nlohmann::json j;
    j["model"] = s.model;
    j["replications"] = s.replications;
    j["seed"] = s.seed;
    j["level"] = s.level;
    j["profile-component"] = s.profile_component;
    j["methods"] = nlohmann::json::array();
    for (const auto& m : s.methods) {
        nlohmann::json jm;
        jm["method"] = m.method;
        jm["pct-separated"] = m.pct_separated;
        jm["fit-failures"] = m.fit_failures;
        jm["components"] = nlohmann::json::array();
        for (const auto& c : m.components) {
            nlohmann::json jc;
            jc["label"] = c.label;
            jc["pu"] = c.pu;
            jc["pu-mc-se"] = c.pu_se;
            jc["mae"] = c.mae;
            jc["b"] = c.b;
            jc["rmse"] = c.rmse;
            jc["wald"] = c.wald;
            jc["wald-mc-se"] = c.wald_se;
            if (c.score_defined) {
                jc["score"] = c.score;
                jc["score-mc-se"] = c.score_se;
            }
            jc["pct-finite"] = c.pct_finite;
            jc["n-conditional"] = c.n_conditional;
            jm["components"].push_back(std::move(jc));
        }
        j["methods"].push_back(std::move(jm));
    }
    return j;
}

// Aligned CSV in the papers' column order; score column blank ("--")
// where undefined.
inline std::string to_csv(const SimulationSummary& s) {
    std::ostringstream out;
    out << "method,component,PU,MAE,B,RMSE,Wald,Score,pct_finite\n";
    out.setf(std::ios::fixed);
    for (const auto& m : s.methods) {
        for (const auto& c : m.components) {
            // Profile methods estimate only the interest component; skip
            // the untouched nuisance rows.
            if (c.n_conditional == 0) continue;
            out.precision(1);
            out << m.method << ',' << c.label << ',' << c.pu << ',';
            out.precision(3);
            out << c.mae << ',' << c.b << ',' << c.rmse << ',';
            out.precision(1);
            out << c.wald << ',';
            if (c.score_defined)
                out << c.score;
            else
                out << "--";
            out << ',' << c.pct_finite << '\n';
        }
    }
    return out.str();
}

}  // namespace medscore

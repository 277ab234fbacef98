// medscore: command-line frontend for median-bias-reduced estimation.
//
// Subcommands:
//   fit       fit a model to CSV data (bundled datasets: @endometrial,
//             @foodexp) and emit a JSON report
//   simulate  run a seeded Monte Carlo comparison study from a JSON
//             config, emitting a JSON summary and an aligned CSV table
//   oracle    compare mle / median-br fits against the exact
//             (conditional) median-unbiased estimator on an enumerable
//             binomial design, single point or full-support sweep
//
// Exit codes: 0 success (including a separated MLE, reported with a
// warning field), 1 input error, 2 numerical non-convergence.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medscore/csv.hpp"
#include "medscore/datasets.hpp"
#include "medscore/exact.hpp"
#include "medscore/models.hpp"
#include "medscore/simbench.hpp"
#include "medscore/solver.hpp"

using nlohmann::json;
using namespace medscore;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CsvTable load_table(const std::string& path) {
    if (!path.empty() && path[0] == '@') return bundled_dataset(path.substr(1));
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file '" + path + "'");
    return parse_csv(in, path);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

// Possibly a ratio of two columns ("food/income"), used for responses
// defined as a share of another measured quantity.
std::vector<double> response_column(const CsvTable& t, const std::string& name) {
    const auto slash = name.find('/');
    if (slash == std::string::npos) return t.column(name);
    const auto num = t.column(name.substr(0, slash));
    const auto den = t.column(name.substr(slash + 1));
    std::vector<double> out(num.size());
    for (std::size_t i = 0; i < num.size(); ++i) {
        if (den[i] == 0.0)
            throw InputError("zero denominator in response ratio at data row " +
                             std::to_string(i + 1));
        out[i] = num[i] / den[i];
    }
    return out;
}

std::vector<std::vector<double>> design_matrix(
    const CsvTable& t, const std::vector<std::string>& covariates,
    bool intercept) {
    std::vector<std::vector<double>> cols;
    for (const auto& c : covariates) cols.push_back(t.column(c));
    const std::size_t n = t.rows.size();
    std::vector<std::vector<double>> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (intercept) x[i].push_back(1.0);
        for (const auto& c : cols) x[i].push_back(c[i]);
    }
    return x;
}

std::vector<std::string> design_labels(const std::vector<std::string>& covariates,
                                       bool intercept) {
    std::vector<std::string> labels;
    if (intercept) labels.push_back("(Intercept)");
    for (const auto& c : covariates) labels.push_back(c);
    return labels;
}

json interval_json(const ConfidenceInterval& ci, const std::string& label) {
    json j;
    j["component"] = label;
    j["level"] = ci.level;
    j["lower"] = ci.lower;
    j["upper"] = ci.upper;
    j["kind"] = ci.kind;
    j["complete"] = ci.complete;
    return j;
}

// ---------------------------------------------------------------------
// fit

struct FitArgs {
    std::string model, link = "logit", method = "mbr", data;
    std::string response, control_column;
    std::vector<std::string> covariates;
    std::string strata, trials_column;
    bool intercept = false;
    std::string profile_component;
    double level = 0.95;
    std::optional<double> known_mean;
    int controls_per_table = 1;
    bool no_score_intervals = false;
};

int cmd_fit(const FitArgs& a) {
    ModelSpec model;
    if (a.model == "binary") {
        const CsvTable t = load_table(a.data);
        BinaryDesign d;
        if (a.link == "logit")
            d.link = BinaryLink::logit;
        else if (a.link == "probit")
            d.link = BinaryLink::probit;
        else
            throw InputError("unknown link '" + a.link + "'");
        d.x = design_matrix(t, a.covariates, a.intercept);
        d.successes = response_column(t, a.response);
        if (!a.trials_column.empty()) d.trials = t.column(a.trials_column);
        model = make_binary(std::move(d));
        const auto labels = design_labels(a.covariates, a.intercept);
        for (std::size_t r = 0; r < labels.size(); ++r) model.labels[r] = labels[r];
    } else if (a.model == "beta") {
        const CsvTable t = load_table(a.data);
        BetaRegDesign d;
        d.x = design_matrix(t, a.covariates, a.intercept);
        d.response = response_column(t, a.response);
        model = make_beta_regression(std::move(d));
        const auto labels = design_labels(a.covariates, a.intercept);
        for (std::size_t r = 0; r < labels.size(); ++r) model.labels[r] = labels[r];
    } else if (a.model == "gamma-strata") {
        const CsvTable t = load_table(a.data);
        if (a.strata.empty())
            throw InputError("--strata is required for gamma-strata");
        const auto& y = t.column(a.response);
        const auto& s = t.column(a.strata);
        std::map<double, std::vector<double>> groups;
        for (std::size_t i = 0; i < y.size(); ++i) groups[s[i]].push_back(y[i]);
        GammaStrataDesign d;
        for (auto& [key, obs] : groups) d.observations.push_back(std::move(obs));
        model = make_gamma_strata(std::move(d));
    } else if (a.model == "normal") {
        const CsvTable t = load_table(a.data);
        model = make_normal(a.known_mean, response_column(t, a.response));
    } else if (a.model == "skew-normal") {
        const CsvTable t = load_table(a.data);
        model = make_skew_normal(response_column(t, a.response));
    } else if (a.model == "matched-tables") {
        const CsvTable t = load_table(a.data);
        if (a.control_column.empty())
            throw InputError("--control-column is required for matched-tables");
        const auto& y1 = t.column(a.response);
        const auto& y2 = t.column(a.control_column);
        MatchedTablesDesign d;
        d.controls_per_table = a.controls_per_table;
        for (std::size_t i = 0; i < y1.size(); ++i) d.pairs.push_back({y1[i], y2[i]});
        model = make_matched_tables(d);
    } else {
        throw InputError("unknown model '" + a.model + "'");
    }

    auto component_index = [&](const std::string& name) {
        for (int r = 0; r < model.p; ++r)
            if (model.labels[r] == name) return r;
        try {
            const int r = std::stoi(name);
            if (r >= 0 && r < model.p) return r;
        } catch (...) {
        }
        std::string known;
        for (const auto& l : model.labels) known += (known.empty() ? "" : ", ") + l;
        throw InputError("unknown component '" + name + "' (have: " + known + ")");
    };

    json out;
    out["model"] = a.model;
    out["method"] = a.method;
    out["level"] = a.level;

    if (a.method == "mbr-profile") {
        const int r = a.profile_component.empty()
                          ? model.p - 1
                          : component_index(a.profile_component);
        const ProfileFitResult pf = profile_median_fit(model, r);
        out["component"] = model.labels[r];
        out["estimate"] = pf.estimate;
        out["std_error"] = pf.std_error;
        out["converged"] = pf.converged;
        out["evaluations"] = pf.evaluations;
        json nuis;
        for (int s = 0; s < model.p; ++s) nuis[model.labels[s]] = pf.nuisance[s];
        out["parameters_at_estimate"] = nuis;
        const double z = norm_quantile(0.5 * (1.0 + a.level));
        json wj = json::array();
        ConfidenceInterval w;
        w.component = r;
        w.level = a.level;
        w.lower = pf.estimate - z * pf.std_error;
        w.upper = pf.estimate + z * pf.std_error;
        wj.push_back(interval_json(w, model.labels[r]));
        out["wald_intervals"] = wj;
        if (!a.no_score_intervals) {
            json sj = json::array();
            const ConfidenceInterval s = score_interval(model, r, a.level, {}, &pf);
            sj.push_back(interval_json(s, model.labels[r]));
            out["score_intervals"] = sj;
        }
        std::cout << out.dump(2) << "\n";
        return pf.converged ? 0 : 2;
    }

    Method method;
    if (a.method == "mle")
        method = Method::mle;
    else if (a.method == "firth")
        method = Method::firth;
    else if (a.method == "mbr" || a.method == "median-br")
        method = Method::median_br;
    else
        throw InputError("unknown method '" + a.method + "'");

    const FitResult f = fit(model, method);

    json est, se, fin;
    for (int r = 0; r < model.p; ++r) {
        est[model.labels[r]] =
            f.finite[r] ? f.estimates[r]
                        : (f.estimates[r] > 0
                               ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity());
        se[model.labels[r]] = f.std_errors[r];
        fin[model.labels[r]] = static_cast<bool>(f.finite[r]);
    }
    out["estimates"] = est;
    out["std_errors"] = se;
    out["finite"] = fin;
    json vc = json::array();
    for (int r = 0; r < model.p; ++r) {
        json row = json::array();
        for (int s = 0; s < model.p; ++s) row.push_back(f.vcov(r, s));
        vc.push_back(row);
    }
    out["vcov"] = vc;
    out["iterations"] = f.iterations;
    out["converged"] = f.converged;
    out["diverged"] = f.diverged;
    out["log_likelihood"] = f.log_likelihood;
    json wj = json::array();
    for (int r = 0; r < model.p; ++r)
        wj.push_back(interval_json(wald_interval(f, r, a.level), model.labels[r]));
    out["wald_intervals"] = wj;
    if (method == Method::median_br && !a.no_score_intervals) {
        json sj = json::array();
        for (int r = 0; r < model.p; ++r) {
            FitOptions opts;
            opts.start = f.estimates;
            ConfidenceInterval ci;
            ci.component = r;
            ci.level = a.level;
            ci.kind = "score";
            try {
                ci = score_interval(model, r, a.level, opts);
            } catch (const std::exception&) {
                // Profiling this component failed (typically the
                // constrained nuisance MLE does not exist); report an
                // incomplete interval rather than aborting the fit.
                ci.complete = false;
            }
            sj.push_back(interval_json(ci, model.labels[r]));
        }
        out["score_intervals"] = sj;
    }
    if (f.diverged)
        out["warning"] =
            "maximum likelihood estimate is not finite (data separation); "
            "infinite components are reported as +/-inf with the limiting "
            "covariance of the finite components";

    std::cout << out.dump(2) << "\n";
    return (f.converged || f.diverged) ? 0 : 2;
}

// ---------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& config_path, const std::string& csv_path,
                 std::optional<std::uint64_t> seed) {
    json j = load_json(config_path);
    if (seed) j["seed"] = *seed;
    try {
        // A design may reference a bundled dataset instead of an inline
        // matrix.
        if (j.contains("dataset")) {
            const std::string name = j["dataset"].get<std::string>();
            const CsvTable t =
                bundled_dataset(name.empty() || name[0] != '@' ? name
                                                               : name.substr(1));
            std::vector<std::string> covs;
            if (j.contains("covariates"))
                covs = j["covariates"].get<std::vector<std::string>>();
            j["design"] = design_matrix(t, covs, j.value("intercept", true));
        }
        const SimulationConfig cfg = parse_simulation_config(j);
        const SimulationSummary s = run_simulation(cfg);
        std::cout << to_json(s).dump(2) << "\n";
        const std::string csv = to_csv(s);
        if (!csv_path.empty()) {
            std::ofstream out(csv_path);
            if (!out) throw InputError("cannot write '" + csv_path + "'");
            out << csv;
        } else {
            std::cerr << csv;
        }
        return 0;
    } catch (const json::exception& e) {
        throw InputError(std::string("config schema: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("config schema: ") + e.what());
    }
}

// ---------------------------------------------------------------------
// oracle

struct OracleArgs {
    std::string design_path;
    int t = 0;
    bool has_t = false;
    bool sweep = false;
};

struct OracleDesign {
    EnumerableDesign design;
    std::vector<int> s_obs;  // empty: unconditional
    bool conditional = false;
    double t_scale = 1.0;  // integer t-weights = t_scale * real covariate
};

OracleDesign parse_oracle_design(const json& j) {
    OracleDesign od;
    od.t_scale = j.value("t-scale", 1.0);
    for (const auto& g : j.at("groups")) {
        EnumerationGroup eg;
        eg.trials = g.at("trials").get<int>();
        eg.t_weight = g.at("t-weight").get<int>();
        if (g.contains("s-weights"))
            eg.s_weights = g["s-weights"].get<std::vector<int>>();
        eg.offset = g.value("offset", 0.0);
        od.design.groups.push_back(std::move(eg));
    }
    if (j.contains("s")) {
        od.s_obs = j["s"].get<std::vector<int>>();
        od.conditional = true;
    }
    return od;
}

// Binomial logistic model whose sufficient statistics are exactly the
// enumeration weights: linear predictor for group g is
// theta * t_weight/t_scale * t_scale + sum_j lambda_j s_weight_j; the
// interest component is the t column (index 0).
ModelSpec oracle_model(const OracleDesign& od,
                       const std::vector<int>& successes) {
    BinaryDesign d;
    d.link = BinaryLink::logit;
    const int ns = od.design.groups.empty()
                       ? 0
                       : static_cast<int>(od.design.groups[0].s_weights.size());
    for (std::size_t g = 0; g < od.design.groups.size(); ++g) {
        const auto& eg = od.design.groups[g];
        std::vector<double> row;
        row.push_back(eg.t_weight / od.t_scale);
        for (int v : eg.s_weights) row.push_back(static_cast<double>(v));
        d.x.push_back(std::move(row));
        d.trials.push_back(static_cast<double>(eg.trials));
        d.successes.push_back(static_cast<double>(successes[g]));
    }
    (void)ns;
    return make_binary(std::move(d));
}

// Finds any success allocation consistent with the observed sufficient
// statistics (the fits depend on the data only through them).
std::optional<std::vector<int>> allocation_for(const OracleDesign& od, int t) {
    const int ng = static_cast<int>(od.design.groups.size());
    std::vector<int> y(ng, 0);
    std::optional<std::vector<int>> found;
    std::function<void(int)> rec = [&](int g) {
        if (found) return;
        if (g == ng) {
            int tw = 0;
            for (int i = 0; i < ng; ++i) tw += y[i] * od.design.groups[i].t_weight;
            if (tw != t) return;
            if (od.conditional) {
                for (std::size_t j = 0; j < od.s_obs.size(); ++j) {
                    int sw = 0;
                    for (int i = 0; i < ng; ++i)
                        sw += y[i] * od.design.groups[i].s_weights[j];
                    if (sw != od.s_obs[j]) return;
                }
            }
            found = y;
            return;
        }
        for (int k = 0; k <= od.design.groups[g].trials && !found; ++k) {
            y[g] = k;
            rec(g + 1);
        }
    };
    rec(0);
    return found;
}

json oracle_point(const OracleDesign& od, int t) {
    const ExactResult ex =
        od.conditional
            ? exact_conditional_median_unbiased(od.design, t, od.s_obs)
            : exact_median_unbiased(od.design, t);
    json j;
    j["t"] = t;
    j["exact"] = ex.estimate * od.t_scale;
    j["at_support_minimum"] = ex.at_support_minimum;
    j["at_support_maximum"] = ex.at_support_maximum;

    const auto alloc = allocation_for(od, t);
    if (!alloc) throw InputError("t=" + std::to_string(t) +
                                 " is not attainable under the design");
    const ModelSpec model = oracle_model(od, *alloc);
    const FitResult ml = fit(model, Method::mle);
    const FitResult br = fit(model, Method::median_br);
    const double exact = ex.estimate * od.t_scale;
    j["mle"] = ml.finite[0] ? ml.estimates[0]
                            : (ml.estimates[0] > 0
                                   ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity());
    j["mle_finite"] = static_cast<bool>(ml.finite[0]);
    j["mbr"] = br.estimates[0];
    j["abs_dev_mle"] = ml.finite[0]
                           ? std::abs(ml.estimates[0] - exact)
                           : std::numeric_limits<double>::infinity();
    j["abs_dev_mbr"] = std::abs(br.estimates[0] - exact);
    return j;
}

int cmd_oracle(const OracleArgs& a) {
    const OracleDesign od = parse_oracle_design(load_json(a.design_path));

    // Enumerate the attainable support of T (conditionally on s when
    // given) to drive sweeps and to validate single points.
    std::vector<int> support;
    {
        std::vector<int> y(od.design.groups.size(), 0);
        std::map<int, bool> seen;
        std::function<void(std::size_t, int)> rec = [&](std::size_t g, int tw) {
            if (g == od.design.groups.size()) {
                if (od.conditional) {
                    for (std::size_t j = 0; j < od.s_obs.size(); ++j) {
                        int sw = 0;
                        for (std::size_t i = 0; i < y.size(); ++i)
                            sw += y[i] * od.design.groups[i].s_weights[j];
                        if (sw != od.s_obs[j]) return;
                    }
                }
                seen[tw] = true;
                return;
            }
            for (int k = 0; k <= od.design.groups[g].trials; ++k) {
                y[g] = k;
                rec(g + 1, tw + k * od.design.groups[g].t_weight);
            }
        };
        rec(0, 0);
        for (const auto& [tv, _] : seen) support.push_back(tv);
    }
    if (support.size() < 2) throw InputError("degenerate support for T");

    json out;
    if (a.sweep) {
        json rows = json::array();
        for (int tv : support) rows.push_back(oracle_point(od, tv));
        out["support"] = support;
        out["rows"] = rows;
    } else {
        if (!a.has_t) throw InputError("provide --t or --sweep");
        if (std::find(support.begin(), support.end(), a.t) == support.end())
            throw InputError("t=" + std::to_string(a.t) +
                             " is outside the support of T");
        out = oracle_point(od, a.t);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"median bias reduced estimation toolkit"};
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "fit a model to CSV data");
    fit_cmd->add_option("--model", fa.model,
                        "binary|beta|gamma-strata|normal|skew-normal|matched-tables")
        ->required();
    fit_cmd->add_option("--link", fa.link, "logit|probit (binary)");
    fit_cmd->add_option("--method", fa.method, "mle|firth|mbr|mbr-profile");
    fit_cmd->add_option("--data", fa.data, "CSV path or @bundled-name")->required();
    fit_cmd->add_option("--response", fa.response,
                        "response column (or ratio 'num/den')");
    fit_cmd->add_option("--covariates", fa.covariates, "covariate columns")
        ->delimiter(',');
    fit_cmd->add_flag("--intercept", fa.intercept, "prepend an intercept column");
    fit_cmd->add_option("--trials", fa.trials_column, "binomial trials column");
    fit_cmd->add_option("--strata", fa.strata, "stratum column (gamma-strata)");
    fit_cmd->add_option("--profile-component", fa.profile_component,
                        "interest component for mbr-profile (label or index)");
    fit_cmd->add_option("--level", fa.level, "confidence level (default 0.95)");
    double km = 0.0;
    auto* km_opt = fit_cmd->add_option("--known-mean", km, "known mean (normal)");
    fit_cmd->add_option("--control-column", fa.control_column,
                        "control response column (matched-tables)");
    fit_cmd->add_option("--controls", fa.controls_per_table,
                        "controls per table (matched-tables)");
    fit_cmd->add_flag("--no-score-intervals", fa.no_score_intervals,
                      "skip score-type confidence intervals");

    std::string sim_config, sim_csv;
    std::uint64_t sim_seed = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo study");
    sim_cmd->add_option("--config", sim_config, "JSON config path")->required();
    sim_cmd->add_option("--csv", sim_csv, "write the aligned CSV table here");
    auto* seed_opt =
        sim_cmd->add_option("--seed", sim_seed, "override the config seed (default 0)");

    OracleArgs oa;
    auto* or_cmd = app.add_subcommand("oracle",
                                      "compare against the exact median-"
                                      "unbiased estimator");
    or_cmd->add_option("--design", oa.design_path, "JSON design path")->required();
    auto* t_opt = or_cmd->add_option("--t", oa.t, "observed sufficient statistic");
    or_cmd->add_flag("--sweep", oa.sweep, "emit the full-support table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit_cmd) {
            if (km_opt->count() > 0) fa.known_mean = km;
            return cmd_fit(fa);
        }
        if (*sim_cmd)
            return cmd_simulate(sim_config, sim_csv,
                                seed_opt->count() > 0
                                    ? std::optional<std::uint64_t>(sim_seed)
                                    : std::nullopt);
        if (*or_cmd) {
            oa.has_t = t_opt->count() > 0;
            return cmd_oracle(oa);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

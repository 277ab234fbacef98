// Common odds ratio in q matched 2x2 tables: 1 case and m controls per
// table, logit model with stratum intercepts. Parameter order
// (psi, lambda_1, ..., lambda_q); the odds-ratio view is rho = exp(psi).
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "medscore/models/binary.hpp"

namespace medscore {

struct MatchedTablesDesign {
    std::vector<std::pair<double, double>> pairs;  // (y_a1 in {0,1}, y_a2 in {0..m})
    int controls_per_table = 1;                    // m
};

inline ModelSpec make_matched_tables(const MatchedTablesDesign& design) {
    const int q = static_cast<int>(design.pairs.size());
    const int m = design.controls_per_table;
    if (q < 1 || m < 1)
        throw std::invalid_argument("make_matched_tables: need q >= 1, m >= 1");
    BinaryDesign bd;
    bd.link = BinaryLink::logit;
    const int p = 1 + q;
    for (int a = 0; a < q; ++a) {
        const auto [y1, y2] = design.pairs[a];
        if (y1 < 0 || y1 > 1 || y2 < 0 || y2 > m)
            throw std::invalid_argument("make_matched_tables: counts out of range");
        std::vector<double> case_row(p, 0.0), control_row(p, 0.0);
        case_row[0] = 1.0;  // psi enters the case margin only
        case_row[1 + a] = control_row[1 + a] = 1.0;
        bd.x.push_back(case_row);
        bd.successes.push_back(y1);
        bd.trials.push_back(1.0);
        bd.x.push_back(control_row);
        bd.successes.push_back(y2);
        bd.trials.push_back(static_cast<double>(m));
    }
    ModelSpec spec = make_binary(std::move(bd));
    spec.labels[0] = "psi";
    for (int a = 0; a < q; ++a) spec.labels[1 + a] = "lambda" + std::to_string(a + 1);
    return spec;
}

// Conditional MLE of the odds ratio in the balanced case
// s_a = (m+1)/2 for every table: rho_C = (t/q)/(1 - t/q), t = sum of
// case responses.
inline double matched_tables_conditional_or(double t, double q) {
    const double frac = t / q;
    return frac / (1.0 - frac);
}

}  // namespace medscore

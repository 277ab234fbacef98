#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "medscore/numerics.hpp"

using namespace medscore;

TEST_CASE("cholesky solves and inverts SPD systems") {
    // Oracle: random SPD A = B B^T with known action on a chosen x.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 1 + static_cast<int>(rng() % 6);
        Matrix b(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) b(i, j) = nd(rng);
        Matrix a(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                double s = 0.0;
                for (int k = 0; k < p; ++k) s += b(i, k) * b(j, k);
                a(i, j) = s + (i == j ? 1e-3 : 0.0);
            }
        std::vector<double> x(p);
        for (auto& v : x) v = nd(rng);
        std::vector<double> rhs(p, 0.0);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) rhs[i] += a(i, j) * x[j];

        const auto sol = solve_spd(a, rhs);
        for (int i = 0; i < p; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-8));

        const Matrix inv = spd_inverse(a);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                double s = 0.0;
                for (int k = 0; k < p; ++k) s += a(i, k) * inv(k, j);
                CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-7));
            }
    }
}

TEST_CASE("non-positive-definite matrices raise SingularInformationError") {
    Matrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = a(1, 0) = 2.0;
    a(1, 1) = 1.0;  // eigenvalues 3, -1
    CHECK_THROWS_AS(cholesky(a), SingularInformationError);
    try {
        cholesky(a);
    } catch (const SingularInformationError& e) {
        CHECK(std::string(e.what()).find("index 1") != std::string::npos);
    }
}

TEST_CASE("find_root locates bracketed roots") {
    // cos(x) = x has the Dottie number as its unique root.
    const double r = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-12);
    CHECK(r == doctest::Approx(0.7390851332151607).epsilon(1e-10));

    // Cube root with an inflection at the root.
    const double c = find_root([](double x) { return x * x * x - 8.0; }, 0.0, 5.0, 1e-12);
    CHECK(c == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("expand_bracket widens until a sign change appears") {
    auto f = [](double x) { return x - 100.0; };
    auto [lo, hi] = expand_bracket(f, 0.0, 1.0);
    CHECK(lo <= 100.0);
    CHECK(hi >= 100.0);
    CHECK(f(lo) * f(hi) <= 0.0);

    CHECK_THROWS_AS(expand_bracket([](double x) { return 1.0 + x * x; }, -1.0, 1.0),
                    BracketError);
}

TEST_CASE("polygamma matches classical values and recurrences") {
    const double egamma = 0.5772156649015329;
    CHECK(polygamma(0, 1.0) == doctest::Approx(-egamma).epsilon(1e-12));
    CHECK(polygamma(1, 1.0) ==
          doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
    const double zeta3 = 1.2020569031595943;
    CHECK(polygamma(2, 1.0) == doctest::Approx(-2.0 * zeta3).epsilon(1e-12));
    CHECK(polygamma(0, 0.5) ==
          doctest::Approx(-egamma - 2.0 * std::log(2.0)).epsilon(1e-12));

    // psi^(k)(x+1) = psi^(k)(x) + (-1)^k k! / x^{k+1}
    for (double x : {0.3, 1.7, 4.2, 11.0}) {
        CHECK(polygamma(0, x + 1.0) ==
              doctest::Approx(polygamma(0, x) + 1.0 / x).epsilon(1e-10));
        CHECK(polygamma(1, x + 1.0) ==
              doctest::Approx(polygamma(1, x) - 1.0 / (x * x)).epsilon(1e-10));
        CHECK(polygamma(2, x + 1.0) ==
              doctest::Approx(polygamma(2, x) + 2.0 / (x * x * x)).epsilon(1e-10));
    }
}

TEST_CASE("norm_quantile inverts the normal distribution function") {
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0));
    for (double x : {-2.5, -0.7, 0.0, 1.3, 3.1}) {
        const double p = 0.5 * std::erfc(-x / std::sqrt(2.0));
        CHECK(norm_quantile(p) == doctest::Approx(x).epsilon(1e-8));
    }
    CHECK_THROWS(norm_quantile(0.0));
}

TEST_CASE("integrate_real_line reproduces Gaussian moments") {
    auto phi = [](double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    };
    CHECK(integrate_real_line([&](double x) { return phi(x); }) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integrate_real_line([&](double x) { return x * phi(x); }) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(integrate_real_line([&](double x) { return x * x * phi(x); }) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(integrate_real_line([&](double x) { return x * x * x * x * phi(x); }) ==
          doctest::Approx(3.0).epsilon(1e-8));
}

// Shared numerical kernels: special functions, quadrature over the real
// line, dense SPD solves and bracketed root finding.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace medscore {

inline constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------------
// Errors

struct SingularInformationError : std::runtime_error {
    int pivot;
    explicit SingularInformationError(int pivot_index)
        : std::runtime_error("non-positive-definite pivot at index " +
                             std::to_string(pivot_index)),
          pivot(pivot_index) {}
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------
// Polygamma, orders 0-2.
//
// Upward recurrence into x >= 10, then the asymptotic series in 1/x^2
// with Bernoulli coefficients through B14.

inline double polygamma(int order, double x) {
    if (!(x > 0.0))
        throw std::domain_error("polygamma: x must be positive");
    if (order < 0 || order > 2)
        throw std::domain_error("polygamma: order must be 0, 1 or 2");

    double acc = 0.0;
    while (x < 10.0) {
        switch (order) {
        case 0: acc -= 1.0 / x; break;
        case 1: acc += 1.0 / (x * x); break;
        case 2: acc -= 2.0 / (x * x * x); break;
        }
        x += 1.0;
    }

    static const double bern[] = {1.0 / 6.0,   -1.0 / 30.0, 1.0 / 42.0,
                                  -1.0 / 30.0, 5.0 / 66.0,  -691.0 / 2730.0,
                                  7.0 / 6.0};
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double result = 0.0;
    if (order == 0) {
        result = std::log(x) - 0.5 * inv;
        double p = inv2;
        for (int n = 1; n <= 7; ++n) {
            result -= bern[n - 1] / (2.0 * n) * p;
            p *= inv2;
        }
    } else if (order == 1) {
        result = inv + 0.5 * inv2;
        double p = inv2 * inv;
        for (int n = 1; n <= 7; ++n) {
            result += bern[n - 1] * p;
            p *= inv2;
        }
    } else {
        result = -inv2 - inv2 * inv;
        double p = inv2 * inv2;
        for (int n = 1; n <= 7; ++n) {
            result -= bern[n - 1] * (2.0 * n + 1.0) * p;
            p *= inv2;
        }
    }
    return result + acc;
}

// ---------------------------------------------------------------------
// Standard normal density, distribution and quantile.

inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double log_norm_cdf(double x) {
    if (x > -8.0) return std::log(norm_cdf(x));
    // Tail: log Phi(x) = log phi(x) - log(-x) + log(1 - 1/x^2 + 3/x^4 - ...)
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) -
                          15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
    return -0.5 * x * x - 0.5 * std::log(2.0 * pi) - std::log(-x) +
           std::log(series);
}

// Inverse Mills ratio phi(x)/Phi(x), stable down the left tail.
inline double mills_ratio_inv(double x) {
    if (x > -8.0) return norm_pdf(x) / norm_cdf(x);
    return std::exp(-0.5 * x * x - 0.5 * std::log(2.0 * pi) -
                    log_norm_cdf(x));
}

inline double find_root(const std::function<double(double)>& f, double lo,
                        double hi, double tol);

inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must be in (0,1)");
    // Rational initial guess (Acklam), then Halley refinement; accurate
    // in the tails where root-finding on the flat CDF is not.
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int k = 0; k < 2; ++k) {
        const double e = norm_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// ---------------------------------------------------------------------
// Dense symmetric matrices and SPD solves.

class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// Cholesky factor (lower), throwing on a non-positive pivot.
inline Matrix cholesky(const Matrix& a) {
    const int n = a.rows();
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) throw SingularInformationError(j);
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline std::vector<double> cholesky_solve(const Matrix& l,
                                          std::vector<double> b) {
    const int n = l.rows();
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
        b[i] /= l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) b[i] -= l(k, i) * b[k];
        b[i] /= l(i, i);
    }
    return b;
}

inline std::vector<double> solve_spd(const Matrix& a,
                                     const std::vector<double>& b) {
    return cholesky_solve(cholesky(a), b);
}

// General square solve by Gaussian elimination with partial pivoting,
// for the (small, non-symmetric) Jacobians of adjusted score fields.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const int n = a.rows();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw SingularInformationError(k);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
        b[i] = s / a(i, i);
    }
    return b;
}

inline Matrix spd_inverse(const Matrix& a) {
    const int n = a.rows();
    const Matrix l = cholesky(a);
    Matrix inv(n, n);
    std::vector<double> e(n);
    for (int j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const auto col = cholesky_solve(l, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    // Symmetrize to kill round-off skew.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = inv(j, i) = v;
        }
    return inv;
}

// ---------------------------------------------------------------------
// Bracketed root finding: secant step when it stays inside the bracket
// and shrinks it, bisection otherwise.

inline double find_root(const std::function<double(double)>& f, double lo,
                        double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw BracketError("find_root: no sign change on [lo, hi]");
    for (int iter = 0; iter < 200 && (hi - lo) > tol; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (std::abs(fhi - flo) > 0.0) {
            const double sec = (lo * fhi - hi * flo) / (fhi - flo);
            // Accept the secant point only well inside the bracket.
            const double w = hi - lo;
            if (sec > lo + 0.01 * w && sec < hi - 0.01 * w) mid = sec;
        }
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if (flo * fmid < 0.0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

// Doubles the interval around [lo, hi] until f changes sign, up to 60
// expansions.
inline std::pair<double, double> expand_bracket(
    const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    for (int k = 0; k < 60; ++k) {
        if (flo * fhi <= 0.0) return {lo, hi};
        const double w = hi - lo;
        lo -= w;
        hi += w;
        flo = f(lo);
        fhi = f(hi);
    }
    if (flo * fhi <= 0.0) return {lo, hi};
    throw BracketError("expand_bracket: no sign change after 60 expansions");
}

// ---------------------------------------------------------------------
// Adaptive quadrature over the real line.
//
// The line is compactified with x = t/(1-t^2), t in (-1,1), and the
// transformed integrand is handled by adaptive Gauss-Kronrod 15(7)
// bisection; suited to smooth integrands with Gaussian tails.

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 200;
};

namespace detail {

// Gauss-Kronrod 15-point nodes/weights on [-1,1]; the embedded 7-point
// Gauss rule uses the odd-indexed nodes.
inline constexpr double gk_nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double gk_wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gk_wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct GkEstimate {
    double value;
    double error;
};

template <typename F>
GkEstimate gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(c + h * gk_nodes[i]);
        k += gk_wk[i] * v;
        if (i % 2 == 1) g += gk_wg[i / 2] * v;
    }
    return {h * k, std::abs(h * (k - g))};
}

template <typename F>
double adaptive(const F& f, double a, double b,
                const QuadratureSettings& settings) {
    struct Segment {
        double a, b, value, error;
    };
    auto est = gk15(f, a, b);
    std::vector<Segment> segs{{a, b, est.value, est.error}};
    int subdivisions = 0;
    for (;;) {
        double total = 0.0, err = 0.0;
        int worst = -1;
        double worst_err = 0.0;
        for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > worst_err) {
                worst_err = segs[i].error;
                worst = i;
            }
        }
        const double tol = std::max(settings.abs_tol,
                                    settings.rel_tol * std::abs(total));
        if (err <= tol || worst < 0) return total;
        if (++subdivisions > settings.max_subdivisions)
            throw QuadratureError(
                "integrate_real_line: tolerance not reached after " +
                std::to_string(settings.max_subdivisions) + " subdivisions");
        const Segment s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        auto left = gk15(f, s.a, mid);
        auto right = gk15(f, mid, s.b);
        segs[worst] = {s.a, mid, left.value, left.error};
        segs.push_back({mid, s.b, right.value, right.error});
    }
}

}  // namespace detail

inline double integrate_real_line(const std::function<double(double)>& f,
                                  const QuadratureSettings& settings = {}) {
    if (!(settings.abs_tol > 0.0) || !(settings.rel_tol > 0.0) ||
        settings.max_subdivisions < 1)
        throw std::domain_error("integrate_real_line: invalid settings");
    auto transformed = [&f](double t) {
        const double u = 1.0 - t * t;
        const double x = t / u;
        const double jac = (1.0 + t * t) / (u * u);
        const double v = f(x);
        return v == 0.0 ? 0.0 : v * jac;
    };
    // Endpoints map to +/-inf; the integrand must vanish there.
    return detail::adaptive(transformed, -1.0 + 1e-14, 1.0 - 1e-14, settings);
}

}  // namespace medscore

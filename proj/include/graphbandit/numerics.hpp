// Beta/Binomial special functions and exact Beta sampling. The Beta CDF and
// the Binomial CDF are kept as two routes so the Beta-Binomial identity
// F_Beta(S+1,F+1)(y) = 1 - F_Binom(S+F+1,y)(S) can serve as a numerics oracle.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "graphbandit/rng.hpp"

namespace graphbandit {

struct BetaParams {
    double alpha;
    double beta;
};

namespace detail {

inline void require_positive_shapes(const BetaParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta > 0.0))
        throw std::domain_error("numerics: Beta shapes must be positive, got alpha=" +
                                std::to_string(p.alpha) + " beta=" + std::to_string(p.beta));
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
// Converges rapidly for x < (a+1)/(a+b+2); callers apply the symmetry split.
inline double incomplete_beta_cf(double a, double b, double x) {
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    constexpr int max_iter = 600;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

// lgamma(x) - Stirling main term. Asymptotic series for large x; the lgamma
// route is cancellation-free once the terms are small.
inline double stirlerr(double x) {
    if (x < 15.0)
        return std::lgamma(x) -
               ((x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi));
    const double inv2 = 1.0 / (x * x);
    double s = 1.0 / 1188.0;
    s = 1.0 / 1680.0 - s * inv2;
    s = 1.0 / 1260.0 - s * inv2;
    s = 1.0 / 360.0 - s * inv2;
    s = 1.0 / 12.0 - s * inv2;
    return s / x;
}

// Stable binomial deviance x*log(x/np) + np - x (Loader's bd0).
inline double bd0(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        const double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        const double v2 = v * v;
        for (int j = 1;; ++j) {
            ej *= v2;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * std::log(x / np) + np - x;
}

// log( y^a (1-y)^b / B(a,b) ) without large-term cancellation: the
// lgamma(a)+lgamma(b)-lgamma(a+b) route loses ~1e-9 absolute at shapes
// near 1e6, which would swamp the CDF accuracy contract.
inline double log_beta_front(double a, double b, double y) {
    const double n = a + b;
    return -bd0(a, n * y) - bd0(b, n * (1.0 - y)) +
           0.5 * std::log(a * b / (2.0 * std::numbers::pi * n)) - stirlerr(a) -
           stirlerr(b) + stirlerr(n);
}

}  // namespace detail

// Regularized incomplete beta I_y(alpha, beta).
inline double beta_cdf(const BetaParams& p, double y) {
    detail::require_positive_shapes(p);
    if (!(y >= 0.0 && y <= 1.0))
        throw std::domain_error("numerics: beta_cdf argument must lie in [0,1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 1.0;
    const double a = p.alpha;
    const double b = p.beta;
    const double log_front = detail::log_beta_front(a, b, y);
    if (y < (a + 1.0) / (a + b + 2.0))
        return std::exp(log_front) * detail::incomplete_beta_cf(a, b, y) / a;
    return 1.0 - std::exp(log_front) * detail::incomplete_beta_cf(b, a, 1.0 - y) / b;
}

// P[Binomial(n, p) <= r]. Direct log-space summation for n <= 64; the
// Beta-CDF duality P[X <= r] = I_{1-p}(n-r, r+1) above that.
inline double binom_cdf(std::int64_t n, double p, std::int64_t r) {
    if (n < 0) throw std::domain_error("numerics: binom_cdf needs n >= 0");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("numerics: binom_cdf probability must lie in [0,1]");
    if (r < 0) return 0.0;
    if (r >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;  // r < n here
    if (n <= 64) {
        const double lp = std::log(p);
        const double lq = std::log1p(-p);
        double sum = 0.0;
        for (std::int64_t i = 0; i <= r; ++i) {
            const double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                              std::lgamma(static_cast<double>(i) + 1.0) -
                              std::lgamma(static_cast<double>(n - i) + 1.0);
            sum += std::exp(lc + static_cast<double>(i) * lp +
                            static_cast<double>(n - i) * lq);
        }
        return std::min(sum, 1.0);
    }
    return beta_cdf({static_cast<double>(n - r), static_cast<double>(r + 1)}, 1.0 - p);
}

// Gamma(shape, 1) via Marsaglia-Tsang squeeze rejection for shape >= 1 and
// the power-of-uniform boost below 1.
inline double gamma_sample(double shape, Rng& rng) {
    if (!(shape > 0.0))
        throw std::domain_error("numerics: gamma shape must be positive");
    if (shape < 1.0) {
        const double boost = std::pow(rng.uniform_pos(), 1.0 / shape);
        return gamma_sample(shape + 1.0, rng) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Exact Beta variate as a ratio of Gamma variates; clamped into (0,1).
inline double beta_sample(const BetaParams& p, Rng& rng) {
    detail::require_positive_shapes(p);
    const double x = gamma_sample(p.alpha, rng);
    const double y = gamma_sample(p.beta, rng);
    double r = x / (x + y);
    if (!(r > 0.0)) r = std::numeric_limits<double>::min();
    if (!(r < 1.0)) r = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return r;
}

// |F_Beta(S+1,F+1)(y) - (1 - F_Binom(S+F+1,y)(S))|; contractually tiny.
inline double beta_binomial_identity_gap(std::int64_t successes, std::int64_t failures,
                                         double y) {
    if (successes < 0 || failures < 0)
        throw std::domain_error("numerics: counts must be nonnegative");
    const double lhs = beta_cdf({static_cast<double>(successes + 1),
                                 static_cast<double>(failures + 1)},
                                y);
    const double rhs = 1.0 - binom_cdf(successes + failures + 1, y, successes);
    return std::fabs(lhs - rhs);
}

}  // namespace graphbandit

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "washrec/errors.hpp"

namespace washrec {

enum class McNemarVariant { asymptotic, exact_conditional, mid_p };

inline const char* to_string(McNemarVariant v) {
    switch (v) {
        case McNemarVariant::asymptotic: return "asymptotic";
        case McNemarVariant::exact_conditional: return "exact";
        case McNemarVariant::mid_p: return "mid-p";
    }
    return "?";
}

// Paired comparison of two classifiers on the same predictions. b counts
// samples where A is correct and B wrong, c the reverse; h is the rejection
// decision at alpha = 0.05.
struct McNemarResult {
    McNemarVariant variant = McNemarVariant::asymptotic;
    long long b = 0;
    long long c = 0;
    double statistic = std::numeric_limits<double>::quiet_NaN();  // asymptotic only
    double p = 1.0;
    bool h = false;
};

namespace detail {

// Upper tail of the chi-square distribution with one degree of freedom.
inline double chi2_sf_1dof(double x) { return std::erfc(std::sqrt(x / 2.0)); }

// 2 * P(X <= m) for X ~ Binomial(n, 1/2), without capping at 1, plus the
// point probability at m. Exact 128-bit integer binomials for n <= 64 (one
// rounding at the final division); log-space accumulation beyond that.
struct BinomialTail {
    double two_sided;  // 2 * sum_{i<=m} C(n,i) / 2^n
    double point;      // C(n,m) / 2^n
};

inline BinomialTail binomial_half_tail(long long n, long long m) {
    if (n == 0) return {2.0, 1.0};
    if (n <= 64) {
        unsigned __int128 coef = 1;
        unsigned __int128 sum = 0;
        for (long long i = 0; i <= m; ++i) {
            sum += coef;
            coef = coef * static_cast<unsigned __int128>(n - i) /
                   static_cast<unsigned __int128>(i + 1);
        }
        unsigned __int128 last = 1;
        for (long long i = 0; i < m; ++i)
            last = last * static_cast<unsigned __int128>(n - i) /
                   static_cast<unsigned __int128>(i + 1);
        const long double denom = std::ldexp(1.0L, static_cast<int>(n));
        return {static_cast<double>(2.0L * static_cast<long double>(sum) / denom),
                static_cast<double>(static_cast<long double>(last) / denom)};
    }
    // log pmf(m) via lgamma, then sum downward relative to the largest term
    const auto log_pmf = [n](long long i) {
        return std::lgamma(static_cast<double>(n) + 1.0) -
               std::lgamma(static_cast<double>(i) + 1.0) -
               std::lgamma(static_cast<double>(n - i) + 1.0) -
               static_cast<double>(n) * std::log(2.0);
    };
    const double lp_m = log_pmf(m);
    double rel_sum = 0.0;
    for (long long i = m; i >= 0; --i) {
        const double t = std::exp(log_pmf(i) - lp_m);
        rel_sum += t;
        if (t < 1e-18) break;  // further terms cannot move the double sum
    }
    const double tail = std::exp(lp_m) * rel_sum;
    return {2.0 * tail, std::exp(lp_m)};
}

}  // namespace detail

inline McNemarResult mcnemar_from_counts(long long b, long long c, McNemarVariant variant) {
    McNemarResult r;
    r.variant = variant;
    r.b = b;
    r.c = c;
    const long long n = b + c;
    switch (variant) {
        case McNemarVariant::asymptotic: {
            if (n == 0)
                throw NoDiscordantPairs("asymptotic McNemar needs at least one discordant pair");
            const double d = std::abs(static_cast<double>(b - c)) - 1.0;
            r.statistic = d * d / static_cast<double>(n);
            r.p = detail::chi2_sf_1dof(r.statistic);
            break;
        }
        case McNemarVariant::exact_conditional: {
            const auto t = detail::binomial_half_tail(n, std::min(b, c));
            r.p = std::min(1.0, t.two_sided);
            break;
        }
        case McNemarVariant::mid_p: {
            // subtract the point probability from the uncapped two-sided
            // tail; at b == c this lands exactly on 1
            const auto t = detail::binomial_half_tail(n, std::min(b, c));
            r.p = std::clamp(t.two_sided - t.point, 0.0, 1.0);
            break;
        }
    }
    r.h = r.p < 0.05;
    return r;
}

inline McNemarResult mcnemar(std::span<const int> pred_a, std::span<const int> pred_b,
                             std::span<const int> truth, McNemarVariant variant) {
    if (pred_a.size() != truth.size() || pred_b.size() != truth.size())
        throw LengthMismatch("prediction vectors and truth must have equal length");
    if (truth.empty()) throw LengthMismatch("empty inputs");
    long long b = 0, c = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool a_ok = pred_a[i] == truth[i];
        const bool b_ok = pred_b[i] == truth[i];
        if (a_ok && !b_ok) ++b;
        if (!a_ok && b_ok) ++c;
    }
    return mcnemar_from_counts(b, c, variant);
}

}  // namespace washrec

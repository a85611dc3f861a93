#pragma once

// Shared test utilities: independent oracles and small dataset builders.
// Oracles deliberately avoid the library's computation paths.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/rng.hpp"
#include "washrec/trace.hpp"
#include "washrec/windowing.hpp"

namespace testutil {

// --- direct-formula moment oracles (long double, naive sums) ---

inline long double o_mean(const std::vector<double>& x) {
    long double s = 0.0L;
    for (double v : x) s += v;
    return s / static_cast<long double>(x.size());
}

inline long double o_central_moment(const std::vector<double>& x, int k) {
    const long double m = o_mean(x);
    long double s = 0.0L;
    for (double v : x) s += std::pow(static_cast<long double>(v) - m, k);
    return s / static_cast<long double>(x.size());
}

inline long double o_sample_std(const std::vector<double>& x) {
    const long double m = o_mean(x);
    long double s = 0.0L;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<long double>(x.size() - 1));
}

inline long double o_median(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5L * (x[n / 2 - 1] + x[n / 2]);
}

inline std::vector<double> o_diff(const std::vector<double>& x, double scale) {
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d.push_back((x[i + 1] - x[i]) * scale);
    return d;
}

inline long double o_var_pop(const std::vector<double>& x) { return o_central_moment(x, 2); }

inline long double o_mobility(const std::vector<double>& x, double fs) {
    return std::sqrt(o_var_pop(o_diff(x, fs)) / o_var_pop(x));
}

inline long double o_complexity(const std::vector<double>& x, double fs) {
    return o_mobility(o_diff(x, fs), fs) / o_mobility(x, fs);
}

inline long double o_skewness(const std::vector<double>& x) {
    return o_central_moment(x, 3) / std::pow(o_central_moment(x, 2), 1.5L);
}

inline long double o_kurtosis(const std::vector<double>& x) {
    const long double m2 = o_central_moment(x, 2);
    return o_central_moment(x, 4) / (m2 * m2);
}

// --- brute-force k-NN oracle (full dimension, Euclidean) ---

inline int brute_knn(const washrec::Matrix& X, const std::vector<int>& y,
                     const std::vector<double>& q, int k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < X.cols(); ++c) {
            const double diff = X(i, c) - q[c];
            s += diff * diff;
        }
        d.emplace_back(s, i);
    }
    std::sort(d.begin(), d.end());
    std::vector<int> votes;
    for (int i = 0; i < k && static_cast<std::size_t>(i) < d.size(); ++i)
        votes.push_back(y[d[static_cast<std::size_t>(i)].second]);
    std::sort(votes.begin(), votes.end());
    int best = votes[0];
    std::size_t best_n = 0;
    for (std::size_t i = 0; i < votes.size();) {
        std::size_t j = i;
        while (j < votes.size() && votes[j] == votes[i]) ++j;
        if (j - i > best_n) {
            best_n = j - i;
            best = votes[i];
        }
        i = j;
    }
    return best;
}

// --- eigenvalues of a small symmetric matrix (cyclic Jacobi) ---

inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-22) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    return ev;
}

// --- dataset builders ---

inline washrec::SensorTrace make_trace(const std::vector<std::vector<double>>& rows,
                                       double fs = 100.0, const std::string& subject = "s0",
                                       std::int64_t start_ms = 0) {
    washrec::SensorTrace t;
    t.subject_id = subject;
    t.sample_rate_hz = fs;
    t.channels = rows.empty() || rows[0].size() == 3 ? washrec::kAccelChannels
                                                     : washrec::kAccelGyroChannels;
    t.start_time_ms = start_ms;
    t.samples = washrec::Matrix(rows.size(), rows.empty() ? 3 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) t.samples(r, c) = rows[r][c];
    return t;
}

inline washrec::SensorTrace constant_trace(std::size_t n, const std::vector<double>& value,
                                           double fs = 100.0, const std::string& subject = "s0") {
    std::vector<std::vector<double>> rows(n, value);
    return make_trace(rows, fs, subject);
}

// Single-channel-values window with the given label (values copied to every
// channel unless per-channel data given).
inline washrec::LabeledWindow make_window(const std::vector<double>& series, int label,
                                          std::size_t channels = 3,
                                          const std::string& subject = "s0") {
    washrec::LabeledWindow w;
    w.source_subject = subject;
    w.label = label;
    w.samples = washrec::Matrix(series.size(), channels);
    for (std::size_t r = 0; r < series.size(); ++r)
        for (std::size_t c = 0; c < channels; ++c) w.samples(r, c) = series[r];
    return w;
}

inline std::vector<double> sinusoid(double freq_hz, double fs, std::size_t n, double amp = 1.0,
                                    double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = amp * std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) / fs + phase);
    return x;
}

inline std::string trace_csv(const std::vector<std::vector<double>>& rows, double fs = 100.0,
                             bool gyro = false) {
    std::ostringstream out;
    out << (gyro ? "t_ms,ax,ay,az,gx,gy,gz" : "t_ms,ax,ay,az") << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << static_cast<long long>(std::llround(static_cast<double>(i) * 1000.0 / fs));
        for (double v : rows[i]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

}  // namespace testutil

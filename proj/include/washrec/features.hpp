#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/csv.hpp"
#include "washrec/errors.hpp"
#include "washrec/windowing.hpp"

namespace washrec {

// Which of the three per-channel descriptor groups to compute.
struct FeatureGroupSelection {
    bool base = true;
    bool hjorth = true;
    bool shape = true;

    std::size_t per_channel_count() const {
        return (base ? 4u : 0u) + (hjorth ? 3u : 0u) + (shape ? 2u : 0u);
    }
    bool any() const { return base || hjorth || shape; }

    std::string tag() const {
        std::string t;
        if (base) t += 'B';
        if (hjorth) t += 'H';
        if (shape) t += 'S';
        return t;
    }

    bool operator==(const FeatureGroupSelection&) const = default;
};

struct BaseFeatures {
    double mean, max, std, median;
};
struct HjorthFeatures {
    double activity, mobility, complexity;
};
struct ShapeFeatures {
    double kurtosis, skewness;
};

namespace detail {

inline double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Population variance (n denominator).
inline double var_pop(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

inline std::vector<double> diff(std::span<const double> x, double scale) {
    std::vector<double> d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = (x[i + 1] - x[i]) * scale;
    return d;
}

}  // namespace detail

// mean, maximum, sample standard deviation (n-1) and midpoint-interpolated
// median of a series of length >= 2.
inline BaseFeatures base_features(std::span<const double> x) {
    if (x.size() < 2) throw SeriesTooShort("base features need at least 2 samples");
    const double m = detail::mean_of(x);
    double mx = x[0];
    double ss = 0.0;
    for (double v : x) {
        mx = std::max(mx, v);
        ss += (v - m) * (v - m);
    }
    const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double med =
        n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return {m, mx, sd, med};
}

// Hjorth parameters. Activity is the population variance of the signal;
// mobility the square root of the variance ratio of its derivative to
// itself; complexity the mobility ratio of derivative to signal. The
// derivative is the first difference scaled by the sample rate, so mobility
// is in rad/s and a pure sinusoid at angular frequency w has mobility ~= w
// and complexity ~= 1. Pass scaled_derivative=false for raw differences.
inline HjorthFeatures hjorth_features(std::span<const double> x, double sample_rate_hz,
                                      bool scaled_derivative = true) {
    if (x.size() < 3) throw SeriesTooShort("Hjorth features need at least 3 samples");
    const double scale = scaled_derivative ? sample_rate_hz : 1.0;
    const double var_x = detail::var_pop(x);
    if (var_x <= 0.0) throw DegenerateSignal("zero variance signal");
    const std::vector<double> dx = detail::diff(x, scale);
    const double var_dx = detail::var_pop(dx);
    if (var_dx <= 0.0) throw DegenerateSignal("zero variance derivative");
    const std::vector<double> ddx = detail::diff(dx, scale);
    const double var_ddx = detail::var_pop(ddx);

    const double mobility = std::sqrt(var_dx / var_x);
    const double mobility_dx = std::sqrt(var_ddx / var_dx);
    return {var_x, mobility, mobility_dx / mobility};
}

// Pearson (non-excess) kurtosis and skewness from population central
// moments: a normal distribution has kurtosis 3.
inline ShapeFeatures shape_features(std::span<const double> x) {
    if (x.size() < 4) throw SeriesTooShort("shape features need at least 4 samples");
    const double m = detail::mean_of(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0.0) throw DegenerateSignal("zero variance signal");
    return {m4 / (m2 * m2), m3 / std::pow(m2, 1.5)};
}

// One feature column: channel outer, group inner, descriptor innermost.
struct FeatureColumn {
    std::string channel;
    std::string group;
    std::string descriptor;

    std::string name() const { return channel + "_" + group + "_" + descriptor; }

    bool operator==(const FeatureColumn&) const = default;
};

inline std::vector<FeatureColumn> feature_layout(const std::vector<std::string>& channels,
                                                 const FeatureGroupSelection& sel) {
    if (!sel.any()) throw ConfigError("at least one feature group must be selected");
    std::vector<FeatureColumn> layout;
    for (const auto& ch : channels) {
        if (sel.base)
            for (const char* d : {"mean", "max", "std", "median"})
                layout.push_back({ch, "base", d});
        if (sel.hjorth)
            for (const char* d : {"activity", "mobility", "complexity"})
                layout.push_back({ch, "hjorth", d});
        if (sel.shape)
            for (const char* d : {"kurtosis", "skewness"}) layout.push_back({ch, "shape", d});
    }
    return layout;
}

struct FeatureVector {
    std::vector<double> values;
    int label = kOtherLabel;
};

// Concatenates the selected per-channel descriptors in canonical layout
// order; the window's label is copied through.
inline FeatureVector featurize(const LabeledWindow& w, const FeatureGroupSelection& sel,
                               double sample_rate_hz, bool scaled_derivative = true,
                               const std::vector<std::string>* channel_names = nullptr) {
    if (!sel.any()) throw ConfigError("at least one feature group must be selected");
    FeatureVector fv;
    fv.label = w.label;
    fv.values.reserve(w.samples.cols() * sel.per_channel_count());
    for (std::size_t c = 0; c < w.samples.cols(); ++c) {
        const std::vector<double> x = w.samples.column(c);
        try {
            if (sel.base) {
                const auto b = base_features(x);
                fv.values.insert(fv.values.end(), {b.mean, b.max, b.std, b.median});
            }
            if (sel.hjorth) {
                const auto h = hjorth_features(x, sample_rate_hz, scaled_derivative);
                fv.values.insert(fv.values.end(), {h.activity, h.mobility, h.complexity});
            }
            if (sel.shape) {
                const auto s = shape_features(x);
                fv.values.insert(fv.values.end(), {s.kurtosis, s.skewness});
            }
        } catch (const DegenerateSignal& e) {
            const std::string ch =
                channel_names && c < channel_names->size() ? (*channel_names)[c]
                                                           : "channel " + std::to_string(c);
            throw DegenerateSignal(ch + ": " + e.what());
        }
    }
    return fv;
}

// Feature matrix for a whole window set, one row per window.
struct FeatureSet {
    std::vector<FeatureColumn> layout;
    Matrix X;
    std::vector<int> y;
    LabelTable labels;
    double sample_rate_hz = 100.0;
};

inline FeatureSet featurize_set(const WindowSet& ws, const FeatureGroupSelection& sel,
                                bool scaled_derivative = true) {
    FeatureSet fs;
    fs.layout = feature_layout(ws.channels, sel);
    fs.labels = ws.labels;
    fs.sample_rate_hz = ws.sample_rate_hz;
    fs.X = Matrix(ws.windows.size(), fs.layout.size());
    fs.y.reserve(ws.windows.size());
    for (std::size_t i = 0; i < ws.windows.size(); ++i) {
        const FeatureVector fv =
            featurize(ws.windows[i], sel, ws.sample_rate_hz, scaled_derivative, &ws.channels);
        std::copy(fv.values.begin(), fv.values.end(), fs.X.row(i).begin());
        fs.y.push_back(fv.label);
    }
    return fs;
}

// Per-dimension z-scoring with statistics taken from the training fold only.
// Dimensions with zero spread pass through unscaled.
class Standardizer {
public:
    Standardizer() = default;

    // Reconstructs a fitted instance, e.g. when loading a model file.
    static Standardizer from_moments(std::vector<double> means, std::vector<double> scales) {
        if (means.size() != scales.size())
            throw DimensionMismatch("means and scales must have equal length");
        Standardizer s;
        s.mean_ = std::move(means);
        s.scale_ = std::move(scales);
        return s;
    }

    static Standardizer fit(const Matrix& X) {
        if (X.rows() == 0) throw EmptyTrainingSet("standardizer needs a non-empty training set");
        Standardizer s;
        s.mean_.assign(X.cols(), 0.0);
        s.scale_.assign(X.cols(), 1.0);
        for (std::size_t c = 0; c < X.cols(); ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < X.rows(); ++r) sum += X(r, c);
            s.mean_[c] = sum / static_cast<double>(X.rows());
            if (X.rows() > 1) {
                double ss = 0.0;
                for (std::size_t r = 0; r < X.rows(); ++r) {
                    const double d = X(r, c) - s.mean_[c];
                    ss += d * d;
                }
                const double sd = std::sqrt(ss / static_cast<double>(X.rows() - 1));
                if (sd > 0.0) s.scale_[c] = sd;
            }
        }
        return s;
    }

    std::vector<double> apply(std::span<const double> v) const {
        if (v.size() != mean_.size())
            throw DimensionMismatch("standardizer fitted on " + std::to_string(mean_.size()) +
                                    " dims, got " + std::to_string(v.size()));
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean_[i]) / scale_[i];
        return out;
    }

    Matrix apply(const Matrix& X) const {
        Matrix out(X.rows(), X.cols());
        for (std::size_t r = 0; r < X.rows(); ++r) {
            const auto row = apply(X.row(r));
            std::copy(row.begin(), row.end(), out.row(r).begin());
        }
        return out;
    }

    std::size_t dims() const { return mean_.size(); }
    const std::vector<double>& means() const { return mean_; }
    const std::vector<double>& scales() const { return scale_; }

    bool operator==(const Standardizer&) const = default;

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

inline Standardizer fit_standardizer(const Matrix& X) { return Standardizer::fit(X); }

// CSV export: one named column per (channel, group, descriptor) plus label.
inline void write_feature_csv(const FeatureSet& fs, std::ostream& out) {
    for (const auto& col : fs.layout) out << col.name() << ',';
    out << "label\n";
    for (std::size_t r = 0; r < fs.X.rows(); ++r) {
        for (std::size_t c = 0; c < fs.X.cols(); ++c) out << csv::fmt(fs.X(r, c)) << ',';
        out << fs.labels.names()[static_cast<std::size_t>(fs.y[r])] << '\n';
    }
}

}  // namespace washrec

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/csv.hpp"
#include "washrec/errors.hpp"
#include "washrec/windowing.hpp"

namespace washrec {

// Series linearly mapped into [-1, 1]; a constant series maps to all zeros.
struct RescaledSeries {
    std::vector<double> values;
    double original_min = 0.0;
    double original_max = 0.0;
};

// Angles phi_i = arccos(rescaled value), all in [0, pi].
struct PolarSeries {
    std::vector<double> phi;
};

enum class GramianKind { gasf, gadf };

struct GramianImage {
    GramianKind kind = GramianKind::gasf;
    std::size_t n = 0;
    std::vector<double> cells;  // row-major n x n, entries in [-1, 1]
    std::string channel;

    double at(std::size_t i, std::size_t j) const { return cells[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return cells[i * n + j]; }
};

inline RescaledSeries minmax_rescale(std::span<const double> x) {
    RescaledSeries r;
    r.values.resize(x.size());
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    r.original_min = *mn;
    r.original_max = *mx;
    if (r.original_max > r.original_min) {
        const double span = r.original_max - r.original_min;
        for (std::size_t i = 0; i < x.size(); ++i)
            r.values[i] = 2.0 * (x[i] - r.original_min) / span - 1.0;
    }
    // constant series: values stay 0, i.e. phi = pi/2 everywhere
    return r;
}

inline PolarSeries to_polar(const RescaledSeries& r) {
    PolarSeries p;
    p.phi.reserve(r.values.size());
    for (double v : r.values) {
        if (std::abs(v) > 1.0 + 1e-12)
            throw OutOfRange("rescaled value " + csv::fmt(v) + " outside [-1, 1]");
        p.phi.push_back(std::acos(std::clamp(v, -1.0, 1.0)));
    }
    return p;
}

namespace detail {

inline GramianImage gramian(const PolarSeries& p, GramianKind kind) {
    const std::size_t n = p.phi.size();
    GramianImage img;
    img.kind = kind;
    img.n = n;
    img.cells.resize(n * n);
    // Algebraic forms: with x = cos(phi) and s = sqrt(1 - x^2) = sin(phi),
    //   cos(phi_i + phi_j) = x_i x_j - s_i s_j
    //   sin(phi_i - phi_j) = s_i x_j - x_i s_j
    std::vector<double> x(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::cos(p.phi[i]);
        s[i] = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            img.cells[i * n + j] = kind == GramianKind::gasf ? x[i] * x[j] - s[i] * s[j]
                                                             : s[i] * x[j] - x[i] * s[j];
    return img;
}

}  // namespace detail

// Gramian Angular Summation Field: cos(phi_i + phi_j). Symmetric.
inline GramianImage gasf(const PolarSeries& p) { return detail::gramian(p, GramianKind::gasf); }

// Gramian Angular Difference Field: sin(phi_i - phi_j). Antisymmetric with
// zero diagonal.
inline GramianImage gadf(const PolarSeries& p) { return detail::gramian(p, GramianKind::gadf); }

// Piecewise aggregate approximation: the series is cut into target_len
// contiguous segments (remainder samples go one per segment from the front)
// and each segment is replaced by its mean.
inline std::vector<double> paa(std::span<const double> x, std::size_t target_len) {
    if (target_len < 1 || target_len > x.size())
        throw BadTargetLength("target length " + std::to_string(target_len) +
                              " not in [1, " + std::to_string(x.size()) + "]");
    std::vector<double> out;
    out.reserve(target_len);
    const std::size_t base = x.size() / target_len;
    const std::size_t rem = x.size() % target_len;
    std::size_t pos = 0;
    for (std::size_t seg = 0; seg < target_len; ++seg) {
        const std::size_t len = base + (seg < rem ? 1 : 0);
        double sum = 0.0;
        for (std::size_t i = 0; i < len; ++i) sum += x[pos + i];
        out.push_back(sum / static_cast<double>(len));
        pos += len;
    }
    return out;
}

// Per channel: paa -> minmax rescale -> polar -> GASF and GADF. Yields
// 2 x channels images (12 for accel+gyro windows, 6 for accel-only).
inline std::vector<GramianImage> encode_window(const LabeledWindow& w,
                                               const std::vector<std::string>& channels,
                                               std::size_t target_len) {
    std::vector<GramianImage> images;
    images.reserve(2 * w.samples.cols());
    for (std::size_t c = 0; c < w.samples.cols(); ++c) {
        const std::vector<double> series = paa(w.samples.column(c), target_len);
        const PolarSeries p = to_polar(minmax_rescale(series));
        GramianImage a = gasf(p);
        GramianImage d = gadf(p);
        a.channel = c < channels.size() ? channels[c] : "ch" + std::to_string(c);
        d.channel = a.channel;
        images.push_back(std::move(a));
        images.push_back(std::move(d));
    }
    return images;
}

// Affine pixel mapping used by the graymap writers: [-1, 1] -> [0, 255].
inline int gramian_pixel(double v) {
    const int px = static_cast<int>(std::lround((std::clamp(v, -1.0, 1.0) + 1.0) * 127.5));
    return std::clamp(px, 0, 255);
}

// Portable graymap export, P5 (binary) or P2 (ASCII), plus a sidecar text
// file recording the value-to-pixel mapping.
inline void write_pgm(const GramianImage& img, const std::filesystem::path& path,
                      bool binary = true) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open " + path.string());
    out << (binary ? "P5" : "P2") << '\n' << img.n << ' ' << img.n << "\n255\n";
    if (binary) {
        std::vector<unsigned char> row(img.n);
        for (std::size_t i = 0; i < img.n; ++i) {
            for (std::size_t j = 0; j < img.n; ++j)
                row[j] = static_cast<unsigned char>(gramian_pixel(img.at(i, j)));
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size()));
        }
    } else {
        for (std::size_t i = 0; i < img.n; ++i) {
            for (std::size_t j = 0; j < img.n; ++j)
                out << (j ? " " : "") << gramian_pixel(img.at(i, j));
            out << '\n';
        }
    }

    std::ofstream side(path.string() + ".meta.txt");
    side << "kind " << (img.kind == GramianKind::gasf ? "gasf" : "gadf") << '\n'
         << "channel " << img.channel << '\n'
         << "value_range -1 1\n"
         << "pixel = round((value + 1) * 127.5), clamped to [0, 255]\n";
}

// Exact cell values as CSV, one row per image row.
inline void write_gramian_csv(const GramianImage& img, std::ostream& out) {
    for (std::size_t i = 0; i < img.n; ++i) {
        for (std::size_t j = 0; j < img.n; ++j) out << (j ? "," : "") << csv::fmt(img.at(i, j));
        out << '\n';
    }
}

}  // namespace washrec

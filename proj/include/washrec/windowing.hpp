#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/csv.hpp"
#include "washrec/errors.hpp"
#include "washrec/rng.hpp"
#include "washrec/trace.hpp"

namespace washrec {

enum class LabelRule { majority, full_containment };

struct WindowConfig {
    double window_s = 8.0;
    double overlap_frac = 0.75;
    LabelRule label_rule = LabelRule::majority;
    std::uint64_t seed = 0;

    // window_s * fs must be an integer >= 2, stride an integer >= 1.
    std::size_t window_samples(double sample_rate_hz) const {
        const double w = window_s * sample_rate_hz;
        if (std::abs(w - std::round(w)) > 1e-9 || std::round(w) < 2.0)
            throw ConfigError("window of " + csv::fmt(window_s) + " s at " +
                              csv::fmt(sample_rate_hz) + " Hz is not an integer sample count >= 2");
        return static_cast<std::size_t>(std::llround(w));
    }

    std::size_t stride_samples(double sample_rate_hz) const {
        if (overlap_frac < 0.0 || overlap_frac >= 1.0)
            throw ConfigError("overlap_frac must be in [0, 1)");
        const double s = window_s * (1.0 - overlap_frac) * sample_rate_hz;
        if (std::abs(s - std::round(s)) > 1e-9 || std::round(s) < 1.0)
            throw ConfigError("stride of " + csv::fmt(s) +
                              " samples is not an integer >= 1 (window " + csv::fmt(window_s) +
                              " s, overlap " + csv::fmt(overlap_frac) + ")");
        return static_cast<std::size_t>(std::llround(s));
    }
};

struct LabeledWindow {
    std::string source_subject;
    std::size_t start_index = 0;
    Matrix samples;  // window length x channels
    int label = kOtherLabel;
};

// A batch of windows sharing channel layout, sample rate and label table.
struct WindowSet {
    std::vector<std::string> channels;
    double sample_rate_hz = 100.0;
    LabelTable labels;
    std::vector<LabeledWindow> windows;
    WindowConfig config;

    std::vector<std::size_t> label_counts() const {
        std::vector<std::size_t> counts(labels.size(), 0);
        for (const auto& w : windows) counts[static_cast<std::size_t>(w.label)]++;
        return counts;
    }
};

enum class FoldStrategy { stratified_window, subject_holdout };

struct FoldAssignment {
    int k = 5;
    FoldStrategy strategy = FoldStrategy::stratified_window;
    std::vector<int> fold_of;  // window index -> fold id in [0, k)
};

namespace detail {

inline int window_label(std::span<const int> labels, LabelRule rule) {
    if (rule == LabelRule::full_containment) {
        for (int l : labels)
            if (l != labels[0]) return kOtherLabel;
        return labels[0];
    }
    std::map<int, std::size_t> freq;
    for (int l : labels) freq[l]++;
    std::size_t best = 0;
    for (const auto& [l, n] : freq) best = std::max(best, n);
    int winner = kOtherLabel;
    int n_best = 0;
    for (const auto& [l, n] : freq)
        if (n == best) {
            winner = l;
            ++n_best;
        }
    return n_best > 1 ? kOtherLabel : winner;
}

}  // namespace detail

// Slices a labeled trace into fixed-length windows starting at multiples of
// the stride; each window gets one label under the configured rule
// (majority ties resolve to "other").
inline WindowSet segment(const LabeledTrace& lt, const WindowConfig& cfg) {
    const double fs = lt.trace.sample_rate_hz;
    const std::size_t W = cfg.window_samples(fs);
    const std::size_t S = cfg.stride_samples(fs);
    const std::size_t L = lt.trace.samples.rows();
    if (L < W)
        throw TraceTooShort("trace has " + std::to_string(L) + " samples, window needs " +
                            std::to_string(W));

    WindowSet out;
    out.channels = lt.trace.channels;
    out.sample_rate_hz = fs;
    out.labels = lt.labels;
    out.config = cfg;

    const std::size_t count = (L - W) / S + 1;
    out.windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const std::size_t start = w * S;
        LabeledWindow win;
        win.source_subject = lt.trace.subject_id;
        win.start_index = start;
        win.samples = Matrix(W, lt.trace.samples.cols());
        for (std::size_t i = 0; i < W; ++i)
            for (std::size_t c = 0; c < lt.trace.samples.cols(); ++c)
                win.samples(i, c) = lt.trace.samples(start + i, c);
        win.label = detail::window_label(
            std::span<const int>(lt.per_sample_labels.data() + start, W), cfg.label_rule);
        out.windows.push_back(std::move(win));
    }
    return out;
}

// Merges window sets from several traces into one set with a union label
// table (ids remapped by first appearance across sets, "other" stays 0).
inline WindowSet merge_window_sets(std::vector<WindowSet> sets) {
    if (sets.empty()) throw ConfigError("no window sets to merge");
    WindowSet out;
    out.channels = sets.front().channels;
    out.sample_rate_hz = sets.front().sample_rate_hz;
    out.config = sets.front().config;
    for (auto& s : sets) {
        if (s.channels != out.channels || s.sample_rate_hz != out.sample_rate_hz)
            throw ChannelMismatch("window sets have mismatched channel layouts");
        std::vector<int> remap(s.labels.size());
        for (std::size_t id = 0; id < s.labels.size(); ++id)
            remap[id] = out.labels.intern(s.labels.names()[id]);
        for (auto& w : s.windows) {
            w.label = remap[static_cast<std::size_t>(w.label)];
            out.windows.push_back(std::move(w));
        }
    }
    return out;
}

// Rebalances classes by discarding randomly chosen "other" windows down to
// the size of the largest non-other class. Non-other windows are never
// touched; surviving windows keep their original order.
inline WindowSet undersample(const WindowSet& ws, std::uint64_t seed) {
    const auto counts = ws.label_counts();
    std::size_t target = 0;
    bool any_minority = false;
    for (std::size_t id = 1; id < counts.size(); ++id)
        if (counts[id] > 0) {
            any_minority = true;
            target = std::max(target, counts[id]);
        }
    if (!any_minority) throw NoMinorityClass("all windows are labeled 'other'");

    std::vector<std::size_t> other_idx;
    for (std::size_t i = 0; i < ws.windows.size(); ++i)
        if (ws.windows[i].label == kOtherLabel) other_idx.push_back(i);

    std::vector<bool> keep(ws.windows.size(), true);
    if (other_idx.size() > target) {
        Rng rng(seed);
        rng.shuffle(other_idx);
        for (std::size_t i = target; i < other_idx.size(); ++i) keep[other_idx[i]] = false;
    }

    WindowSet out;
    out.channels = ws.channels;
    out.sample_rate_hz = ws.sample_rate_hz;
    out.labels = ws.labels;
    out.config = ws.config;
    for (std::size_t i = 0; i < ws.windows.size(); ++i)
        if (keep[i]) out.windows.push_back(ws.windows[i]);
    return out;
}

// Rewrites the activity task as a subject-identification task: "other"
// windows are dropped and every remaining window is relabeled with its
// source subject id.
inline WindowSet to_subject_task(const WindowSet& ws) {
    WindowSet out;
    out.channels = ws.channels;
    out.sample_rate_hz = ws.sample_rate_hz;
    out.config = ws.config;
    for (const auto& w : ws.windows) {
        if (w.label == kOtherLabel) continue;
        LabeledWindow copy = w;
        copy.label = out.labels.intern(w.source_subject);
        out.windows.push_back(std::move(copy));
    }
    return out;
}

// Stratified: per class, windows are shuffled by seed and dealt round-robin,
// so per-class fold sizes differ by at most one. Subject holdout: subjects
// are shuffled and dealt round-robin; a subject is never split across folds.
inline FoldAssignment make_folds(const WindowSet& ws, int k, FoldStrategy strategy,
                                 std::uint64_t seed) {
    if (k < 2) throw ConfigError("k must be >= 2");
    FoldAssignment fa;
    fa.k = k;
    fa.strategy = strategy;
    fa.fold_of.assign(ws.windows.size(), -1);

    Rng rng(seed);
    if (strategy == FoldStrategy::stratified_window) {
        const auto counts = ws.label_counts();
        for (std::size_t id = 0; id < counts.size(); ++id) {
            if (counts[id] == 0) continue;
            if (counts[id] < static_cast<std::size_t>(k))
                throw ClassTooSmall("class '" + ws.labels.names()[id] + "' has " +
                                    std::to_string(counts[id]) + " windows, fewer than k=" +
                                    std::to_string(k));
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < ws.windows.size(); ++i)
                if (ws.windows[i].label == static_cast<int>(id)) idx.push_back(i);
            rng.shuffle(idx);
            for (std::size_t pos = 0; pos < idx.size(); ++pos)
                fa.fold_of[idx[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
        }
    } else {
        std::vector<std::string> subjects;
        for (const auto& w : ws.windows)
            if (std::find(subjects.begin(), subjects.end(), w.source_subject) == subjects.end())
                subjects.push_back(w.source_subject);
        if (subjects.size() < static_cast<std::size_t>(k))
            throw TooFewSubjects(std::to_string(subjects.size()) + " subjects cannot fill k=" +
                                 std::to_string(k) + " folds");
        rng.shuffle(subjects);
        std::map<std::string, int> fold_of_subject;
        for (std::size_t pos = 0; pos < subjects.size(); ++pos)
            fold_of_subject[subjects[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < ws.windows.size(); ++i)
            fa.fold_of[i] = fold_of_subject[ws.windows[i].source_subject];
    }
    return fa;
}

// --- window set serialization ---
//
// Three files in a directory:
//   windows_meta.json      channels, sample rate, window config, label table
//   windows_manifest.csv   window_id,subject,start_index,label
//   windows_samples.csv    window_id,<channel columns>; rows grouped per
//                          window in manifest order, window length rows each

inline void save_window_set(const WindowSet& ws, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::ofstream meta(dir / "windows_meta.json");
    meta << "{\n  \"sample_rate_hz\": " << csv::fmt(ws.sample_rate_hz)
         << ",\n  \"window_s\": " << csv::fmt(ws.config.window_s)
         << ",\n  \"overlap_frac\": " << csv::fmt(ws.config.overlap_frac)
         << ",\n  \"label_rule\": \""
         << (ws.config.label_rule == LabelRule::majority ? "majority" : "full-containment")
         << "\",\n  \"channels\": [";
    for (std::size_t c = 0; c < ws.channels.size(); ++c)
        meta << (c ? ", " : "") << '"' << ws.channels[c] << '"';
    meta << "],\n  \"labels\": [";
    for (std::size_t i = 0; i < ws.labels.size(); ++i)
        meta << (i ? ", " : "") << '"' << ws.labels.names()[i] << '"';
    meta << "]\n}\n";

    std::ofstream manifest(dir / "windows_manifest.csv");
    manifest << "window_id,subject,start_index,label\n";
    for (std::size_t i = 0; i < ws.windows.size(); ++i) {
        const auto& w = ws.windows[i];
        manifest << i << ',' << w.source_subject << ',' << w.start_index << ','
                 << ws.labels.names()[static_cast<std::size_t>(w.label)] << '\n';
    }

    std::ofstream samples(dir / "windows_samples.csv");
    samples << "window_id";
    for (const auto& ch : ws.channels) samples << ',' << ch;
    samples << '\n';
    for (std::size_t i = 0; i < ws.windows.size(); ++i) {
        const auto& m = ws.windows[i].samples;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            samples << i;
            for (std::size_t c = 0; c < m.cols(); ++c) samples << ',' << csv::fmt(m(r, c));
            samples << '\n';
        }
    }
}

inline WindowSet load_window_set(const std::filesystem::path& dir) {
    WindowSet ws;
    {
        std::ifstream meta(dir / "windows_meta.json");
        if (!meta) throw Error("cannot open " + (dir / "windows_meta.json").string());
        std::string text((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
        // Minimal extraction; the file is always written by save_window_set.
        const auto grab_number = [&](const std::string& key) {
            const auto pos = text.find('"' + key + '"');
            if (pos == std::string::npos) throw Error("windows_meta.json missing " + key);
            const auto colon = text.find(':', pos);
            return std::stod(text.substr(colon + 1));
        };
        const auto grab_list = [&](const std::string& key) {
            std::vector<std::string> items;
            const auto pos = text.find('"' + key + '"');
            if (pos == std::string::npos) throw Error("windows_meta.json missing " + key);
            auto cur = text.find('[', pos) + 1;
            const auto end = text.find(']', cur);
            while (true) {
                const auto q0 = text.find('"', cur);
                if (q0 == std::string::npos || q0 > end) break;
                const auto q1 = text.find('"', q0 + 1);
                items.push_back(text.substr(q0 + 1, q1 - q0 - 1));
                cur = q1 + 1;
            }
            return items;
        };
        ws.sample_rate_hz = grab_number("sample_rate_hz");
        ws.config.window_s = grab_number("window_s");
        ws.config.overlap_frac = grab_number("overlap_frac");
        ws.config.label_rule = text.find("full-containment") != std::string::npos
                                   ? LabelRule::full_containment
                                   : LabelRule::majority;
        ws.channels = grab_list("channels");
        for (const auto& name : grab_list("labels")) ws.labels.intern(name);
    }

    const std::size_t W = ws.config.window_samples(ws.sample_rate_hz);

    {
        std::ifstream manifest(dir / "windows_manifest.csv");
        if (!manifest) throw Error("cannot open " + (dir / "windows_manifest.csv").string());
        std::string line;
        csv::getline_any(manifest, line);  // header
        std::size_t line_no = 1;
        while (csv::getline_any(manifest, line)) {
            ++line_no;
            const auto f = csv::split(line);
            if (f.size() != 4) throw MalformedRow(line_no, "expected 4 fields");
            LabeledWindow w;
            w.source_subject = f[1];
            w.start_index = static_cast<std::size_t>(csv::parse_int(f[2], line_no));
            const int id = ws.labels.id_of(f[3]);
            if (id < 0) throw UnknownLabel("manifest label '" + f[3] + "' not in meta");
            w.label = id;
            w.samples = Matrix(W, ws.channels.size());
            ws.windows.push_back(std::move(w));
        }
    }

    {
        std::ifstream samples(dir / "windows_samples.csv");
        if (!samples) throw Error("cannot open " + (dir / "windows_samples.csv").string());
        std::string line;
        csv::getline_any(samples, line);  // header
        std::size_t line_no = 1;
        std::vector<std::size_t> row_of(ws.windows.size(), 0);
        while (csv::getline_any(samples, line)) {
            ++line_no;
            const auto f = csv::split(line);
            if (f.size() != ws.channels.size() + 1)
                throw MalformedRow(line_no, "wrong field count");
            const auto id = static_cast<std::size_t>(csv::parse_int(f[0], line_no));
            if (id >= ws.windows.size()) throw MalformedRow(line_no, "window id out of range");
            if (row_of[id] >= W) throw MalformedRow(line_no, "too many rows for window");
            for (std::size_t c = 0; c < ws.channels.size(); ++c)
                ws.windows[id].samples(row_of[id], c) = csv::parse_double(f[1 + c], line_no);
            ++row_of[id];
        }
        for (std::size_t i = 0; i < row_of.size(); ++i)
            if (row_of[i] != W)
                throw Error("window " + std::to_string(i) + " has incomplete samples");
    }
    return ws;
}

}  // namespace washrec

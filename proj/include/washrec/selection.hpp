#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "washrec/cross_validation.hpp"
#include "washrec/errors.hpp"

namespace washrec {

// Greedy forward selection over the three atomic feature groups, scored by
// mean cross-validated accuracy.
struct SelectionConfig {
    // Which groups are candidates at all (default: all three).
    FeatureGroupSelection available = {true, true, true};
    // Objective: the class-averaged accuracy, or the plain overall fraction.
    enum class Objective { accuracy, overall_accuracy } objective = Objective::accuracy;
    // Also evaluate the combinations the greedy path skipped, so the report
    // covers every subset.
    bool exhaustive = false;
};

struct SelectionEntry {
    FeatureGroupSelection groups;
    MetricSummary mean;
    MetricSummary stddev;
    bool on_path = false;  // evaluated while extending the greedy path
};

struct SelectionReport {
    std::vector<SelectionEntry> entries;       // in evaluation order
    FeatureGroupSelection selected;
    std::vector<std::string> path;             // group tags accepted, in order
    SelectionConfig::Objective objective = SelectionConfig::Objective::accuracy;
};

inline SelectionReport forward_group_selection(const WindowSet& ws, const ModelSpec& spec,
                                               const CvConfig& cv_cfg,
                                               const SelectionConfig& sel_cfg = {},
                                               bool hjorth_scaled_derivative = true) {
    if (!sel_cfg.available.any()) throw ConfigError("no feature groups available for selection");

    SelectionReport report;
    report.objective = sel_cfg.objective;

    std::map<std::string, std::size_t> seen;  // tag -> entry index
    const auto score_of = [&](const MetricSummary& m) {
        return sel_cfg.objective == SelectionConfig::Objective::accuracy ? m.accuracy
                                                                         : m.overall_accuracy;
    };
    const auto evaluate = [&](const FeatureGroupSelection& groups, bool on_path) -> std::size_t {
        const auto it = seen.find(groups.tag());
        if (it != seen.end()) {
            if (on_path) report.entries[it->second].on_path = true;
            return it->second;
        }
        const CvReport cv = cross_validate(ws, groups, spec, cv_cfg, hjorth_scaled_derivative);
        report.entries.push_back({groups, cv.mean, cv.stddev, on_path});
        seen[groups.tag()] = report.entries.size() - 1;
        return report.entries.size() - 1;
    };

    FeatureGroupSelection current{false, false, false};
    double current_score = -1.0;
    while (true) {
        std::optional<std::size_t> best_entry;
        std::optional<FeatureGroupSelection> best_groups;
        for (bool FeatureGroupSelection::* g :
             {&FeatureGroupSelection::base, &FeatureGroupSelection::hjorth,
              &FeatureGroupSelection::shape}) {
            if (!(sel_cfg.available.*g) || current.*g) continue;
            FeatureGroupSelection candidate = current;
            candidate.*g = true;
            const std::size_t idx = evaluate(candidate, true);
            if (!best_entry || score_of(report.entries[idx].mean) >
                                   score_of(report.entries[*best_entry].mean)) {
                best_entry = idx;
                best_groups = candidate;
            }
        }
        if (!best_entry) break;  // nothing left to add
        const double best_score = score_of(report.entries[*best_entry].mean);
        if (best_score <= current_score) break;  // no improvement, stop
        current = *best_groups;
        current_score = best_score;
        report.path.push_back(current.tag());
    }
    report.selected = current;

    if (sel_cfg.exhaustive) {
        for (int mask = 1; mask < 8; ++mask) {
            FeatureGroupSelection g{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
            if ((g.base && !sel_cfg.available.base) || (g.hjorth && !sel_cfg.available.hjorth) ||
                (g.shape && !sel_cfg.available.shape))
                continue;
            evaluate(g, false);
        }
    }
    return report;
}

}  // namespace washrec

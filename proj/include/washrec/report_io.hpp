#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "washrec/cross_validation.hpp"
#include "washrec/csv.hpp"
#include "washrec/errors.hpp"
#include "washrec/mcnemar.hpp"
#include "washrec/perf.hpp"
#include "washrec/selection.hpp"

namespace washrec {

namespace detail {

inline nlohmann::json summary_json(const MetricSummary& mean, const MetricSummary& sd) {
    return {
        {"precision", {{"mean", mean.precision}, {"std", sd.precision}}},
        {"recall", {{"mean", mean.recall}, {"std", sd.recall}}},
        {"f1", {{"mean", mean.f1}, {"std", sd.f1}}},
        {"accuracy", {{"mean", mean.accuracy}, {"std", sd.accuracy}}},
        {"overall_accuracy", {{"mean", mean.overall_accuracy}, {"std", sd.overall_accuracy}}},
    };
}

}  // namespace detail

inline nlohmann::json cv_report_to_json(const CvReport& r) {
    nlohmann::json j;
    j["model"] = r.model_name;
    j["features"] = r.feature_tag;
    j["k"] = r.k;
    j["fold_seed"] = r.fold_seed;
    j["strategy"] =
        r.strategy == FoldStrategy::stratified_window ? "stratified-window" : "subject-holdout";
    j["classes"] = r.classes;
    j["summary"] = detail::summary_json(r.mean, r.stddev);
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
        nlohmann::json fj;
        const auto m = detail::summary_of(f.metrics);
        fj["precision"] = m.precision;
        fj["recall"] = m.recall;
        fj["f1"] = m.f1;
        fj["accuracy"] = m.accuracy;
        fj["overall_accuracy"] = m.overall_accuracy;
        fj["confusion_counts"] = f.cm.counts;
        folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);
    j["confusion_counts_total"] = r.total_counts;
    j["confusion_row_normalized_mean"] = r.avg_confusion_rownorm;
    return j;
}

inline void write_fold_metrics_csv(const CvReport& r, std::ostream& out) {
    out << "fold,precision,recall,f1,accuracy,overall_accuracy\n";
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
        const auto m = detail::summary_of(r.folds[f].metrics);
        out << f << ',' << csv::fmt(m.precision) << ',' << csv::fmt(m.recall) << ','
            << csv::fmt(m.f1) << ',' << csv::fmt(m.accuracy) << ','
            << csv::fmt(m.overall_accuracy) << '\n';
    }
    out << "mean," << csv::fmt(r.mean.precision) << ',' << csv::fmt(r.mean.recall) << ','
        << csv::fmt(r.mean.f1) << ',' << csv::fmt(r.mean.accuracy) << ','
        << csv::fmt(r.mean.overall_accuracy) << '\n';
    out << "std," << csv::fmt(r.stddev.precision) << ',' << csv::fmt(r.stddev.recall) << ','
        << csv::fmt(r.stddev.f1) << ',' << csv::fmt(r.stddev.accuracy) << ','
        << csv::fmt(r.stddev.overall_accuracy) << '\n';
}

inline void write_confusion_counts_csv(const CvReport& r, std::ostream& out) {
    out << "truth\\pred";
    for (const auto& c : r.classes) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        out << r.classes[i];
        for (std::size_t jx = 0; jx < r.classes.size(); ++jx) out << ',' << r.total_counts[i][jx];
        out << '\n';
    }
}

inline void write_confusion_rownorm_csv(const CvReport& r, std::ostream& out) {
    out << "truth\\pred";
    for (const auto& c : r.classes) out << ',' << c;
    out << '\n';
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        out << r.classes[i];
        for (std::size_t jx = 0; jx < r.classes.size(); ++jx)
            out << ',' << csv::fmt_fixed(r.avg_confusion_rownorm[i][jx], 6);
        out << '\n';
    }
}

// Held-out predictions with enough metadata to check post-hoc alignment.
inline void write_predictions_csv(const CvReport& r, const LabelTable& labels,
                                  std::ostream& out) {
    out << "# washrec-predictions v1\n"
        << "# fold_seed " << r.fold_seed << '\n'
        << "# k " << r.k << '\n'
        << "# n_windows " << r.predictions.size() << '\n';
    out << "window_id,fold,truth,pred\n";
    for (const auto& p : r.predictions)
        out << p.window_id << ',' << p.fold << ','
            << labels.names()[static_cast<std::size_t>(p.truth)] << ','
            << labels.names()[static_cast<std::size_t>(p.pred)] << '\n';
}

struct PredictionsFile {
    std::uint64_t fold_seed = 0;
    int k = 0;
    std::size_t n_windows = 0;
    std::vector<std::size_t> window_ids;
    std::vector<int> folds;
    std::vector<std::string> truth;
    std::vector<std::string> pred;
};

inline PredictionsFile load_predictions(std::istream& in) {
    PredictionsFile f;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (csv::getline_any(in, line)) {
        ++line_no;
        if (line.rfind("# ", 0) == 0) {
            std::istringstream meta(line.substr(2));
            std::string key;
            meta >> key;
            if (key == "fold_seed") meta >> f.fold_seed;
            else if (key == "k") meta >> f.k;
            else if (key == "n_windows") meta >> f.n_windows;
            continue;
        }
        if (!header_seen) {
            if (line != "window_id,fold,truth,pred")
                throw MalformedRow(line_no, "bad predictions header");
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(line);
        if (fields.size() != 4) throw MalformedRow(line_no, "expected 4 fields");
        f.window_ids.push_back(static_cast<std::size_t>(csv::parse_int(fields[0], line_no)));
        f.folds.push_back(static_cast<int>(csv::parse_int(fields[1], line_no)));
        f.truth.push_back(fields[2]);
        f.pred.push_back(fields[3]);
    }
    if (!header_seen) throw MalformedRow(1, "missing predictions header");
    return f;
}

inline PredictionsFile load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return load_predictions(in);
}

// Discordant-pair counts from two aligned prediction files. Alignment means
// the same fold seed, fold count, window ids (in order) and truth labels.
inline std::pair<long long, long long> discordant_counts(const PredictionsFile& a,
                                                         const PredictionsFile& b) {
    if (a.fold_seed != b.fold_seed || a.k != b.k)
        throw MisalignedPredictions("prediction files use different fold seeds or k");
    if (a.window_ids != b.window_ids || a.folds != b.folds || a.truth != b.truth)
        throw MisalignedPredictions("prediction files cover different windows");
    long long bb = 0, cc = 0;
    for (std::size_t i = 0; i < a.window_ids.size(); ++i) {
        const bool a_ok = a.pred[i] == a.truth[i];
        const bool b_ok = b.pred[i] == b.truth[i];
        if (a_ok && !b_ok) ++bb;
        if (!a_ok && b_ok) ++cc;
    }
    return {bb, cc};
}

inline void write_mcnemar_table(const std::vector<McNemarResult>& results, std::ostream& out) {
    out << "variant,b,c,statistic,p,h\n";
    for (const auto& r : results) {
        out << to_string(r.variant) << ',' << r.b << ',' << r.c << ','
            << (std::isnan(r.statistic) ? std::string("") : csv::fmt(r.statistic)) << ','
            << csv::fmt(r.p) << ',' << (r.h ? "true" : "false") << '\n';
    }
}

inline void render_mcnemar_text(const std::vector<McNemarResult>& results, std::ostream& out) {
    out << "McNemar comparison (alpha = 0.05)\n";
    for (const auto& r : results) {
        out << "  " << to_string(r.variant) << ": h = " << (r.h ? "true" : "false")
            << "  p = " << csv::fmt(r.p) << "  (b = " << r.b << ", c = " << r.c << ")\n";
    }
}

inline void write_selection_csv(const SelectionReport& r, std::ostream& out) {
    out << "groups,accuracy_mean,accuracy_std,precision_mean,precision_std,"
           "recall_mean,recall_std,f1_mean,f1_std,overall_accuracy_mean,"
           "overall_accuracy_std,on_path,selected\n";
    for (const auto& e : r.entries) {
        out << e.groups.tag() << ',' << csv::fmt(e.mean.accuracy) << ','
            << csv::fmt(e.stddev.accuracy) << ',' << csv::fmt(e.mean.precision) << ','
            << csv::fmt(e.stddev.precision) << ',' << csv::fmt(e.mean.recall) << ','
            << csv::fmt(e.stddev.recall) << ',' << csv::fmt(e.mean.f1) << ','
            << csv::fmt(e.stddev.f1) << ',' << csv::fmt(e.mean.overall_accuracy) << ','
            << csv::fmt(e.stddev.overall_accuracy) << ',' << (e.on_path ? "yes" : "no") << ','
            << (e.groups == r.selected ? "yes" : "no") << '\n';
    }
}

inline void render_selection_text(const SelectionReport& r, std::ostream& out) {
    out << "Forward group selection (objective: "
        << (r.objective == SelectionConfig::Objective::accuracy ? "accuracy"
                                                                : "overall accuracy")
        << ")\n";
    out << "  groups      accuracy            precision           recall              f1\n";
    for (const auto& e : r.entries) {
        const auto cell = [](double mean, double sd) {
            return csv::fmt_fixed(mean, 3) + " +/- " + csv::fmt_fixed(sd, 3);
        };
        out << "  " << e.groups.tag() << std::string(12 - std::min<std::size_t>(10, e.groups.tag().size()) - 2, ' ')
            << cell(e.mean.accuracy, e.stddev.accuracy) << "   "
            << cell(e.mean.precision, e.stddev.precision) << "   "
            << cell(e.mean.recall, e.stddev.recall) << "   " << cell(e.mean.f1, e.stddev.f1)
            << (e.groups == r.selected ? "   <- selected" : "") << '\n';
    }
    out << "  path:";
    for (const auto& p : r.path) out << ' ' << p;
    out << '\n';
}

inline void write_perf_csv(const std::vector<std::pair<std::string, PerfReport>>& rows,
                           std::ostream& out) {
    out << "model,training_time_s,inference_time_per_sample_ms,model_memory_bytes,n_predictions\n";
    for (const auto& [name, p] : rows)
        out << name << ',' << csv::fmt(p.training_time_s) << ','
            << csv::fmt(p.inference_time_per_sample_ms) << ',' << p.model_memory_bytes << ','
            << p.n_predictions << '\n';
}

inline void render_cv_text(const CvReport& r, std::ostream& out) {
    out << "Model " << r.model_name << ", features " << r.feature_tag << ", " << r.k
        << "-fold cross-validation (seed " << r.fold_seed << ")\n";
    const auto line = [&](const char* name, double mean, double sd) {
        out << "  " << name << ": " << csv::fmt_fixed(mean, 4) << " +/- " << csv::fmt_fixed(sd, 4)
            << '\n';
    };
    line("accuracy          ", r.mean.accuracy, r.stddev.accuracy);
    line("overall accuracy  ", r.mean.overall_accuracy, r.stddev.overall_accuracy);
    line("precision         ", r.mean.precision, r.stddev.precision);
    line("recall            ", r.mean.recall, r.stddev.recall);
    line("f1                ", r.mean.f1, r.stddev.f1);
    out << "  averaged row-normalized confusion matrix (truth rows):\n";
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        out << "    " << r.classes[i] << ':';
        for (std::size_t jx = 0; jx < r.classes.size(); ++jx)
            out << ' ' << csv::fmt_fixed(r.avg_confusion_rownorm[i][jx], 3);
        out << '\n';
    }
}

// Writes the full per-configuration report bundle into a directory.
inline void write_cv_report_files(const CvReport& r, const LabelTable& labels,
                                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        out << cv_report_to_json(r).dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "report.txt");
        render_cv_text(r, out);
    }
    {
        std::ofstream out(dir / "per_fold_metrics.csv");
        write_fold_metrics_csv(r, out);
    }
    {
        std::ofstream out(dir / "confusion_counts.csv");
        write_confusion_counts_csv(r, out);
    }
    {
        std::ofstream out(dir / "confusion_rownorm.csv");
        write_confusion_rownorm_csv(r, out);
    }
    {
        std::ofstream out(dir / "predictions.csv");
        write_predictions_csv(r, labels, out);
    }
}

}  // namespace washrec

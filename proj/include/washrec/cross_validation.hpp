#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/ersknn.hpp"
#include "washrec/errors.hpp"
#include "washrec/features.hpp"
#include "washrec/metrics.hpp"
#include "washrec/svm.hpp"
#include "washrec/windowing.hpp"

namespace washrec {

// Which classifier to run and with what parameters. Feature standardization
// defaults on for the SVM and off for ERS-KNN; both are overridable.
struct ModelSpec {
    enum class Type { svm, ersknn };
    Type type = Type::svm;
    SvmParams svm;
    ErsKnnParams ersknn;
    std::optional<bool> standardize;

    bool standardize_effective() const { return standardize.value_or(type == Type::svm); }
    std::string name() const { return type == Type::svm ? "svm" : "ersknn"; }
};

// Value wrapper over the two model types with a uniform surface.
class TrainedModel {
public:
    static TrainedModel train(const Matrix& X, const std::vector<int>& y,
                              const std::vector<std::string>& label_names, const ModelSpec& spec) {
        std::optional<Standardizer> standardizer;
        if (spec.standardize_effective()) standardizer = Standardizer::fit(X);
        if (spec.type == ModelSpec::Type::svm)
            return TrainedModel(train_svm(X, y, spec.svm, label_names, std::move(standardizer)));
        return TrainedModel(train_ersknn(X, y, spec.ersknn, label_names, std::move(standardizer)));
    }

    int predict(std::span<const double> fv) const {
        return std::visit([&](const auto& m) { return m.predict(fv); }, model_);
    }

    void save(std::ostream& out) const {
        if (const auto* svm = std::get_if<SvmModel>(&model_)) save_svm(*svm, out);
        else save_ersknn(std::get<EnsembleModel>(model_), out);
    }

    static TrainedModel load(std::istream& in) {
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        std::istringstream replay(text);
        if (text.find("type svm\n") != std::string::npos) return TrainedModel(load_svm(replay));
        if (text.find("type ersknn\n") != std::string::npos)
            return TrainedModel(load_ersknn(replay));
        throw MalformedRow(2, "unknown model type");
    }

    std::uint64_t serialized_size() const {
        std::ostringstream out;
        save(out);
        return out.str().size();
    }

    const std::optional<Standardizer>& standardizer() const {
        if (const auto* svm = std::get_if<SvmModel>(&model_)) return svm->standardizer;
        return std::get<EnsembleModel>(model_).standardizer;
    }

    bool is_svm() const { return std::holds_alternative<SvmModel>(model_); }
    const SvmModel& as_svm() const { return std::get<SvmModel>(model_); }
    const EnsembleModel& as_ersknn() const { return std::get<EnsembleModel>(model_); }

private:
    explicit TrainedModel(SvmModel m) : model_(std::move(m)) {}
    explicit TrainedModel(EnsembleModel m) : model_(std::move(m)) {}
    std::variant<SvmModel, EnsembleModel> model_;
};

struct CvConfig {
    int k = 5;
    FoldStrategy strategy = FoldStrategy::stratified_window;
    std::uint64_t fold_seed = 7;
    // When set, "other" is undersampled inside each training fold instead of
    // (or in addition to) globally before fold assignment.
    bool per_fold_undersample = false;
    std::uint64_t undersample_seed = 1;
};

struct MetricSummary {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    double overall_accuracy = 0.0;
};

struct FoldResult {
    ConfusionMatrix cm;
    MacroMetrics metrics;
    std::optional<Standardizer> standardizer;  // as fitted on this fold's training data
};

struct PredictionRecord {
    std::size_t window_id;
    int fold;
    int truth;  // label ids of the evaluated window set
    int pred;
};

struct CvReport {
    int k = 5;
    FoldStrategy strategy = FoldStrategy::stratified_window;
    std::uint64_t fold_seed = 0;
    std::string model_name;
    std::string feature_tag;
    std::vector<int> class_ids;
    std::vector<std::string> classes;
    std::vector<FoldResult> folds;
    MetricSummary mean;
    MetricSummary stddev;
    std::vector<std::vector<long long>> total_counts;
    std::vector<std::vector<double>> avg_confusion_rownorm;
    std::vector<PredictionRecord> predictions;
    std::vector<int> fold_of;
};

namespace detail {

inline MetricSummary summary_of(const MacroMetrics& m) {
    return {m.precision, m.recall, m.f1, m.accuracy, m.overall_accuracy};
}

inline void aggregate_metrics(CvReport& report) {
    const auto values = [&](double MetricSummary::* field) {
        std::vector<double> v;
        for (const auto& f : report.folds) v.push_back(summary_of(f.metrics).*field);
        return v;
    };
    const auto mean_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };
    for (auto field : {&MetricSummary::precision, &MetricSummary::recall, &MetricSummary::f1,
                       &MetricSummary::accuracy, &MetricSummary::overall_accuracy}) {
        const auto [m, s] = mean_std(values(field));
        report.mean.*field = m;
        report.stddev.*field = s;
    }
}

// Undersamples "other" among the given training indices only; survivors keep
// their original order. Mirrors the global undersample rule.
inline std::vector<std::size_t> undersample_indices(const WindowSet& ws,
                                                    const std::vector<std::size_t>& train_idx,
                                                    std::uint64_t seed) {
    std::vector<std::size_t> counts(ws.labels.size(), 0);
    for (std::size_t i : train_idx) counts[static_cast<std::size_t>(ws.windows[i].label)]++;
    std::size_t target = 0;
    bool any_minority = false;
    for (std::size_t id = 1; id < counts.size(); ++id)
        if (counts[id] > 0) {
            any_minority = true;
            target = std::max(target, counts[id]);
        }
    if (!any_minority) throw NoMinorityClass("training fold holds only 'other' windows");

    std::vector<std::size_t> other_pos;
    for (std::size_t p = 0; p < train_idx.size(); ++p)
        if (ws.windows[train_idx[p]].label == kOtherLabel) other_pos.push_back(p);
    if (other_pos.size() <= target) return train_idx;

    Rng rng(seed);
    rng.shuffle(other_pos);
    std::vector<bool> drop(train_idx.size(), false);
    for (std::size_t i = target; i < other_pos.size(); ++i) drop[other_pos[i]] = true;
    std::vector<std::size_t> kept;
    kept.reserve(train_idx.size());
    for (std::size_t p = 0; p < train_idx.size(); ++p)
        if (!drop[p]) kept.push_back(train_idx[p]);
    return kept;
}

}  // namespace detail

// K-fold cross-validation: per fold, the standardizer and model are fitted
// on the other k-1 folds only, and every window is predicted exactly once.
inline CvReport cross_validate(const WindowSet& ws, const FeatureGroupSelection& groups,
                               const ModelSpec& spec, const CvConfig& cfg,
                               bool hjorth_scaled_derivative = true) {
    const FeatureSet fs = featurize_set(ws, groups, hjorth_scaled_derivative);
    const FoldAssignment fa = make_folds(ws, cfg.k, cfg.strategy, cfg.fold_seed);

    CvReport report;
    report.k = cfg.k;
    report.strategy = cfg.strategy;
    report.fold_seed = cfg.fold_seed;
    report.model_name = spec.name();
    report.feature_tag = groups.tag();
    report.fold_of = fa.fold_of;

    const auto counts = ws.label_counts();
    for (std::size_t id = 0; id < counts.size(); ++id)
        if (counts[id] > 0) {
            report.class_ids.push_back(static_cast<int>(id));
            report.classes.push_back(ws.labels.names()[id]);
        }
    const auto dense_index = [&](int label) {
        const auto it = std::find(report.class_ids.begin(), report.class_ids.end(), label);
        if (it == report.class_ids.end()) throw UnknownLabel("label not present in window set");
        return static_cast<int>(it - report.class_ids.begin());
    };

    const std::size_t n_classes = report.class_ids.size();
    report.total_counts.assign(n_classes, std::vector<long long>(n_classes, 0));
    report.avg_confusion_rownorm.assign(n_classes, std::vector<double>(n_classes, 0.0));

    for (int f = 0; f < cfg.k; ++f) {
        std::vector<std::size_t> train_idx, test_idx;
        for (std::size_t i = 0; i < ws.windows.size(); ++i)
            (fa.fold_of[i] == f ? test_idx : train_idx).push_back(i);
        if (cfg.per_fold_undersample)
            train_idx = detail::undersample_indices(ws, train_idx, Rng::child_seed(cfg.undersample_seed, static_cast<std::uint64_t>(f)));

        // no-leak guard: the held-out fold never reaches the training side
        for (std::size_t i : train_idx)
            if (fa.fold_of[i] == f) throw Error("internal: fold leak");

        Matrix X_train(train_idx.size(), fs.X.cols());
        std::vector<int> y_train;
        y_train.reserve(train_idx.size());
        for (std::size_t r = 0; r < train_idx.size(); ++r) {
            const auto row = fs.X.row(train_idx[r]);
            std::copy(row.begin(), row.end(), X_train.row(r).begin());
            y_train.push_back(fs.y[train_idx[r]]);
        }

        const TrainedModel model = TrainedModel::train(X_train, y_train, ws.labels.names(), spec);

        std::vector<int> pred_dense, truth_dense;
        pred_dense.reserve(test_idx.size());
        truth_dense.reserve(test_idx.size());
        for (std::size_t i : test_idx) {
            const int p = model.predict(fs.X.row(i));
            pred_dense.push_back(dense_index(p));
            truth_dense.push_back(dense_index(fs.y[i]));
            report.predictions.push_back({i, f, fs.y[i], p});
        }

        FoldResult fold;
        fold.cm = confusion(pred_dense, truth_dense, report.classes);
        fold.metrics = macro_metrics(fold.cm);
        fold.standardizer = model.standardizer();
        for (std::size_t i = 0; i < n_classes; ++i)
            for (std::size_t j = 0; j < n_classes; ++j)
                report.total_counts[i][j] += fold.cm.counts[i][j];
        const auto rn = fold.cm.row_normalized();
        for (std::size_t i = 0; i < n_classes; ++i)
            for (std::size_t j = 0; j < n_classes; ++j)
                report.avg_confusion_rownorm[i][j] += rn[i][j] / static_cast<double>(cfg.k);
        report.folds.push_back(std::move(fold));
    }

    detail::aggregate_metrics(report);
    std::sort(report.predictions.begin(), report.predictions.end(),
              [](const PredictionRecord& a, const PredictionRecord& b) {
                  return a.window_id < b.window_id;
              });
    return report;
}

}  // namespace washrec

#pragma once

#include <span>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/errors.hpp"

namespace washrec {

// Multi-class confusion counts; rows index the true class, columns the
// predicted class.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long long>> counts;

    std::size_t size() const { return classes.size(); }

    long long total() const {
        long long t = 0;
        for (const auto& row : counts)
            for (long long v : row) t += v;
        return t;
    }
    long long tp(std::size_t i) const { return counts[i][i]; }
    long long fn(std::size_t i) const {
        long long s = 0;
        for (std::size_t j = 0; j < size(); ++j)
            if (j != i) s += counts[i][j];
        return s;
    }
    long long fp(std::size_t i) const {
        long long s = 0;
        for (std::size_t j = 0; j < size(); ++j)
            if (j != i) s += counts[j][i];
        return s;
    }
    long long tn(std::size_t i) const { return total() - tp(i) - fp(i) - fn(i); }

    // Each row divided by its sum; all-zero rows stay zero.
    std::vector<std::vector<double>> row_normalized() const {
        std::vector<std::vector<double>> out(size(), std::vector<double>(size(), 0.0));
        for (std::size_t i = 0; i < size(); ++i) {
            long long row_sum = 0;
            for (long long v : counts[i]) row_sum += v;
            if (row_sum == 0) continue;
            for (std::size_t j = 0; j < size(); ++j)
                out[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(row_sum);
        }
        return out;
    }
};

inline ConfusionMatrix confusion(std::span<const int> pred, std::span<const int> truth,
                                 const std::vector<std::string>& classes) {
    if (pred.size() != truth.size())
        throw LengthMismatch("prediction and truth lengths differ");
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(classes.size(), std::vector<long long>(classes.size(), 0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const int t = truth[i];
        const int p = pred[i];
        if (t < 0 || static_cast<std::size_t>(t) >= classes.size() || p < 0 ||
            static_cast<std::size_t>(p) >= classes.size())
            throw UnknownLabel("label outside the class list at index " + std::to_string(i));
        cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]++;
    }
    return cm;
}

// Macro-averaged metrics. Precision and recall are means of per-class
// ratios; a class with an undefined ratio contributes 0 and is flagged.
// F1 is the harmonic mean of the macro aggregates. `accuracy` averages the
// per-class binary accuracies (TP+TN)/total over classes, which differs
// from the plain fraction of correct predictions for more than two classes,
// so `overall_accuracy` carries the plain value alongside.
struct MacroMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;          // per-class-averaged binary accuracy
    double overall_accuracy = 0.0;  // plain correct / total
    std::vector<double> per_class_precision;
    std::vector<double> per_class_recall;
    std::vector<bool> precision_undefined;
    std::vector<bool> recall_undefined;
};

inline MacroMetrics macro_metrics(const ConfusionMatrix& cm) {
    const long long total = cm.total();
    if (cm.size() == 0 || total == 0) throw EmptyMatrix("confusion matrix has no counts");

    MacroMetrics m;
    const auto n = cm.size();
    m.per_class_precision.resize(n);
    m.per_class_recall.resize(n);
    m.precision_undefined.resize(n);
    m.recall_undefined.resize(n);

    double acc_sum = 0.0;
    long long correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long long tp = cm.tp(i), fp = cm.fp(i), fn = cm.fn(i), tn = cm.tn(i);
        m.precision_undefined[i] = tp + fp == 0;
        m.recall_undefined[i] = tp + fn == 0;
        m.per_class_precision[i] =
            m.precision_undefined[i] ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        m.per_class_recall[i] =
            m.recall_undefined[i] ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        m.precision += m.per_class_precision[i];
        m.recall += m.per_class_recall[i];
        acc_sum += static_cast<double>(tp + tn) / static_cast<double>(total);
        correct += tp;
    }
    m.precision /= static_cast<double>(n);
    m.recall /= static_cast<double>(n);
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.accuracy = acc_sum / static_cast<double>(n);
    m.overall_accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return m;
}

}  // namespace washrec

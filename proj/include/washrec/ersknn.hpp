#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/csv.hpp"
#include "washrec/detail/model_io.hpp"
#include "washrec/errors.hpp"
#include "washrec/features.hpp"
#include "washrec/rng.hpp"

namespace washrec {

// Ensemble of KNN learners, each restricted to a random feature subspace
// and combined by majority vote.
struct ErsKnnParams {
    int n_learners = 30;
    std::optional<std::size_t> subspace_dim;  // defaults to ceil(d/2) at training
    int k_neighbors = 1;
    std::uint64_t seed = 0;
};

struct KnnLearner {
    std::vector<std::size_t> feature_idx;  // sorted, distinct, subspace_dim entries
    Matrix data;                           // training rows restricted to feature_idx
};

struct EnsembleModel {
    std::size_t dims = 0;
    std::size_t subspace_dim = 0;
    int k_neighbors = 1;
    std::uint64_t seed = 0;
    std::vector<int> train_labels;
    std::vector<int> class_ids;
    std::vector<std::string> class_names;
    std::optional<Standardizer> standardizer;
    std::vector<KnnLearner> learners;

    // One learner's vote: Euclidean k-NN in its subspace. Neighbor ties at
    // equal distance go to the lower training index, k-vote ties to the
    // lowest label id.
    int learner_predict(const KnnLearner& l, std::span<const double> x) const {
        const std::size_t n = l.data.rows();
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0.0;
            const auto row = l.data.row(i);
            for (std::size_t f = 0; f < l.feature_idx.size(); ++f) {
                const double d = x[l.feature_idx[f]] - row[f];
                d2 += d * d;
            }
            dist.emplace_back(d2, i);
        }
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_neighbors), n);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<int> votes;
        for (std::size_t i = 0; i < k; ++i) votes.push_back(train_labels[dist[i].second]);
        return majority(votes);
    }

    int predict(std::span<const double> fv) const {
        if (fv.size() != dims)
            throw DimensionMismatch("feature vector has " + std::to_string(fv.size()) +
                                    " dims, model expects " + std::to_string(dims));
        std::vector<double> x(fv.begin(), fv.end());
        if (standardizer) x = standardizer->apply(x);
        std::vector<int> votes;
        votes.reserve(learners.size());
        for (const auto& l : learners) votes.push_back(learner_predict(l, x));
        return majority(votes);
    }

private:
    static int majority(const std::vector<int>& votes) {
        int best = votes[0];
        std::size_t best_count = 0;
        std::vector<int> sorted = votes;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            if (j - i > best_count) {  // ties keep the lowest label id
                best_count = j - i;
                best = sorted[i];
            }
            i = j;
        }
        return best;
    }
};

inline EnsembleModel train_ersknn(const Matrix& X, const std::vector<int>& y,
                                  const ErsKnnParams& params,
                                  const std::vector<std::string>& label_names = {},
                                  std::optional<Standardizer> standardizer = std::nullopt) {
    if (X.rows() != y.size()) throw LengthMismatch("feature rows and labels differ");
    if (X.rows() == 0) throw EmptyTrainingSet("no training samples");
    for (double v : X.data())
        if (!std::isfinite(v)) throw NonFiniteFeature("training matrix contains a non-finite value");
    if (params.n_learners < 1 || params.k_neighbors < 1)
        throw ConfigError("n_learners and k_neighbors must be >= 1");

    EnsembleModel model;
    model.dims = X.cols();
    model.subspace_dim = params.subspace_dim.value_or((X.cols() + 1) / 2);
    if (model.subspace_dim < 1 || model.subspace_dim > X.cols())
        throw SubspaceTooLarge("subspace dim " + std::to_string(model.subspace_dim) +
                               " not in [1, " + std::to_string(X.cols()) + "]");
    model.k_neighbors = params.k_neighbors;
    model.seed = params.seed;
    model.train_labels = y;
    model.standardizer = std::move(standardizer);

    for (int label : y)
        if (std::find(model.class_ids.begin(), model.class_ids.end(), label) ==
            model.class_ids.end())
            model.class_ids.push_back(label);
    std::sort(model.class_ids.begin(), model.class_ids.end());
    if (model.class_ids.size() < 2) throw SingleClass("training set has a single class");
    for (int id : model.class_ids)
        model.class_names.push_back(
            static_cast<std::size_t>(id) < label_names.size() ? label_names[static_cast<std::size_t>(id)]
                                                              : std::to_string(id));

    const Matrix Xs = model.standardizer ? model.standardizer->apply(X) : X;

    // One RNG drives all subset draws, so learners get independent subsets
    // and features recur freely across learners.
    Rng rng(params.seed);
    std::vector<std::size_t> pool(X.cols());
    for (int l = 0; l < params.n_learners; ++l) {
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < model.subspace_dim; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        KnnLearner learner;
        learner.feature_idx.assign(pool.begin(),
                                   pool.begin() + static_cast<std::ptrdiff_t>(model.subspace_dim));
        std::sort(learner.feature_idx.begin(), learner.feature_idx.end());
        learner.data = Matrix(Xs.rows(), model.subspace_dim);
        for (std::size_t r = 0; r < Xs.rows(); ++r)
            for (std::size_t f = 0; f < model.subspace_dim; ++f)
                learner.data(r, f) = Xs(r, learner.feature_idx[f]);
        model.learners.push_back(std::move(learner));
    }
    return model;
}

inline int predict_ersknn(const EnsembleModel& model, std::span<const double> fv) {
    return model.predict(fv);
}

// --- serialization ---

inline void save_ersknn(const EnsembleModel& model, std::ostream& out) {
    out << "washrec-model v1\ntype ersknn\ndims " << model.dims << '\n'
        << "subspace_dim " << model.subspace_dim << '\n'
        << "k_neighbors " << model.k_neighbors << '\n'
        << "seed " << model.seed << '\n'
        << "classes " << model.class_ids.size() << '\n';
    for (std::size_t i = 0; i < model.class_ids.size(); ++i)
        out << "class " << model.class_ids[i] << ' ' << model.class_names[i] << '\n';
    detail::write_standardizer(out, model.standardizer);
    out << "labels";
    for (int l : model.train_labels) out << ' ' << l;
    out << '\n';
    out << "learners " << model.learners.size() << '\n';
    for (const auto& l : model.learners) {
        out << "subspace";
        for (std::size_t f : l.feature_idx) out << ' ' << f;
        out << '\n';
        for (std::size_t r = 0; r < l.data.rows(); ++r) {
            out << "row";
            for (double v : l.data.row(r)) out << ' ' << csv::fmt_hex(v);
            out << '\n';
        }
    }
    out << "end\n";
}

inline EnsembleModel load_ersknn(std::istream& in) {
    std::size_t line_no = 0;
    auto header = detail::expect_line(in, "washrec-model", line_no);
    if (header.size() != 2 || header[1] != "v1")
        throw MalformedRow(line_no, "unsupported model version");
    auto type = detail::expect_line(in, "type", line_no);
    if (type.size() != 2 || type[1] != "ersknn")
        throw MalformedRow(line_no, "not an ersknn model");

    EnsembleModel model;
    model.dims = static_cast<std::size_t>(
        csv::parse_int(detail::expect_line(in, "dims", line_no).at(1), line_no));
    model.subspace_dim = static_cast<std::size_t>(
        csv::parse_int(detail::expect_line(in, "subspace_dim", line_no).at(1), line_no));
    model.k_neighbors = static_cast<int>(
        csv::parse_int(detail::expect_line(in, "k_neighbors", line_no).at(1), line_no));
    model.seed = static_cast<std::uint64_t>(
        csv::parse_int(detail::expect_line(in, "seed", line_no).at(1), line_no));
    const auto n_classes =
        csv::parse_int(detail::expect_line(in, "classes", line_no).at(1), line_no);
    for (long long i = 0; i < n_classes; ++i) {
        const auto rec = detail::expect_line(in, "class", line_no);
        if (rec.size() < 3) throw MalformedRow(line_no, "bad class record");
        model.class_ids.push_back(static_cast<int>(csv::parse_int(rec[1], line_no)));
        model.class_names.push_back(rec[2]);
    }
    model.standardizer = detail::read_standardizer(in, line_no, model.dims);
    const auto labels = detail::expect_line(in, "labels", line_no);
    for (std::size_t i = 1; i < labels.size(); ++i)
        model.train_labels.push_back(static_cast<int>(csv::parse_int(labels[i], line_no)));
    const auto n_learners =
        csv::parse_int(detail::expect_line(in, "learners", line_no).at(1), line_no);
    for (long long l = 0; l < n_learners; ++l) {
        const auto sub = detail::expect_line(in, "subspace", line_no);
        if (sub.size() != model.subspace_dim + 1)
            throw MalformedRow(line_no, "bad subspace record");
        KnnLearner learner;
        for (std::size_t i = 1; i < sub.size(); ++i)
            learner.feature_idx.push_back(
                static_cast<std::size_t>(csv::parse_int(sub[i], line_no)));
        learner.data = Matrix(model.train_labels.size(), model.subspace_dim);
        for (std::size_t r = 0; r < model.train_labels.size(); ++r) {
            const auto row = detail::expect_line(in, "row", line_no);
            if (row.size() != model.subspace_dim + 1)
                throw MalformedRow(line_no, "bad row record");
            for (std::size_t c = 0; c < model.subspace_dim; ++c)
                learner.data(r, c) = csv::parse_hex(row[1 + c], line_no);
        }
        model.learners.push_back(std::move(learner));
    }
    detail::expect_line(in, "end", line_no);
    return model;
}

}  // namespace washrec

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
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

namespace washrec {

// Cubic polynomial kernel SVM trained by sequential minimal optimization.
// Multi-class problems decompose one-vs-one with majority voting.
struct SvmParams {
    std::optional<double> gamma;  // kernel scale; defaults to 1/d at training
    double coef0 = 1.0;
    double C = 1.0;
    double tol = 1e-3;     // KKT violation tolerance
    int max_passes = 1000;  // safety cap on optimization passes
};

// Optional training observer; records the dual objective after every
// accepted optimization step, one sequence per pairwise machine (intended
// for small diagnostic problems, the objective recomputation is quadratic).
struct SmoDiagnostics {
    std::vector<std::vector<double>> objective;
};

namespace detail {

inline double poly3_kernel(std::span<const double> u, std::span<const double> v, double gamma,
                           double coef0) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    const double base = gamma * dot + coef0;
    return base * base * base;
}

// One binary SMO problem over a dense precomputed Gram matrix.
class SmoSolver {
public:
    SmoSolver(const std::vector<std::span<const double>>& rows, const std::vector<double>& y,
              double gamma, double coef0, double C, double tol, int max_passes,
              SmoDiagnostics* diag)
        : rows_(rows), y_(y), C_(C), tol_(tol), max_passes_(max_passes), diag_(diag) {
        n_ = rows.size();
        alpha_.assign(n_, 0.0);
        errors_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -y_[i];
        gram_ = Matrix(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double k = poly3_kernel(rows[i], rows[j], gamma, coef0);
                gram_(i, j) = k;
                gram_(j, i) = k;
            }
        }
    }

    void solve() {
        bool examine_all = true;
        for (int pass = 0; pass < max_passes_; ++pass) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!examine_all && !non_bound(i)) continue;
                changed += examine(i);
            }
            if (examine_all) {
                if (changed == 0) return;  // KKT satisfied within tol everywhere
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
    }

    const std::vector<double>& alpha() const { return alpha_; }
    double bias() const { return bias_; }

private:
    bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < C_; }

    std::size_t examine(std::size_t i2) {
        const double r2 = errors_[i2] * y_[i2];
        const bool violated =
            (r2 < -tol_ && alpha_[i2] < C_) || (r2 > tol_ && alpha_[i2] > 0.0);
        if (!violated) return 0;

        // first choice: non-bound partner maximizing |E1 - E2|
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == i2 || !non_bound(i)) continue;
            const double gap = std::abs(errors_[i] - errors_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;
        for (std::size_t i = 0; i < n_; ++i)
            if (i != i2 && non_bound(i) && take_step(i, i2)) return 1;
        for (std::size_t i = 0; i < n_; ++i)
            if (i != i2 && take_step(i, i2)) return 1;
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1_old = alpha_[i1], a2_old = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = errors_[i1], e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(C_, C_ + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - C_);
            hi = std::min(C_, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const double k11 = gram_(i1, i1), k12 = gram_(i1, i2), k22 = gram_(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2;
        if (eta > 0.0) {
            a2 = std::clamp(a2_old + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // flat direction: evaluate the objective change at both clip ends
            const double f1 = y1 * (e1 + bias_) - a1_old * k11 - s * a2_old * k12;
            const double f2 = y2 * (e2 + bias_) - s * a1_old * k12 - a2_old * k22;
            const double l1 = a1_old + s * (a2_old - lo);
            const double h1 = a1_old + s * (a2_old - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 +
                                  0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 +
                                  0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12) a2 = lo;
            else if (obj_lo > obj_hi + 1e-12) a2 = hi;
            else return false;
        }
        if (std::abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;

        const double a1 = a1_old + s * (a2_old - a2);
        const double d1 = y1 * (a1 - a1_old);
        const double d2 = y2 * (a2 - a2_old);
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1 > 0.0 && a1 < C_) b_new = b1;
        else if (a2 > 0.0 && a2 < C_) b_new = b2;
        else b_new = 0.5 * (b1 + b2);

        const double db = b_new - bias_;
        for (std::size_t k = 0; k < n_; ++k)
            errors_[k] += d1 * gram_(i1, k) + d2 * gram_(i2, k) + db;
        alpha_[i1] = a1;
        alpha_[i2] = a2;
        bias_ = b_new;

        if (diag_) diag_->objective.back().push_back(dual_objective());
        return true;
    }

    double dual_objective() const {
        double obj = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] == 0.0) continue;
            obj += alpha_[i];
            for (std::size_t j = 0; j < n_; ++j) {
                if (alpha_[j] == 0.0) continue;
                obj -= 0.5 * alpha_[i] * alpha_[j] * y_[i] * y_[j] * gram_(i, j);
            }
        }
        return obj;
    }

    std::vector<std::span<const double>> rows_;
    std::vector<double> y_;
    double C_;
    double tol_;
    int max_passes_;
    SmoDiagnostics* diag_;
    std::size_t n_ = 0;
    std::vector<double> alpha_;
    std::vector<double> errors_;
    Matrix gram_;
    double bias_ = 0.0;
};

}  // namespace detail

// One trained pairwise machine; dual_coef[i] = alpha_i * y_i.
struct BinarySvm {
    int positive_class = 0;
    int negative_class = 0;
    Matrix support_vectors;
    std::vector<double> dual_coef;
    double bias = 0.0;
};

struct SvmModel {
    double gamma = 0.0;  // resolved value actually used
    double coef0 = 1.0;
    double C = 1.0;
    double tol = 1e-3;
    std::size_t dims = 0;
    std::vector<int> class_ids;
    std::vector<std::string> class_names;
    std::optional<Standardizer> standardizer;
    std::vector<BinarySvm> machines;

    double decision(const BinarySvm& m, std::span<const double> x) const {
        double f = m.bias;
        for (std::size_t i = 0; i < m.support_vectors.rows(); ++i)
            f += m.dual_coef[i] *
                 detail::poly3_kernel(m.support_vectors.row(i), x, gamma, coef0);
        return f;
    }

    // Majority vote over pairwise machines. Vote ties break toward the
    // larger accumulated |decision value|, then the lowest label id.
    int predict(std::span<const double> fv) const {
        if (fv.size() != dims)
            throw DimensionMismatch("feature vector has " + std::to_string(fv.size()) +
                                    " dims, model expects " + std::to_string(dims));
        std::vector<double> x(fv.begin(), fv.end());
        if (standardizer) x = standardizer->apply(x);

        std::vector<int> votes(class_ids.size(), 0);
        std::vector<double> confidence(class_ids.size(), 0.0);
        for (const auto& m : machines) {
            const double f = decision(m, x);
            const int winner = f >= 0.0 ? m.positive_class : m.negative_class;
            const auto idx = static_cast<std::size_t>(
                std::find(class_ids.begin(), class_ids.end(), winner) - class_ids.begin());
            votes[idx]++;
            confidence[idx] += std::abs(f);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < votes.size(); ++i) {
            if (votes[i] > votes[best] ||
                (votes[i] == votes[best] && confidence[i] > confidence[best]))
                best = i;
        }
        return class_ids[best];
    }
};

inline SvmModel train_svm(const Matrix& X, const std::vector<int>& y, const SvmParams& params,
                          const std::vector<std::string>& label_names = {},
                          std::optional<Standardizer> standardizer = std::nullopt,
                          SmoDiagnostics* diag = nullptr) {
    if (X.rows() != y.size()) throw LengthMismatch("feature rows and labels differ");
    if (X.rows() == 0) throw EmptyTrainingSet("no training samples");
    for (double v : X.data())
        if (!std::isfinite(v)) throw NonFiniteFeature("training matrix contains a non-finite value");
    if (params.C <= 0.0 || params.tol <= 0.0) throw ConfigError("C and tol must be positive");

    SvmModel model;
    model.dims = X.cols();
    model.gamma = params.gamma.value_or(1.0 / static_cast<double>(X.cols()));
    model.coef0 = params.coef0;
    model.C = params.C;
    model.tol = params.tol;
    model.standardizer = std::move(standardizer);

    const Matrix Xs = model.standardizer ? model.standardizer->apply(X) : X;

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

    for (std::size_t a = 0; a < model.class_ids.size(); ++a) {
        for (std::size_t b = a + 1; b < model.class_ids.size(); ++b) {
            const int pos = model.class_ids[a], neg = model.class_ids[b];
            std::vector<std::span<const double>> rows;
            std::vector<double> yy;
            std::vector<std::size_t> row_idx;
            for (std::size_t i = 0; i < Xs.rows(); ++i) {
                if (y[i] == pos || y[i] == neg) {
                    rows.push_back(Xs.row(i));
                    yy.push_back(y[i] == pos ? 1.0 : -1.0);
                    row_idx.push_back(i);
                }
            }
            if (diag) diag->objective.emplace_back();
            detail::SmoSolver solver(rows, yy, model.gamma, model.coef0, params.C, params.tol,
                                     params.max_passes, diag);
            solver.solve();

            BinarySvm machine;
            machine.positive_class = pos;
            machine.negative_class = neg;
            machine.bias = solver.bias();
            std::size_t n_sv = 0;
            for (double a_i : solver.alpha())
                if (a_i > 0.0) ++n_sv;
            machine.support_vectors = Matrix(n_sv, Xs.cols());
            machine.dual_coef.reserve(n_sv);
            std::size_t sv = 0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (solver.alpha()[i] <= 0.0) continue;
                std::copy(rows[i].begin(), rows[i].end(), machine.support_vectors.row(sv).begin());
                machine.dual_coef.push_back(solver.alpha()[i] * yy[i]);
                ++sv;
            }
            model.machines.push_back(std::move(machine));
        }
    }
    return model;
}

inline int predict_svm(const SvmModel& model, std::span<const double> fv) {
    return model.predict(fv);
}

// --- serialization (versioned text, hex floats for exact round trips) ---

inline void save_svm(const SvmModel& model, std::ostream& out) {
    out << "washrec-model v1\ntype svm\ndims " << model.dims << '\n'
        << "gamma " << csv::fmt_hex(model.gamma) << '\n'
        << "coef0 " << csv::fmt_hex(model.coef0) << '\n'
        << "C " << csv::fmt_hex(model.C) << '\n'
        << "tol " << csv::fmt_hex(model.tol) << '\n'
        << "classes " << model.class_ids.size() << '\n';
    for (std::size_t i = 0; i < model.class_ids.size(); ++i)
        out << "class " << model.class_ids[i] << ' ' << model.class_names[i] << '\n';
    detail::write_standardizer(out, model.standardizer);
    out << "machines " << model.machines.size() << '\n';
    for (const auto& m : model.machines) {
        out << "machine " << m.positive_class << ' ' << m.negative_class << ' '
            << csv::fmt_hex(m.bias) << ' ' << m.support_vectors.rows() << '\n';
        for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
            out << "sv " << csv::fmt_hex(m.dual_coef[i]);
            for (double v : m.support_vectors.row(i)) out << ' ' << csv::fmt_hex(v);
            out << '\n';
        }
    }
    out << "end\n";
}

inline SvmModel load_svm(std::istream& in) {
    std::size_t line_no = 0;
    auto header = detail::expect_line(in, "washrec-model", line_no);
    if (header.size() != 2 || header[1] != "v1")
        throw MalformedRow(line_no, "unsupported model version");
    auto type = detail::expect_line(in, "type", line_no);
    if (type.size() != 2 || type[1] != "svm") throw MalformedRow(line_no, "not an svm model");

    SvmModel model;
    model.dims = static_cast<std::size_t>(
        csv::parse_int(detail::expect_line(in, "dims", line_no).at(1), line_no));
    model.gamma = csv::parse_hex(detail::expect_line(in, "gamma", line_no).at(1), line_no);
    model.coef0 = csv::parse_hex(detail::expect_line(in, "coef0", line_no).at(1), line_no);
    model.C = csv::parse_hex(detail::expect_line(in, "C", line_no).at(1), line_no);
    model.tol = csv::parse_hex(detail::expect_line(in, "tol", line_no).at(1), line_no);
    const auto n_classes = csv::parse_int(detail::expect_line(in, "classes", line_no).at(1), line_no);
    for (long long i = 0; i < n_classes; ++i) {
        const auto rec = detail::expect_line(in, "class", line_no);
        if (rec.size() < 3) throw MalformedRow(line_no, "bad class record");
        model.class_ids.push_back(static_cast<int>(csv::parse_int(rec[1], line_no)));
        model.class_names.push_back(rec[2]);
    }
    model.standardizer = detail::read_standardizer(in, line_no, model.dims);
    const auto n_machines =
        csv::parse_int(detail::expect_line(in, "machines", line_no).at(1), line_no);
    for (long long k = 0; k < n_machines; ++k) {
        const auto rec = detail::expect_line(in, "machine", line_no);
        if (rec.size() != 5) throw MalformedRow(line_no, "bad machine record");
        BinarySvm m;
        m.positive_class = static_cast<int>(csv::parse_int(rec[1], line_no));
        m.negative_class = static_cast<int>(csv::parse_int(rec[2], line_no));
        m.bias = csv::parse_hex(rec[3], line_no);
        const auto n_sv = csv::parse_int(rec[4], line_no);
        m.support_vectors = Matrix(static_cast<std::size_t>(n_sv), model.dims);
        for (long long i = 0; i < n_sv; ++i) {
            const auto sv = detail::expect_line(in, "sv", line_no);
            if (sv.size() != model.dims + 2) throw MalformedRow(line_no, "bad sv record");
            m.dual_coef.push_back(csv::parse_hex(sv[1], line_no));
            for (std::size_t c = 0; c < model.dims; ++c)
                m.support_vectors(static_cast<std::size_t>(i), c) =
                    csv::parse_hex(sv[2 + c], line_no);
        }
        model.machines.push_back(std::move(m));
    }
    detail::expect_line(in, "end", line_no);
    return model;
}

}  // namespace washrec

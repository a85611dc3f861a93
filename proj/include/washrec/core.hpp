#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "washrec/errors.hpp"

namespace washrec {

// Dense row-major matrix of doubles. Rows are samples, columns are channels
// or feature dimensions.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Label id <-> name table. Id 0 is reserved for "other" in every task.
class LabelTable {
public:
    LabelTable() { intern_unchecked("other"); }

    // Id of a known name, -1 if absent.
    int id_of(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

    // Inserts the name if new; ids follow first-appearance order.
    int intern(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        return intern_unchecked(name);
    }

    const std::string& name(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= names_.size())
            throw UnknownLabel("label id " + std::to_string(id) + " out of range");
        return names_[static_cast<std::size_t>(id)];
    }

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const LabelTable& o) const { return names_ == o.names_; }

private:
    int intern_unchecked(const std::string& name) {
        int id = static_cast<int>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

constexpr int kOtherLabel = 0;

// FNV-1a over a byte string; used for stable config hashes in manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace washrec

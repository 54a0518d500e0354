#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace pctmi {

/// Dense row-major matrix of doubles; one row per sample.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Column-wise concatenation; all inputs must share a row count (zero-column blocks are skipped).
inline Matrix hconcat(std::initializer_list<const Matrix*> blocks) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool have_rows = false;
    for (const Matrix* b : blocks) {
        if (b->cols() == 0) continue;
        if (!have_rows) {
            rows = b->rows();
            have_rows = true;
        }
        assert(b->rows() == rows);
        cols += b->cols();
    }
    Matrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t c0 = 0;
        for (const Matrix* b : blocks) {
            if (b->cols() == 0) continue;
            auto src = b->row(r);
            for (std::size_t c = 0; c < src.size(); ++c) out(r, c0 + c) = src[c];
            c0 += src.size();
        }
    }
    return out;
}

/// Wraps a single column of values as an n x 1 matrix.
inline Matrix column_matrix(std::span<const double> values) {
    Matrix m(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
    return m;
}

}  // namespace pctmi

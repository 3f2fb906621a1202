#pragma once

#include <cstddef>
#include <vector>

#include "mamid/errors.hpp"

namespace mamid {

/// Dense row-major matrix of doubles. Value type, no views.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double> row(std::size_t i) const {
        return std::vector<double>(row_ptr(i), row_ptr(i) + cols_);
    }
    void set_row(std::size_t i, const std::vector<double>& values);

    std::vector<double> col(std::size_t j) const;

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);
/// C = A * B^T
Matrix matmul_transb(const Matrix& a, const Matrix& b);
/// C = A^T * B
Matrix matmul_transa(const Matrix& a, const Matrix& b);

/// Adds a row vector to every row of m in place.
void add_row_vector(Matrix& m, const std::vector<double>& v);

}  // namespace mamid

#include "mamid/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace mamid {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) {
            throw DimensionError("from_rows: ragged input at row " + std::to_string(i));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.row_ptr(i));
    }
    return m;
}

void Matrix::set_row(std::size_t i, const std::vector<double>& values) {
    if (values.size() != cols_) {
        throw DimensionError("set_row: expected " + std::to_string(cols_) +
                             " values, got " + std::to_string(values.size()));
    }
    std::copy(values.begin(), values.end(), row_ptr(i));
}

std::vector<double> Matrix::col(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double x) { return std::isfinite(x); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.cols());
    // i-k-j order keeps the inner loop sequential over both b and c.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix matmul_transb(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_transb: inner dims " + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row_ptr(i);
        double* crow = c.row_ptr(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row_ptr(j);
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += arow[k] * brow[k];
            crow[j] = sum;
        }
    }
    return c;
}

Matrix matmul_transa(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("matmul_transa: inner dims " + std::to_string(a.rows()) +
                             " vs " + std::to_string(b.rows()));
    }
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.row_ptr(k);
        const double* brow = b.row_ptr(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* crow = c.row_ptr(i);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aki * brow[j];
        }
    }
    return c;
}

void add_row_vector(Matrix& m, const std::vector<double>& v) {
    if (v.size() != m.cols()) {
        throw DimensionError("add_row_vector: vector length " + std::to_string(v.size()) +
                             " vs " + std::to_string(m.cols()) + " columns");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row_ptr(i);
        for (std::size_t j = 0; j < v.size(); ++j) row[j] += v[j];
    }
}

}  // namespace mamid

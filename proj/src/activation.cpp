#include "mamid/activation.hpp"

#include <algorithm>
#include <cmath>

#include "mamid/errors.hpp"

namespace mamid {

const char* activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::relu: return "relu";
        case ActivationKind::tanh: return "tanh";
        case ActivationKind::sigmoid: return "sigmoid";
        case ActivationKind::softplus: return "softplus";
        case ActivationKind::softmax: return "softmax";
    }
    return "?";
}

ActivationKind activation_from_name(const std::string& name) {
    for (ActivationKind k : all_activations()) {
        if (name == activation_name(k)) return k;
    }
    throw InvalidArgumentError("unknown activation: " + name);
}

const std::vector<ActivationKind>& all_activations() {
    static const std::vector<ActivationKind> kinds = {
        ActivationKind::relu, ActivationKind::tanh, ActivationKind::sigmoid,
        ActivationKind::softplus, ActivationKind::softmax};
    return kinds;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) {
    // log(1+e^x) without overflow for large |x|.
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void softmax_inplace(double* v, std::size_t n) {
    double max_val = v[0];
    for (std::size_t i = 1; i < n; ++i) max_val = std::max(max_val, v[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::exp(v[i] - max_val);
        sum += v[i];
    }
    for (std::size_t i = 0; i < n; ++i) v[i] /= sum;
}

void check_nan(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(v[i])) {
            throw NumericError("NaN activation input at index " + std::to_string(i));
        }
    }
}

void apply_inplace(ActivationKind kind, double* v, std::size_t n) {
    switch (kind) {
        case ActivationKind::relu:
            for (std::size_t i = 0; i < n; ++i) v[i] = std::max(v[i], 0.0);
            break;
        case ActivationKind::tanh:
            for (std::size_t i = 0; i < n; ++i) v[i] = std::tanh(v[i]);
            break;
        case ActivationKind::sigmoid:
            for (std::size_t i = 0; i < n; ++i) v[i] = sigmoid(v[i]);
            break;
        case ActivationKind::softplus:
            for (std::size_t i = 0; i < n; ++i) v[i] = softplus(v[i]);
            break;
        case ActivationKind::softmax:
            softmax_inplace(v, n);
            break;
    }
}

}  // namespace

std::vector<double> apply_activation(ActivationKind kind, const std::vector<double>& v) {
    if (kind == ActivationKind::softmax && v.size() < 2) {
        throw InvalidArgumentError("softmax needs at least 2 elements, got " +
                                   std::to_string(v.size()));
    }
    check_nan(v.data(), v.size());
    std::vector<double> out = v;
    apply_inplace(kind, out.data(), out.size());
    return out;
}

void apply_activation_rows(ActivationKind kind, Matrix& m) {
    if (kind == ActivationKind::softmax && m.cols() < 2) {
        throw InvalidArgumentError("softmax needs at least 2 columns, got " +
                                   std::to_string(m.cols()));
    }
    check_nan(m.data().data(), m.size());
    for (std::size_t i = 0; i < m.rows(); ++i) apply_inplace(kind, m.row_ptr(i), m.cols());
}

void activation_backward_rows(ActivationKind kind, const Matrix& act, Matrix& upstream) {
    if (act.rows() != upstream.rows() || act.cols() != upstream.cols()) {
        throw DimensionError("activation_backward_rows: shape mismatch");
    }
    const std::size_t n = act.rows();
    const std::size_t d = act.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = act.row_ptr(i);
        double* u = upstream.row_ptr(i);
        switch (kind) {
            case ActivationKind::relu:
                for (std::size_t j = 0; j < d; ++j) u[j] = a[j] > 0.0 ? u[j] : 0.0;
                break;
            case ActivationKind::tanh:
                for (std::size_t j = 0; j < d; ++j) u[j] *= 1.0 - a[j] * a[j];
                break;
            case ActivationKind::sigmoid:
                for (std::size_t j = 0; j < d; ++j) u[j] *= a[j] * (1.0 - a[j]);
                break;
            case ActivationKind::softplus:
                // d/dx softplus(x) = sigmoid(x) = 1 - e^{ -softplus(x) }
                for (std::size_t j = 0; j < d; ++j) u[j] *= 1.0 - std::exp(-a[j]);
                break;
            case ActivationKind::softmax: {
                double dot = 0.0;
                for (std::size_t j = 0; j < d; ++j) dot += u[j] * a[j];
                for (std::size_t j = 0; j < d; ++j) u[j] = a[j] * (u[j] - dot);
                break;
            }
        }
    }
}

}  // namespace mamid

#pragma once

#include <string>
#include <vector>

#include "mamid/matrix.hpp"

namespace mamid {

enum class ActivationKind { relu, tanh, sigmoid, softplus, softmax };

const char* activation_name(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);

/// All five kinds, in the canonical enumeration order used by the grid.
const std::vector<ActivationKind>& all_activations();

/// Elementwise transform; softmax normalizes the whole vector.
/// Throws NumericError (with the offending index) on NaN input and
/// InvalidArgumentError for softmax on fewer than 2 elements.
std::vector<double> apply_activation(ActivationKind kind, const std::vector<double>& v);

/// Row-wise application over a batch, in place.
void apply_activation_rows(ActivationKind kind, Matrix& m);

/// Given activation outputs `act` and the gradient `upstream` w.r.t. those
/// outputs, writes the gradient w.r.t. pre-activations into `upstream`
/// (row-wise). softmax uses the full Jacobian-vector product
/// s .* (u - <u, s>); the pointwise kinds use their scalar derivatives.
void activation_backward_rows(ActivationKind kind, const Matrix& act, Matrix& upstream);

}  // namespace mamid

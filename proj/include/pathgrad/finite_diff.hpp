#pragma once

#include <functional>

#include "pathgrad/matrix.hpp"

namespace pathgrad {

/// Central-difference gradient oracle: entry (i,j) is
/// (f(x + h e_ij) - f(x - h e_ij)) / (2h). Used to validate every analytic
/// gradient in the repo. Throws numeric_error naming the probe if f returns
/// a non-finite value, input_error if h <= 0.
Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f,
                                  const Matrix& x, double h = 1e-4);

} // namespace pathgrad

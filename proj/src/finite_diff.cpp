#include "pathgrad/finite_diff.hpp"

#include <cmath>
#include <string>

#include "pathgrad/errors.hpp"

namespace pathgrad {

Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f,
                                  const Matrix& x, double h) {
    if (!(h > 0.0)) throw input_error("finite_difference_gradient: h must be > 0");

    Matrix grad(x.rows(), x.cols());
    Matrix probe = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double original = probe(i, j);

            probe(i, j) = original + h;
            const double plus = f(probe);
            if (!std::isfinite(plus)) {
                throw numeric_error("finite_difference_gradient: non-finite value at probe (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")+h");
            }

            probe(i, j) = original - h;
            const double minus = f(probe);
            if (!std::isfinite(minus)) {
                throw numeric_error("finite_difference_gradient: non-finite value at probe (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")-h");
            }

            probe(i, j) = original;
            grad(i, j) = (plus - minus) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace pathgrad

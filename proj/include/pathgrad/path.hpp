#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pathgrad/matrix.hpp"
#include "pathgrad/model.hpp"

namespace pathgrad {

enum class QuadratureRule { left, right, midpoint, trapezoid };

std::string rule_name(QuadratureRule r);
QuadratureRule rule_from_name(const std::string& name);

enum class BaselineKind { mask_token, pad_token, zero, custom_matrix };

std::string baseline_name(BaselineKind k);
BaselineKind baseline_from_name(const std::string& name);

struct BaselineSpec {
    BaselineKind kind = BaselineKind::mask_token;
    std::optional<Matrix> custom; // present iff kind == custom_matrix

    static BaselineSpec mask() { return {BaselineKind::mask_token, std::nullopt}; }
    static BaselineSpec pad() { return {BaselineKind::pad_token, std::nullopt}; }
    static BaselineSpec zeros() { return {BaselineKind::zero, std::nullopt}; }
    static BaselineSpec custom_of(Matrix m) { return {BaselineKind::custom_matrix, std::move(m)}; }
};

/// Monotone non-decreasing within one attribution run.
struct CallCounter {
    std::size_t gradient_calls = 0;
    std::size_t forward_calls = 0;
};

/// Ordered interpolation points g(t_0 .. t_K) with strictly increasing
/// partition values; first/last points equal the requested endpoints
/// bit-exactly. Segments are interpolated linearly by the integrator.
struct Path {
    std::vector<Matrix> points;
    std::vector<double> partition;
    QuadratureRule rule = QuadratureRule::trapezoid;
    bool monotonic = true;
};

/// True when every coordinate sequence over the points is monotone.
bool coordinatewise_monotonic(const std::vector<Matrix>& points);

/// Full baseline: every row of x replaced per the spec. `model` supplies the
/// mask/pad embedding rows and may be null for zero/custom baselines.
Matrix full_baseline(const Matrix& x, const BaselineSpec& spec, const ToyModel* model);

/// Per-word baseline: copy of x with only row `word` replaced.
Matrix sequential_baseline(const Matrix& x, std::size_t word, const BaselineSpec& spec,
                           const ToyModel* model);

/// Straight line from start to end with `steps` segments (steps+1 knots).
Path straight_line_path(const Matrix& start, const Matrix& end, std::size_t steps,
                        QuadratureRule rule);

/// Row-level discretized path: each interior straight-line anchor snaps to
/// the nearest candidate embedding row (Euclidean), avoiding an immediate
/// repeat of the previous pick when an alternative exists. Endpoints stay
/// exact; monotonicity is reported, not enforced.
Path greedy_discretized_path(std::span<const double> word_start, std::span<const double> word_end,
                             const Matrix& candidates, std::size_t steps);

/// Gradients for each point, in order, bit-identical to one-at-a-time
/// evaluation; `batch` only controls the internal grouping.
std::vector<Matrix> batched_gradient_eval(const DifferentiableModel& model,
                                          const std::vector<Matrix>& points, std::size_t batch,
                                          CallCounter& counter);

/// Riemann-Stieltjes sum  sum_i f(g(c_i)) * (g(t_{i+1}) - g(t_i))  with c_i
/// chosen per the path's rule; handles non-monotonic paths. Accumulates in
/// ascending segment order. A path whose points are all identical returns
/// zero without evaluating any gradient.
Matrix riemann_stieltjes_integrate(const std::function<Matrix(const Matrix&)>& grad_fn,
                                   const Path& path, CallCounter& counter, std::size_t batch = 64);

/// Same, but counts through batched_gradient_eval on a model.
Matrix riemann_stieltjes_integrate(const DifferentiableModel& model, const Path& path,
                                   CallCounter& counter, std::size_t batch = 64);

} // namespace pathgrad

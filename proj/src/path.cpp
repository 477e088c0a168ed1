#include "pathgrad/path.hpp"

#include <algorithm>
#include <cmath>

#include "pathgrad/errors.hpp"

namespace pathgrad {

std::string rule_name(QuadratureRule r) {
    switch (r) {
        case QuadratureRule::left: return "left";
        case QuadratureRule::right: return "right";
        case QuadratureRule::midpoint: return "midpoint";
        case QuadratureRule::trapezoid: return "trapezoid";
    }
    return "unknown";
}

QuadratureRule rule_from_name(const std::string& name) {
    if (name == "left") return QuadratureRule::left;
    if (name == "right") return QuadratureRule::right;
    if (name == "midpoint") return QuadratureRule::midpoint;
    if (name == "trapezoid") return QuadratureRule::trapezoid;
    throw input_error("unknown quadrature rule \"" + name +
                      "\"; valid: left, right, midpoint, trapezoid");
}

std::string baseline_name(BaselineKind k) {
    switch (k) {
        case BaselineKind::mask_token: return "mask";
        case BaselineKind::pad_token: return "pad";
        case BaselineKind::zero: return "zero";
        case BaselineKind::custom_matrix: return "custom";
    }
    return "unknown";
}

BaselineKind baseline_from_name(const std::string& name) {
    if (name == "mask") return BaselineKind::mask_token;
    if (name == "pad") return BaselineKind::pad_token;
    if (name == "zero") return BaselineKind::zero;
    if (name == "custom") return BaselineKind::custom_matrix;
    throw input_error("unknown baseline \"" + name + "\"; valid: mask, pad, zero, custom");
}

Matrix full_baseline(const Matrix& x, const BaselineSpec& spec, const ToyModel* model) {
    switch (spec.kind) {
        case BaselineKind::zero:
            return Matrix(x.rows(), x.cols());
        case BaselineKind::custom_matrix: {
            if (!spec.custom) throw input_error("baseline: custom kind without a matrix");
            if (!spec.custom->same_shape(x)) {
                throw input_error("baseline: custom matrix shape does not match input");
            }
            return *spec.custom;
        }
        case BaselineKind::mask_token:
        case BaselineKind::pad_token: {
            if (model == nullptr) {
                throw input_error("baseline: token baselines need a model for embedding rows");
            }
            const auto row = spec.kind == BaselineKind::mask_token ? model->mask_row()
                                                                   : model->pad_row();
            if (row.size() != x.cols()) {
                throw input_error("baseline: embedding width does not match input");
            }
            Matrix out(x.rows(), x.cols());
            for (std::size_t i = 0; i < x.rows(); ++i) out.set_row(i, row);
            return out;
        }
    }
    throw input_error("baseline: unknown kind");
}

Matrix sequential_baseline(const Matrix& x, std::size_t word, const BaselineSpec& spec,
                           const ToyModel* model) {
    if (word >= x.rows()) {
        throw input_error("sequential_baseline: word index " + std::to_string(word) +
                          " out of range for " + std::to_string(x.rows()) + " words");
    }
    const Matrix base = full_baseline(x, spec, model);
    Matrix out = x;
    out.set_row(word, base.row(word));
    return out;
}

bool coordinatewise_monotonic(const std::vector<Matrix>& points) {
    if (points.size() < 2) return true;
    const std::size_t len = points.front().size();
    for (std::size_t k = 0; k < len; ++k) {
        bool non_decreasing = true, non_increasing = true;
        for (std::size_t p = 1; p < points.size(); ++p) {
            const double prev = points[p - 1].data()[k];
            const double cur = points[p].data()[k];
            if (cur < prev) non_decreasing = false;
            if (cur > prev) non_increasing = false;
        }
        if (!non_decreasing && !non_increasing) return false;
    }
    return true;
}

namespace {

Matrix lerp(const Matrix& start, const Matrix& end, double t) {
    Matrix out(start.rows(), start.cols());
    for (std::size_t k = 0; k < start.size(); ++k) {
        out.data()[k] = start.data()[k] + t * (end.data()[k] - start.data()[k]);
    }
    return out;
}

} // namespace

Path straight_line_path(const Matrix& start, const Matrix& end, std::size_t steps,
                        QuadratureRule rule) {
    if (steps == 0) throw input_error("straight_line_path: steps must be >= 1");
    if (!start.same_shape(end)) throw input_error("straight_line_path: shape mismatch");

    Path path;
    path.rule = rule;
    path.monotonic = true;
    path.points.reserve(steps + 1);
    path.partition.reserve(steps + 1);
    path.points.push_back(start); // endpoints bit-exact
    path.partition.push_back(0.0);
    for (std::size_t k = 1; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        path.points.push_back(lerp(start, end, t));
        path.partition.push_back(t);
    }
    path.points.push_back(end);
    path.partition.push_back(1.0);
    return path;
}

Path greedy_discretized_path(std::span<const double> word_start, std::span<const double> word_end,
                             const Matrix& candidates, std::size_t steps) {
    if (steps == 0) throw input_error("greedy_discretized_path: steps must be >= 1");
    if (candidates.rows() == 0) throw input_error("greedy_discretized_path: no candidates");
    if (word_start.size() != word_end.size() || word_start.size() != candidates.cols()) {
        throw input_error("greedy_discretized_path: dimension mismatch");
    }
    const std::size_t n = word_start.size();

    auto row_of = [&](std::span<const double> values) {
        Matrix m(1, n);
        m.set_row(0, values);
        return m;
    };

    Path path;
    path.rule = QuadratureRule::trapezoid;
    path.points.reserve(steps + 1);
    path.partition.reserve(steps + 1);
    path.points.push_back(row_of(word_start));
    path.partition.push_back(0.0);

    auto dist2_to = [&](std::size_t candidate, const std::vector<double>& anchor) {
        const auto row = candidates.row(candidate);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = row[j] - anchor[j];
            acc += d * d;
        }
        return acc;
    };

    std::optional<std::size_t> previous;
    for (std::size_t k = 1; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        std::vector<double> anchor(n);
        for (std::size_t j = 0; j < n; ++j) {
            anchor[j] = word_start[j] + t * (word_end[j] - word_start[j]);
        }

        std::size_t best = 0;
        double best_d = dist2_to(0, anchor);
        for (std::size_t c = 1; c < candidates.rows(); ++c) {
            const double d = dist2_to(c, anchor);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        // Avoid repeating the previous word when another candidate exists.
        if (previous && best == *previous && candidates.rows() > 1) {
            std::optional<std::size_t> alt;
            double alt_d = 0.0;
            for (std::size_t c = 0; c < candidates.rows(); ++c) {
                if (c == *previous) continue;
                const double d = dist2_to(c, anchor);
                if (!alt || d < alt_d) {
                    alt = c;
                    alt_d = d;
                }
            }
            best = *alt;
        }
        previous = best;
        path.points.push_back(row_of(candidates.row(best)));
        path.partition.push_back(t);
    }

    path.points.push_back(row_of(word_end));
    path.partition.push_back(1.0);
    path.monotonic = coordinatewise_monotonic(path.points);
    return path;
}

std::vector<Matrix> batched_gradient_eval(const DifferentiableModel& model,
                                          const std::vector<Matrix>& points, std::size_t batch,
                                          CallCounter& counter) {
    if (batch == 0) throw input_error("batched_gradient_eval: batch must be >= 1");
    std::vector<Matrix> grads;
    grads.reserve(points.size());
    for (std::size_t begin = 0; begin < points.size(); begin += batch) {
        const std::size_t end = std::min(points.size(), begin + batch);
        for (std::size_t p = begin; p < end; ++p) {
            grads.push_back(model.gradient(points[p]));
            ++counter.gradient_calls;
        }
    }
    return grads;
}

namespace {

Matrix integrate_impl(const std::function<std::vector<Matrix>(const std::vector<Matrix>&)>& eval,
                      const Path& path) {
    if (path.points.size() < 2) {
        throw input_error("riemann_stieltjes_integrate: path needs at least 2 points");
    }
    const Matrix& first = path.points.front();
    for (const auto& p : path.points) {
        if (!p.same_shape(first)) {
            throw input_error("riemann_stieltjes_integrate: inconsistent point shapes");
        }
    }

    // Degenerate path: every increment is zero, nothing to evaluate.
    bool all_equal = true;
    for (std::size_t p = 1; p < path.points.size() && all_equal; ++p) {
        all_equal = path.points[p] == first;
    }
    if (all_equal) return Matrix(first.rows(), first.cols());

    const std::size_t segments = path.points.size() - 1;
    std::vector<Matrix> eval_points;
    switch (path.rule) {
        case QuadratureRule::left:
            eval_points.assign(path.points.begin(), path.points.end() - 1);
            break;
        case QuadratureRule::right:
            eval_points.assign(path.points.begin() + 1, path.points.end());
            break;
        case QuadratureRule::midpoint:
            eval_points.reserve(segments);
            for (std::size_t s = 0; s < segments; ++s) {
                eval_points.push_back(
                    scale(add(path.points[s], path.points[s + 1]), 0.5));
            }
            break;
        case QuadratureRule::trapezoid:
            // Each knot evaluated once and shared by adjacent segments.
            eval_points = path.points;
            break;
    }

    const std::vector<Matrix> grads = eval(eval_points);
    for (std::size_t g = 0; g < grads.size(); ++g) {
        if (!grads[g].all_finite()) {
            throw numeric_error("riemann_stieltjes_integrate: non-finite gradient at segment " +
                                std::to_string(g));
        }
    }

    Matrix result(first.rows(), first.cols());
    for (std::size_t s = 0; s < segments; ++s) {
        const Matrix& lo = path.points[s];
        const Matrix& hi = path.points[s + 1];
        if (path.rule == QuadratureRule::trapezoid) {
            const Matrix& ga = grads[s];
            const Matrix& gb = grads[s + 1];
            for (std::size_t k = 0; k < result.size(); ++k) {
                result.data()[k] += 0.5 * (ga.data()[k] + gb.data()[k]) *
                                    (hi.data()[k] - lo.data()[k]);
            }
        } else {
            const Matrix& g = grads[s];
            for (std::size_t k = 0; k < result.size(); ++k) {
                result.data()[k] += g.data()[k] * (hi.data()[k] - lo.data()[k]);
            }
        }
    }
    if (!result.all_finite()) {
        throw numeric_error("riemann_stieltjes_integrate: non-finite accumulation");
    }
    return result;
}

} // namespace

Matrix riemann_stieltjes_integrate(const std::function<Matrix(const Matrix&)>& grad_fn,
                                   const Path& path, CallCounter& counter, std::size_t batch) {
    if (batch == 0) throw input_error("riemann_stieltjes_integrate: batch must be >= 1");
    auto eval = [&](const std::vector<Matrix>& points) {
        std::vector<Matrix> grads;
        grads.reserve(points.size());
        for (std::size_t begin = 0; begin < points.size(); begin += batch) {
            const std::size_t end = std::min(points.size(), begin + batch);
            for (std::size_t p = begin; p < end; ++p) {
                grads.push_back(grad_fn(points[p]));
                ++counter.gradient_calls;
            }
        }
        return grads;
    };
    return integrate_impl(eval, path);
}

Matrix riemann_stieltjes_integrate(const DifferentiableModel& model, const Path& path,
                                   CallCounter& counter, std::size_t batch) {
    auto eval = [&](const std::vector<Matrix>& points) {
        return batched_gradient_eval(model, points, batch, counter);
    };
    return integrate_impl(eval, path);
}

} // namespace pathgrad

#include "pathgrad/attribution.hpp"

#include <algorithm>
#include <cmath>

#include "pathgrad/errors.hpp"

namespace pathgrad {

std::vector<double> normalize_word_attributions(const Matrix& per_feature) {
    std::vector<double> sums(per_feature.rows(), 0.0);
    for (std::size_t i = 0; i < per_feature.rows(); ++i) {
        double acc = 0.0;
        for (double v : per_feature.row(i)) acc += v;
        sums[i] = acc;
    }
    double norm = 0.0;
    for (double v : sums) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
        for (double& v : sums) v /= norm;
    }
    return sums;
}

double delta_diagnostic(const Matrix& per_feature, const DifferentiableModel& f, const Matrix& x,
                        const Matrix& baseline, CallCounter& counter) {
    const double fx = f.value(x);
    const double fb = f.value(baseline);
    counter.forward_calls += 2;
    return per_feature.sum() - (fx - fb);
}

namespace {

AttributionResult finish(Matrix per_feature, const DifferentiableModel& f, const Matrix& x,
                         const Matrix& baseline, CallCounter& counter, std::string method,
                         std::size_t steps, QuadratureRule rule) {
    AttributionResult result;
    result.delta = delta_diagnostic(per_feature, f, x, baseline, counter);
    result.per_word = normalize_word_attributions(per_feature);
    result.per_feature = std::move(per_feature);
    result.method = std::move(method);
    result.steps = steps;
    result.rule = rule;
    result.gradient_calls = counter.gradient_calls;
    return result;
}

void check_baseline_shape(const Matrix& x, const Matrix& baseline, const char* method) {
    if (!baseline.same_shape(x)) {
        throw input_error(std::string(method) + ": baseline shape does not match input");
    }
}

} // namespace

AttributionResult grad_times_input(const DifferentiableModel& f, const Matrix& x,
                                   const Matrix& baseline_for_delta, CallCounter& counter) {
    check_baseline_shape(x, baseline_for_delta, "grad_times_input");
    std::vector<Matrix> grads = batched_gradient_eval(f, {x}, 1, counter);
    Matrix per_feature = hadamard(x, grads.front());
    return finish(std::move(per_feature), f, x, baseline_for_delta, counter, "grad-input", 0,
                  QuadratureRule::left);
}

AttributionResult integrated_gradients(const DifferentiableModel& f, const Matrix& x,
                                       const Matrix& baseline, std::size_t steps,
                                       QuadratureRule rule, CallCounter& counter,
                                       std::size_t batch) {
    if (steps == 0) throw input_error("integrated_gradients: steps must be >= 1");
    check_baseline_shape(x, baseline, "integrated_gradients");
    const Path path = straight_line_path(baseline, x, steps, rule);
    auto grad_fn = [&](const Matrix& p) { return f.gradient(p); };
    Matrix per_feature = riemann_stieltjes_integrate(grad_fn, path, counter, batch);
    return finish(std::move(per_feature), f, x, baseline, counter, "ig", steps, rule);
}

AttributionResult sequential_integrated_gradients(const DifferentiableModel& f, const Matrix& x,
                                                  const Matrix& baseline, std::size_t steps,
                                                  QuadratureRule rule, CallCounter& counter,
                                                  std::size_t batch) {
    if (steps == 0) throw input_error("sequential_integrated_gradients: steps must be >= 1");
    check_baseline_shape(x, baseline, "sequential_integrated_gradients");
    const std::size_t m = x.rows();

    const double fx = f.value(x);
    counter.forward_calls += 1;

    Matrix per_feature(x.rows(), x.cols());
    std::vector<double> residuals(m, 0.0);
    auto grad_fn = [&](const Matrix& p) { return f.gradient(p); };

    for (std::size_t word = 0; word < m; ++word) {
        // x-bar^word: everything fixed at its true embedding except this word.
        Matrix word_baseline = x;
        word_baseline.set_row(word, baseline.row(word));

        const Path path = straight_line_path(word_baseline, x, steps, rule);
        const Matrix integral = riemann_stieltjes_integrate(grad_fn, path, counter, batch);
        // Only row `word` moves along this path, so only it integrates to
        // anything nonzero; keep exactly that row.
        per_feature.set_row(word, integral.row(word));

        double word_sum = 0.0;
        for (double v : per_feature.row(word)) word_sum += v;
        const double fb = f.value(word_baseline);
        counter.forward_calls += 1;
        residuals[word] = word_sum - (fx - fb);
    }

    AttributionResult result =
        finish(std::move(per_feature), f, x, baseline, counter, "sig", steps, rule);
    result.per_word_completeness = std::move(residuals);
    return result;
}

AttributionResult gradient_shap(const DifferentiableModel& f, const Matrix& x,
                                const Matrix& baseline, std::size_t samples, double noise_std,
                                Rng& rng, CallCounter& counter) {
    if (samples == 0) throw input_error("gradient_shap: samples must be >= 1");
    if (noise_std < 0.0) throw input_error("gradient_shap: noise_std must be >= 0");
    check_baseline_shape(x, baseline, "gradient_shap");

    Matrix acc(x.rows(), x.cols());
    for (std::size_t s = 0; s < samples; ++s) {
        const Matrix noise = sample_gaussian(rng, x.rows(), x.cols(), 0.0, noise_std);
        const double alpha = rng.next_unit();
        const Matrix noisy_baseline = add(baseline, noise);
        const Matrix displacement = subtract(x, noisy_baseline);

        Matrix point(x.rows(), x.cols());
        for (std::size_t k = 0; k < point.size(); ++k) {
            point.data()[k] = noisy_baseline.data()[k] + alpha * displacement.data()[k];
        }
        const std::vector<Matrix> grads = batched_gradient_eval(f, {point}, 1, counter);
        const Matrix term = hadamard(displacement, grads.front());
        for (std::size_t k = 0; k < acc.size(); ++k) acc.data()[k] += term.data()[k];
    }
    Matrix per_feature = scale(acc, 1.0 / static_cast<double>(samples));
    AttributionResult result = finish(std::move(per_feature), f, x, baseline, counter,
                                      "gradient-shap", samples, QuadratureRule::left);
    return result;
}

AttributionResult discretized_integrated_gradients(const DifferentiableModel& f, const Matrix& x,
                                                   const Matrix& baseline,
                                                   const Matrix& candidates, std::size_t steps,
                                                   QuadratureRule rule, CallCounter& counter,
                                                   std::size_t batch) {
    if (steps == 0) throw input_error("discretized_integrated_gradients: steps must be >= 1");
    check_baseline_shape(x, baseline, "discretized_integrated_gradients");
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();

    // Straight-line scaffold shared by every pass: all words travel from
    // their baseline row to their true embedding simultaneously.
    const Path scaffold = straight_line_path(baseline, x, steps, rule);

    Matrix per_feature(m, n);
    auto grad_fn = [&](const Matrix& p) { return f.gradient(p); };

    for (std::size_t word = 0; word < m; ++word) {
        const Path word_path =
            greedy_discretized_path(baseline.row(word), x.row(word), candidates, steps);

        Path full = scaffold;
        full.rule = rule;
        for (std::size_t k = 0; k < full.points.size(); ++k) {
            full.points[k].set_row(word, word_path.points[k].row(0));
        }
        full.monotonic = coordinatewise_monotonic(full.points);

        const Matrix integral = riemann_stieltjes_integrate(grad_fn, full, counter, batch);
        per_feature.set_row(word, integral.row(word));
    }

    return finish(std::move(per_feature), f, x, baseline, counter, "dig-greedy-simplified", steps,
                  rule);
}

SignedTarget predicted_class_target(const ToyModel& model, const Matrix& x) {
    const double sign = model.predict(x) == 1 ? 1.0 : -1.0;
    return SignedTarget(model, sign);
}

AttributionResult grad_times_input(const ToyModel& model, const Matrix& x,
                                   const BaselineSpec& b) {
    const SignedTarget target = predicted_class_target(model, x);
    CallCounter counter;
    AttributionResult r = grad_times_input(target, x, full_baseline(x, b, &model), counter);
    r.baseline = b.kind;
    return r;
}

AttributionResult integrated_gradients(const ToyModel& model, const Matrix& x,
                                       const BaselineSpec& b, std::size_t steps,
                                       QuadratureRule rule, std::size_t batch) {
    const SignedTarget target = predicted_class_target(model, x);
    CallCounter counter;
    AttributionResult r =
        integrated_gradients(target, x, full_baseline(x, b, &model), steps, rule, counter, batch);
    r.baseline = b.kind;
    return r;
}

AttributionResult sequential_integrated_gradients(const ToyModel& model, const Matrix& x,
                                                  const BaselineSpec& b, std::size_t steps,
                                                  QuadratureRule rule, std::size_t batch) {
    const SignedTarget target = predicted_class_target(model, x);
    CallCounter counter;
    AttributionResult r = sequential_integrated_gradients(target, x, full_baseline(x, b, &model),
                                                          steps, rule, counter, batch);
    r.baseline = b.kind;
    return r;
}

AttributionResult gradient_shap(const ToyModel& model, const Matrix& x, const BaselineSpec& b,
                                std::size_t samples, double noise_std, Rng& rng) {
    const SignedTarget target = predicted_class_target(model, x);
    CallCounter counter;
    AttributionResult r =
        gradient_shap(target, x, full_baseline(x, b, &model), samples, noise_std, rng, counter);
    r.baseline = b.kind;
    return r;
}

AttributionResult discretized_integrated_gradients(const ToyModel& model, const Matrix& x,
                                                   const BaselineSpec& b, std::size_t steps,
                                                   QuadratureRule rule, std::size_t batch) {
    const SignedTarget target = predicted_class_target(model, x);
    CallCounter counter;
    AttributionResult r = discretized_integrated_gradients(
        target, x, full_baseline(x, b, &model), model.embedding_table(), steps, rule, counter,
        batch);
    r.baseline = b.kind;
    return r;
}

const std::vector<std::string>& attribution_method_names() {
    static const std::vector<std::string> names = {"grad-input", "ig", "sig", "gradient-shap",
                                                   "dig-greedy-simplified"};
    return names;
}

namespace {

std::uint64_t token_content_hash(const TokenSequence& tokens) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::size_t id : tokens) h = mix_seed(h, id + 1);
    return h;
}

} // namespace

AttributionResult run_attribution(const ToyModel& model, const Matrix& x, const RunConfig& config,
                                  const TokenSequence* tokens) {
    const BaselineSpec b{config.baseline, std::nullopt};
    if (config.method == "grad-input") return grad_times_input(model, x, b);
    if (config.method == "ig") {
        return integrated_gradients(model, x, b, config.steps, config.rule, config.batch);
    }
    if (config.method == "sig") {
        return sequential_integrated_gradients(model, x, b, config.steps, config.rule,
                                               config.batch);
    }
    if (config.method == "gradient-shap") {
        double noise = config.shap_noise;
        if (noise < 0.0) {
            // Default: 0.1 x population std of the embedding table.
            const Matrix& table = model.embedding_table();
            const double mean = table.sum() / static_cast<double>(table.size());
            double var = 0.0;
            for (double v : table.data()) var += (v - mean) * (v - mean);
            var /= static_cast<double>(table.size());
            noise = 0.1 * std::sqrt(var);
        }
        std::uint64_t seed = config.seed;
        if (tokens != nullptr) seed = mix_seed(seed, token_content_hash(*tokens));
        Rng rng(seed);
        return gradient_shap(model, x, b, config.shap_samples, noise, rng);
    }
    if (config.method == "dig-greedy-simplified") {
        return discretized_integrated_gradients(model, x, b, config.steps, config.rule,
                                                config.batch);
    }
    std::string names;
    for (const auto& n : attribution_method_names()) {
        if (!names.empty()) names += ", ";
        names += n;
    }
    throw input_error("unknown method \"" + config.method + "\"; valid methods: " + names);
}

} // namespace pathgrad

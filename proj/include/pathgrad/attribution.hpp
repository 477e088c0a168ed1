#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathgrad/matrix.hpp"
#include "pathgrad/model.hpp"
#include "pathgrad/path.hpp"
#include "pathgrad/rng.hpp"

namespace pathgrad {

struct AttributionResult {
    Matrix per_feature;                        // m x n raw attribution
    std::vector<double> per_word;              // length m, normalized
    std::string method;
    BaselineKind baseline = BaselineKind::mask_token;
    std::size_t steps = 0;
    QuadratureRule rule = QuadratureRule::trapezoid;
    double delta = 0.0;                        // global completeness residual
    std::vector<double> per_word_completeness; // per-word residuals (sig only)
    std::size_t gradient_calls = 0;
};

/// Per-word scores: s_i = sum_j per_feature_ij, scaled to unit Euclidean
/// norm when the norm exceeds 1e-12, otherwise returned as-is.
std::vector<double> normalize_word_attributions(const Matrix& per_feature);

/// sum_ij per_feature - (F(x) - F(baseline)); two forward calls.
double delta_diagnostic(const Matrix& per_feature, const DifferentiableModel& f, const Matrix& x,
                        const Matrix& baseline, CallCounter& counter);

// Core methods over a raw scalar field and an explicit full baseline matrix
// (row i of which is word i's baseline embedding).

AttributionResult grad_times_input(const DifferentiableModel& f, const Matrix& x,
                                   const Matrix& baseline_for_delta, CallCounter& counter);

AttributionResult integrated_gradients(const DifferentiableModel& f, const Matrix& x,
                                       const Matrix& baseline, std::size_t steps,
                                       QuadratureRule rule, CallCounter& counter,
                                       std::size_t batch = 64);

AttributionResult sequential_integrated_gradients(const DifferentiableModel& f, const Matrix& x,
                                                  const Matrix& baseline, std::size_t steps,
                                                  QuadratureRule rule, CallCounter& counter,
                                                  std::size_t batch = 64);

AttributionResult gradient_shap(const DifferentiableModel& f, const Matrix& x,
                                const Matrix& baseline, std::size_t samples, double noise_std,
                                Rng& rng, CallCounter& counter);

AttributionResult discretized_integrated_gradients(const DifferentiableModel& f, const Matrix& x,
                                                   const Matrix& baseline,
                                                   const Matrix& candidates, std::size_t steps,
                                                   QuadratureRule rule, CallCounter& counter,
                                                   std::size_t batch = 64);

// Classifier-facing overloads. The attribution target is the logit of the
// class predicted at x (sign-flipped for the negative class) so that higher
// F always means more of the predicted class; the sign is fixed once at x
// and applied along the whole path.

/// Signed view of a model; sign = +1 for predicted positive, -1 otherwise.
class SignedTarget : public DifferentiableModel {
public:
    SignedTarget(const DifferentiableModel& inner, double sign) : inner_(&inner), sign_(sign) {}
    double value(const Matrix& x) const override { return sign_ * inner_->value(x); }
    Matrix gradient(const Matrix& x) const override { return scale(inner_->gradient(x), sign_); }
    double sign() const noexcept { return sign_; }

private:
    const DifferentiableModel* inner_;
    double sign_;
};

SignedTarget predicted_class_target(const ToyModel& model, const Matrix& x);

AttributionResult grad_times_input(const ToyModel& model, const Matrix& x,
                                   const BaselineSpec& b = BaselineSpec::mask());
AttributionResult integrated_gradients(const ToyModel& model, const Matrix& x,
                                       const BaselineSpec& b, std::size_t steps,
                                       QuadratureRule rule = QuadratureRule::trapezoid,
                                       std::size_t batch = 64);
AttributionResult sequential_integrated_gradients(const ToyModel& model, const Matrix& x,
                                                  const BaselineSpec& b, std::size_t steps,
                                                  QuadratureRule rule = QuadratureRule::trapezoid,
                                                  std::size_t batch = 64);
AttributionResult gradient_shap(const ToyModel& model, const Matrix& x, const BaselineSpec& b,
                                std::size_t samples, double noise_std, Rng& rng);
AttributionResult discretized_integrated_gradients(const ToyModel& model, const Matrix& x,
                                                   const BaselineSpec& b, std::size_t steps,
                                                   QuadratureRule rule = QuadratureRule::trapezoid,
                                                   std::size_t batch = 64);

/// One attribution run configuration; shared by the CLI and evaluation.
struct RunConfig {
    std::string method = "sig"; // grad-input | ig | sig | gradient-shap | dig-greedy-simplified
    BaselineKind baseline = BaselineKind::mask_token;
    std::size_t steps = 50;
    QuadratureRule rule = QuadratureRule::trapezoid;
    double fraction = 0.2;
    std::uint64_t seed = 0;
    std::size_t batch = 64;
    std::size_t shap_samples = 50;
    double shap_noise = -1.0; // < 0: 0.1 x std of embedding-table entries
};

const std::vector<std::string>& attribution_method_names();

/// Dispatch by config.method; throws input_error listing valid names for an
/// unknown method. When `tokens` is given, stochastic methods derive their
/// stream from (seed, token content) so identical sentences get identical
/// draws wherever they appear.
AttributionResult run_attribution(const ToyModel& model, const Matrix& x, const RunConfig& config,
                                  const TokenSequence* tokens = nullptr);

} // namespace pathgrad

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pathgrad/attribution.hpp"
#include "pathgrad/corpus.hpp"
#include "pathgrad/model.hpp"

namespace pathgrad {

enum class MaskingMode { mask_top, keep_only_top };

struct MaskingPlan {
    MaskingMode mode = MaskingMode::mask_top;
    double fraction = 0.2;          // in (0, 1]
    std::size_t replacement_id = 0; // defaults to the model's mask id at apply time
};

/// Indices of the k = max(1, round(fraction * m)) largest per-word scores,
/// round-half-up; ties broken by lower index first.
std::vector<std::size_t> select_top_tokens(const std::vector<double>& per_word, double fraction);

/// mask-top replaces the selected ids; keep-only-top replaces everything
/// else. Length is unchanged.
TokenSequence apply_masking(const TokenSequence& tokens, const MaskingPlan& plan,
                            const std::vector<std::size_t>& selected);

/// Per-sentence probability probes shared by the three metrics. The
/// predicted class is fixed on the original input; masked probes replace
/// tokens by the model's mask token.
struct MaskedProbes {
    int predicted = 1;
    double p_orig = 0.0;
    double p_mask_top = 0.0;
    double p_keep_top = 0.0;
    std::vector<std::size_t> selected;
};

MaskedProbes masked_probabilities(const ToyModel& model, const TokenSequence& tokens,
                                  const std::vector<double>& per_word, double fraction);

/// log(p_masked / p_orig) for the original predicted class, top fraction
/// masked; probabilities floored at 1e-12. More negative is better.
double log_odds(const ToyModel& model, const TokenSequence& tokens,
                const std::vector<double>& per_word, double fraction);

/// p_orig - p_mask-top; higher is better.
double comprehensiveness(const ToyModel& model, const TokenSequence& tokens,
                         const std::vector<double>& per_word, double fraction);

/// p_orig - p_keep-only-top; lower is better.
double sufficiency(const ToyModel& model, const TokenSequence& tokens,
                   const std::vector<double>& per_word, double fraction);

struct SentenceMetrics {
    std::size_t id = 0;
    int predicted = 0;
    double p_orig = 0.0;
    double p_mask_top = 0.0;
    double p_keep_top = 0.0;
    double log_odds = 0.0;
    double comprehensiveness = 0.0;
    double sufficiency = 0.0;
    std::vector<std::size_t> selected;
};

struct MetricReport {
    double mean_log_odds = 0.0;
    double mean_comprehensiveness = 0.0;
    double mean_sufficiency = 0.0;
    std::vector<SentenceMetrics> per_sentence;
    std::vector<std::pair<std::size_t, std::string>> failures; // (sentence id, reason)
};

/// Runs the configured attribution on every sentence and aggregates the
/// three metrics. Per-sentence failures are recorded and excluded from the
/// means, never silently dropped.
MetricReport evaluate_corpus(const ToyModel& model, const Corpus& corpus, const RunConfig& config);

/// Same aggregation over externally supplied per-word scores (one vector
/// per sentence); used for random-attribution baselines.
MetricReport evaluate_corpus_with_scores(const ToyModel& model, const Corpus& corpus,
                                         const std::vector<std::vector<double>>& scores,
                                         double fraction);

inline constexpr double kProbabilityFloor = 1e-12;

} // namespace pathgrad

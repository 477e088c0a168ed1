#include "pathgrad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "pathgrad/errors.hpp"

namespace pathgrad {

std::vector<std::size_t> select_top_tokens(const std::vector<double>& per_word, double fraction) {
    if (per_word.empty()) throw input_error("select_top_tokens: per_word must be non-empty");
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw input_error("select_top_tokens: fraction must be in (0, 1]");
    }
    const std::size_t m = per_word.size();
    const auto k = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(fraction * static_cast<double>(m))));

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return per_word[a] > per_word[b]; });
    order.resize(std::min(k, m));
    std::sort(order.begin(), order.end());
    return order;
}

TokenSequence apply_masking(const TokenSequence& tokens, const MaskingPlan& plan,
                            const std::vector<std::size_t>& selected) {
    for (std::size_t idx : selected) {
        if (idx >= tokens.size()) throw input_error("apply_masking: selected index out of range");
    }
    std::vector<bool> in_set(tokens.size(), false);
    for (std::size_t idx : selected) in_set[idx] = true;

    TokenSequence out = tokens;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const bool replace =
            plan.mode == MaskingMode::mask_top ? in_set[i] : !in_set[i];
        if (replace) out[i] = plan.replacement_id;
    }
    return out;
}

MaskedProbes masked_probabilities(const ToyModel& model, const TokenSequence& tokens,
                                  const std::vector<double>& per_word, double fraction) {
    if (tokens.size() != per_word.size()) {
        throw input_error("masked_probabilities: per_word length must match sentence length");
    }
    MaskedProbes probes;
    probes.selected = select_top_tokens(per_word, fraction);

    const Matrix x = model.embed(tokens);
    probes.predicted = model.predict(x);
    const auto proba = model.predict_proba(x);
    probes.p_orig = probes.predicted == 1 ? proba.second : proba.first;

    MaskingPlan plan;
    plan.fraction = fraction;
    plan.replacement_id = model.vocabulary().mask_id();

    plan.mode = MaskingMode::mask_top;
    const auto masked = model.predict_proba(model.embed(apply_masking(tokens, plan, probes.selected)));
    probes.p_mask_top = probes.predicted == 1 ? masked.second : masked.first;

    plan.mode = MaskingMode::keep_only_top;
    const auto kept = model.predict_proba(model.embed(apply_masking(tokens, plan, probes.selected)));
    probes.p_keep_top = probes.predicted == 1 ? kept.second : kept.first;
    return probes;
}

double log_odds(const ToyModel& model, const TokenSequence& tokens,
                const std::vector<double>& per_word, double fraction) {
    const MaskedProbes p = masked_probabilities(model, tokens, per_word, fraction);
    return std::log(std::max(p.p_mask_top, kProbabilityFloor)) -
           std::log(std::max(p.p_orig, kProbabilityFloor));
}

double comprehensiveness(const ToyModel& model, const TokenSequence& tokens,
                         const std::vector<double>& per_word, double fraction) {
    const MaskedProbes p = masked_probabilities(model, tokens, per_word, fraction);
    return p.p_orig - p.p_mask_top;
}

double sufficiency(const ToyModel& model, const TokenSequence& tokens,
                   const std::vector<double>& per_word, double fraction) {
    const MaskedProbes p = masked_probabilities(model, tokens, per_word, fraction);
    return p.p_orig - p.p_keep_top;
}

namespace {

MetricReport aggregate(const ToyModel& model, const Corpus& corpus, double fraction,
                       const std::function<std::vector<double>(std::size_t, const TokenSequence&,
                                                               const Matrix&)>& score_fn) {
    if (corpus.sentences.empty()) throw input_error("evaluate_corpus: corpus must not be empty");

    MetricReport report;
    report.per_sentence.reserve(corpus.sentences.size());

    for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
        const auto& sentence = corpus.sentences[s];
        try {
            const TokenSequence ids = corpus.vocabulary.encode(sentence.tokens);
            const Matrix x = model.embed(ids);
            const std::vector<double> per_word = score_fn(s, ids, x);

            const MaskedProbes probes = masked_probabilities(model, ids, per_word, fraction);
            SentenceMetrics rec;
            rec.id = sentence.id;
            rec.predicted = probes.predicted;
            rec.p_orig = probes.p_orig;
            rec.p_mask_top = probes.p_mask_top;
            rec.p_keep_top = probes.p_keep_top;
            rec.selected = probes.selected;
            rec.log_odds = std::log(std::max(probes.p_mask_top, kProbabilityFloor)) -
                           std::log(std::max(probes.p_orig, kProbabilityFloor));
            rec.comprehensiveness = probes.p_orig - probes.p_mask_top;
            rec.sufficiency = probes.p_orig - probes.p_keep_top;
            report.per_sentence.push_back(std::move(rec));
        } catch (const std::exception& e) {
            report.failures.emplace_back(sentence.id, e.what());
        }
    }

    std::sort(report.per_sentence.begin(), report.per_sentence.end(),
              [](const SentenceMetrics& a, const SentenceMetrics& b) { return a.id < b.id; });

    if (!report.per_sentence.empty()) {
        double lo = 0.0, comp = 0.0, suff = 0.0;
        for (const auto& rec : report.per_sentence) {
            lo += rec.log_odds;
            comp += rec.comprehensiveness;
            suff += rec.sufficiency;
        }
        const double inv = 1.0 / static_cast<double>(report.per_sentence.size());
        report.mean_log_odds = lo * inv;
        report.mean_comprehensiveness = comp * inv;
        report.mean_sufficiency = suff * inv;
    }
    return report;
}

} // namespace

MetricReport evaluate_corpus(const ToyModel& model, const Corpus& corpus,
                             const RunConfig& config) {
    return aggregate(model, corpus, config.fraction,
                     [&](std::size_t, const TokenSequence& ids, const Matrix& x) {
                         return run_attribution(model, x, config, &ids).per_word;
                     });
}

MetricReport evaluate_corpus_with_scores(const ToyModel& model, const Corpus& corpus,
                                         const std::vector<std::vector<double>>& scores,
                                         double fraction) {
    if (scores.size() != corpus.sentences.size()) {
        throw input_error("evaluate_corpus_with_scores: one score vector per sentence required");
    }
    return aggregate(model, corpus, fraction,
                     [&](std::size_t s, const TokenSequence&, const Matrix&) { return scores[s]; });
}

} // namespace pathgrad

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pathgrad/corpus.hpp"
#include "pathgrad/errors.hpp"
#include "pathgrad/metrics.hpp"
#include "pathgrad/train.hpp"

using namespace pathgrad;

namespace {

ToyModel trained_model(const Corpus& corpus, std::size_t epochs = 150) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    return train_toy_classifier(corpus, cfg);
}

} // namespace

TEST_CASE("select_top_tokens counting and tie-breaking") {
    std::vector<double> ten(10);
    for (std::size_t i = 0; i < 10; ++i) ten[i] = static_cast<double>(i);
    CHECK(select_top_tokens(ten, 0.2).size() == 2);
    CHECK(select_top_tokens(ten, 0.2) == std::vector<std::size_t>{8, 9});

    const std::vector<double> equal(5, 1.0);
    CHECK(select_top_tokens(equal, 0.2) == std::vector<std::size_t>{0});

    const std::vector<double> trio = {0.1, 0.9, 0.5};
    // Sorting oracle: k = max(1, round(0.34 * 3)) = 1, argmax is index 1.
    CHECK(select_top_tokens(trio, 0.34) == std::vector<std::size_t>{1});

    CHECK_THROWS_AS(select_top_tokens(trio, 0.0), input_error);
    CHECK_THROWS_AS(select_top_tokens(trio, 1.5), input_error);
}

TEST_CASE("select_top_tokens size law and scale invariance") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + rng.next_below(15);
        const double fraction = 0.05 + 0.95 * rng.next_unit();
        std::vector<double> scores(m);
        for (auto& v : scores) v = rng.next_gaussian();

        const auto selected = select_top_tokens(scores, fraction);
        const auto expected = std::max<long long>(1, std::llround(fraction * double(m)));
        CHECK(selected.size() == static_cast<std::size_t>(expected));

        std::vector<double> rescaled(scores);
        for (auto& v : rescaled) v *= 3.7;
        CHECK(select_top_tokens(rescaled, fraction) == selected);
    }
}

TEST_CASE("apply_masking covers both modes") {
    const TokenSequence tokens = {5, 6, 7, 8};
    MaskingPlan plan;
    plan.replacement_id = 1;

    plan.mode = MaskingMode::mask_top;
    CHECK(apply_masking(tokens, plan, {}) == tokens);

    plan.mode = MaskingMode::keep_only_top;
    CHECK(apply_masking(tokens, plan, {0, 1, 2, 3}) == tokens);

    const std::vector<std::size_t> selected = {1, 3};
    plan.mode = MaskingMode::mask_top;
    const TokenSequence masked = apply_masking(tokens, plan, selected);
    plan.mode = MaskingMode::keep_only_top;
    const TokenSequence kept = apply_masking(tokens, plan, selected);
    // The two outputs agree exactly on the selected positions and the
    // keep-only output is fully masked elsewhere.
    for (std::size_t idx : selected) CHECK(masked[idx] == plan.replacement_id);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const bool in_set = std::find(selected.begin(), selected.end(), i) != selected.end();
        if (in_set) {
            CHECK(kept[i] == tokens[i]);
        } else {
            CHECK(kept[i] == plan.replacement_id);
            CHECK(masked[i] == tokens[i]);
        }
    }

    CHECK_THROWS_AS(apply_masking(tokens, plan, {9}), input_error);
}

TEST_CASE("log-odds of a no-op masking is zero") {
    const Corpus corpus = generate_synthetic_corpus(30, kDefaultVocabSize, 7);
    const ToyModel model = trained_model(corpus, 40);
    const std::size_t mask_id = corpus.vocabulary.mask_id();

    // The selected position already holds the replacement token.
    TokenSequence tokens = corpus.vocabulary.encode(corpus.sentences[0].tokens);
    tokens[0] = mask_id;
    std::vector<double> per_word(tokens.size(), 0.0);
    per_word[0] = 10.0; // force selection of position 0 at fraction small enough for k=1
    const double lo = log_odds(model, tokens, per_word, 0.01);
    CHECK(lo == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(comprehensiveness(model, tokens, per_word, 0.01) == doctest::Approx(0.0));
}

TEST_CASE("single-token sentences mask their only token") {
    const Corpus corpus = generate_synthetic_corpus(10, kDefaultVocabSize, 7);
    const ToyModel model = trained_model(corpus, 40);
    const TokenSequence tokens = {corpus.vocabulary.find("great").value()};
    const std::vector<double> per_word = {0.7};

    const Matrix x = model.embed(tokens);
    const int predicted = model.predict(x);
    const auto orig = model.predict_proba(x);
    const double p_orig = predicted == 1 ? orig.second : orig.first;
    const Matrix all_mask = model.embed({corpus.vocabulary.mask_id()});
    const auto masked = model.predict_proba(all_mask);
    const double p_masked = predicted == 1 ? masked.second : masked.first;

    const double lo = log_odds(model, tokens, per_word, 0.2);
    CHECK(lo == doctest::Approx(std::log(p_masked) - std::log(p_orig)).epsilon(1e-12));
}

TEST_CASE("comprehensiveness and sufficiency stay in [-1, 1]") {
    const Corpus corpus = generate_synthetic_corpus(60, kDefaultVocabSize, 9);
    const ToyModel model = trained_model(corpus, 60);
    Rng rng(42);
    for (const auto& s : corpus.sentences) {
        const TokenSequence tokens = corpus.vocabulary.encode(s.tokens);
        std::vector<double> per_word(tokens.size());
        for (auto& v : per_word) v = rng.next_gaussian();
        const double comp = comprehensiveness(model, tokens, per_word, 0.2);
        const double suff = sufficiency(model, tokens, per_word, 0.2);
        CHECK(comp >= -1.0);
        CHECK(comp <= 1.0);
        CHECK(suff >= -1.0);
        CHECK(suff <= 1.0);
    }
}

TEST_CASE("fraction one keeps every token: sufficiency is exactly zero") {
    const Corpus corpus = generate_synthetic_corpus(5, kDefaultVocabSize, 9);
    const ToyModel model = trained_model(corpus, 40);
    const TokenSequence tokens = corpus.vocabulary.encode(corpus.sentences[0].tokens);
    std::vector<double> per_word(tokens.size(), 0.25);
    CHECK(sufficiency(model, tokens, per_word, 1.0) == doctest::Approx(0.0).epsilon(1e-15));

    // And comprehensiveness(1.0) compares against the all-mask sentence.
    const Matrix x = model.embed(tokens);
    const int predicted = model.predict(x);
    const auto orig = model.predict_proba(x);
    const TokenSequence all_mask(tokens.size(), corpus.vocabulary.mask_id());
    const auto masked = model.predict_proba(model.embed(all_mask));
    const double expected = (predicted == 1 ? orig.second : orig.first) -
                            (predicted == 1 ? masked.second : masked.first);
    CHECK(comprehensiveness(model, tokens, per_word, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("keep-only-top retains the label-carrying token") {
    const Corpus corpus = generate_synthetic_corpus(200, kDefaultVocabSize, 7);
    const ToyModel model = trained_model(corpus, 300);
    RunConfig cfg;
    cfg.method = "sig";
    const MetricReport report = evaluate_corpus(model, corpus, cfg);
    CHECK(report.mean_sufficiency < 0.1);
}

TEST_CASE("evaluate_corpus aggregates exactly and deterministically") {
    const Corpus corpus = generate_synthetic_corpus(12, kDefaultVocabSize, 11);
    const ToyModel model = trained_model(corpus, 60);
    RunConfig cfg;
    cfg.method = "sig";
    cfg.steps = 8;

    Corpus singleton;
    singleton.vocabulary = corpus.vocabulary;
    singleton.sentences = {corpus.sentences[0]};
    const MetricReport one = evaluate_corpus(model, singleton, cfg);
    REQUIRE(one.per_sentence.size() == 1);
    CHECK(one.mean_log_odds == one.per_sentence[0].log_odds);
    CHECK(one.mean_comprehensiveness == one.per_sentence[0].comprehensiveness);
    CHECK(one.mean_sufficiency == one.per_sentence[0].sufficiency);

    // Duplicating every sentence leaves the means unchanged.
    Corpus doubled;
    doubled.vocabulary = corpus.vocabulary;
    doubled.sentences = corpus.sentences;
    for (const auto& s : corpus.sentences) {
        Sentence copy = s;
        copy.id = s.id + 1000;
        doubled.sentences.push_back(copy);
    }
    const MetricReport base = evaluate_corpus(model, corpus, cfg);
    const MetricReport twice = evaluate_corpus(model, doubled, cfg);
    CHECK(twice.mean_log_odds == doctest::Approx(base.mean_log_odds).epsilon(1e-12));
    CHECK(twice.mean_comprehensiveness ==
          doctest::Approx(base.mean_comprehensiveness).epsilon(1e-12));
    CHECK(twice.mean_sufficiency == doctest::Approx(base.mean_sufficiency).epsilon(1e-12));

    // Stochastic methods inherit the invariance through content-derived seeds.
    RunConfig shap;
    shap.method = "gradient-shap";
    shap.shap_samples = 8;
    const MetricReport shap_base = evaluate_corpus(model, corpus, shap);
    const MetricReport shap_twice = evaluate_corpus(model, doubled, shap);
    CHECK(shap_twice.mean_log_odds == doctest::Approx(shap_base.mean_log_odds).epsilon(1e-12));

    // Bit-identical reruns.
    const MetricReport again = evaluate_corpus(model, corpus, cfg);
    CHECK(again.mean_log_odds == base.mean_log_odds);
    CHECK(again.mean_comprehensiveness == base.mean_comprehensiveness);
    CHECK(again.mean_sufficiency == base.mean_sufficiency);
    REQUIRE(again.per_sentence.size() == base.per_sentence.size());
    for (std::size_t i = 0; i < base.per_sentence.size(); ++i) {
        CHECK(again.per_sentence[i].p_mask_top == base.per_sentence[i].p_mask_top);
        CHECK(again.per_sentence[i].selected == base.per_sentence[i].selected);
    }
}

TEST_CASE("per-sentence failures are recorded and excluded, never dropped silently") {
    const Corpus corpus = generate_synthetic_corpus(6, kDefaultVocabSize, 11);
    const ToyModel model = trained_model(corpus, 30);

    Corpus broken = corpus;
    broken.sentences[2].tokens = {"not-in-the-vocabulary"};
    RunConfig cfg;
    cfg.method = "grad-input";
    const MetricReport report = evaluate_corpus(model, broken, cfg);
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].first == broken.sentences[2].id);
    CHECK(report.per_sentence.size() == 5);

    // The means aggregate only the surviving sentences.
    double lo = 0.0;
    for (const auto& rec : report.per_sentence) lo += rec.log_odds;
    CHECK(report.mean_log_odds == doctest::Approx(lo / 5.0).epsilon(1e-15));
}

TEST_CASE("sig beats seeded random scores on log-odds over 200 sentences") {
    const Corpus corpus = generate_synthetic_corpus(200, kDefaultVocabSize, 7);
    const ToyModel model = trained_model(corpus, 300);

    RunConfig cfg;
    cfg.method = "sig";
    const MetricReport sig = evaluate_corpus(model, corpus, cfg);

    Rng rng(77);
    std::vector<std::vector<double>> random_scores;
    for (const auto& s : corpus.sentences) {
        std::vector<double> v(s.tokens.size());
        for (auto& e : v) e = rng.next_unit();
        random_scores.push_back(v);
    }
    const MetricReport random = evaluate_corpus_with_scores(model, corpus, random_scores, 0.2);
    CHECK(sig.mean_log_odds < random.mean_log_odds);
}

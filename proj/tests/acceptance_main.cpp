// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pathgrad/attribution.hpp"
#include "pathgrad/corpus.hpp"
#include "pathgrad/documents.hpp"
#include "pathgrad/finite_diff.hpp"
#include "pathgrad/metrics.hpp"
#include "pathgrad/model.hpp"
#include "pathgrad/model_io.hpp"
#include "pathgrad/train.hpp"

using namespace pathgrad;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& label, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

Vocabulary shared_vocab() {
    return generate_synthetic_corpus(1, kDefaultVocabSize, 7).vocabulary;
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness across architectures.
void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    const Vocabulary vocab = shared_vocab();
    double worst = 0.0;
    for (Architecture arch :
         {Architecture::linear_pool, Architecture::mlp_pool, Architecture::bilinear_attn}) {
        for (std::uint64_t s = 0; s < 20; ++s) {
            const ToyModel model = ToyModel::random_init(arch, 8, 12, vocab, 100 + s);
            Rng rng(500 + s);
            const Matrix x = sample_gaussian(rng, 6, 8, 0.0, 0.8);
            const Matrix analytic = model.gradient(x);
            const Matrix numeric = finite_difference_gradient(
                [&](const Matrix& z) { return model.forward(z); }, x, 1e-4);
            const double rel =
                max_abs_diff(analytic, numeric) / std::max(numeric.max_abs(), 1e-12);
            worst = std::max(worst, rel);
        }
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-5 && elapsed < 10.0, "autodiff vs central differences",
           fmt("max rel err %.3e, %.2f s", worst, elapsed));
}

// ---------------------------------------------------------------------------
// 2. Affine exactness of IG and SIG at a single step.
void criterion_2() {
    const Vocabulary vocab = shared_vocab();
    double worst_delta = 0.0, worst_residual = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const ToyModel model = ToyModel::random_init(Architecture::linear_pool, 8, 12, vocab, 40 + s);
        Rng rng(60 + s);
        const Matrix x = sample_gaussian(rng, 6, 8, 0.0, 1.0);
        const AttributionResult ig =
            integrated_gradients(model, x, BaselineSpec::mask(), 1, QuadratureRule::left);
        const AttributionResult sig = sequential_integrated_gradients(
            model, x, BaselineSpec::mask(), 1, QuadratureRule::left);
        worst_delta = std::max({worst_delta, std::abs(ig.delta), std::abs(sig.delta)});
        for (double r : sig.per_word_completeness) {
            worst_residual = std::max(worst_residual, std::abs(r));
        }
    }
    report(2, worst_delta <= 1e-12 && worst_residual <= 1e-12, "affine exactness at K=1",
           fmt("max |delta| %.3e, max residual %.3e", worst_delta, worst_residual));
}

// ---------------------------------------------------------------------------
// 3. Per-word completeness at quadrature scale.
void criterion_3() {
    const Vocabulary vocab = shared_vocab();
    double worst512 = 0.0;
    bool strictly_smaller = true;
    for (Architecture arch : {Architecture::mlp_pool, Architecture::bilinear_attn}) {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const ToyModel model = ToyModel::random_init(arch, 8, 12, vocab, 300 + s);
            Rng rng(900 + s);
            const Matrix x = sample_gaussian(rng, 6, 8, 0.0, 0.8);
            const AttributionResult k512 =
                sequential_integrated_gradients(model, x, BaselineSpec::mask(), 512);
            const AttributionResult k4096 =
                sequential_integrated_gradients(model, x, BaselineSpec::mask(), 4096);
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const double r512 = std::abs(k512.per_word_completeness[i]);
                const double r4096 = std::abs(k4096.per_word_completeness[i]);
                worst512 = std::max(worst512, r512);
                if (!(r4096 < r512)) strictly_smaller = false;
            }
        }
    }
    report(3, worst512 <= 1e-4 && strictly_smaller, "per-word completeness at K=512/4096",
           fmt("max residual %.3e, strict decrease %.0f", worst512, strictly_smaller ? 1.0 : 0.0));
}

// ---------------------------------------------------------------------------
// 4. Quadrature order of the IG completeness residual.
double delta_slope(QuadratureRule rule) {
    const Vocabulary vocab = shared_vocab();
    const std::vector<std::size_t> ladder = {8, 16, 32, 64, 128};
    std::vector<double> logk, logd;
    for (std::size_t K : ladder) {
        double mean = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const ToyModel model =
                ToyModel::random_init(Architecture::mlp_pool, 8, 12, vocab, 700 + s);
            Rng rng(800 + s);
            const Matrix x = sample_gaussian(rng, 6, 8, 0.0, 0.8);
            mean += std::abs(integrated_gradients(model, x, BaselineSpec::mask(), K, rule).delta);
        }
        logk.push_back(std::log(static_cast<double>(K)));
        logd.push_back(std::log(mean / 20.0));
    }
    double mean_k = 0.0, mean_d = 0.0;
    for (std::size_t i = 0; i < logk.size(); ++i) {
        mean_k += logk[i];
        mean_d += logd[i];
    }
    mean_k /= logk.size();
    mean_d /= logd.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < logk.size(); ++i) {
        num += (logk[i] - mean_k) * (logd[i] - mean_d);
        den += (logk[i] - mean_k) * (logk[i] - mean_k);
    }
    return num / den;
}

void criterion_4() {
    const double trapezoid = delta_slope(QuadratureRule::trapezoid);
    const double left = delta_slope(QuadratureRule::left);
    const bool pass = trapezoid <= -1.9 + 0.2 && left <= -0.9 + 0.2;
    report(4, pass, "quadrature order of |delta| vs K",
           fmt("trapezoid slope %.3f (<= -1.7), left slope %.3f (<= -0.7)", trapezoid, left));
}

// ---------------------------------------------------------------------------
// 5. Step-count trends: IG residual shrinks, SIG residual dominates.
struct Criterion5Result {
    double ig50 = 0.0, ig250 = 0.0;
    std::size_t sig_larger = 0, total = 0;
    std::string document;
};

Criterion5Result run_criterion_5() {
    Criterion5Result out;
    const Corpus corpus = generate_synthetic_corpus(1000, kDefaultVocabSize, 7);
    const ToyModel model = train_toy_classifier(corpus, TrainConfig{});

    std::vector<SweepRow> rows(3);
    rows[0].method = "ig";
    rows[0].steps_label = "50";
    rows[1].method = "ig";
    rows[1].steps_label = "250";
    rows[2].method = "sig";
    rows[2].steps_label = "50";

    for (std::size_t s = 0; s < 100; ++s) {
        const Matrix x = model.embed(corpus.vocabulary.encode(corpus.sentences[s].tokens));
        const AttributionResult ig50 = integrated_gradients(model, x, BaselineSpec::mask(), 50);
        const AttributionResult ig250 = integrated_gradients(model, x, BaselineSpec::mask(), 250);
        const AttributionResult sig =
            sequential_integrated_gradients(model, x, BaselineSpec::mask(), 50);
        out.ig50 += std::abs(ig50.delta);
        out.ig250 += std::abs(ig250.delta);
        rows[0].mean_abs_delta += std::abs(ig50.delta);
        rows[1].mean_abs_delta += std::abs(ig250.delta);
        rows[2].mean_abs_delta += std::abs(sig.delta);
        rows[0].gradient_calls += ig50.gradient_calls;
        rows[1].gradient_calls += ig250.gradient_calls;
        rows[2].gradient_calls += sig.gradient_calls;
        if (std::abs(sig.delta) > std::abs(ig50.delta)) ++out.sig_larger;
        ++out.total;
    }
    out.ig50 /= 100.0;
    out.ig250 /= 100.0;
    for (auto& row : rows) row.mean_abs_delta /= 100.0;
    out.document = sweep_document(rows, 0.2);
    return out;
}

void criterion_5(const Criterion5Result& r, double elapsed) {
    const bool pass =
        r.ig250 <= r.ig50 && r.sig_larger * 10 >= r.total * 9 && elapsed < 300.0;
    report(5, pass, "step-count trends at desk scale",
           fmt("ig |delta| %.2e -> %.2e, sig larger on %.0f/100", r.ig50, r.ig250,
               static_cast<double>(r.sig_larger)));
}

// ---------------------------------------------------------------------------
// 6. Gradient-call accounting.
void criterion_6() {
    const Corpus corpus = generate_synthetic_corpus(50, kDefaultVocabSize, 7);
    const ToyModel model = ToyModel::random_init(Architecture::mlp_pool, 8, 12,
                                                 corpus.vocabulary, 5);
    bool exact = true;
    const std::size_t steps = 50;
    for (const auto& sentence : corpus.sentences) {
        const TokenSequence ids = corpus.vocabulary.encode(sentence.tokens);
        const Matrix x = model.embed(ids);
        const std::size_t m = ids.size();

        const AttributionResult ig_left =
            integrated_gradients(model, x, BaselineSpec::mask(), steps, QuadratureRule::left);
        const AttributionResult ig_right =
            integrated_gradients(model, x, BaselineSpec::mask(), steps, QuadratureRule::right);
        const AttributionResult ig_trap =
            integrated_gradients(model, x, BaselineSpec::mask(), steps, QuadratureRule::trapezoid);
        const AttributionResult sig_left = sequential_integrated_gradients(
            model, x, BaselineSpec::mask(), steps, QuadratureRule::left);
        const AttributionResult sig_trap = sequential_integrated_gradients(
            model, x, BaselineSpec::mask(), steps, QuadratureRule::trapezoid);

        exact &= ig_left.gradient_calls == steps;
        exact &= ig_right.gradient_calls == steps;
        exact &= ig_trap.gradient_calls == steps + 1;
        exact &= sig_left.gradient_calls == m * steps;
        exact &= sig_trap.gradient_calls == m * (steps + 1);
    }
    report(6, exact, "gradient-call accounting",
           std::string("K / K+1 (ig), m*K / m*(K+1) (sig) on 50 sentences: ") +
               (exact ? "exact" : "mismatch"));
}

// ---------------------------------------------------------------------------
// 7. Symmetry suite.
namespace symmetry {

// Two-word model used for the global counterexample: a word-symmetric pooled
// head plus an antisymmetric coupling whose gradient vanishes exactly on the
// diagonal x1 = x2. IG's path stays on the diagonal for equal words with a
// shared baseline row, so it sees a symmetric model; SIG's per-word paths
// leave the diagonal where the coupling breaks the symmetry.
class TwoWordHead : public DifferentiableModel {
public:
    TwoWordHead(std::size_t n, double coupling, std::uint64_t seed)
        : n_(n), coupling_(coupling) {
        Rng rng(seed);
        w1_ = sample_gaussian(rng, 6, n, 0.0, 0.8);
        u_.resize(6);
        for (auto& v : u_) v = 0.6 * rng.next_gaussian();
    }

    double value(const Matrix& x) const override {
        double score = 0.0;
        for (std::size_t k = 0; k < u_.size(); ++k) {
            double z = 0.0;
            for (std::size_t j = 0; j < n_; ++j) z += w1_(k, j) * (x(0, j) + x(1, j));
            score += u_[k] * std::tanh(z);
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const double d = x(0, j) - x(1, j);
            score += coupling_ * d * d * d;
        }
        return score;
    }

    Matrix gradient(const Matrix& x) const override {
        Matrix g(2, n_);
        for (std::size_t k = 0; k < u_.size(); ++k) {
            double z = 0.0;
            for (std::size_t j = 0; j < n_; ++j) z += w1_(k, j) * (x(0, j) + x(1, j));
            const double a = std::tanh(z);
            const double back = u_[k] * (1.0 - a * a);
            for (std::size_t j = 0; j < n_; ++j) {
                g(0, j) += back * w1_(k, j);
                g(1, j) += back * w1_(k, j);
            }
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const double d = x(0, j) - x(1, j);
            g(0, j) += 3.0 * coupling_ * d * d;
            g(1, j) -= 3.0 * coupling_ * d * d;
        }
        return g;
    }

private:
    std::size_t n_;
    double coupling_;
    Matrix w1_;
    std::vector<double> u_;
};

} // namespace symmetry

void criterion_7() {
    // (a) Per-word symmetry across two embedding coordinates.
    const Vocabulary vocab = shared_vocab();
    const std::size_t j1 = 1, j2 = 3;
    ToyModel model = ToyModel::random_init(Architecture::mlp_pool, 6, 8, vocab, 27);
    auto& head = std::get<MlpHead>(model.mutable_head());
    for (std::size_t k = 0; k < head.w1.rows(); ++k) head.w1(k, j2) = head.w1(k, j1);
    auto& table = model.mutable_embedding_table();
    table(vocab.mask_id(), j2) = table(vocab.mask_id(), j1);

    Rng rng(28);
    Matrix x = sample_gaussian(rng, 4, 6, 0.0, 1.0);
    const std::size_t word = 2;
    x(word, j2) = x(word, j1);
    const AttributionResult sig_words =
        sequential_integrated_gradients(model, x, BaselineSpec::mask(), 64);
    const double word_gap = std::abs(sig_words.per_feature(word, j1) - sig_words.per_feature(word, j2));

    // (b) Two-word counterexample: IG symmetric, SIG not.
    const std::size_t n = 4;
    const symmetry::TwoWordHead two_word(n, 0.05, 31);
    Matrix pair(2, n), baseline(2, n);
    for (std::size_t j = 0; j < n; ++j) {
        pair(0, j) = 0.4 + 0.1 * static_cast<double>(j);
        pair(1, j) = pair(0, j);
        baseline(0, j) = -0.1 * static_cast<double>(j);
        baseline(1, j) = baseline(0, j);
    }
    CallCounter c1, c2;
    const AttributionResult ig =
        integrated_gradients(two_word, pair, baseline, 50, QuadratureRule::trapezoid, c1);
    const AttributionResult sig =
        sequential_integrated_gradients(two_word, pair, baseline, 50, QuadratureRule::trapezoid, c2);
    const double ig_gap = std::abs(ig.per_word[0] - ig.per_word[1]);
    const double sig_gap = std::abs(sig.per_word[0] - sig.per_word[1]);

    const bool pass = word_gap <= 1e-10 && ig_gap <= 1e-8 && sig_gap > 1e-6;
    report(7, pass, "symmetry suite",
           fmt("per-word gap %.2e, ig gap %.2e, sig gap %.2e", word_gap, ig_gap, sig_gap));
}

// ---------------------------------------------------------------------------
// 8. Non-monotonic integration against the gradient theorem.
void criterion_8() {
    const Vocabulary vocab = shared_vocab();
    const ToyModel model = ToyModel::random_init(Architecture::mlp_pool, 8, 12, vocab, 88);

    Rng rng(89);
    std::vector<Matrix> waypoints;
    for (int w = 0; w < 5; ++w) waypoints.push_back(sample_gaussian(rng, 6, 8, 0.0, 0.8));

    Path path;
    path.rule = QuadratureRule::trapezoid;
    const std::size_t pieces = waypoints.size() - 1;
    const std::size_t per_piece = 10000 / pieces;
    for (std::size_t piece = 0; piece < pieces; ++piece) {
        for (std::size_t s = 0; s < per_piece; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(per_piece);
            Matrix point(6, 8);
            for (std::size_t k = 0; k < point.size(); ++k) {
                point.data()[k] =
                    waypoints[piece].data()[k] +
                    t * (waypoints[piece + 1].data()[k] - waypoints[piece].data()[k]);
            }
            path.points.push_back(std::move(point));
            path.partition.push_back((static_cast<double>(piece) + t) / pieces);
        }
    }
    path.points.push_back(waypoints.back());
    path.partition.push_back(1.0);
    path.monotonic = coordinatewise_monotonic(path.points);

    CallCounter counter;
    const Matrix integral = riemann_stieltjes_integrate(model, path, counter);
    const double along_path = integral.sum();
    const double exact = model.forward(waypoints.back()) - model.forward(waypoints.front());
    const double error = std::abs(along_path - exact);
    report(8, error <= 1e-3 && !path.monotonic, "non-monotonic path integration",
           fmt("|sum - (F(end)-F(start))| = %.3e over 10^4 segments", error));
}

// ---------------------------------------------------------------------------
// 9. Metric sanity on the default corpus and model.
struct Criterion9Result {
    MetricReport sig, grad_input, random;
    std::string document;
};

Criterion9Result run_criterion_9() {
    Criterion9Result out;
    const Corpus corpus = generate_synthetic_corpus(1000, kDefaultVocabSize, 7);
    const ToyModel model = train_toy_classifier(corpus, TrainConfig{});

    RunConfig sig_cfg;
    sig_cfg.method = "sig";
    RunConfig gi_cfg;
    gi_cfg.method = "grad-input";
    out.sig = evaluate_corpus(model, corpus, sig_cfg);
    out.grad_input = evaluate_corpus(model, corpus, gi_cfg);

    Rng rng(mix_seed(0, 0x72616e64ULL));
    std::vector<std::vector<double>> random_scores;
    random_scores.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) {
        std::vector<double> v(s.tokens.size());
        for (auto& e : v) e = rng.next_unit();
        random_scores.push_back(std::move(v));
    }
    out.random = evaluate_corpus_with_scores(model, corpus, random_scores, 0.2);

    std::vector<EvaluateRow> rows(2);
    rows[0] = {"sig", "mask", 50, out.sig};
    rows[1] = {"grad-input", "mask", 0, out.grad_input};
    out.document = metrics_document(rows, 0.2, false);
    return out;
}

void criterion_9(const Criterion9Result& r, double elapsed) {
    const bool beats_random = r.sig.mean_log_odds < r.random.mean_log_odds &&
                              r.sig.mean_comprehensiveness > r.random.mean_comprehensiveness &&
                              r.sig.mean_sufficiency < r.random.mean_sufficiency;
    const bool beats_grad_input =
        r.sig.mean_log_odds < r.grad_input.mean_log_odds &&
        r.sig.mean_comprehensiveness > r.grad_input.mean_comprehensiveness &&
        r.sig.mean_sufficiency < r.grad_input.mean_sufficiency;
    const bool pass = beats_random && beats_grad_input && elapsed < 900.0 &&
                      r.sig.failures.empty() && r.grad_input.failures.empty();
    report(9, pass, "metric ordering on the default corpus",
           fmt("sig LO %.4f vs grad-input %.4f vs random %.4f", r.sig.mean_log_odds,
               r.grad_input.mean_log_odds, r.random.mean_log_odds));
}

// ---------------------------------------------------------------------------
// 10. Determinism of the criterion 5 and 9 pipelines.
void criterion_10(const std::string& doc5, const std::string& doc9) {
    const Criterion5Result again5 = run_criterion_5();
    const Criterion9Result again9 = run_criterion_9();
    // Wall-time fields are excluded from the rerun comparison by design: the
    // sweep document here carries only deterministic columns.
    const bool pass = again5.document == doc5 && again9.document == doc9;
    report(10, pass, "byte-identical reruns of criteria 5 and 9",
           std::string(pass ? "documents identical" : "documents differ"));
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();

    const auto t5 = std::chrono::steady_clock::now();
    const Criterion5Result r5 = run_criterion_5();
    criterion_5(r5, seconds_since(t5));

    criterion_6();
    criterion_7();
    criterion_8();

    const auto t9 = std::chrono::steady_clock::now();
    const Criterion9Result r9 = run_criterion_9();
    criterion_9(r9, seconds_since(t9));

    criterion_10(r5.document, r9.document);

    std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}

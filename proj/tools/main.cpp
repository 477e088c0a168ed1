// pathgrad command-line tool: corpus generation, training, attribution runs,
// metric sweeps and highlight reports over the toy classifiers.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pathgrad/attribution.hpp"
#include "pathgrad/corpus.hpp"
#include "pathgrad/documents.hpp"
#include "pathgrad/errors.hpp"
#include "pathgrad/highlight.hpp"
#include "pathgrad/metrics.hpp"
#include "pathgrad/model_io.hpp"
#include "pathgrad/train.hpp"

namespace {

using namespace pathgrad;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw input_error("write to \"" + path + "\" failed");
}

// Documents go to stdout unless --out is given; stderr carries diagnostics.
void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

std::optional<std::uint64_t> env_seed_override() {
    const char* raw = std::getenv("PATHGRAD_SEED");
    if (raw == nullptr) return std::nullopt;
    try {
        std::size_t consumed = 0;
        const std::string text(raw);
        const unsigned long long value = std::stoull(text, &consumed);
        if (consumed != text.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(value);
    } catch (const std::exception&) {
        throw input_error("PATHGRAD_SEED must be an unsigned integer");
    }
}

std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> words;
    std::string word;
    while (in >> word) words.push_back(word);
    return words;
}

Corpus load_corpus_with_model_vocab(const std::string& path, const ToyModel& model) {
    return corpus_from_jsonl(read_file(path), model.vocabulary());
}

std::size_t resolve_steps(const std::string& method, std::size_t requested, bool explicit_steps) {
    if (explicit_steps) return requested;
    return method == "dig-greedy-simplified" ? 30 : 50;
}

struct SweepConfigRow {
    std::string method;
    std::size_t steps = 0; // fixed steps, or the per-word factor
    bool per_word_steps = false;
};

SweepRow run_sweep_row(const ToyModel& model, const Corpus& corpus, const RunConfig& base,
                       const SweepConfigRow& item) {
    SweepRow row;
    row.method = item.method;
    row.steps = item.steps;
    row.per_word_steps = item.per_word_steps;
    row.steps_label =
        item.per_word_steps ? std::to_string(item.steps) + "xN" : std::to_string(item.steps);

    double lo = 0.0, comp = 0.0, suff = 0.0, abs_delta = 0.0;
    std::size_t counted = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& sentence : corpus.sentences) {
        const TokenSequence ids = corpus.vocabulary.encode(sentence.tokens);
        const Matrix x = model.embed(ids);
        RunConfig cfg = base;
        cfg.method = item.method;
        cfg.steps = item.per_word_steps ? item.steps * ids.size() : item.steps;
        const AttributionResult result = run_attribution(model, x, cfg, &ids);
        row.gradient_calls += result.gradient_calls;
        abs_delta += std::abs(result.delta);

        const MaskedProbes probes =
            masked_probabilities(model, ids, result.per_word, base.fraction);
        lo += std::log(std::max(probes.p_mask_top, kProbabilityFloor)) -
              std::log(std::max(probes.p_orig, kProbabilityFloor));
        comp += probes.p_orig - probes.p_mask_top;
        suff += probes.p_orig - probes.p_keep_top;
        ++counted;
    }
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    const double inv = 1.0 / static_cast<double>(counted);
    row.mean_log_odds = lo * inv;
    row.mean_comprehensiveness = comp * inv;
    row.mean_sufficiency = suff * inv;
    row.mean_abs_delta = abs_delta * inv;
    return row;
}

int run(int argc, char** argv) {
    CLI::App app{"pathgrad: path-based attribution methods over toy text classifiers"};
    app.require_subcommand(1);

    // gen-corpus -------------------------------------------------------------
    auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic sentiment corpus");
    std::size_t gen_size = 1000;
    std::size_t gen_vocab_size = kDefaultVocabSize;
    std::uint64_t gen_seed = 7;
    std::string gen_out = "corpus.jsonl";
    std::string gen_vocab_out = "vocab.txt";
    gen->add_option("--size", gen_size, "number of sentences")->capture_default_str();
    gen->add_option("--vocab-size", gen_vocab_size, "vocabulary size incl. reserved tokens")
        ->capture_default_str();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "corpus output path")->capture_default_str();
    gen->add_option("--vocab-out", gen_vocab_out, "vocabulary output path")
        ->capture_default_str();

    // train -------------------------------------------------------------------
    auto* train = app.add_subcommand("train", "train a toy classifier");
    std::string train_corpus, train_vocab, train_out = "model.json";
    std::string train_arch = "mlp-pool";
    TrainConfig train_cfg;
    train->add_option("--corpus", train_corpus, "corpus document")->required();
    train->add_option("--vocab", train_vocab, "vocabulary file")->required();
    train->add_option("--arch", train_arch, "linear-pool | mlp-pool | bilinear-attn")
        ->capture_default_str();
    train->add_option("--dim", train_cfg.embed_dim, "embedding width")->capture_default_str();
    train->add_option("--hidden", train_cfg.hidden, "hidden units (mlp-pool)")
        ->capture_default_str();
    train->add_option("--epochs", train_cfg.epochs, "training epochs")->capture_default_str();
    train->add_option("--lr", train_cfg.learning_rate, "learning rate")->capture_default_str();
    train->add_option("--seed", train_cfg.seed, "weight init / masking seed")
        ->capture_default_str();
    train->add_flag("--train-mask,!--no-train-mask", train_cfg.train_mask,
                    "train the mask embedding via token dropout");
    train->add_option("--mask-prob", train_cfg.mask_prob, "token dropout probability")
        ->capture_default_str();
    train->add_option("--out", train_out, "model output path")->capture_default_str();

    // attribute ----------------------------------------------------------------
    RunConfig run_cfg;
    std::string opt_model, opt_corpus, opt_sentence, opt_out, opt_format;
    std::vector<std::string> opt_methods, opt_baselines;

    auto* attribute = app.add_subcommand("attribute", "per-word attribution document");
    attribute->add_option("--model", opt_model, "model document")->required();
    attribute->add_option("--method", run_cfg.method,
                          "grad-input | ig | sig | gradient-shap | dig-greedy-simplified")
        ->capture_default_str();
    attribute->add_option_function<std::string>(
        "--baseline", [&](const std::string& v) { run_cfg.baseline = baseline_from_name(v); },
        "mask | pad | zero");
    attribute->add_option("--steps", run_cfg.steps, "interpolation steps")->capture_default_str();
    attribute->add_option_function<std::string>(
        "--rule", [&](const std::string& v) { run_cfg.rule = rule_from_name(v); },
        "left | right | midpoint | trapezoid");
    attribute->add_option("--fraction", run_cfg.fraction, "top fraction for top_indices")
        ->capture_default_str();
    attribute->add_option("--seed", run_cfg.seed, "run seed (stochastic methods)")
        ->capture_default_str();
    attribute->add_option("--batch", run_cfg.batch, "internal gradient batch size")
        ->capture_default_str();
    attribute->add_option("--shap-samples", run_cfg.shap_samples, "gradient-shap samples")
        ->capture_default_str();
    attribute->add_option("--shap-noise", run_cfg.shap_noise,
                          "gradient-shap noise std (<0: 0.1 x embedding std)");
    attribute->add_option("--corpus", opt_corpus, "corpus document to attribute");
    attribute->add_option("--sentence", opt_sentence, "single sentence (whitespace tokens)");
    attribute->add_option("--out", opt_out, "output path (default stdout)");
    attribute->add_option("--format", opt_format, "jsonl");

    // evaluate -------------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "metric table over (method, baseline) pairs");
    evaluate->add_option("--model", opt_model, "model document")->required();
    evaluate->add_option("--corpus", opt_corpus, "corpus document")->required();
    evaluate->add_option("--method", opt_methods, "methods (comma separated); default: all")
        ->delimiter(',');
    evaluate->add_option("--baseline", opt_baselines,
                         "baselines (comma separated); default: mask")
        ->delimiter(',');
    evaluate->add_option("--steps", run_cfg.steps,
                         "interpolation steps (default 50; 30 for dig-greedy-simplified)");
    evaluate->add_option_function<std::string>(
        "--rule", [&](const std::string& v) { run_cfg.rule = rule_from_name(v); },
        "left | right | midpoint | trapezoid");
    evaluate->add_option("--fraction", run_cfg.fraction, "top fraction")->capture_default_str();
    evaluate->add_option("--seed", run_cfg.seed, "run seed")->capture_default_str();
    evaluate->add_option("--batch", run_cfg.batch, "internal gradient batch size")
        ->capture_default_str();
    evaluate->add_option("--shap-samples", run_cfg.shap_samples, "gradient-shap samples")
        ->capture_default_str();
    evaluate->add_option("--shap-noise", run_cfg.shap_noise, "gradient-shap noise std");
    evaluate->add_option("--out", opt_out, "output path (default stdout)");
    evaluate->add_option("--format", opt_format, "jsonl | table (default table)");

    // sweep-steps -------------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep-steps", "steps-vs-quality sweep");
    std::vector<std::size_t> sweep_steps;
    std::vector<std::string> sweep_methods = {"ig", "sig"};
    sweep->add_option("--model", opt_model, "model document")->required();
    sweep->add_option("--corpus", opt_corpus, "corpus document")->required();
    sweep->add_option("--steps", sweep_steps, "extra fixed step counts (comma separated)")
        ->delimiter(',');
    sweep->add_option("--method", sweep_methods, "methods for the extra step counts")
        ->delimiter(',');
    sweep->add_option_function<std::string>(
        "--rule", [&](const std::string& v) { run_cfg.rule = rule_from_name(v); },
        "left | right | midpoint | trapezoid");
    sweep->add_option("--fraction", run_cfg.fraction, "top fraction")->capture_default_str();
    sweep->add_option("--seed", run_cfg.seed, "run seed")->capture_default_str();
    sweep->add_option("--batch", run_cfg.batch, "internal gradient batch size")
        ->capture_default_str();
    sweep->add_option("--out", opt_out, "output path (default stdout)");
    sweep->add_option("--format", opt_format, "jsonl | table (default table)");

    // report -----------------------------------------------------------------------
    auto* report = app.add_subcommand("report", "token highlight report from attribution docs");
    std::vector<std::string> report_inputs;
    report->add_option("--in", report_inputs, "attribution documents")->required();
    report->add_option("--out", opt_out, "output path (default stdout)");
    report->add_option("--format", opt_format, "text | html (default text)");

    app.parse(argc, argv);

    const auto env_seed = env_seed_override();

    if (gen->parsed()) {
        if (env_seed) gen_seed = *env_seed;
        const Corpus corpus = generate_synthetic_corpus(gen_size, gen_vocab_size, gen_seed);
        write_file(gen_out, corpus_to_jsonl(corpus));
        write_file(gen_vocab_out, vocabulary_to_text(corpus.vocabulary));
        std::cerr << "wrote " << corpus.sentences.size() << " sentences to " << gen_out
                  << " and vocabulary to " << gen_vocab_out << '\n';
        return 0;
    }

    if (train->parsed()) {
        if (env_seed) train_cfg.seed = *env_seed;
        train_cfg.architecture = architecture_from_name(train_arch);
        const Vocabulary vocab = vocabulary_from_text(read_file(train_vocab));
        const Corpus corpus = corpus_from_jsonl(read_file(train_corpus), vocab);
        const ToyModel model = train_toy_classifier(corpus, train_cfg);
        save_model(model, train_out);
        char line[64];
        std::snprintf(line, sizeof(line), "training_accuracy\t%.6f\n",
                      training_accuracy(model, corpus));
        std::cout << line;
        return 0;
    }

    if (attribute->parsed()) {
        if (env_seed) run_cfg.seed = *env_seed;
        if (!opt_format.empty() && opt_format != "jsonl") {
            throw input_error("attribute: --format must be jsonl");
        }
        run_cfg.steps = attribute->count("--steps") > 0
                            ? run_cfg.steps
                            : resolve_steps(run_cfg.method, run_cfg.steps, false);
        const ToyModel model = load_model(opt_model);

        std::vector<AttributionRecord> records;
        auto attribute_one = [&](std::size_t id, const std::vector<std::string>& words) {
            const TokenSequence ids = model.vocabulary().encode(words);
            const Matrix x = model.embed(ids);
            AttributionRecord rec;
            rec.id = id;
            rec.tokens = words;
            rec.result = run_attribution(model, x, run_cfg, &ids);
            rec.top_indices = select_top_tokens(rec.result.per_word, run_cfg.fraction);
            records.push_back(std::move(rec));
        };

        if (!opt_sentence.empty()) {
            attribute_one(0, split_words(opt_sentence));
        } else if (!opt_corpus.empty()) {
            const Corpus corpus = load_corpus_with_model_vocab(opt_corpus, model);
            for (const auto& s : corpus.sentences) attribute_one(s.id, s.tokens);
        } else {
            throw input_error("attribute: provide --corpus or --sentence");
        }
        emit(opt_out, attribution_document(run_cfg, records));
        return 0;
    }

    if (evaluate->parsed()) {
        if (env_seed) run_cfg.seed = *env_seed;
        if (opt_format.empty()) opt_format = "table";
        if (opt_format != "table" && opt_format != "jsonl") {
            throw input_error("evaluate: --format must be jsonl or table");
        }
        const ToyModel model = load_model(opt_model);
        const Corpus corpus = load_corpus_with_model_vocab(opt_corpus, model);

        if (opt_methods.empty()) opt_methods = attribution_method_names();
        if (opt_baselines.empty()) opt_baselines = {"mask"};
        const bool explicit_steps = evaluate->count("--steps") > 0;

        std::vector<EvaluateRow> rows;
        for (const auto& method : opt_methods) {
            for (const auto& baseline : opt_baselines) {
                RunConfig cfg = run_cfg;
                cfg.method = method;
                cfg.baseline = baseline_from_name(baseline);
                cfg.steps = resolve_steps(method, run_cfg.steps, explicit_steps);
                EvaluateRow row;
                row.method = method;
                row.baseline = baseline;
                row.steps = cfg.steps;
                row.report = evaluate_corpus(model, corpus, cfg);
                if (!row.report.failures.empty()) {
                    // Never emit a partial table.
                    const auto& first = row.report.failures.front();
                    throw numeric_error(
                        "evaluate: " + std::to_string(row.report.failures.size()) +
                        " sentence(s) failed for method " + method + " (first: sentence " +
                        std::to_string(first.first) + ": " + first.second + ")");
                }
                rows.push_back(std::move(row));
            }
        }
        emit(opt_out, opt_format == "table" ? metrics_table(rows)
                                            : metrics_document(rows, run_cfg.fraction));
        return 0;
    }

    if (sweep->parsed()) {
        if (env_seed) run_cfg.seed = *env_seed;
        if (opt_format.empty()) opt_format = "table";
        if (opt_format != "table" && opt_format != "jsonl") {
            throw input_error("sweep-steps: --format must be jsonl or table");
        }
        const ToyModel model = load_model(opt_model);
        const Corpus corpus = load_corpus_with_model_vocab(opt_corpus, model);

        // Reference configurations first, then any extra (method, steps) rows.
        std::vector<SweepConfigRow> items = {{"ig", 50, false},
                                             {"ig", 250, false},
                                             {"ig", 10, true},
                                             {"sig", 10, false},
                                             {"sig", 50, false}};
        for (const auto& method : sweep_methods) {
            if (method != "ig" && method != "sig") {
                throw input_error("sweep-steps: --method entries must be ig or sig");
            }
            for (std::size_t steps : sweep_steps) {
                if (steps == 0) throw input_error("sweep-steps: steps must be >= 1");
                bool duplicate = false;
                for (const auto& item : items) {
                    if (item.method == method && !item.per_word_steps && item.steps == steps) {
                        duplicate = true;
                        break;
                    }
                }
                if (!duplicate) items.push_back({method, steps, false});
            }
        }

        std::vector<SweepRow> rows;
        rows.reserve(items.size());
        for (const auto& item : items) {
            rows.push_back(run_sweep_row(model, corpus, run_cfg, item));
        }
        emit(opt_out, opt_format == "table" ? sweep_table(rows)
                                            : sweep_document(rows, run_cfg.fraction));
        return 0;
    }

    if (report->parsed()) {
        if (opt_format.empty()) opt_format = "text";
        if (opt_format != "text" && opt_format != "html") {
            throw input_error("report: --format must be text or html");
        }
        std::vector<ParsedAttribution> docs;
        docs.reserve(report_inputs.size());
        for (const auto& path : report_inputs) {
            docs.push_back(parse_attribution_document(read_file(path)));
        }
        const auto entries = build_highlights(docs);
        emit(opt_out, opt_format == "text" ? render_highlight_text(entries)
                                           : render_highlight_html(entries));
        return 0;
    }

    throw input_error("no subcommand given");
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            return CLI::App().exit(e); // --help and friends
        }
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const pathgrad::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const pathgrad::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

#pragma once

#include <string>
#include <vector>

#include "pathgrad/attribution.hpp"
#include "pathgrad/metrics.hpp"

namespace pathgrad {

/// One attributed sentence as it appears in an attribution document.
struct AttributionRecord {
    std::size_t id = 0;
    std::vector<std::string> tokens;
    AttributionResult result;
    std::vector<std::size_t> top_indices; // top-fraction tokens, includes the argmax
};

/// Line-delimited attribution document: schema header then one record per
/// sentence. Byte-deterministic for identical inputs.
std::string attribution_document(const RunConfig& config,
                                 const std::vector<AttributionRecord>& records);

/// Parsed view of an attribution document (enough for reporting).
struct ParsedAttribution {
    std::string method;
    struct Sentence {
        std::size_t id = 0;
        std::vector<std::string> tokens;
        std::vector<double> per_word;
        std::vector<std::size_t> top_indices;
    };
    std::vector<Sentence> sentences;
};

ParsedAttribution parse_attribution_document(const std::string& text);

/// One evaluate row: metrics for a (method, baseline) pair.
struct EvaluateRow {
    std::string method;
    std::string baseline;
    std::size_t steps = 0;
    MetricReport report;
};

std::string metrics_document(const std::vector<EvaluateRow>& rows, double fraction,
                             bool include_sentences = true);
std::string metrics_table(const std::vector<EvaluateRow>& rows);

/// One sweep row: metrics plus cost for a (method, steps) configuration.
struct SweepRow {
    std::string method;
    std::string steps_label; // e.g. "50" or "10xN"
    std::size_t steps = 0;   // fixed steps, or the per-word factor for 10xN
    bool per_word_steps = false;
    double mean_log_odds = 0.0;
    double mean_comprehensiveness = 0.0;
    double mean_sufficiency = 0.0;
    double mean_abs_delta = 0.0;
    std::size_t gradient_calls = 0; // total over the corpus
    double wall_time_ms = 0.0;      // logged, never asserted
};

std::string sweep_document(const std::vector<SweepRow>& rows, double fraction);
std::string sweep_table(const std::vector<SweepRow>& rows);

} // namespace pathgrad

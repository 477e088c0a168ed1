#include "pathgrad/documents.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "pathgrad/errors.hpp"

namespace pathgrad {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

std::string attribution_document(const RunConfig& config,
                                 const std::vector<AttributionRecord>& records) {
    std::ostringstream out;
    ordered_json header;
    header["format_version"] = 1;
    header["type"] = "attribution";
    header["method"] = config.method;
    header["baseline"] = baseline_name(config.baseline);
    header["steps"] = config.steps;
    header["rule"] = rule_name(config.rule);
    header["fraction"] = config.fraction;
    header["seed"] = config.seed;
    out << header.dump() << '\n';

    for (const auto& rec : records) {
        ordered_json line;
        line["id"] = rec.id;
        line["tokens"] = rec.tokens;
        line["per_word"] = rec.result.per_word;
        line["top_indices"] = rec.top_indices;
        line["delta"] = rec.result.delta;
        if (!rec.result.per_word_completeness.empty()) {
            line["per_word_completeness"] = rec.result.per_word_completeness;
        }
        line["gradient_calls"] = rec.result.gradient_calls;
        out << line.dump() << '\n';
    }
    return out.str();
}

ParsedAttribution parse_attribution_document(const std::string& text) {
    ParsedAttribution doc;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw input_error(std::string("parse_attribution_document: bad JSON: ") + e.what());
        }
        if (!saw_header) {
            if (rec.value("type", "") != "attribution" || !rec.contains("format_version")) {
                throw input_error("parse_attribution_document: missing attribution header");
            }
            doc.method = rec.value("method", "unknown");
            saw_header = true;
            continue;
        }
        ParsedAttribution::Sentence s;
        try {
            s.id = rec.at("id").get<std::size_t>();
            s.tokens = rec.at("tokens").get<std::vector<std::string>>();
            s.per_word = rec.at("per_word").get<std::vector<double>>();
            s.top_indices = rec.at("top_indices").get<std::vector<std::size_t>>();
        } catch (const nlohmann::json::exception& e) {
            throw input_error(std::string("parse_attribution_document: bad record: ") + e.what());
        }
        if (s.per_word.size() != s.tokens.size()) {
            throw input_error("parse_attribution_document: per_word/token length mismatch");
        }
        doc.sentences.push_back(std::move(s));
    }
    if (!saw_header) throw input_error("parse_attribution_document: empty document");
    return doc;
}

std::string metrics_document(const std::vector<EvaluateRow>& rows, double fraction,
                             bool include_sentences) {
    std::ostringstream out;
    ordered_json header;
    header["format_version"] = 1;
    header["type"] = "metrics";
    header["fraction"] = fraction;
    header["rows"] = rows.size();
    out << header.dump() << '\n';

    for (const auto& row : rows) {
        ordered_json line;
        line["method"] = row.method;
        line["baseline"] = row.baseline;
        line["steps"] = row.steps;
        line["log_odds"] = row.report.mean_log_odds;
        line["comprehensiveness"] = row.report.mean_comprehensiveness;
        line["sufficiency"] = row.report.mean_sufficiency;
        line["sentences"] = row.report.per_sentence.size();
        line["failed"] = row.report.failures.size();
        out << line.dump() << '\n';

        if (include_sentences) {
            for (const auto& rec : row.report.per_sentence) {
                ordered_json s;
                s["sentence"] = rec.id;
                s["method"] = row.method;
                s["baseline"] = row.baseline;
                s["predicted"] = rec.predicted;
                s["p_orig"] = rec.p_orig;
                s["p_mask_top"] = rec.p_mask_top;
                s["p_keep_top"] = rec.p_keep_top;
                s["log_odds"] = rec.log_odds;
                s["comprehensiveness"] = rec.comprehensiveness;
                s["sufficiency"] = rec.sufficiency;
                s["selected"] = rec.selected;
                out << s.dump() << '\n';
            }
        }
    }
    return out.str();
}

std::string metrics_table(const std::vector<EvaluateRow>& rows) {
    std::ostringstream out;
    out << "For ↑ metrics, the higher the better; for ↓ metrics, the lower the better.\n";
    out << "method                 baseline   LO↓        Comp↑     Suff↓\n";
    for (const auto& row : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-22s %-10s %-10s %-9s %-9s\n", row.method.c_str(),
                      row.baseline.c_str(), fixed(row.report.mean_log_odds, 4).c_str(),
                      fixed(row.report.mean_comprehensiveness, 4).c_str(),
                      fixed(row.report.mean_sufficiency, 4).c_str());
        out << buf;
    }
    return out.str();
}

std::string sweep_document(const std::vector<SweepRow>& rows, double fraction) {
    std::ostringstream out;
    ordered_json header;
    header["format_version"] = 1;
    header["type"] = "sweep";
    header["fraction"] = fraction;
    header["rows"] = rows.size();
    out << header.dump() << '\n';
    for (const auto& row : rows) {
        ordered_json line;
        line["method"] = row.method;
        line["steps"] = row.steps_label;
        line["log_odds"] = row.mean_log_odds;
        line["comprehensiveness"] = row.mean_comprehensiveness;
        line["sufficiency"] = row.mean_sufficiency;
        line["delta"] = row.mean_abs_delta;
        line["gradient_calls"] = row.gradient_calls;
        line["wall_time_ms"] = row.wall_time_ms;
        out << line.dump() << '\n';
    }
    return out.str();
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "For ↑ metrics, the higher the better; for ↓ metrics, the lower the better.\n";
    out << "method                 steps   LO↓        Comp↑     Suff↓     |delta|      grad_calls   ms\n";
    for (const auto& row : rows) {
        char buf[200];
        std::snprintf(buf, sizeof(buf), "%-22s %-7s %-10s %-9s %-9s %-12s %-12zu %s\n",
                      row.method.c_str(), row.steps_label.c_str(),
                      fixed(row.mean_log_odds, 4).c_str(),
                      fixed(row.mean_comprehensiveness, 4).c_str(),
                      fixed(row.mean_sufficiency, 4).c_str(),
                      fixed(row.mean_abs_delta, 6).c_str(), row.gradient_calls,
                      fixed(row.wall_time_ms, 1).c_str());
        out << buf;
    }
    return out.str();
}

} // namespace pathgrad

#include "pathgrad/highlight.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "pathgrad/errors.hpp"

namespace pathgrad {

namespace {

std::string escape_html(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

std::vector<HighlightEntry> build_highlights(const std::vector<ParsedAttribution>& docs) {
    // sentence id -> entries, methods in document order within a sentence.
    std::map<std::size_t, std::vector<HighlightEntry>> grouped;
    for (const auto& doc : docs) {
        for (const auto& s : doc.sentences) {
            if (s.per_word.empty()) throw input_error("build_highlights: empty sentence");
            HighlightEntry entry;
            entry.sentence_id = s.id;
            entry.method = doc.method;
            entry.tokens = s.tokens;
            entry.top_set = s.top_indices;

            std::size_t best = 0;
            for (std::size_t i = 1; i < s.per_word.size(); ++i) {
                if (s.per_word[i] > s.per_word[best]) best = i; // ties keep the lower index
            }
            entry.top1 = best;
            if (std::find(entry.top_set.begin(), entry.top_set.end(), best) ==
                entry.top_set.end()) {
                entry.top_set.push_back(best);
                std::sort(entry.top_set.begin(), entry.top_set.end());
            }
            grouped[s.id].push_back(std::move(entry));
        }
    }
    std::vector<HighlightEntry> entries;
    for (auto& [id, group] : grouped) {
        for (auto& e : group) entries.push_back(std::move(e));
    }
    return entries;
}

std::string render_highlight_text(const std::vector<HighlightEntry>& entries) {
    std::ostringstream out;
    for (const auto& e : entries) {
        out << e.sentence_id << '\t' << e.method << '\t';
        for (std::size_t i = 0; i < e.tokens.size(); ++i) {
            if (i) out << ' ';
            const bool in_top =
                std::find(e.top_set.begin(), e.top_set.end(), i) != e.top_set.end();
            if (i == e.top1) {
                out << "<<" << e.tokens[i] << ">>";
            } else if (in_top) {
                out << '[' << e.tokens[i] << ']';
            } else {
                out << e.tokens[i];
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string render_highlight_html(const std::vector<HighlightEntry>& entries) {
    std::ostringstream out;
    out << "<html><head><meta charset=\"utf-8\"/><title>attribution highlights</title></head>"
        << "<body><table>\n";
    out << "<tr><th>sentence</th><th>method</th><th>tokens</th></tr>\n";
    for (const auto& e : entries) {
        out << "<tr><td>" << e.sentence_id << "</td><td>" << escape_html(e.method)
            << "</td><td>";
        for (std::size_t i = 0; i < e.tokens.size(); ++i) {
            if (i) out << ' ';
            const bool in_top =
                std::find(e.top_set.begin(), e.top_set.end(), i) != e.top_set.end();
            const std::string token = escape_html(e.tokens[i]);
            if (i == e.top1) {
                out << "<b><u>" << token << "</u></b>";
            } else if (in_top) {
                out << "<b>" << token << "</b>";
            } else {
                out << token;
            }
        }
        out << "</td></tr>\n";
    }
    out << "</table></body></html>\n";
    return out.str();
}

} // namespace pathgrad

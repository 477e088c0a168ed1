#pragma once

#include <string>
#include <vector>

#include "pathgrad/documents.hpp"

namespace pathgrad {

/// Highlight markers for one sentence under one method: the single most
/// important token plus the top-fraction set (which always contains it).
struct HighlightEntry {
    std::size_t sentence_id = 0;
    std::string method;
    std::vector<std::string> tokens;
    std::size_t top1 = 0;
    std::vector<std::size_t> top_set;
};

/// Builds highlight entries from parsed attribution documents, grouped by
/// sentence id then method (document order).
std::vector<HighlightEntry> build_highlights(const std::vector<ParsedAttribution>& docs);

/// Plain-text rendering: <<token>> marks the most important token,
/// [token] the rest of the top set. Marking sets match the HTML rendering.
std::string render_highlight_text(const std::vector<HighlightEntry>& entries);

/// HTML rendering: <b><u>token</u></b> for the most important token,
/// <b>token</b> for the rest of the top set.
std::string render_highlight_html(const std::vector<HighlightEntry>& entries);

} // namespace pathgrad

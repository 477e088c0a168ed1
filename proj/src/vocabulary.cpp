#include "pathgrad/vocabulary.hpp"

#include <utility>

#include "pathgrad/errors.hpp"

namespace pathgrad {

Vocabulary Vocabulary::with_reserved(std::vector<std::string> words) {
    std::vector<std::string> tokens;
    tokens.reserve(words.size() + 2);
    tokens.emplace_back(kPadToken);
    tokens.emplace_back(kMaskToken);
    for (auto& w : words) tokens.push_back(std::move(w));
    return from_tokens(std::move(tokens), 0, 1);
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::size_t pad_id, std::size_t mask_id) {
    if (pad_id >= tokens.size() || mask_id >= tokens.size()) {
        throw input_error("Vocabulary: reserved ids out of range");
    }
    if (pad_id == mask_id) {
        throw input_error("Vocabulary: pad and mask ids must differ");
    }
    Vocabulary v;
    v.tokens_ = std::move(tokens);
    v.pad_id_ = pad_id;
    v.mask_id_ = mask_id;
    v.rebuild_index();
    return v;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    index_.reserve(tokens_.size());
    for (std::size_t id = 0; id < tokens_.size(); ++id) {
        auto [it, inserted] = index_.emplace(tokens_[id], id);
        if (!inserted) {
            throw input_error("Vocabulary: duplicate token \"" + tokens_[id] + "\"");
        }
    }
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

TokenSequence Vocabulary::encode(const std::vector<std::string>& words) const {
    if (words.empty()) throw input_error("Vocabulary::encode: empty sentence");
    TokenSequence ids;
    ids.reserve(words.size());
    for (const auto& w : words) {
        auto id = find(w);
        if (!id) throw input_error("Vocabulary::encode: unknown token \"" + w + "\"");
        ids.push_back(*id);
    }
    return ids;
}

} // namespace pathgrad

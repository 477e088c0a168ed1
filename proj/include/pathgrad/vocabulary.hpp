#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pathgrad {

/// Token ids for one sentence; every id must be < vocabulary size, length >= 1.
using TokenSequence = std::vector<std::size_t>;

/// Ordered token list with reserved "<pad>" and "<mask>" entries in front.
class Vocabulary {
public:
    Vocabulary() = default;

    /// Builds a vocabulary as ["<pad>", "<mask>", words...]. Throws
    /// input_error on duplicate tokens.
    static Vocabulary with_reserved(std::vector<std::string> words);

    /// Builds from a full ordered token list plus explicit reserved ids.
    static Vocabulary from_tokens(std::vector<std::string> tokens,
                                  std::size_t pad_id, std::size_t mask_id);

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const std::string& token(std::size_t id) const { return tokens_.at(id); }
    std::size_t pad_id() const noexcept { return pad_id_; }
    std::size_t mask_id() const noexcept { return mask_id_; }

    std::optional<std::size_t> find(std::string_view token) const;

    /// Converts whitespace-split words to ids; throws input_error on unknown
    /// tokens or an empty sentence.
    TokenSequence encode(const std::vector<std::string>& words) const;

    bool operator==(const Vocabulary& other) const {
        return tokens_ == other.tokens_ && pad_id_ == other.pad_id_ && mask_id_ == other.mask_id_;
    }

private:
    void rebuild_index();

    std::vector<std::string> tokens_;
    std::size_t pad_id_ = 0;
    std::size_t mask_id_ = 1;
    std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kMaskToken = "<mask>";

} // namespace pathgrad

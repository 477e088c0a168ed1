#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathgrad/vocabulary.hpp"

namespace pathgrad {

struct Sentence {
    std::size_t id = 0;
    std::vector<std::string> tokens;
    int label = 0; // 0 = negative, 1 = positive
};

struct Corpus {
    std::vector<Sentence> sentences;
    Vocabulary vocabulary;
};

/// Deterministic synthetic sentiment corpus. Sentences are 4-12 filler
/// tokens with exactly one or two lexicon words drawn from a single polarity
/// list; the label is that polarity. vocab_size counts reserved tokens,
/// fillers and both lexicons; it must fit all lexicon words plus a handful
/// of fillers.
Corpus generate_synthetic_corpus(std::size_t size, std::size_t vocab_size, std::uint64_t seed);

inline constexpr std::size_t kDefaultVocabSize = 56;

/// Line-delimited corpus document: a schema header line followed by one
/// JSON record {id, tokens, label} per sentence.
std::string corpus_to_jsonl(const Corpus& corpus);
Corpus corpus_from_jsonl(const std::string& text, const Vocabulary& vocabulary);

/// Vocabulary file: one token per line, order defines ids (pad then mask first).
std::string vocabulary_to_text(const Vocabulary& v);
Vocabulary vocabulary_from_text(const std::string& text);

} // namespace pathgrad

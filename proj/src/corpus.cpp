#include "pathgrad/corpus.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "pathgrad/errors.hpp"
#include "pathgrad/rng.hpp"

namespace pathgrad {

namespace {

const std::vector<std::string>& positive_lexicon() {
    static const std::vector<std::string> words = {
        "great",    "wonderful", "superb",   "delightful", "charming",  "brilliant",
        "moving",   "excellent", "enjoyable", "masterful",  "heartfelt", "stunning"};
    return words;
}

const std::vector<std::string>& negative_lexicon() {
    static const std::vector<std::string> words = {
        "terrible", "awful",   "dull",     "dreadful", "boring",  "clumsy",
        "bleak",    "horrible", "tedious", "lifeless", "grating", "forgettable"};
    return words;
}

const std::vector<std::string>& base_fillers() {
    static const std::vector<std::string> words = {
        "the",  "a",     "an",    "movie", "film",  "plot",  "acting", "story",
        "scene", "cast",  "script", "and",   "with",  "of",    "is",     "was",
        "this", "that",  "it",    "in",    "on",    "very",  "quite",  "rather",
        "really", "by",   "for",   "at",    "one",   "but"};
    return words;
}

} // namespace

Corpus generate_synthetic_corpus(std::size_t size, std::size_t vocab_size, std::uint64_t seed) {
    if (size < 1) throw input_error("generate_synthetic_corpus: size must be >= 1");

    const auto& pos = positive_lexicon();
    const auto& neg = negative_lexicon();
    const std::size_t reserved = 2;
    const std::size_t min_fillers = 4;
    const std::size_t min_vocab = reserved + pos.size() + neg.size() + min_fillers;
    if (vocab_size < min_vocab) {
        throw input_error("generate_synthetic_corpus: vocab_size must be >= " +
                          std::to_string(min_vocab));
    }

    std::size_t filler_count = vocab_size - reserved - pos.size() - neg.size();
    std::vector<std::string> fillers;
    fillers.reserve(filler_count);
    for (std::size_t i = 0; i < filler_count; ++i) {
        if (i < base_fillers().size()) {
            fillers.push_back(base_fillers()[i]);
        } else {
            fillers.push_back("filler" + std::to_string(i - base_fillers().size()));
        }
    }

    std::vector<std::string> words = fillers;
    words.insert(words.end(), pos.begin(), pos.end());
    words.insert(words.end(), neg.begin(), neg.end());

    Corpus corpus;
    corpus.vocabulary = Vocabulary::with_reserved(std::move(words));

    Rng rng(seed);
    corpus.sentences.reserve(size);
    for (std::size_t id = 0; id < size; ++id) {
        Sentence s;
        s.id = id;
        const std::size_t length = 4 + rng.next_below(9); // 4..12 tokens
        const bool positive = rng.next_below(2) == 1;
        const std::size_t lexicon_count = std::min<std::size_t>(1 + rng.next_below(2), length);
        const auto& lexicon = positive ? pos : neg;
        s.label = positive ? 1 : 0;

        s.tokens.resize(length);
        for (auto& t : s.tokens) t = fillers[rng.next_below(fillers.size())];

        // Distinct positions for the lexicon words.
        std::vector<std::size_t> positions;
        while (positions.size() < lexicon_count) {
            const std::size_t p = rng.next_below(length);
            if (std::find(positions.begin(), positions.end(), p) == positions.end()) {
                positions.push_back(p);
            }
        }
        for (std::size_t p : positions) s.tokens[p] = lexicon[rng.next_below(lexicon.size())];

        corpus.sentences.push_back(std::move(s));
    }
    return corpus;
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::ostringstream out;
    nlohmann::ordered_json header;
    header["format_version"] = 1;
    header["type"] = "corpus";
    header["sentences"] = corpus.sentences.size();
    out << header.dump() << '\n';
    for (const auto& s : corpus.sentences) {
        nlohmann::ordered_json rec;
        rec["id"] = s.id;
        rec["tokens"] = s.tokens;
        rec["label"] = s.label;
        out << rec.dump() << '\n';
    }
    return out.str();
}

Corpus corpus_from_jsonl(const std::string& text, const Vocabulary& vocabulary) {
    Corpus corpus;
    corpus.vocabulary = vocabulary;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    std::vector<bool> seen_ids;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw input_error(std::string("corpus_from_jsonl: bad JSON line: ") + e.what());
        }
        if (!saw_header) {
            if (!rec.contains("format_version") || rec.value("type", "") != "corpus") {
                throw input_error("corpus_from_jsonl: missing corpus header line");
            }
            saw_header = true;
            continue;
        }
        Sentence s;
        try {
            s.id = rec.at("id").get<std::size_t>();
            s.tokens = rec.at("tokens").get<std::vector<std::string>>();
            s.label = rec.at("label").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw input_error(std::string("corpus_from_jsonl: bad record: ") + e.what());
        }
        if (s.label != 0 && s.label != 1) {
            throw input_error("corpus_from_jsonl: label must be 0 or 1");
        }
        if (s.tokens.empty()) throw input_error("corpus_from_jsonl: empty sentence");
        for (const auto& t : s.tokens) {
            if (!vocabulary.find(t)) {
                throw input_error("corpus_from_jsonl: token \"" + t + "\" not in vocabulary");
            }
        }
        if (s.id >= seen_ids.size()) seen_ids.resize(s.id + 1, false);
        if (seen_ids[s.id]) throw input_error("corpus_from_jsonl: duplicate sentence id");
        seen_ids[s.id] = true;
        corpus.sentences.push_back(std::move(s));
    }
    if (!saw_header) throw input_error("corpus_from_jsonl: empty document");
    return corpus;
}

std::string vocabulary_to_text(const Vocabulary& v) {
    std::ostringstream out;
    for (const auto& t : v.tokens()) out << t << '\n';
    return out.str();
}

Vocabulary vocabulary_from_text(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) tokens.push_back(line);
    }
    if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kMaskToken) {
        throw input_error("vocabulary_from_text: first entries must be <pad> and <mask>");
    }
    return Vocabulary::from_tokens(std::move(tokens), 0, 1);
}

} // namespace pathgrad

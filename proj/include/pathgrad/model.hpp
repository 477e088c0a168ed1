#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pathgrad/matrix.hpp"
#include "pathgrad/rng.hpp"
#include "pathgrad/vocabulary.hpp"

namespace pathgrad {

/// A scalar field over embedding matrices with an exact reverse-mode
/// gradient. Attribution and integration code only needs this surface, so
/// tests can plug in hand-built fields next to the trained classifiers.
class DifferentiableModel {
public:
    virtual ~DifferentiableModel() = default;
    virtual double value(const Matrix& x) const = 0;
    virtual Matrix gradient(const Matrix& x) const = 0;
};

enum class Architecture { linear_pool, mlp_pool, bilinear_attn };
enum class Activation { tanh_act, identity };

std::string architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

/// score = bias + sum_i w . x_i (w broadcast over words).
struct LinearHead {
    std::vector<double> w;
    double bias = 0.0;
};

/// Mean-pool over words, one hidden layer, scalar readout.
struct MlpHead {
    Matrix w1;               // hidden x n
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;
    Activation activation = Activation::tanh_act;
};

/// Attention pooling (softmax over query logits) with a bilinear readout,
/// so the score couples tokens to each other.
struct AttnHead {
    std::vector<double> query; // n
    std::vector<double> w;     // n
    Matrix bilinear;           // n x n
    double bias = 0.0;
};

using Head = std::variant<LinearHead, MlpHead, AttnHead>;

/// Binary sentiment classifier F : R^{m x n} -> R over embedded token
/// sequences. Immutable once constructed; forward/gradient are pure.
class ToyModel : public DifferentiableModel {
public:
    ToyModel() = default;
    ToyModel(Architecture arch, std::size_t embed_dim, Vocabulary vocabulary,
             Matrix embedding_table, Head head, std::uint64_t seed = 0);

    /// Seeded random weights; the pad embedding row is zeroed.
    static ToyModel random_init(Architecture arch, std::size_t embed_dim, std::size_t hidden,
                                const Vocabulary& vocabulary, std::uint64_t seed);

    double value(const Matrix& x) const override { return forward(x); }
    Matrix gradient(const Matrix& x) const override;

    double forward(const Matrix& x) const;

    /// (negative, positive) probabilities; entries in (0,1), summing to 1.
    std::pair<double, double> predict_proba(const Matrix& x) const;

    /// Predicted class at x: 1 if positive probability >= 0.5 else 0.
    int predict(const Matrix& x) const;

    /// Row i = embedding of tokens[i]; throws input_error on bad ids.
    Matrix embed(const TokenSequence& tokens) const;

    Architecture architecture() const noexcept { return arch_; }
    std::size_t embed_dim() const noexcept { return embed_dim_; }
    const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
    const Matrix& embedding_table() const noexcept { return embedding_; }
    Matrix& mutable_embedding_table() noexcept { return embedding_; }
    const Head& head() const noexcept { return head_; }
    Head& mutable_head() noexcept { return head_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::span<const double> mask_row() const { return embedding_.row(vocabulary_.mask_id()); }
    std::span<const double> pad_row() const { return embedding_.row(vocabulary_.pad_id()); }

private:
    void check_input(const Matrix& x) const;

    Architecture arch_ = Architecture::linear_pool;
    std::size_t embed_dim_ = 0;
    Vocabulary vocabulary_;
    Matrix embedding_; // V x n
    Head head_;
    std::uint64_t seed_ = 0;
};

/// Numerically stable logistic function.
double sigmoid(double score);

} // namespace pathgrad

#pragma once

#include <cstdint>

#include "pathgrad/corpus.hpp"
#include "pathgrad/model.hpp"

namespace pathgrad {

struct TrainConfig {
    Architecture architecture = Architecture::mlp_pool;
    std::size_t embed_dim = 16;
    std::size_t hidden = 24;
    std::size_t epochs = 300;
    double learning_rate = 0.5;
    std::uint64_t seed = 1;
    /// When true (default) a fraction of tokens is replaced by <mask> each
    /// epoch and the mask embedding receives gradient updates, approximating
    /// a token trained to stand in for arbitrary words. When false the mask
    /// row keeps its initial value. The pad row is frozen at zero either way.
    bool train_mask = true;
    double mask_prob = 0.1;
};

/// Full-batch gradient descent on binary cross-entropy. Deterministic for a
/// given config: identical seeds produce bit-identical models.
ToyModel train_toy_classifier(const Corpus& corpus, const TrainConfig& config);

/// Fraction of corpus sentences whose predicted class matches the label.
double training_accuracy(const ToyModel& model, const Corpus& corpus);

} // namespace pathgrad

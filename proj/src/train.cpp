#include "pathgrad/train.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "pathgrad/errors.hpp"

namespace pathgrad {

namespace {

struct HeadGrads {
    // Mirrors the head layout; unused parts stay empty.
    std::vector<double> linear_w;
    double linear_bias = 0.0;
    Matrix mlp_w1;
    std::vector<double> mlp_b1, mlp_w2;
    double mlp_b2 = 0.0;
    std::vector<double> attn_query, attn_w;
    Matrix attn_bilinear;
    double attn_bias = 0.0;
};

HeadGrads zero_grads(const ToyModel& model) {
    HeadGrads g;
    if (const auto* h = std::get_if<LinearHead>(&model.head())) {
        g.linear_w.assign(h->w.size(), 0.0);
    } else if (const auto* h = std::get_if<MlpHead>(&model.head())) {
        g.mlp_w1 = Matrix(h->w1.rows(), h->w1.cols());
        g.mlp_b1.assign(h->b1.size(), 0.0);
        g.mlp_w2.assign(h->w2.size(), 0.0);
    } else {
        const auto& attn = std::get<AttnHead>(model.head());
        g.attn_query.assign(attn.query.size(), 0.0);
        g.attn_w.assign(attn.w.size(), 0.0);
        g.attn_bilinear = Matrix(attn.bilinear.rows(), attn.bilinear.cols());
    }
    return g;
}

// Accumulates d(score)/d(head params) and d(score)/d(x), both scaled by
// `upstream`, for one sentence. Returns the score.
double backprop_sentence(const ToyModel& model, const Matrix& x, double upstream,
                         HeadGrads& grads, Matrix& grad_x) {
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();

    if (const auto* h = std::get_if<LinearHead>(&model.head())) {
        double score = h->bias;
        for (std::size_t i = 0; i < m; ++i) score += dot(h->w, x.row(i));
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = x.row(i);
            auto out = grad_x.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                grads.linear_w[j] += upstream * row[j];
                out[j] = upstream * h->w[j];
            }
        }
        grads.linear_bias += upstream;
        return score;
    }

    if (const auto* h = std::get_if<MlpHead>(&model.head())) {
        std::vector<double> pooled(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = x.row(i);
            for (std::size_t j = 0; j < n; ++j) pooled[j] += row[j];
        }
        const double inv_m = 1.0 / static_cast<double>(m);
        for (auto& v : pooled) v *= inv_m;

        const std::size_t hidden = h->w2.size();
        std::vector<double> act(hidden), slope(hidden);
        double score = h->b2;
        for (std::size_t k = 0; k < hidden; ++k) {
            const double z = h->b1[k] + dot(h->w1.row(k), pooled);
            if (h->activation == Activation::tanh_act) {
                act[k] = std::tanh(z);
                slope[k] = 1.0 - act[k] * act[k];
            } else {
                act[k] = z;
                slope[k] = 1.0;
            }
            score += h->w2[k] * act[k];
        }

        std::vector<double> g_pooled(n, 0.0);
        for (std::size_t k = 0; k < hidden; ++k) {
            grads.mlp_w2[k] += upstream * act[k];
            const double back = upstream * h->w2[k] * slope[k];
            grads.mlp_b1[k] += back;
            auto w1_grad = grads.mlp_w1.row(k);
            const auto w1_row = h->w1.row(k);
            for (std::size_t j = 0; j < n; ++j) {
                w1_grad[j] += back * pooled[j];
                g_pooled[j] += back * w1_row[j];
            }
        }
        grads.mlp_b2 += upstream;

        for (auto& v : g_pooled) v *= inv_m;
        for (std::size_t i = 0; i < m; ++i) grad_x.set_row(i, g_pooled);
        return score;
    }

    const auto& h = std::get<AttnHead>(model.head());
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<double> logits(m);
    for (std::size_t i = 0; i < m; ++i) logits[i] = dot(h.query, x.row(i)) * inv_sqrt_n;
    const double peak = *std::max_element(logits.begin(), logits.end());
    std::vector<double> weights(m);
    double z_norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        weights[i] = std::exp(logits[i] - peak);
        z_norm += weights[i];
    }
    for (auto& w : weights) w /= z_norm;

    std::vector<double> pooled(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = x.row(i);
        for (std::size_t j = 0; j < n; ++j) pooled[j] += weights[i] * row[j];
    }

    double bilinear = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += h.bilinear(j, k) * pooled[k];
        bilinear += pooled[j] * acc;
    }
    const double score = dot(h.w, pooled) + bilinear + h.bias;

    std::vector<double> g_pooled(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = h.w[j];
        for (std::size_t k = 0; k < n; ++k) {
            acc += (h.bilinear(j, k) + h.bilinear(k, j)) * pooled[k];
        }
        g_pooled[j] = acc;
    }

    for (std::size_t j = 0; j < n; ++j) {
        grads.attn_w[j] += upstream * pooled[j];
        auto b_grad = grads.attn_bilinear.row(j);
        for (std::size_t k = 0; k < n; ++k) b_grad[k] += upstream * pooled[j] * pooled[k];
    }
    grads.attn_bias += upstream;

    std::vector<double> token_dots(m);
    double mean_dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        token_dots[i] = dot(x.row(i), g_pooled);
        mean_dot += weights[i] * token_dots[i];
    }

    for (std::size_t i = 0; i < m; ++i) {
        const double g_logit = weights[i] * (token_dots[i] - mean_dot);
        const auto row = x.row(i);
        auto out = grad_x.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = upstream * (weights[i] * g_pooled[j] + g_logit * h.query[j] * inv_sqrt_n);
            grads.attn_query[j] += upstream * g_logit * row[j] * inv_sqrt_n;
        }
    }
    return score;
}

void apply_update(ToyModel& model, const HeadGrads& grads, double lr) {
    if (auto* h = std::get_if<LinearHead>(&model.mutable_head())) {
        for (std::size_t j = 0; j < h->w.size(); ++j) h->w[j] -= lr * grads.linear_w[j];
        h->bias -= lr * grads.linear_bias;
    } else if (auto* h = std::get_if<MlpHead>(&model.mutable_head())) {
        for (std::size_t k = 0; k < h->w1.size(); ++k) {
            h->w1.data()[k] -= lr * grads.mlp_w1.data()[k];
        }
        for (std::size_t k = 0; k < h->b1.size(); ++k) h->b1[k] -= lr * grads.mlp_b1[k];
        for (std::size_t k = 0; k < h->w2.size(); ++k) h->w2[k] -= lr * grads.mlp_w2[k];
        h->b2 -= lr * grads.mlp_b2;
    } else {
        auto& attn = std::get<AttnHead>(model.mutable_head());
        for (std::size_t j = 0; j < attn.query.size(); ++j) {
            attn.query[j] -= lr * grads.attn_query[j];
        }
        for (std::size_t j = 0; j < attn.w.size(); ++j) attn.w[j] -= lr * grads.attn_w[j];
        for (std::size_t k = 0; k < attn.bilinear.size(); ++k) {
            attn.bilinear.data()[k] -= lr * grads.attn_bilinear.data()[k];
        }
        attn.bias -= lr * grads.attn_bias;
    }
}

} // namespace

ToyModel train_toy_classifier(const Corpus& corpus, const TrainConfig& config) {
    if (corpus.sentences.empty()) {
        throw input_error("train_toy_classifier: corpus must not be empty");
    }
    for (const auto& s : corpus.sentences) {
        if (s.label != 0 && s.label != 1) {
            throw input_error("train_toy_classifier: labels must be 0 or 1");
        }
    }

    ToyModel model = ToyModel::random_init(config.architecture, config.embed_dim, config.hidden,
                                           corpus.vocabulary, config.seed);
    const std::size_t pad = corpus.vocabulary.pad_id();
    const std::size_t mask = corpus.vocabulary.mask_id();

    std::vector<TokenSequence> encoded;
    encoded.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) encoded.push_back(corpus.vocabulary.encode(s.tokens));

    Rng mask_rng(mix_seed(config.seed, 0x6d61736bULL)); // masking substream
    const double inv_count = 1.0 / static_cast<double>(encoded.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        HeadGrads head_grads = zero_grads(model);
        Matrix embed_grads(model.embedding_table().rows(), model.embedding_table().cols());

        for (std::size_t s = 0; s < encoded.size(); ++s) {
            TokenSequence ids = encoded[s];
            if (config.train_mask) {
                for (auto& id : ids) {
                    if (mask_rng.next_unit() < config.mask_prob) id = mask;
                }
            }
            const Matrix x = model.embed(ids);
            Matrix grad_x(x.rows(), x.cols());
            // First pass just for the score; upstream depends on it.
            const double score = model.forward(x);
            const double p = sigmoid(score);
            const double y = static_cast<double>(corpus.sentences[s].label);
            const double upstream = (p - y) * inv_count;
            backprop_sentence(model, x, upstream, head_grads, grad_x);

            for (std::size_t i = 0; i < ids.size(); ++i) {
                auto dst = embed_grads.row(ids[i]);
                const auto src = grad_x.row(i);
                for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += src[j];
            }
        }

        // Frozen rows: pad always, mask unless train_mask.
        for (double& v : embed_grads.row(pad)) v = 0.0;
        if (!config.train_mask) {
            for (double& v : embed_grads.row(mask)) v = 0.0;
        }

        apply_update(model, head_grads, config.learning_rate);
        auto& table = model.mutable_embedding_table();
        for (std::size_t k = 0; k < table.size(); ++k) {
            table.data()[k] -= config.learning_rate * embed_grads.data()[k];
        }
    }
    return model;
}

double training_accuracy(const ToyModel& model, const Corpus& corpus) {
    if (corpus.sentences.empty()) {
        throw input_error("training_accuracy: corpus must not be empty");
    }
    std::size_t correct = 0;
    for (const auto& s : corpus.sentences) {
        const Matrix x = model.embed(corpus.vocabulary.encode(s.tokens));
        if (model.predict(x) == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(corpus.sentences.size());
}

} // namespace pathgrad

#include "pathgrad/model.hpp"

#include <algorithm>
#include <cmath>

#include "pathgrad/errors.hpp"

namespace pathgrad {

std::string architecture_name(Architecture a) {
    switch (a) {
        case Architecture::linear_pool: return "linear-pool";
        case Architecture::mlp_pool: return "mlp-pool";
        case Architecture::bilinear_attn: return "bilinear-attn";
    }
    return "unknown";
}

Architecture architecture_from_name(const std::string& name) {
    if (name == "linear-pool") return Architecture::linear_pool;
    if (name == "mlp-pool") return Architecture::mlp_pool;
    if (name == "bilinear-attn") return Architecture::bilinear_attn;
    throw input_error("unknown architecture \"" + name +
                      "\"; valid: linear-pool, mlp-pool, bilinear-attn");
}

double sigmoid(double score) {
    if (score >= 0.0) {
        return 1.0 / (1.0 + std::exp(-score));
    }
    const double e = std::exp(score);
    return e / (1.0 + e);
}

ToyModel::ToyModel(Architecture arch, std::size_t embed_dim, Vocabulary vocabulary,
                   Matrix embedding_table, Head head, std::uint64_t seed)
    : arch_(arch),
      embed_dim_(embed_dim),
      vocabulary_(std::move(vocabulary)),
      embedding_(std::move(embedding_table)),
      head_(std::move(head)),
      seed_(seed) {
    if (embedding_.rows() != vocabulary_.size() || embedding_.cols() != embed_dim_) {
        throw input_error("ToyModel: embedding table must be V x n");
    }
}

ToyModel ToyModel::random_init(Architecture arch, std::size_t embed_dim, std::size_t hidden,
                               const Vocabulary& vocabulary, std::uint64_t seed) {
    if (embed_dim == 0) throw input_error("ToyModel::random_init: embed_dim must be >= 1");
    Rng rng(seed);
    Matrix embedding = sample_gaussian(rng, vocabulary.size(), embed_dim, 0.0, 0.4);
    // Pad stays an exact zero vector; it is never trained.
    for (double& v : embedding.row(vocabulary.pad_id())) v = 0.0;

    Head head;
    switch (arch) {
        case Architecture::linear_pool: {
            LinearHead h;
            h.w.resize(embed_dim);
            for (auto& v : h.w) v = 0.5 * rng.next_gaussian();
            h.bias = 0.1 * rng.next_gaussian();
            head = std::move(h);
            break;
        }
        case Architecture::mlp_pool: {
            if (hidden == 0) throw input_error("ToyModel::random_init: hidden must be >= 1");
            MlpHead h;
            const double w1_std = 1.0 / std::sqrt(static_cast<double>(embed_dim));
            h.w1 = sample_gaussian(rng, hidden, embed_dim, 0.0, w1_std);
            h.b1.resize(hidden);
            for (auto& v : h.b1) v = 0.1 * rng.next_gaussian();
            const double w2_std = 1.0 / std::sqrt(static_cast<double>(hidden));
            h.w2.resize(hidden);
            for (auto& v : h.w2) v = w2_std * rng.next_gaussian();
            h.b2 = 0.1 * rng.next_gaussian();
            head = std::move(h);
            break;
        }
        case Architecture::bilinear_attn: {
            AttnHead h;
            const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(embed_dim));
            h.query.resize(embed_dim);
            for (auto& v : h.query) v = rng.next_gaussian();
            h.w.resize(embed_dim);
            for (auto& v : h.w) v = 0.7 * rng.next_gaussian();
            h.bilinear = sample_gaussian(rng, embed_dim, embed_dim, 0.0, 0.5 * inv_sqrt_n);
            h.bias = 0.1 * rng.next_gaussian();
            head = std::move(h);
            break;
        }
    }
    return ToyModel(arch, embed_dim, vocabulary, std::move(embedding), std::move(head), seed);
}

void ToyModel::check_input(const Matrix& x) const {
    if (x.rows() < 1 || x.cols() != embed_dim_) {
        throw input_error("ToyModel: input must be m x n with m >= 1, n = " +
                          std::to_string(embed_dim_));
    }
}

Matrix ToyModel::embed(const TokenSequence& tokens) const {
    if (tokens.empty()) throw input_error("ToyModel::embed: empty token sequence");
    Matrix x(tokens.size(), embed_dim_);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] >= vocabulary_.size()) {
            throw input_error("ToyModel::embed: token id " + std::to_string(tokens[i]) +
                              " out of range");
        }
        x.set_row(i, embedding_.row(tokens[i]));
    }
    return x;
}

namespace {

// Shared forward pieces for the attention head.
struct AttnForward {
    std::vector<double> weights; // softmax over query logits
    std::vector<double> pooled;  // h = sum_i a_i x_i
    double score = 0.0;
};

AttnForward attn_forward(const AttnHead& head, const Matrix& x) {
    const std::size_t m = x.rows();
    const std::size_t n = x.cols();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    AttnForward f;
    std::vector<double> logits(m);
    for (std::size_t i = 0; i < m; ++i) logits[i] = dot(head.query, x.row(i)) * inv_sqrt_n;
    const double peak = *std::max_element(logits.begin(), logits.end());
    f.weights.resize(m);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        f.weights[i] = std::exp(logits[i] - peak);
        z += f.weights[i];
    }
    for (auto& w : f.weights) w /= z;

    f.pooled.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = x.row(i);
        for (std::size_t j = 0; j < n; ++j) f.pooled[j] += f.weights[i] * row[j];
    }

    double bilinear = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += head.bilinear(j, k) * f.pooled[k];
        bilinear += f.pooled[j] * acc;
    }
    f.score = dot(head.w, f.pooled) + bilinear + head.bias;
    return f;
}

} // namespace

double ToyModel::forward(const Matrix& x) const {
    check_input(x);
    const std::size_t m = x.rows();
    const std::size_t n = embed_dim_;

    if (const auto* h = std::get_if<LinearHead>(&head_)) {
        double score = h->bias;
        for (std::size_t i = 0; i < m; ++i) score += dot(h->w, x.row(i));
        return score;
    }
    if (const auto* h = std::get_if<MlpHead>(&head_)) {
        std::vector<double> pooled(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = x.row(i);
            for (std::size_t j = 0; j < n; ++j) pooled[j] += row[j];
        }
        const double inv_m = 1.0 / static_cast<double>(m);
        for (auto& v : pooled) v *= inv_m;

        double score = h->b2;
        for (std::size_t k = 0; k < h->w2.size(); ++k) {
            double z = h->b1[k] + dot(h->w1.row(k), pooled);
            const double a = (h->activation == Activation::tanh_act) ? std::tanh(z) : z;
            score += h->w2[k] * a;
        }
        return score;
    }
    const auto& h = std::get<AttnHead>(head_);
    return attn_forward(h, x).score;
}

Matrix ToyModel::gradient(const Matrix& x) const {
    check_input(x);
    const std::size_t m = x.rows();
    const std::size_t n = embed_dim_;
    Matrix grad(m, n);

    if (const auto* h = std::get_if<LinearHead>(&head_)) {
        for (std::size_t i = 0; i < m; ++i) grad.set_row(i, h->w);
        return grad;
    }
    if (const auto* h = std::get_if<MlpHead>(&head_)) {
        std::vector<double> pooled(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto row = x.row(i);
            for (std::size_t j = 0; j < n; ++j) pooled[j] += row[j];
        }
        const double inv_m = 1.0 / static_cast<double>(m);
        for (auto& v : pooled) v *= inv_m;

        // d score / d pooled = W1^T (w2 * act'(z))
        std::vector<double> g_pooled(n, 0.0);
        for (std::size_t k = 0; k < h->w2.size(); ++k) {
            double z = h->b1[k] + dot(h->w1.row(k), pooled);
            double slope = 1.0;
            if (h->activation == Activation::tanh_act) {
                const double a = std::tanh(z);
                slope = 1.0 - a * a;
            }
            const double back = h->w2[k] * slope;
            const auto w1_row = h->w1.row(k);
            for (std::size_t j = 0; j < n; ++j) g_pooled[j] += back * w1_row[j];
        }
        for (auto& v : g_pooled) v *= inv_m;
        for (std::size_t i = 0; i < m; ++i) grad.set_row(i, g_pooled);
        return grad;
    }

    const auto& h = std::get<AttnHead>(head_);
    const AttnForward f = attn_forward(h, x);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    // d score / d pooled = w + (B + B^T) pooled
    std::vector<double> g_pooled(n);
    for (std::size_t j = 0; j < n; ++j) {
        double acc = h.w[j];
        for (std::size_t k = 0; k < n; ++k) {
            acc += (h.bilinear(j, k) + h.bilinear(k, j)) * f.pooled[k];
        }
        g_pooled[j] = acc;
    }

    std::vector<double> token_dots(m);
    double mean_dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        token_dots[i] = dot(x.row(i), g_pooled);
        mean_dot += f.weights[i] * token_dots[i];
    }

    for (std::size_t i = 0; i < m; ++i) {
        const double g_logit = f.weights[i] * (token_dots[i] - mean_dot);
        auto out = grad.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = f.weights[i] * g_pooled[j] + g_logit * h.query[j] * inv_sqrt_n;
        }
    }
    return grad;
}

std::pair<double, double> ToyModel::predict_proba(const Matrix& x) const {
    const double p = sigmoid(forward(x));
    return {1.0 - p, p};
}

int ToyModel::predict(const Matrix& x) const {
    return predict_proba(x).second >= 0.5 ? 1 : 0;
}

} // namespace pathgrad

#include "pathgrad/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "json.hpp"

#include "pathgrad/errors.hpp"

namespace pathgrad {

namespace {

constexpr int kModelFormatVersion = 1;

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

void write_weights(std::ostringstream& out, const std::vector<double>& values) {
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << format_weight(values[i]);
    }
    out << ']';
}

void write_matrix(std::ostringstream& out, const Matrix& m) {
    out << "{\"rows\":" << m.rows() << ",\"cols\":" << m.cols() << ",\"data\":";
    write_weights(out, m.data());
    out << '}';
}

Matrix read_matrix(const nlohmann::json& j) {
    return Matrix::from_data(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                             j.at("data").get<std::vector<double>>());
}

} // namespace

std::string format_weight(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string model_to_json(const ToyModel& model) {
    std::ostringstream out;
    out << "{\"format_version\":" << kModelFormatVersion;
    out << ",\"architecture\":\"" << architecture_name(model.architecture()) << '"';
    out << ",\"n\":" << model.embed_dim();
    out << ",\"seed\":" << model.seed();

    out << ",\"vocabulary\":{\"pad_id\":" << model.vocabulary().pad_id()
        << ",\"mask_id\":" << model.vocabulary().mask_id() << ",\"tokens\":[";
    const auto& tokens = model.vocabulary().tokens();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out << ',';
        out << '"' << escape_json(tokens[i]) << '"';
    }
    out << "]}";

    out << ",\"embedding_table\":";
    write_matrix(out, model.embedding_table());

    out << ",\"head\":{";
    if (const auto* h = std::get_if<LinearHead>(&model.head())) {
        out << "\"w\":";
        write_weights(out, h->w);
        out << ",\"bias\":" << format_weight(h->bias);
    } else if (const auto* h = std::get_if<MlpHead>(&model.head())) {
        out << "\"w1\":";
        write_matrix(out, h->w1);
        out << ",\"b1\":";
        write_weights(out, h->b1);
        out << ",\"w2\":";
        write_weights(out, h->w2);
        out << ",\"b2\":" << format_weight(h->b2);
        out << ",\"activation\":\""
            << (h->activation == Activation::tanh_act ? "tanh" : "identity") << '"';
    } else {
        const auto& attn = std::get<AttnHead>(model.head());
        out << "\"query\":";
        write_weights(out, attn.query);
        out << ",\"w\":";
        write_weights(out, attn.w);
        out << ",\"bilinear\":";
        write_matrix(out, attn.bilinear);
        out << ",\"bias\":" << format_weight(attn.bias);
    }
    out << "}}\n";
    return out.str();
}

ToyModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("model_from_json: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion) {
            throw input_error("model_from_json: unsupported format_version");
        }
        const Architecture arch = architecture_from_name(j.at("architecture").get<std::string>());
        const std::size_t n = j.at("n").get<std::size_t>();
        const std::uint64_t seed = j.at("seed").get<std::uint64_t>();

        const auto& jv = j.at("vocabulary");
        Vocabulary vocab = Vocabulary::from_tokens(
            jv.at("tokens").get<std::vector<std::string>>(),
            jv.at("pad_id").get<std::size_t>(), jv.at("mask_id").get<std::size_t>());

        Matrix embedding = read_matrix(j.at("embedding_table"));

        const auto& jh = j.at("head");
        Head head;
        if (arch == Architecture::linear_pool) {
            LinearHead h;
            h.w = jh.at("w").get<std::vector<double>>();
            h.bias = jh.at("bias").get<double>();
            head = std::move(h);
        } else if (arch == Architecture::mlp_pool) {
            MlpHead h;
            h.w1 = read_matrix(jh.at("w1"));
            h.b1 = jh.at("b1").get<std::vector<double>>();
            h.w2 = jh.at("w2").get<std::vector<double>>();
            h.b2 = jh.at("b2").get<double>();
            h.activation = jh.at("activation").get<std::string>() == "identity"
                               ? Activation::identity
                               : Activation::tanh_act;
            head = std::move(h);
        } else {
            AttnHead h;
            h.query = jh.at("query").get<std::vector<double>>();
            h.w = jh.at("w").get<std::vector<double>>();
            h.bilinear = read_matrix(jh.at("bilinear"));
            h.bias = jh.at("bias").get<double>();
            head = std::move(h);
        }
        return ToyModel(arch, n, std::move(vocab), std::move(embedding), std::move(head), seed);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("model_from_json: missing or bad field: ") + e.what());
    }
}

void save_model(const ToyModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("save_model: cannot open \"" + path + "\" for writing");
    out << model_to_json(model);
    if (!out) throw input_error("save_model: write to \"" + path + "\" failed");
}

ToyModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("load_model: cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

} // namespace pathgrad

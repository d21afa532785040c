#include "mglra/config.hpp"

#include <fstream>

#include <json.hpp>

namespace mglra {

using nlohmann::json;

void ModelConfig::adopt_header(const DatasetHeader& h) {
    d_t = h.d_t;
    d_a = h.d_a;
    d_v = h.d_v;
    n_classes = h.n_classes;
    n_speakers = h.n_speakers;
}

void ModelConfig::validate() const {
    if (d_t == 0 || d_a == 0 || d_v == 0) throw ContractError("config: feature dims must be positive");
    if (n_classes == 0) throw ContractError("config: n_classes not set");
    if (n_speakers == 0) throw ContractError("config: n_speakers not set");
    if (hidden_dim == 0 || filter_dim == 0 || relation_dim == 0 || gcn_dim == 0 || mlp_hidden == 0)
        throw ContractError("config: layer widths must be positive");
    if (mrfa_iterations == 0) throw ContractError("config: mrfa_iterations must be >= 1");
    if (n_heads == 0 || head_dim == 0) throw ContractError("config: attention dims must be positive");
    if (aleph <= 0.0 || aleph > 1.0) throw ContractError("config: aleph must be in (0, 1]");
    if (mask_rate < 0.0 || mask_rate >= 1.0) throw ContractError("config: mask_rate must be in [0, 1)");
}

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ContractError("config: learning_rate must be positive");
    if (weight_decay < 0.0) throw ContractError("config: weight_decay must be nonnegative");
    if (batch_size == 0) throw ContractError("config: batch_size must be positive");
}

void RunConfig::validate() const {
    model.validate();
    train.validate();
}

namespace {

json model_to_json(const ModelConfig& m) {
    return json{{"d_t", m.d_t},
                {"d_a", m.d_a},
                {"d_v", m.d_v},
                {"n_classes", m.n_classes},
                {"n_speakers", m.n_speakers},
                {"hidden_dim", m.hidden_dim},
                {"filter_dim", m.filter_dim},
                {"relation_dim", m.relation_dim},
                {"mrfa_iterations", m.mrfa_iterations},
                {"n_heads", m.n_heads},
                {"head_dim", m.head_dim},
                {"speaker_dim", m.speaker_dim},
                {"gcn_dim", m.gcn_dim},
                {"mlp_hidden", m.mlp_hidden},
                {"aleph", m.aleph},
                {"mask_rate", m.mask_rate},
                {"scaled_attention", m.scaled_attention},
                {"mask_at_eval", m.mask_at_eval},
                {"partner_combine", m.partner_combine == PartnerCombine::Average ? "average" : "sum"}};
}

ModelConfig model_from_json(const json& j) {
    ModelConfig m;
    m.d_t = j.value("d_t", m.d_t);
    m.d_a = j.value("d_a", m.d_a);
    m.d_v = j.value("d_v", m.d_v);
    m.n_classes = j.value("n_classes", m.n_classes);
    m.n_speakers = j.value("n_speakers", m.n_speakers);
    m.hidden_dim = j.value("hidden_dim", m.hidden_dim);
    m.filter_dim = j.value("filter_dim", m.filter_dim);
    m.relation_dim = j.value("relation_dim", m.relation_dim);
    m.mrfa_iterations = j.value("mrfa_iterations", m.mrfa_iterations);
    m.n_heads = j.value("n_heads", m.n_heads);
    m.head_dim = j.value("head_dim", m.head_dim);
    m.speaker_dim = j.value("speaker_dim", m.speaker_dim);
    m.gcn_dim = j.value("gcn_dim", m.gcn_dim);
    m.mlp_hidden = j.value("mlp_hidden", m.mlp_hidden);
    m.aleph = j.value("aleph", m.aleph);
    m.mask_rate = j.value("mask_rate", m.mask_rate);
    m.scaled_attention = j.value("scaled_attention", m.scaled_attention);
    m.mask_at_eval = j.value("mask_at_eval", m.mask_at_eval);
    const std::string combine = j.value("partner_combine", std::string("average"));
    if (combine == "average") {
        m.partner_combine = PartnerCombine::Average;
    } else if (combine == "sum") {
        m.partner_combine = PartnerCombine::Sum;
    } else {
        throw SchemaError("config: partner_combine must be 'average' or 'sum'");
    }
    return m;
}

json train_to_json(const TrainConfig& t) {
    return json{{"learning_rate", t.learning_rate}, {"weight_decay", t.weight_decay},
                {"batch_size", t.batch_size},       {"epochs", t.epochs},
                {"max_steps", t.max_steps},         {"seed", t.seed}};
}

TrainConfig train_from_json(const json& j) {
    TrainConfig t;
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.weight_decay = j.value("weight_decay", t.weight_decay);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.epochs = j.value("epochs", t.epochs);
    t.max_steps = j.value("max_steps", t.max_steps);
    t.seed = j.value("seed", t.seed);
    return t;
}

} // namespace

std::string run_config_to_json(const RunConfig& config) {
    json j{{"model", model_to_json(config.model)},
           {"train", train_to_json(config.train)},
           {"features_dir", config.features_dir},
           {"synthetic_spec", config.synthetic_spec},
           {"out_dir", config.out_dir}};
    return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed config: ") + e.what(), 1);
    }
    RunConfig c;
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    if (j.contains("train")) c.train = train_from_json(j.at("train"));
    c.features_dir = j.value("features_dir", std::string());
    c.synthetic_spec = j.value("synthetic_spec", std::string());
    c.out_dir = j.value("out_dir", c.out_dir);
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_config_from_json(text);
}

void save_run_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config: " + path);
    out << run_config_to_json(config) << "\n";
}

std::uint64_t config_hash(const RunConfig& config) {
    // The hash covers the canonical JSON text (sorted keys via nlohmann).
    return fnv1a(run_config_to_json(config));
}

} // namespace mglra

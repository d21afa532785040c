#include "mglra/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mglra/serialize.hpp"
#include "mglra/train.hpp"

namespace mglra {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

// 17 significant digits: lossless double round trip in text outputs.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct LoadedData {
    Dataset train;
    Dataset val;
    Dataset test;
};

LoadedData load_training_data(const RunConfig& config) {
    LoadedData data;
    if (!config.synthetic_spec.empty()) {
        SyntheticSpec spec = load_synthetic_spec(config.synthetic_spec);
        SyntheticDataset synth = generate_synthetic(spec);
        data.train = std::move(synth.train);
        data.val = std::move(synth.val);
        data.test = std::move(synth.test);
    } else if (!config.features_dir.empty()) {
        data.train = load_dataset(config.features_dir + "/train.jsonl");
        data.val = load_dataset(config.features_dir + "/val.jsonl");
        data.test = load_dataset(config.features_dir + "/test.jsonl");
        if (!(data.train.header == data.val.header) || !(data.train.header == data.test.header))
            throw SchemaError("train/val/test headers disagree in " + config.features_dir);
    } else {
        throw IoError("config provides neither features_dir nor synthetic_spec");
    }
    return data;
}

void write_confusion_csv(const Metrics& m, const std::string& path) {
    auto out = open_out(path);
    out << "true\\pred";
    for (std::size_t c = 0; c < m.confusion.size(); ++c) out << ",class_" << c;
    out << "\n";
    for (std::size_t t = 0; t < m.confusion.size(); ++t) {
        out << "class_" << t;
        for (std::size_t p = 0; p < m.confusion[t].size(); ++p) out << "," << m.confusion[t][p];
        out << "\n";
    }
}

void write_epochs_csv(const std::vector<EpochLog>& log, const std::string& path) {
    auto out = open_out(path);
    out << "epoch,train_loss,val_weighted_accuracy,val_weighted_f1,seconds\n";
    for (const auto& e : log)
        out << e.epoch << "," << fmt(e.train_loss) << "," << fmt(e.val_weighted_accuracy) << ","
            << fmt(e.val_weighted_f1) << "," << fmt(e.seconds) << "\n";
}

// One row per modality node: id, label, then the gcn_dim embedding values.
void write_embeddings_tsv(const MglraModel& model, const std::vector<Dialogue>& dialogues,
                          const std::string& path) {
    auto out = open_out(path);
    for (const auto& d : dialogues) {
        auto fwd = model.forward(d, MaskMode::Disabled, nullptr);
        const Tensor& emb = fwd.node_embeddings;
        for (std::size_t node = 0; node < fwd.graph.n_nodes(); ++node) {
            const auto& info = fwd.graph.nodes[node];
            out << info.dialogue_id << ":" << info.utterance_index << ":"
                << modality_name(info.modality) << "\t" << info.label;
            for (std::size_t c = 0; c < emb.cols(); ++c) out << "\t" << fmt(emb.at(node, c));
            out << "\n";
        }
    }
}

void write_graph_csv(const MglraModel& model, const std::vector<Dialogue>& dialogues,
                     const std::string& nodes_path, const std::string& edges_path) {
    auto nodes_out = open_out(nodes_path);
    auto edges_out = open_out(edges_path);
    nodes_out << "node,dialogue_id,utterance,modality,speaker,label,masked\n";
    edges_out << "dialogue_id,node_i,node_j,weight,masked\n";
    for (const auto& d : dialogues) {
        auto fwd = model.forward(d, MaskMode::Disabled, nullptr);
        const auto& g = fwd.graph;
        const std::size_t n = g.n_nodes();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& info = g.nodes[i];
            nodes_out << i << "," << info.dialogue_id << "," << info.utterance_index << ","
                      << modality_name(info.modality) << "," << info.speaker_id << ","
                      << info.label << "," << int(g.node_masked[i]) << "\n";
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                edges_out << d.dialogue_id << "," << i << "," << j << ","
                          << fmt(g.adjacency.at(i, j)) << "," << int(g.edge_masked[i * n + j])
                          << "\n";
    }
}

std::string run_training(RunConfig config, const LoadedData& data, Metrics* test_metrics_out,
                         double* wall_seconds_out) {
    config.model.adopt_header(data.train.header);
    config.validate();

    const auto start = std::chrono::steady_clock::now();
    RngStream init_rng = RngStream(config.train.seed).substream("init");
    MglraModel model = MglraModel::init(config.model, init_rng);
    TrainResult trained = train(model, data.train, data.val, config.train);
    EvalResult test = evaluate(model, data.test.dialogues, config.train.seed);
    const auto end = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(end - start).count();

    ensure_dir(config.out_dir);
    save_run_config(config, config.out_dir + "/effective_config.json");
    save_model(model, config, config.out_dir + "/model.bin");
    write_epochs_csv(trained.log, config.out_dir + "/epochs.csv");
    write_confusion_csv(test.metrics, config.out_dir + "/confusion.csv");
    write_embeddings_tsv(model, data.test.dialogues, config.out_dir + "/embeddings.tsv");
    const std::string metrics_json = metrics_to_json(test.metrics);
    open_out(config.out_dir + "/metrics.json") << metrics_json << "\n";

    if (test_metrics_out) *test_metrics_out = test.metrics;
    if (wall_seconds_out) *wall_seconds_out = seconds;
    return metrics_json;
}

} // namespace

void cmd_generate(const std::string& spec_path, const std::string& out_dir) {
    SyntheticSpec spec = load_synthetic_spec(spec_path);
    SyntheticDataset data = generate_synthetic(spec);
    ensure_dir(out_dir);
    save_dataset(data.train, out_dir + "/train.jsonl");
    save_dataset(data.val, out_dir + "/val.jsonl");
    save_dataset(data.test, out_dir + "/test.jsonl");
    json manifest{{"seed", spec.seed},
                  {"n_classes", spec.n_classes},
                  {"n_speakers", spec.n_speakers},
                  {"class_mean_separation", spec.class_mean_separation},
                  {"noise_sigma", spec.noise_sigma},
                  {"dialogues_per_split",
                   {{"train", spec.train_dialogues},
                    {"val", spec.val_dialogues},
                    {"test", spec.test_dialogues}}},
                  {"utterances_per_dialogue", spec.utterances_per_dialogue}};
    open_out(out_dir + "/manifest.json") << manifest.dump(2) << "\n";
    std::cout << "generated " << out_dir << "/{train,val,test}.jsonl (seed " << spec.seed << ")\n";
    auto counts = label_distribution(data.train.dialogues);
    std::cout << "train label distribution:";
    for (const auto& [label, count] : counts) std::cout << " " << label << ":" << count;
    std::cout << "\n";
}

std::string cmd_train(const std::string& config_path) {
    RunConfig config = load_run_config(config_path);
    LoadedData data = load_training_data(config);
    Metrics metrics;
    const std::string metrics_json = run_training(config, data, &metrics, nullptr);
    std::cout << "test weighted accuracy " << metrics.weighted_accuracy << ", weighted F1 "
              << metrics.weighted_f1 << "\n";
    return metrics_json;
}

void cmd_sweep(const std::string& parameter, const std::vector<double>& values,
               const std::string& config_path) {
    static const std::vector<std::string> sweepable = {"mask_rate", "n_heads", "T^F", "aleph"};
    if (std::find(sweepable.begin(), sweepable.end(), parameter) == sweepable.end())
        throw ContractError("unknown sweep parameter: " + parameter +
                            " (expected mask_rate, n_heads, T^F or aleph)");

    std::vector<double> unique;
    for (double v : values) {
        if (std::find(unique.begin(), unique.end(), v) != unique.end()) {
            std::cerr << "warning: duplicate sweep value " << v << " dropped\n";
            continue;
        }
        unique.push_back(v);
    }
    if (unique.empty()) throw ContractError("sweep: no values given");

    RunConfig base = load_run_config(config_path);
    LoadedData data = load_training_data(base);
    ensure_dir(base.out_dir);
    auto out = open_out(base.out_dir + "/sweep.csv");
    out << "value,weighted_accuracy,weighted_f1,wall_seconds\n";
    for (double v : unique) {
        RunConfig config = base;
        config.out_dir = base.out_dir + "/sweep_" + parameter + "_" + fmt(v);
        if (parameter == "mask_rate") {
            config.model.mask_rate = v;
        } else if (parameter == "n_heads") {
            config.model.n_heads = static_cast<std::size_t>(v);
        } else if (parameter == "T^F") {
            config.model.mrfa_iterations = static_cast<std::size_t>(v);
        } else {
            config.model.aleph = v;
        }
        Metrics metrics;
        double seconds = 0.0;
        run_training(config, data, &metrics, &seconds);
        out << fmt(v) << "," << fmt(metrics.weighted_accuracy) << "," << fmt(metrics.weighted_f1)
            << "," << fmt(seconds) << "\n";
        out.flush();
        std::cout << parameter << "=" << v << ": wa=" << metrics.weighted_accuracy
                  << " wf1=" << metrics.weighted_f1 << "\n";
    }
}

void cmd_inspect(const std::string& model_path, const std::string& features_path,
                 const std::string& out_dir) {
    LoadedModel loaded = load_model(model_path);
    Dataset data = load_dataset(features_path);
    if (data.header.n_classes != loaded.config.model.n_classes)
        throw SchemaError("inspect: feature file declares " +
                          std::to_string(data.header.n_classes) + " classes, model has " +
                          std::to_string(loaded.config.model.n_classes));
    ensure_dir(out_dir);
    EvalResult result = evaluate(loaded.model, data.dialogues, loaded.config.train.seed);
    open_out(out_dir + "/metrics.json") << metrics_to_json(result.metrics) << "\n";
    write_confusion_csv(result.metrics, out_dir + "/confusion.csv");
    write_embeddings_tsv(loaded.model, data.dialogues, out_dir + "/embeddings.tsv");
    write_graph_csv(loaded.model, data.dialogues, out_dir + "/nodes.csv", out_dir + "/graph.csv");
    std::cout << "inspect: weighted accuracy " << result.metrics.weighted_accuracy
              << ", weighted F1 " << result.metrics.weighted_f1 << "\n";
}

} // namespace mglra

#include "mglra/data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mglra {

using nlohmann::json;

std::size_t Dataset::total_utterances() const {
    std::size_t n = 0;
    for (const auto& d : dialogues) n += d.length();
    return n;
}

void SyntheticSpec::validate() const {
    if (n_classes == 0) throw ContractError("synthetic spec: n_classes must be positive");
    if (n_speakers == 0) throw ContractError("synthetic spec: n_speakers must be positive");
    if (class_mean_separation <= 0.0)
        throw ContractError("synthetic spec: class_mean_separation must be positive");
    if (noise_sigma < 0.0) throw ContractError("synthetic spec: noise_sigma must be nonnegative");
    if (train_dialogues == 0 || val_dialogues == 0 || test_dialogues == 0)
        throw ContractError("synthetic spec: all split counts must be positive");
    if (utterances_per_dialogue == 0)
        throw ContractError("synthetic spec: utterances_per_dialogue must be positive");
}

namespace {

void check_vector(const std::vector<double>& v, std::size_t expected, const char* field,
                  const std::string& dialogue_id, std::size_t index) {
    if (v.size() != expected) {
        throw SchemaError("utterance " + dialogue_id + "[" + std::to_string(index) + "]: " +
                          field + " has length " + std::to_string(v.size()) + ", header declares " +
                          std::to_string(expected));
    }
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw SchemaError("utterance " + dialogue_id + "[" + std::to_string(index) +
                              "]: non-finite value in " + field);
        }
    }
}

void validate_dialogue(const Dialogue& d, const DatasetHeader& header) {
    if (d.utterances.empty()) throw SchemaError("dialogue " + d.dialogue_id + " is empty");
    for (std::size_t i = 0; i < d.utterances.size(); ++i) {
        const auto& u = d.utterances[i];
        if (u.utterance_index != i) {
            throw SchemaError("dialogue " + d.dialogue_id + ": utterance indices not contiguous (" +
                              std::to_string(u.utterance_index) + " at position " +
                              std::to_string(i) + ")");
        }
        if (u.label >= header.n_classes) {
            throw SchemaError("dialogue " + d.dialogue_id + "[" + std::to_string(i) + "]: label " +
                              std::to_string(u.label) + " >= n_classes " +
                              std::to_string(header.n_classes));
        }
        if (u.speaker_id >= header.n_speakers) {
            throw SchemaError("dialogue " + d.dialogue_id + "[" + std::to_string(i) +
                              "]: speaker_id " + std::to_string(u.speaker_id) + " >= n_speakers " +
                              std::to_string(header.n_speakers));
        }
        check_vector(u.text, header.d_t, "text", d.dialogue_id, i);
        check_vector(u.audio, header.d_a, "audio", d.dialogue_id, i);
        check_vector(u.vision, header.d_v, "vision", d.dialogue_id, i);
    }
}

json header_to_json(const DatasetHeader& h) {
    return json{{"d_t", h.d_t},           {"d_a", h.d_a},
                {"d_v", h.d_v},           {"n_classes", h.n_classes},
                {"n_speakers", h.n_speakers}, {"class_names", h.class_names}};
}

DatasetHeader header_from_json(const json& j) {
    DatasetHeader h;
    h.d_t = j.at("d_t").get<std::size_t>();
    h.d_a = j.at("d_a").get<std::size_t>();
    h.d_v = j.at("d_v").get<std::size_t>();
    h.n_classes = j.at("n_classes").get<std::size_t>();
    h.n_speakers = j.at("n_speakers").get<std::size_t>();
    h.class_names = j.at("class_names").get<std::vector<std::string>>();
    if (h.d_t == 0 || h.d_a == 0 || h.d_v == 0)
        throw SchemaError("header: feature dimensions must be positive");
    if (h.n_classes == 0) throw SchemaError("header: n_classes must be positive");
    if (h.n_speakers == 0) throw SchemaError("header: n_speakers must be positive");
    if (h.class_names.size() != h.n_classes)
        throw SchemaError("header: class_names length does not match n_classes");
    return h;
}

} // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);

    Dataset ds;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("dataset file is empty", 1);
    ++line_no;
    try {
        ds.header = header_from_json(json::parse(line));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed header: ") + e.what(), line_no);
    }

    // Dialogues keep first-appearance order; their utterance lines may be
    // interleaved arbitrarily as long as indices stay in order per dialogue.
    std::map<std::string, std::size_t> seen; // dialogue_id -> index in ds.dialogues
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed utterance: ") + e.what(), line_no);
        }
        UtteranceFeatures u;
        try {
            u.dialogue_id = j.at("dialogue_id").get<std::string>();
            u.utterance_index = j.at("utterance_index").get<std::size_t>();
            u.speaker_id = j.at("speaker_id").get<std::size_t>();
            u.label = j.at("label").get<std::size_t>();
            u.text = j.at("text").get<std::vector<double>>();
            u.audio = j.at("audio").get<std::vector<double>>();
            u.vision = j.at("vision").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("utterance field error: ") + e.what(), line_no);
        }
        auto it = seen.find(u.dialogue_id);
        if (it == seen.end()) {
            seen.emplace(u.dialogue_id, ds.dialogues.size());
            ds.dialogues.push_back(Dialogue{u.dialogue_id, {}});
            it = seen.find(u.dialogue_id);
        }
        ds.dialogues[it->second].utterances.push_back(std::move(u));
    }
    if (ds.dialogues.empty()) throw SchemaError("dataset has no utterances: " + path);
    for (const auto& d : ds.dialogues) validate_dialogue(d, ds.header);
    return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    for (const auto& d : dataset.dialogues) validate_dialogue(d, dataset.header);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file: " + path);
    out << header_to_json(dataset.header).dump() << "\n";
    for (const auto& d : dataset.dialogues) {
        for (const auto& u : d.utterances) {
            json j{{"dialogue_id", u.dialogue_id}, {"utterance_index", u.utterance_index},
                   {"speaker_id", u.speaker_id},   {"label", u.label},
                   {"text", u.text},               {"audio", u.audio},
                   {"vision", u.vision}};
            out << j.dump() << "\n";
        }
    }
    if (!out) throw IoError("write failure on dataset file: " + path);
}

namespace {

// One unit direction per (class, modality), scaled to separation * sigma.
std::vector<std::vector<double>> draw_class_means(RngStream& rng, std::size_t n_classes,
                                                  std::size_t dim, double separation,
                                                  double sigma) {
    std::vector<std::vector<double>> means(n_classes, std::vector<double>(dim, 0.0));
    for (auto& mu : means) {
        double norm_sq = 0.0;
        for (double& x : mu) {
            x = rng.gaussian();
            norm_sq += x * x;
        }
        const double norm = std::sqrt(norm_sq);
        const double target = separation * sigma;
        for (double& x : mu) x = norm > 0.0 ? x / norm * target : 0.0;
    }
    return means;
}

Dialogue make_dialogue(const std::string& id, const SyntheticSpec& spec,
                       const std::vector<std::vector<double>>& means_t,
                       const std::vector<std::vector<double>>& means_a,
                       const std::vector<std::vector<double>>& means_v,
                       const DatasetHeader& header, RngStream rng) {
    Dialogue d;
    d.dialogue_id = id;
    for (std::size_t i = 0; i < spec.utterances_per_dialogue; ++i) {
        UtteranceFeatures u;
        u.dialogue_id = id;
        u.utterance_index = i;
        u.speaker_id = i % spec.n_speakers;
        u.label = rng.next_below(spec.n_classes);
        auto sample = [&](const std::vector<double>& mu, std::size_t dim) {
            std::vector<double> v(dim);
            for (std::size_t k = 0; k < dim; ++k) v[k] = mu[k] + spec.noise_sigma * rng.gaussian();
            return v;
        };
        u.text = sample(means_t[u.label], header.d_t);
        u.audio = sample(means_a[u.label], header.d_a);
        u.vision = sample(means_v[u.label], header.d_v);
        d.utterances.push_back(std::move(u));
    }
    return d;
}

} // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();

    DatasetHeader header;
    header.n_classes = spec.n_classes;
    header.n_speakers = spec.n_speakers;
    for (std::size_t c = 0; c < spec.n_classes; ++c)
        header.class_names.push_back("class_" + std::to_string(c));

    RngStream root(spec.seed);
    RngStream means_rng = root.substream("synth-means");
    auto means_t = draw_class_means(means_rng, spec.n_classes, header.d_t,
                                    spec.class_mean_separation, spec.noise_sigma);
    auto means_a = draw_class_means(means_rng, spec.n_classes, header.d_a,
                                    spec.class_mean_separation, spec.noise_sigma);
    auto means_v = draw_class_means(means_rng, spec.n_classes, header.d_v,
                                    spec.class_mean_separation, spec.noise_sigma);

    RngStream synth = root.substream("synth");
    auto build_split = [&](const char* prefix, std::size_t count) {
        Dataset ds;
        ds.header = header;
        for (std::size_t i = 0; i < count; ++i) {
            std::string id = std::string(prefix) + "_" + std::to_string(i);
            RngStream dlg_rng(synth.seed ^ fnv1a(id));
            ds.dialogues.push_back(
                make_dialogue(id, spec, means_t, means_a, means_v, header, dlg_rng));
        }
        return ds;
    };

    SyntheticDataset out;
    out.train = build_split("train", spec.train_dialogues);
    out.val = build_split("val", spec.val_dialogues);
    out.test = build_split("test", spec.test_dialogues);
    return out;
}

std::map<std::size_t, std::size_t> label_distribution(const std::vector<Dialogue>& dialogues) {
    if (dialogues.empty()) throw ContractError("label_distribution: empty dataset");
    std::map<std::size_t, std::size_t> counts;
    for (const auto& d : dialogues)
        for (const auto& u : d.utterances) ++counts[u.label];
    return counts;
}

SyntheticSpec load_synthetic_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synthetic spec: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed synthetic spec: ") + e.what(), 1);
    }
    SyntheticSpec spec;
    spec.n_classes = j.value("n_classes", spec.n_classes);
    spec.n_speakers = j.value("n_speakers", spec.n_speakers);
    spec.class_mean_separation = j.value("class_mean_separation", spec.class_mean_separation);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    if (j.contains("dialogues_per_split")) {
        const auto& s = j.at("dialogues_per_split");
        spec.train_dialogues = s.at("train").get<std::size_t>();
        spec.val_dialogues = s.at("val").get<std::size_t>();
        spec.test_dialogues = s.at("test").get<std::size_t>();
    }
    spec.utterances_per_dialogue = j.value("utterances_per_dialogue", spec.utterances_per_dialogue);
    spec.seed = j.value("seed", spec.seed);
    spec.validate();
    return spec;
}

} // namespace mglra

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mglra/errors.hpp"
#include "mglra/rng.hpp"

namespace mglra {

struct DatasetHeader {
    std::size_t d_t = 100;
    std::size_t d_a = 100;
    std::size_t d_v = 512;
    std::size_t n_classes = 0;
    std::size_t n_speakers = 0;
    std::vector<std::string> class_names; // size n_classes

    bool operator==(const DatasetHeader&) const = default;
};

struct UtteranceFeatures {
    std::string dialogue_id;
    std::size_t utterance_index = 0;
    std::size_t speaker_id = 0;
    std::size_t label = 0;
    std::vector<double> text;
    std::vector<double> audio;
    std::vector<double> vision;

    bool operator==(const UtteranceFeatures&) const = default;
};

struct Dialogue {
    std::string dialogue_id;
    std::vector<UtteranceFeatures> utterances; // indices 0..L-1, contiguous

    std::size_t length() const { return utterances.size(); }
    bool operator==(const Dialogue&) const = default;
};

struct Dataset {
    DatasetHeader header;
    std::vector<Dialogue> dialogues;

    std::size_t total_utterances() const;
    bool operator==(const Dataset&) const = default;
};

struct SyntheticSpec {
    std::size_t n_classes = 6;
    std::size_t n_speakers = 2;
    double class_mean_separation = 4.0; // in units of noise_sigma
    double noise_sigma = 1.0;
    std::size_t train_dialogues = 200;
    std::size_t val_dialogues = 20;
    std::size_t test_dialogues = 40;
    std::size_t utterances_per_dialogue = 10;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SyntheticDataset {
    Dataset train;
    Dataset val;
    Dataset test;
};

// JSONL contract: first line is the header object, then one utterance object
// per line. Vectors are JSON arrays; doubles round-trip exactly.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);

// Splits share class means; per-dialogue streams are derived from the spec
// seed XOR a hash of the dialogue id, so generation is order-independent.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

std::map<std::size_t, std::size_t> label_distribution(const std::vector<Dialogue>& dialogues);

// Parses a SyntheticSpec from a JSON file.
SyntheticSpec load_synthetic_spec(const std::string& path);

} // namespace mglra

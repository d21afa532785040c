#pragma once

#include <string>

#include "mglra/model.hpp"

namespace mglra {

// Versioned flat binary: magic + version + config hash, the effective config
// JSON, then named parameter blocks in registry order.
void save_model(const MglraModel& model, const RunConfig& config, const std::string& path);

struct LoadedModel {
    MglraModel model;
    RunConfig config;
};

// Rebuilds the model from the embedded config and restores every parameter
// block. Magic or version mismatches raise IoError.
LoadedModel load_model(const std::string& path);

} // namespace mglra

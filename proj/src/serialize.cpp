#include "mglra/serialize.hpp"

#include <cstring>
#include <fstream>

namespace mglra {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'L', 'R', 'A', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
std::uint64_t read_u64(std::ifstream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

} // namespace

void save_model(const MglraModel& model, const RunConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    write_u64(out, config_hash(config));
    const std::string cfg = run_config_to_json(config);
    write_u32(out, static_cast<std::uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

    const auto params = model.parameters();
    write_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        write_u32(out, static_cast<std::uint32_t>(p.name.size()));
        out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        write_u32(out, static_cast<std::uint32_t>(p.tensor.rows()));
        write_u32(out, static_cast<std::uint32_t>(p.tensor.cols()));
        out.write(reinterpret_cast<const char*>(p.tensor.values().data()),
                  static_cast<std::streamsize>(p.tensor.size() * sizeof(double)));
    }
    if (!out) throw IoError("write failure on model file: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("not a model file (bad magic): " + path);
    const std::uint32_t version = read_u32(in);
    if (version != kVersion)
        throw IoError("model file version " + std::to_string(version) +
                      " does not match supported version " + std::to_string(kVersion) + ": " +
                      path);
    const std::uint64_t stored_hash = read_u64(in);
    const std::uint32_t cfg_len = read_u32(in);
    std::string cfg(cfg_len, '\0');
    in.read(cfg.data(), cfg_len);
    if (!in) throw IoError("truncated model file: " + path);

    LoadedModel loaded;
    loaded.config = run_config_from_json(cfg);
    if (config_hash(loaded.config) != stored_hash)
        throw IoError("model file config hash mismatch: " + path);
    RngStream init_rng = RngStream(loaded.config.train.seed).substream("init");
    loaded.model = MglraModel::init(loaded.config.model, init_rng);

    auto params = loaded.model.parameters();
    const std::uint32_t count = read_u32(in);
    if (count != params.size())
        throw IoError("model file has " + std::to_string(count) + " parameter blocks, expected " +
                      std::to_string(params.size()));
    for (auto& p : params) {
        const std::uint32_t name_len = read_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rows = read_u32(in);
        const std::uint32_t cols = read_u32(in);
        if (!in || name != p.name || rows != p.tensor.rows() || cols != p.tensor.cols())
            throw IoError("model file block '" + name + "' does not match expected '" + p.name +
                          "' " + p.tensor.shape_str());
        in.read(reinterpret_cast<char*>(p.tensor.mutable_values().data()),
                static_cast<std::streamsize>(p.tensor.size() * sizeof(double)));
        p.tensor.check_finite("load_model(" + p.name + ")");
    }
    if (!in) throw IoError("truncated model file: " + path);
    return loaded;
}

} // namespace mglra

#include "mglra/mrfa.hpp"

namespace mglra {

MrfaParams MrfaParams::init(std::size_t iterations, std::size_t feature_dim, std::size_t n_heads,
                            std::size_t head_dim, bool scaled_attention, PartnerCombine combine,
                            RngStream& rng) {
    if (iterations == 0) throw ContractError("mrfa: iterations must be >= 1");
    MrfaParams p;
    p.iterations = iterations;
    p.feature_dim = feature_dim;
    p.partner_combine = combine;
    for (int m = 0; m < 3; ++m)
        p.entry_scorer[m] = seeded_uniform_init(rng, feature_dim, 1, xavier_scale(feature_dim, 1));
    for (int m = 0; m < 3; ++m)
        for (int q = 0; q < 2; ++q)
            p.attention[m][q] =
                MhaParams::init(n_heads, feature_dim, head_dim, scaled_attention, rng);
    const std::size_t attended_dim = n_heads * head_dim;
    for (int m = 0; m < 3; ++m) p.refiner[m] = GruParams::init(attended_dim, feature_dim, rng);
    return p;
}

void MrfaParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    for (int m = 0; m < 3; ++m) {
        const std::string mod = prefix + "." + modality_name(static_cast<Modality>(m));
        out.push_back({mod + ".entry_scorer", entry_scorer[m]});
        for (int q = 0; q < 2; ++q)
            attention[m][q].collect(mod + ".attn_partner" + std::to_string(q), out);
        refiner[m].collect(mod + ".gru", out);
    }
}

MemoryBlock init_memory(Modality modality, const Tensor& filtered) {
    MemoryBlock block;
    block.modality = modality;
    init_memory(block, filtered);
    return block;
}

void init_memory(MemoryBlock& block, const Tensor& filtered) {
    if (block.initialized)
        throw ContractError("init_memory: memory block already initialized; later rounds must "
                            "write_back instead");
    block.entries = filtered;
    block.initialized = true;
}

Tensor entry_attention(const MrfaParams& params, const MemoryBlock& block) {
    if (!block.initialized) throw ContractError("entry_attention: memory not initialized");
    const auto m = static_cast<std::size_t>(block.modality);
    Tensor scores = matmul(block.entries, params.entry_scorer[m]); // l_m x 1
    return softmax_rows(transpose(scores));
}

Tensor aggregate(const MemoryBlock& block, const Tensor& weights) {
    if (weights.rows() != 1 || weights.cols() != block.entry_count())
        throw ShapeError("aggregate: weights " + weights.shape_str() + " do not match " +
                         std::to_string(block.entry_count()) + " entries");
    return matmul(weights, block.entries);
}

void write_back(MemoryBlock& block, const Tensor& refined) {
    if (!block.initialized) throw ContractError("write_back: memory not initialized");
    if (refined.rows() != block.entry_count() || refined.cols() != block.feature_dim())
        throw ContractError("write_back: shape " + refined.shape_str() +
                            " does not match memory shape " + block.entries.shape_str());
    block.entries = refined;
}

void mrfa_round(const MrfaParams& params, std::array<MemoryBlock, 3>& blocks) {
    // Round-start readouts for all modalities first (synchronous update).
    std::array<Tensor, 3> readouts;
    for (std::size_t m = 0; m < 3; ++m) {
        readouts[m] = aggregate(blocks[m], entry_attention(params, blocks[m]));
    }
    std::array<Tensor, 3> refined;
    for (std::size_t m = 0; m < 3; ++m) {
        Tensor attended[2];
        for (std::size_t q = 0; q < 2; ++q) {
            const std::size_t partner = (m + 1 + q) % 3;
            attended[q] = multi_head(params.attention[m][q], readouts[m], readouts[partner]);
        }
        Tensor combined = add(attended[0], attended[1]);
        if (params.partner_combine == PartnerCombine::Average)
            combined = affine(combined, 0.5, 0.0);
        refined[m] = gru_update(params.refiner[m], blocks[m].entries, combined);
    }
    for (std::size_t m = 0; m < 3; ++m) write_back(blocks[m], refined[m]);
}

std::array<Tensor, 3> run_mrfa(const MrfaParams& params, const std::array<Tensor, 3>& filtered) {
    std::array<MemoryBlock, 3> blocks;
    for (std::size_t m = 0; m < 3; ++m)
        blocks[m] = init_memory(static_cast<Modality>(m), filtered[m]);
    for (std::size_t round = 0; round < params.iterations; ++round) mrfa_round(params, blocks);
    return {blocks[0].entries, blocks[1].entries, blocks[2].entries};
}

} // namespace mglra

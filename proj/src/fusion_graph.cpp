#include "mglra/fusion_graph.hpp"

#include <algorithm>
#include <cmath>

namespace mglra {

SpeakerTable SpeakerTable::init(std::size_t n_speakers, std::size_t speaker_dim,
                                std::size_t feature_dim, RngStream& rng) {
    SpeakerTable t;
    t.embeddings = seeded_uniform_init(rng, n_speakers, speaker_dim,
                                       xavier_scale(n_speakers, speaker_dim));
    t.projection =
        seeded_uniform_init(rng, speaker_dim, feature_dim, xavier_scale(speaker_dim, feature_dim));
    return t;
}

void SpeakerTable::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    out.push_back({prefix + ".embeddings", embeddings});
    out.push_back({prefix + ".projection", projection});
}

Tensor embed_speaker(const SpeakerTable& table, const Tensor& aligned,
                     const std::vector<std::size_t>& speakers) {
    if (speakers.size() != aligned.rows())
        throw ContractError("embed_speaker: need one speaker id per utterance row");
    for (std::size_t s : speakers)
        if (s >= table.embeddings.rows())
            throw ContractError("embed_speaker: unknown speaker id " + std::to_string(s));
    Tensor rows = select_rows(table.embeddings, speakers);
    return add(matmul(rows, table.projection), aligned);
}

bool ConversationGraph::same_dialogue(std::size_t i, std::size_t j) const {
    for (const auto& [start, end] : dialogue_blocks)
        if (i >= start && i < end) return j >= start && j < end;
    return false;
}

namespace {

double angular_weight(double sim) {
    sim = std::clamp(sim, -1.0, 1.0);
    return 1.0 - std::acos(sim) / 3.14159265358979323846;
}

} // namespace

double edge_weight_intra(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ShapeError("edge weight: vector lengths differ (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        bump_numeric_warning(); // zero-norm: fall back to orthogonality
        return angular_weight(0.0);
    }
    return angular_weight(dot / (std::sqrt(na) * std::sqrt(nb)));
}

double edge_weight_inter(const std::vector<double>& a, const std::vector<double>& b, double aleph) {
    return aleph * edge_weight_intra(a, b);
}

ConversationGraph build_graph(const std::vector<DialogueNodes>& dialogues, double aleph) {
    if (dialogues.empty()) throw ContractError("build_graph: no dialogues");
    ConversationGraph g;
    std::vector<Tensor> feature_rows;
    for (const auto& d : dialogues) {
        const std::size_t len = d.features[0].rows();
        if (len == 0) throw ContractError("build_graph: empty dialogue " + d.dialogue_id);
        if (d.features[1].rows() != len || d.features[2].rows() != len)
            throw ShapeError("build_graph: modality lengths differ in " + d.dialogue_id);
        if (d.speakers.size() != len || d.labels.size() != len)
            throw ContractError("build_graph: speaker/label count mismatch in " + d.dialogue_id);
        const std::size_t start = g.nodes.size();
        for (std::size_t u = 0; u < len; ++u) {
            for (std::size_t m = 0; m < 3; ++m) {
                g.nodes.push_back(GraphNode{d.dialogue_id, u, static_cast<Modality>(m),
                                            d.speakers[u], d.labels[u]});
                feature_rows.push_back(slice_rows(d.features[m], u, 1));
            }
        }
        g.dialogue_blocks.emplace_back(start, g.nodes.size());
    }
    g.features = concat_rows(feature_rows);

    const std::size_t n = g.n_nodes();
    // Angular similarity of row-normalized features, then the structural
    // scale: 1 intra-modal, aleph inter-modal, 0 on the diagonal and across
    // dialogues.
    Tensor norms2 = row_sums(mul(g.features, g.features));
    Tensor normalized = mul(g.features, safe_rsqrt(norms2));
    Tensor angles = angular_similarity(matmul(normalized, transpose(normalized)));
    std::vector<double> scale(n * n, 0.0);
    for (const auto& [start, end] : g.dialogue_blocks) {
        for (std::size_t i = start; i < end; ++i)
            for (std::size_t j = start; j < end; ++j) {
                if (i == j) continue;
                scale[i * n + j] = g.nodes[i].modality == g.nodes[j].modality ? 1.0 : aleph;
            }
    }
    g.adjacency = mul(angles, Tensor::from_data(n, n, std::move(scale)));
    g.node_masked.assign(n, 0);
    g.edge_masked.assign(n * n, 0);
    return g;
}

void apply_mask(ConversationGraph& graph, double mask_rate, RngStream& rng, bool enabled) {
    if (mask_rate < 0.0 || mask_rate >= 1.0)
        throw ContractError("apply_mask: mask_rate must be in [0, 1)");
    const std::size_t n = graph.n_nodes();
    graph.node_masked.assign(n, 0);
    graph.edge_masked.assign(n * n, 0);
    graph.any_node_masked = false;
    if (!enabled) return;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(mask_rate)) {
            graph.node_masked[i] = 1;
            graph.any_node_masked = true;
        }
    }
    for (const auto& [start, end] : graph.dialogue_blocks) {
        for (std::size_t i = start; i < end; ++i)
            for (std::size_t j = i + 1; j < end; ++j) {
                if (rng.bernoulli(mask_rate)) {
                    graph.edge_masked[i * n + j] = 1;
                    graph.edge_masked[j * n + i] = 1;
                }
            }
    }
}

MaskedGcnParams MaskedGcnParams::init(std::size_t feature_dim, std::size_t gcn_dim,
                                      RngStream& rng) {
    MaskedGcnParams p;
    // Fan-in scaling with an amplification gain: the upstream recurrent
    // stages are tanh/sigmoid-bounded and the renormalized propagation
    // averages rows, so without gain the activations reaching the classifier
    // shrink enough to stall training at small learning rates.
    const double g1 = 1.5 * std::sqrt(6.0 / static_cast<double>(feature_dim));
    const double g2 = 1.5 * std::sqrt(6.0 / static_cast<double>(gcn_dim));
    p.w1 = seeded_uniform_init(rng, feature_dim, gcn_dim, g1);
    p.w2 = seeded_uniform_init(rng, gcn_dim, gcn_dim, g2);
    p.mask_token = seeded_uniform_init(rng, 1, feature_dim, xavier_scale(1, feature_dim));
    return p;
}

void MaskedGcnParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
    out.push_back({prefix + ".w1", w1});
    out.push_back({prefix + ".w2", w2});
    out.push_back({prefix + ".mask_token", mask_token});
}

Tensor masked_node_features(const MaskedGcnParams& params, const ConversationGraph& graph) {
    if (!graph.any_node_masked) return graph.features;
    const std::size_t n = graph.n_nodes();
    std::vector<double> keep(n, 1.0), masked(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (graph.node_masked[i]) {
            keep[i] = 0.0;
            masked[i] = 1.0;
        }
    }
    Tensor kept = mul(graph.features, Tensor::from_data(n, 1, std::move(keep)));
    Tensor tokens = matmul(Tensor::from_data(n, 1, std::move(masked)), params.mask_token);
    return add(kept, tokens);
}

// ---------------------------------------------------------------------------
// Renormalized Laplacian propagation
// ---------------------------------------------------------------------------

namespace {

// CSR over the unmasked, same-dialogue, off-diagonal adjacency entries.
struct CsrStructure {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> cols;

    double density() const {
        return n == 0 ? 0.0
                      : static_cast<double>(cols.size()) / static_cast<double>(n * n);
    }
};

CsrStructure build_structure(const ConversationGraph& graph) {
    const std::size_t n = graph.n_nodes();
    CsrStructure s;
    s.n = n;
    s.row_ptr.assign(n + 1, 0);
    std::vector<std::pair<std::size_t, std::size_t>> row_of(n, {0, 0});
    for (const auto& block : graph.dialogue_blocks)
        for (std::size_t i = block.first; i < block.second; ++i) row_of[i] = block;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = row_of[i].first; j < row_of[i].second; ++j) {
            if (j == i || graph.edge_masked[i * n + j]) continue;
            s.cols.push_back(j);
        }
        s.row_ptr[i + 1] = s.cols.size();
    }
    return s;
}

// Degree-based symmetric normalizers s_i = (d_i + 1)^{-1/2}.
std::vector<double> normalizers(const CsrStructure& structure, const std::vector<double>& adj) {
    std::vector<double> s(structure.n);
    for (std::size_t i = 0; i < structure.n; ++i) {
        double d = 0.0;
        for (std::size_t e = structure.row_ptr[i]; e < structure.row_ptr[i + 1]; ++e)
            d += adj[i * structure.n + structure.cols[e]];
        s[i] = 1.0 / std::sqrt(d + 1.0);
    }
    return s;
}

std::vector<double> dense_laplacian(const CsrStructure& structure, const std::vector<double>& adj,
                                    const std::vector<double>& s) {
    const std::size_t n = structure.n;
    std::vector<double> p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        p[i * n + i] = s[i] * s[i];
        for (std::size_t e = structure.row_ptr[i]; e < structure.row_ptr[i + 1]; ++e) {
            const std::size_t j = structure.cols[e];
            p[i * n + j] = s[i] * s[j] * adj[i * n + j];
        }
    }
    return p;
}

} // namespace

std::vector<double> dense_renorm_laplacian(const ConversationGraph& graph) {
    CsrStructure structure = build_structure(graph);
    auto s = normalizers(structure, graph.adjacency.values());
    return dense_laplacian(structure, graph.adjacency.values(), s);
}

Tensor laplacian_matmul(const ConversationGraph& graph, const Tensor& x, PropagationPath path) {
    const std::size_t n = graph.n_nodes();
    if (x.rows() != n)
        throw ShapeError("laplacian_matmul: node matrix rows " + x.shape_str() +
                         " do not match " + std::to_string(n) + " graph nodes");
    const std::size_t dim = x.cols();

    auto structure = std::make_shared<CsrStructure>(build_structure(graph));
    auto normals =
        std::make_shared<std::vector<double>>(normalizers(*structure, graph.adjacency.values()));
    const bool sparse = path == PropagationPath::Sparse ||
                        (path == PropagationPath::Auto && structure->density() < 0.5);

    auto adj_impl = graph.adjacency.impl();
    auto x_impl = x.impl();
    auto out = Tensor::zeros(n, dim);
    auto out_impl = out.impl();

    const auto& adj = adj_impl->data;
    const auto& xv = x_impl->data;
    const auto& s = *normals;
    if (sparse) {
        for (std::size_t i = 0; i < n; ++i) {
            double* yi = out_impl->data.data() + i * dim;
            const double sii = s[i] * s[i];
            for (std::size_t c = 0; c < dim; ++c) yi[c] = sii * xv[i * dim + c];
            for (std::size_t e = structure->row_ptr[i]; e < structure->row_ptr[i + 1]; ++e) {
                const std::size_t j = structure->cols[e];
                const double w = s[i] * s[j] * adj[i * n + j];
                const double* xj = xv.data() + j * dim;
                for (std::size_t c = 0; c < dim; ++c) yi[c] += w * xj[c];
            }
        }
    } else {
        const auto p = dense_laplacian(*structure, adj, s);
        for (std::size_t i = 0; i < n; ++i) {
            double* yi = out_impl->data.data() + i * dim;
            for (std::size_t j = 0; j < n; ++j) {
                const double w = p[i * n + j];
                if (w == 0.0) continue;
                const double* xj = xv.data() + j * dim;
                for (std::size_t c = 0; c < dim; ++c) yi[c] += w * xj[c];
            }
        }
    }
    out.check_finite("laplacian_matmul");

    detail::record_op(
        {adj_impl, x_impl}, out_impl, [structure, normals, adj_impl, x_impl, out_impl, n, dim]() {
            if (out_impl->grad.empty()) return;
            const auto& g = out_impl->grad;
            const auto& s = *normals;
            const auto& adj = adj_impl->data;
            const auto& xv = x_impl->data;
            const auto& st = *structure;

            if (x_impl->on_tape) {
                detail::ensure_grad(*x_impl);
                auto& gx = x_impl->grad;
                // P~ is symmetric: grad_x = P~ * g
                for (std::size_t i = 0; i < n; ++i) {
                    const double sii = s[i] * s[i];
                    for (std::size_t c = 0; c < dim; ++c) gx[i * dim + c] += sii * g[i * dim + c];
                    for (std::size_t e = st.row_ptr[i]; e < st.row_ptr[i + 1]; ++e) {
                        const std::size_t j = st.cols[e];
                        const double w = s[i] * s[j] * adj[i * n + j];
                        for (std::size_t c = 0; c < dim; ++c)
                            gx[j * dim + c] += w * g[i * dim + c];
                    }
                }
            }
            if (adj_impl->on_tape) {
                detail::ensure_grad(*adj_impl);
                auto& ga = adj_impl->grad;
                // G_ij = <g_i, x_j> at structure entries plus the diagonal.
                std::vector<double> entry_g(st.cols.size());
                std::vector<double> dl_ds(n, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    double gkk = 0.0;
                    for (std::size_t c = 0; c < dim; ++c)
                        gkk += g[i * dim + c] * xv[i * dim + c];
                    dl_ds[i] = 2.0 * s[i] * gkk;
                    for (std::size_t e = st.row_ptr[i]; e < st.row_ptr[i + 1]; ++e) {
                        const std::size_t j = st.cols[e];
                        double acc = 0.0;
                        for (std::size_t c = 0; c < dim; ++c)
                            acc += g[i * dim + c] * xv[j * dim + c];
                        entry_g[e] = acc;
                    }
                }
                // dL/ds_k = sum_j s_j A_kj (G_kj + G_jk) + 2 s_k G_kk
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t e = st.row_ptr[i]; e < st.row_ptr[i + 1]; ++e) {
                        const std::size_t j = st.cols[e];
                        // locate (j, i) in row j (structure is symmetric)
                        const auto begin = st.cols.begin() + st.row_ptr[j];
                        const auto end = st.cols.begin() + st.row_ptr[j + 1];
                        const auto it = std::lower_bound(begin, end, i);
                        const double g_ji =
                            entry_g[static_cast<std::size_t>(it - st.cols.begin())];
                        dl_ds[i] += s[j] * adj[i * n + j] * (entry_g[e] + g_ji);
                    }
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double t_i = dl_ds[i] * (-0.5 * s[i] * s[i] * s[i]);
                    for (std::size_t e = st.row_ptr[i]; e < st.row_ptr[i + 1]; ++e) {
                        const std::size_t j = st.cols[e];
                        ga[i * n + j] += s[i] * s[j] * entry_g[e] + t_i;
                    }
                }
            }
        });
    return out;
}

Tensor renormalized_propagation(const MaskedGcnParams& params, const ConversationGraph& graph,
                                PropagationPath path) {
    return renormalized_propagation_trace(params, graph, path).layer2;
}

PropagationTrace renormalized_propagation_trace(const MaskedGcnParams& params,
                                                const ConversationGraph& graph,
                                                PropagationPath path) {
    PropagationTrace trace;
    trace.input = masked_node_features(params, graph);
    trace.layer1 = relu(matmul(laplacian_matmul(graph, trace.input, path), params.w1));
    trace.layer2 = matmul(laplacian_matmul(graph, trace.layer1, path), params.w2);
    return trace;
}

} // namespace mglra

#pragma once

// Whole-graph embedding from characteristic functions of node features over
// random-walk neighbourhoods, pooled by the mean over nodes.
//
// Vector layout for F features, r scales and d evaluation points:
//   [ Re | Im ], each half ordered feature-major, then scale s = 1..r, then
//   theta_j = j * theta_max / d for j = 1..d.
// With the defaults (log-degree, d = 25, r = 2) the vector has 100 entries.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgprobe/error.hpp"
#include "kgprobe/ged.hpp"
#include "kgprobe/graph.hpp"

namespace kgprobe {

enum class NodeFeature { log_degree, clustering };

inline std::string_view to_string(NodeFeature f) {
    return f == NodeFeature::log_degree ? "log_degree" : "clustering";
}

struct EmbeddingConfig {
    double theta_max = 2.5;
    std::size_t eval_points = 25;
    std::size_t order = 2;
    std::vector<NodeFeature> features{NodeFeature::log_degree};

    std::size_t dimension() const { return 2 * features.size() * eval_points * order; }

    void validate() const {
        if (!(theta_max > 0.0) || !std::isfinite(theta_max)) throw Error("theta_max must be positive");
        if (eval_points == 0) throw Error("eval_points must be positive");
        if (order == 0) throw Error("order must be positive");
        if (features.empty()) throw Error("at least one node feature is required");
    }

    // FNV-1a over the canonical text form of the configuration.
    std::string fingerprint() const {
        char theta[64];
        std::snprintf(theta, sizeof theta, "%.17g", theta_max);
        std::string canon = "feather;theta_max=" + std::string(theta) + ";eval_points=" +
                            std::to_string(eval_points) + ";order=" + std::to_string(order) + ";features=";
        for (auto f : features) canon += std::string(to_string(f)) + ",";
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : canon) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        char out[17];
        std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
        return out;
    }
};

struct GraphEmbedding {
    std::vector<double> vector;
    std::string config_fingerprint;
};

namespace detail {

// Undirected simple neighbour sets (self-loops and parallel edges dropped).
inline std::vector<std::vector<std::size_t>> undirected_neighbours(const LabeledGraph& g) {
    std::vector<std::set<std::size_t>> sets(g.size());
    for (const auto& e : g.edges) {
        if (e.source == e.target) continue;
        sets[e.source].insert(e.target);
        sets[e.target].insert(e.source);
    }
    std::vector<std::vector<std::size_t>> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i].assign(sets[i].begin(), sets[i].end());
    return out;
}

inline std::vector<double> clustering_coefficients(const std::vector<std::vector<std::size_t>>& nbrs) {
    std::vector<double> out(nbrs.size(), 0.0);
    std::vector<std::set<std::size_t>> sets;
    sets.reserve(nbrs.size());
    for (const auto& n : nbrs) sets.emplace_back(n.begin(), n.end());
    for (std::size_t u = 0; u < nbrs.size(); ++u) {
        const auto k = nbrs[u].size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a + 1; b < k; ++b) links += sets[nbrs[u][a]].contains(nbrs[u][b]) ? 1 : 0;
        }
        out[u] = 2.0 * static_cast<double>(links) / static_cast<double>(k * (k - 1));
    }
    return out;
}

}  // namespace detail

inline GraphEmbedding embed_graph(const LabeledGraph& g, const EmbeddingConfig& cfg = {}) {
    cfg.validate();
    GraphEmbedding out;
    out.config_fingerprint = cfg.fingerprint();
    out.vector.assign(cfg.dimension(), 0.0);
    const std::size_t n = g.size();
    if (n == 0) return out;

    auto nbrs = detail::undirected_neighbours(g);
    const std::size_t d = cfg.eval_points;
    const std::size_t half = cfg.dimension() / 2;

    // One step of the self-loop random walk: (W h)_u = mean of h over u and its neighbours.
    auto walk = [&](const std::vector<double>& h) {
        std::vector<double> next(n * d, 0.0);
        for (std::size_t u = 0; u < n; ++u) {
            const double w = 1.0 / static_cast<double>(nbrs[u].size() + 1);
            for (std::size_t j = 0; j < d; ++j) {
                double acc = h[u * d + j];
                for (auto v : nbrs[u]) acc += h[v * d + j];
                next[u * d + j] = w * acc;
            }
        }
        return next;
    };

    std::vector<double> clustering;
    for (std::size_t f = 0; f < cfg.features.size(); ++f) {
        std::vector<double> x(n);
        if (cfg.features[f] == NodeFeature::log_degree) {
            for (std::size_t u = 0; u < n; ++u) x[u] = std::log1p(static_cast<double>(nbrs[u].size()));
        } else {
            if (clustering.empty()) clustering = detail::clustering_coefficients(nbrs);
            x = clustering;
        }

        std::vector<double> re(n * d), im(n * d);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t j = 0; j < d; ++j) {
                double theta = static_cast<double>(j + 1) * cfg.theta_max / static_cast<double>(d);
                re[u * d + j] = std::cos(theta * x[u]);
                im[u * d + j] = std::sin(theta * x[u]);
            }
        }
        for (std::size_t s = 0; s < cfg.order; ++s) {
            re = walk(re);
            im = walk(im);
            const std::size_t base = (f * cfg.order + s) * d;
            for (std::size_t j = 0; j < d; ++j) {
                double sr = 0.0, si = 0.0;
                for (std::size_t u = 0; u < n; ++u) {
                    sr += re[u * d + j];
                    si += im[u * d + j];
                }
                out.vector[base + j] = sr / static_cast<double>(n);
                out.vector[half + base + j] = si / static_cast<double>(n);
            }
        }
    }
    return out;
}

inline GraphEmbedding embed_graph(const KnowledgeGraph& g, const EmbeddingConfig& cfg = {}) {
    return embed_graph(to_labeled(g), cfg);
}

inline double euclidean(const GraphEmbedding& a, const GraphEmbedding& b) {
    if (a.config_fingerprint != b.config_fingerprint) {
        throw Error("embeddings come from different configurations (" + a.config_fingerprint + " vs " +
                    b.config_fingerprint + ")");
    }
    if (a.vector.size() != b.vector.size()) throw Error("embedding dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.vector.size(); ++i) {
        double diff = a.vector[i] - b.vector[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

inline nlohmann::ordered_json to_json(const std::string& graph_id, const GraphEmbedding& e) {
    return {{"graph_id", graph_id}, {"config_fingerprint", e.config_fingerprint}, {"vector", e.vector}};
}

}  // namespace kgprobe

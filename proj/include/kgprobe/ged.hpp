#pragma once

// Graph edit distance on directed, node- and edge-labelled graphs.
//
// exact_ged enumerates node mappings (branch and bound, small graphs only).
// aed is the bipartite Assignment Edit Distance: one linear sum assignment
// over node substitution / deletion / insertion costs, each enriched with
// an estimate of the incident-edge edit cost. It reports the cost induced by
// the recovered node mapping, so it is always an upper bound on the exact
// distance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgprobe/assignment.hpp"
#include "kgprobe/error.hpp"
#include "kgprobe/graph.hpp"

namespace kgprobe {

struct LabeledEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    std::string label;

    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

struct LabeledGraph {
    std::vector<std::string> labels;
    std::vector<LabeledEdge> edges;

    std::size_t size() const noexcept { return labels.size(); }

    friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;
};

// Nodes in id order, labelled by their stemmed id.
inline LabeledGraph to_labeled(const KnowledgeGraph& g) {
    LabeledGraph out;
    std::map<std::string, std::size_t> index;
    for (const auto& [id, _] : g.nodes()) {
        index.emplace(id, out.labels.size());
        out.labels.push_back(id);
    }
    for (const auto& [key, _] : g.edges()) {
        out.edges.push_back({index.at(key.source), index.at(key.target), key.label});
    }
    return out;
}

struct CostModel {
    using LabelCost = std::function<double(std::string_view, std::string_view)>;

    LabelCost node_sub;
    double node_del = 1.0;
    double node_ins = 1.0;
    LabelCost edge_sub;
    double edge_del = 1.0;
    double edge_ins = 1.0;

    // c(e) = 1 for every operation; substituting equal labels is free.
    static CostModel unit() {
        auto eq = [](std::string_view a, std::string_view b) { return a == b ? 0.0 : 1.0; };
        return {eq, 1.0, 1.0, eq, 1.0, 1.0};
    }
};

// mapping[i] = index in g2 that node i of g1 is substituted with, or
// nullopt when it is deleted.
using NodeMapping = std::vector<std::optional<std::size_t>>;

enum class GedMethod { exact, aed };

inline std::string_view to_string(GedMethod m) { return m == GedMethod::exact ? "exact" : "aed"; }

struct GedResult {
    double cost = 0.0;
    NodeMapping mapping;
    GedMethod method = GedMethod::exact;
    // Raw linear-assignment objective (aed only; NaN for exact).
    double assignment_objective = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

using PairLabels = std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>>;

inline PairLabels group_edges(const LabeledGraph& g) {
    PairLabels out;
    for (const auto& e : g.edges) out[{e.source, e.target}].push_back(e.label);
    return out;
}

// Cheapest edit of one label multiset into another.
inline double match_labels(const std::vector<std::string>& a, const std::vector<std::string>& b,
                           const CostModel::LabelCost& sub, double del, double ins) {
    if (a.empty()) return static_cast<double>(b.size()) * ins;
    if (b.empty()) return static_cast<double>(a.size()) * del;
    if (a.size() == 1 && b.size() == 1) return std::min(sub(a[0], b[0]), del + ins);
    const std::size_t n = a.size(), m = b.size();
    CostMatrix c(n + m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) c(i, j) = sub(a[i], b[j]);
        for (std::size_t k = 0; k < n; ++k) c(i, m + k) = i == k ? del : kInfinity;
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) c(n + k, j) = k == j ? ins : kInfinity;
    }
    return solve_assignment(c).cost;
}

inline void check_mapping(const LabeledGraph& g1, const LabeledGraph& g2, const NodeMapping& mapping) {
    if (mapping.size() != g1.size()) throw Error("node mapping size does not match the first graph");
    std::vector<char> used(g2.size(), 0);
    for (const auto& t : mapping) {
        if (!t) continue;
        if (*t >= g2.size()) throw Error("node mapping target out of range");
        if (used[*t]) throw Error("node mapping is not injective");
        used[*t] = 1;
    }
}

}  // namespace detail

inline double induced_cost(const LabeledGraph& g1, const LabeledGraph& g2, const NodeMapping& mapping,
                           const CostModel& cm) {
    detail::check_mapping(g1, g2, mapping);
    double cost = 0.0;
    std::vector<char> hit(g2.size(), 0);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        if (mapping[i]) {
            hit[*mapping[i]] = 1;
            cost += cm.node_sub(g1.labels[i], g2.labels[*mapping[i]]);
        } else {
            cost += cm.node_del;
        }
    }
    for (std::size_t j = 0; j < g2.size(); ++j) {
        if (!hit[j]) cost += cm.node_ins;
    }

    auto e1 = detail::group_edges(g1);
    auto e2 = detail::group_edges(g2);
    static const std::vector<std::string> none;
    for (const auto& [ends, labels] : e1) {
        const auto& s = mapping[ends.first];
        const auto& t = mapping[ends.second];
        if (s && t) {
            auto it = e2.find({*s, *t});
            const auto& other = it == e2.end() ? none : it->second;
            cost += detail::match_labels(labels, other, cm.edge_sub, cm.edge_del, cm.edge_ins);
            if (it != e2.end()) e2.erase(it);
        } else {
            cost += static_cast<double>(labels.size()) * cm.edge_del;
        }
    }
    for (const auto& [_, labels] : e2) cost += static_cast<double>(labels.size()) * cm.edge_ins;
    return cost;
}

inline double induced_cost(const KnowledgeGraph& g1, const KnowledgeGraph& g2, const NodeMapping& mapping,
                           const CostModel& cm) {
    return induced_cost(to_labeled(g1), to_labeled(g2), mapping, cm);
}

// Mapping of g2 onto g1 that describes the same edit path reversed.
inline NodeMapping invert_mapping(const NodeMapping& mapping, std::size_t target_size) {
    NodeMapping out(target_size);
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        if (mapping[i]) out[*mapping[i]] = i;
    }
    return out;
}

namespace detail {

enum class Direction { out, in, loop };

struct Incident {
    Direction dir;
    std::string label;
};

inline std::vector<std::vector<Incident>> incident_edges(const LabeledGraph& g) {
    std::vector<std::vector<Incident>> out(g.size());
    for (const auto& e : g.edges) {
        if (e.source == e.target) {
            out[e.source].push_back({Direction::loop, e.label});
        } else {
            out[e.source].push_back({Direction::out, e.label});
            out[e.target].push_back({Direction::in, e.label});
        }
    }
    return out;
}

// Nested assignment between two nodes' incident edges; edges of different
// direction cannot substitute for one another.
inline double incident_estimate(const std::vector<Incident>& a, const std::vector<Incident>& b,
                                const CostModel& cm) {
    if (a.empty()) return static_cast<double>(b.size()) * cm.edge_ins;
    if (b.empty()) return static_cast<double>(a.size()) * cm.edge_del;
    const std::size_t n = a.size(), m = b.size();
    CostMatrix c(n + m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            c(i, j) = a[i].dir == b[j].dir ? cm.edge_sub(a[i].label, b[j].label) : kInfinity;
        }
        for (std::size_t k = 0; k < n; ++k) c(i, m + k) = i == k ? cm.edge_del : kInfinity;
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) c(n + k, j) = k == j ? cm.edge_ins : kInfinity;
    }
    return solve_assignment(c).cost;
}

}  // namespace detail

// The (n+m) x (n+m) node assignment matrix: substitution block top-left,
// diagonal deletion block top-right, diagonal insertion block bottom-left,
// zero block bottom-right.
inline CostMatrix aed_cost_matrix(const LabeledGraph& g1, const LabeledGraph& g2, const CostModel& cm) {
    const std::size_t n = g1.size(), m = g2.size();
    auto inc1 = detail::incident_edges(g1);
    auto inc2 = detail::incident_edges(g2);
    CostMatrix c(n + m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            c(i, j) = cm.node_sub(g1.labels[i], g2.labels[j]) + detail::incident_estimate(inc1[i], inc2[j], cm);
        }
        for (std::size_t k = 0; k < n; ++k) {
            c(i, m + k) = i == k ? cm.node_del + static_cast<double>(inc1[i].size()) * cm.edge_del : kInfinity;
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            c(n + k, j) = k == j ? cm.node_ins + static_cast<double>(inc2[j].size()) * cm.edge_ins : kInfinity;
        }
    }
    return c;
}

namespace detail {

inline std::pair<NodeMapping, double> aed_one_way(const LabeledGraph& g1, const LabeledGraph& g2,
                                                  const CostModel& cm) {
    auto solved = solve_assignment(aed_cost_matrix(g1, g2, cm));
    NodeMapping mapping(g1.size());
    for (std::size_t i = 0; i < g1.size(); ++i) {
        if (solved.row_to_col[i] < g2.size()) mapping[i] = solved.row_to_col[i];
    }
    return {std::move(mapping), solved.cost};
}

}  // namespace detail

// Both orientations are solved and the cheaper induced mapping is kept, so
// the result does not depend on argument order under a symmetric cost model.
inline GedResult aed(const LabeledGraph& g1, const LabeledGraph& g2, const CostModel& cm) {
    GedResult r;
    r.method = GedMethod::aed;
    if (g1 == g2) {
        // Equal graphs: the identity is an optimal assignment; prefer it over
        // equal-objective permutations of look-alike nodes.
        r.mapping.resize(g1.size());
        for (std::size_t i = 0; i < g1.size(); ++i) r.mapping[i] = i;
        r.cost = induced_cost(g1, g2, r.mapping, cm);
        r.assignment_objective = solve_assignment(aed_cost_matrix(g1, g2, cm)).cost;
        return r;
    }
    auto [forward, objective] = detail::aed_one_way(g1, g2, cm);
    auto [backward, _] = detail::aed_one_way(g2, g1, cm);
    auto reversed = invert_mapping(backward, g1.size());
    double c_forward = induced_cost(g1, g2, forward, cm);
    double c_reversed = induced_cost(g1, g2, reversed, cm);
    r.assignment_objective = objective;
    if (c_reversed < c_forward) {
        r.cost = c_reversed;
        r.mapping = std::move(reversed);
    } else {
        r.cost = c_forward;
        r.mapping = std::move(forward);
    }
    return r;
}

inline GedResult aed(const KnowledgeGraph& g1, const KnowledgeGraph& g2, const CostModel& cm) {
    return aed(to_labeled(g1), to_labeled(g2), cm);
}

inline constexpr std::size_t kDefaultNodeLimit = 8;

namespace detail {

class ExactSearch {
public:
    ExactSearch(const LabeledGraph& g1, const LabeledGraph& g2, const CostModel& cm)
        : g1_(g1), g2_(g2), cm_(cm), e1_(group_edges(g1)), e2_(group_edges(g2)),
          current_(g1.size()), used_(g2.size(), 0) {}

    void run(NodeMapping seed) {
        best_mapping_ = seed;
        best_ = induced_cost(g1_, g2_, seed, cm_);
        search(0, 0.0);
    }

    double best() const { return best_; }
    const NodeMapping& best_mapping() const { return best_mapping_; }

private:
    const std::vector<std::string>& labels2(std::size_t a, std::size_t b) const {
        static const std::vector<std::string> none;
        auto it = e2_.find({a, b});
        return it == e2_.end() ? none : it->second;
    }
    const std::vector<std::string>& labels1(std::size_t a, std::size_t b) const {
        static const std::vector<std::string> none;
        auto it = e1_.find({a, b});
        return it == e1_.end() ? none : it->second;
    }

    // Edge cost between node k and every already decided node (and k's loops).
    double edge_step(std::size_t k) const {
        double c = 0.0;
        auto pair_cost = [&](std::size_t a, std::size_t b) {
            const auto& l1 = labels1(a, b);
            if (current_[a] && current_[b]) {
                return match_labels(l1, labels2(*current_[a], *current_[b]), cm_.edge_sub, cm_.edge_del,
                                    cm_.edge_ins);
            }
            return static_cast<double>(l1.size()) * cm_.edge_del;
        };
        c += pair_cost(k, k);
        for (std::size_t p = 0; p < k; ++p) c += pair_cost(k, p) + pair_cost(p, k);
        return c;
    }

    double completion_cost() const {
        double c = 0.0;
        for (std::size_t j = 0; j < g2_.size(); ++j) {
            if (!used_[j]) c += cm_.node_ins;
        }
        for (const auto& [ends, labels] : e2_) {
            if (!used_[ends.first] || !used_[ends.second]) c += static_cast<double>(labels.size()) * cm_.edge_ins;
        }
        return c;
    }

    double size_bound(std::size_t k, std::size_t free2) const {
        std::size_t left1 = g1_.size() - k;
        if (left1 > free2) return static_cast<double>(left1 - free2) * cm_.node_del;
        return static_cast<double>(free2 - left1) * cm_.node_ins;
    }

    void search(std::size_t k, double cost) {
        std::size_t free2 = 0;
        for (char u : used_) free2 += u ? 0 : 1;
        if (cost + size_bound(k, free2) >= best_) return;
        if (k == g1_.size()) {
            double total = cost + completion_cost();
            if (total < best_) {
                best_ = total;
                best_mapping_ = current_;
            }
            return;
        }
        for (std::size_t j = 0; j < g2_.size(); ++j) {
            if (used_[j]) continue;
            used_[j] = 1;
            current_[k] = j;
            double step = cm_.node_sub(g1_.labels[k], g2_.labels[j]) + edge_step(k);
            search(k + 1, cost + step);
            current_[k].reset();
            used_[j] = 0;
        }
        current_[k].reset();
        search(k + 1, cost + cm_.node_del + edge_step(k));
    }

    const LabeledGraph& g1_;
    const LabeledGraph& g2_;
    const CostModel& cm_;
    PairLabels e1_, e2_;
    NodeMapping current_;
    std::vector<char> used_;
    NodeMapping best_mapping_;
    double best_ = kInfinity;
};

}  // namespace detail

inline GedResult exact_ged(const LabeledGraph& g1, const LabeledGraph& g2, const CostModel& cm,
                           std::size_t node_limit = kDefaultNodeLimit) {
    if (std::max(g1.size(), g2.size()) > node_limit) {
        throw Error("exact GED limited to " + std::to_string(node_limit) + " nodes (graphs have " +
                    std::to_string(g1.size()) + " and " + std::to_string(g2.size()) +
                    "); use the aed method for larger graphs");
    }
    detail::ExactSearch search(g1, g2, cm);
    search.run(aed(g1, g2, cm).mapping);
    return {search.best(), search.best_mapping(), GedMethod::exact,
            std::numeric_limits<double>::quiet_NaN()};
}

inline GedResult exact_ged(const KnowledgeGraph& g1, const KnowledgeGraph& g2, const CostModel& cm,
                           std::size_t node_limit = kDefaultNodeLimit) {
    return exact_ged(to_labeled(g1), to_labeled(g2), cm, node_limit);
}

}  // namespace kgprobe

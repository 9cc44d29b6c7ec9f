#pragma once

// Test-side oracles and generators. Nothing here calls into the code under
// test except to build its input types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgprobe/kgprobe.hpp"

namespace kgtest {

using kgprobe::LabeledGraph;

#ifdef KGPROBE_TEST_DATA_DIR
inline std::string data_path(const std::string& rel) { return std::string(KGPROBE_TEST_DATA_DIR) + "/" + rel; }
#endif

inline kgprobe::ParsedSentence parse_one(const std::string& text) {
    std::istringstream in(text);
    auto r = kgprobe::parse_conllu(in);
    if (r.sentences.size() != 1) throw std::runtime_error("expected one sentence");
    return r.sentences.front();
}

// Builds a CoNLL-U block from "form/UPOS/head/deprel[/lemma]" items.
inline std::string conllu(const std::string& id, const std::vector<std::string>& items) {
    std::string out = "# sent_id = " + id + "\n";
    int i = 0;
    for (const auto& item : items) {
        std::vector<std::string> f;
        std::stringstream ss(item);
        for (std::string part; std::getline(ss, part, '/');) f.push_back(part);
        std::string lemma = f.size() > 4 ? f[4] : f[0];
        out += std::to_string(++i) + "\t" + f[0] + "\t" + lemma + "\t" + f[1] + "\t_\t_\t" + f[2] + "\t" + f[3] +
               "\t_\t_\n";
    }
    return out + "\n";
}

// ---- assignment -----------------------------------------------------------

// Minimum over all permutations; infinity when none is finite.
inline double brute_force_assignment(const kgprobe::CostMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0;
        for (std::size_t i = 0; i < n; ++i) c += m(i, p[i]);
        best = std::min(best, c);
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

// ---- graph edit distance --------------------------------------------------

// Multiset edit cost between two label bags under unit costs.
inline double bag_distance(std::vector<std::string> a, std::vector<std::string> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<double>(std::max(a.size(), b.size()) - common.size());
}

// Unit-cost edit cost of a partial injection, written independently of the
// library: nodes by label equality, edges by per-pair label bags.
inline double oracle_cost(const LabeledGraph& g1, const LabeledGraph& g2, const std::vector<int>& f) {
    double c = 0;
    std::vector<bool> used(g2.size(), false);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        if (f[i] < 0) {
            c += 1;
        } else {
            used[static_cast<std::size_t>(f[i])] = true;
            c += g1.labels[i] == g2.labels[static_cast<std::size_t>(f[i])] ? 0 : 1;
        }
    }
    for (bool u : used) c += u ? 0 : 1;
    // Map every g1 edge into g2 coordinates; unmapped endpoints get unique ids.
    std::map<std::pair<long, long>, std::pair<std::vector<std::string>, std::vector<std::string>>> bags;
    const long off = static_cast<long>(g2.size());
    for (const auto& e : g1.edges) {
        long s = f[e.source] >= 0 ? f[e.source] : off + static_cast<long>(e.source);
        long t = f[e.target] >= 0 ? f[e.target] : off + static_cast<long>(e.target);
        bags[{s, t}].first.push_back(e.label);
    }
    for (const auto& e : g2.edges) bags[{static_cast<long>(e.source), static_cast<long>(e.target)}].second.push_back(e.label);
    for (auto& [k, v] : bags) c += bag_distance(v.first, v.second);
    return c;
}

// Minimum over every partial injection g1 -> g2.
inline double exhaustive_ged(const LabeledGraph& g1, const LabeledGraph& g2) {
    std::vector<int> f(g1.size(), -1);
    std::vector<bool> used(g2.size(), false);
    double best = std::numeric_limits<double>::infinity();
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == g1.size()) {
            best = std::min(best, oracle_cost(g1, g2, f));
            return;
        }
        f[i] = -1;
        self(self, i + 1);
        for (std::size_t j = 0; j < g2.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            f[i] = static_cast<int>(j);
            self(self, i + 1);
            used[j] = false;
        }
        f[i] = -1;
    };
    rec(rec, 0);
    return best;
}

inline LabeledGraph random_labeled(std::mt19937& rng, std::size_t max_nodes, std::size_t min_nodes = 0) {
    std::uniform_int_distribution<std::size_t> nd(min_nodes, max_nodes);
    static const std::vector<std::string> node_labels{"a", "b", "c"};
    static const std::vector<std::string> edge_labels{"r", "s"};
    LabeledGraph g;
    const auto n = nd(rng);
    for (std::size_t i = 0; i < n; ++i) g.labels.push_back(node_labels[rng() % node_labels.size()]);
    if (n < 2) return g;
    std::bernoulli_distribution has(0.3);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t) continue;
            for (const auto& l : edge_labels) {
                if (has(rng) && (l == "r" || has(rng))) g.edges.push_back({s, t, l});
            }
        }
    }
    return g;
}

inline LabeledGraph permute(const LabeledGraph& g, const std::vector<std::size_t>& p) {
    LabeledGraph out;
    out.labels.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.labels[p[i]] = g.labels[i];
    for (const auto& e : g.edges) out.edges.push_back({p[e.source], p[e.target], e.label});
    return out;
}

// ---- embedding ------------------------------------------------------------

using Dense = std::vector<std::vector<double>>;

inline Dense matmul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// Dense evaluation of the log-degree characteristic-function embedding:
// W = D^-1 (A + I), entries mean_u sum_w (W^s)_{uw} cos/sin(theta_j x_w),
// laid out [Re | Im], each scale-major then theta.
inline std::vector<double> dense_embedding(const LabeledGraph& g, double theta_max = 2.5, std::size_t d = 25,
                                           std::size_t r = 2) {
    const std::size_t n = g.size();
    std::vector<double> out(2 * d * r, 0.0);
    if (n == 0) return out;
    Dense a(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges) {
        if (e.source == e.target) continue;
        a[e.source][e.target] = a[e.target][e.source] = 1.0;
    }
    std::vector<double> x(n);
    for (std::size_t u = 0; u < n; ++u) {
        x[u] = std::log(1.0 + std::accumulate(a[u].begin(), a[u].end(), 0.0));
        a[u][u] = 1.0;
    }
    for (auto& row : a) {
        double s = std::accumulate(row.begin(), row.end(), 0.0);
        for (auto& v : row) v /= s;
    }
    Dense w = a;
    for (std::size_t s = 0; s < r; ++s) {
        if (s > 0) w = matmul(w, a);
        for (std::size_t j = 0; j < d; ++j) {
            double theta = static_cast<double>(j + 1) * theta_max / static_cast<double>(d);
            double re = 0, im = 0;
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t v = 0; v < n; ++v) {
                    re += w[u][v] * std::cos(theta * x[v]);
                    im += w[u][v] * std::sin(theta * x[v]);
                }
            out[s * d + j] = re / static_cast<double>(n);
            out[d * r + s * d + j] = im / static_cast<double>(n);
        }
    }
    return out;
}

// Random undirected-ish graph with distinct node labels.
inline LabeledGraph random_simple(std::mt19937& rng, std::size_t max_nodes, double p) {
    std::uniform_int_distribution<std::size_t> nd(0, max_nodes);
    std::bernoulli_distribution has(p);
    LabeledGraph g;
    const auto n = nd(rng);
    for (std::size_t i = 0; i < n; ++i) g.labels.push_back("n" + std::to_string(i));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            if (s != t && has(rng)) g.edges.push_back({s, t, "rel"});
    return g;
}

// ---- triples --------------------------------------------------------------

inline std::vector<kgprobe::Triple> random_triples(std::mt19937& rng, std::size_t max_len) {
    static const std::vector<std::string> entities{"college", "colleges", "Sony", "the ad", "Dublin colleges",
                                                   "Einstein", "relativity", "prize", "Prize", "court",
                                                   "Courts", "Gaelic", "theory", "theories"};
    static const std::vector<std::string> relations{"teach", "paid by", "developed", "won", "is", "teaches"};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::vector<kgprobe::Triple> out(len(rng));
    for (auto& t : out) {
        t.subject = entities[rng() % entities.size()];
        do {
            t.object = entities[rng() % entities.size()];
        } while (t.object == t.subject);
        t.relation = relations[rng() % relations.size()];
        t.sentence_id = "s" + std::to_string(rng() % 5);
        t.rule_id = "R1";
    }
    return out;
}

}  // namespace kgtest

#pragma once

// Knowledge graphs built from triples. Node identity is the Porter stem of
// the entity phrase; edge identity is (source stem, target stem, relation
// surface).

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgprobe/error.hpp"
#include "kgprobe/extract.hpp"
#include "kgprobe/porter.hpp"

namespace kgprobe {

inline std::string stem_phrase(std::string_view phrase,
                               PorterVariant variant = PorterVariant::original) {
    PorterStemmer stemmer(variant);
    std::istringstream words{std::string(phrase)};
    std::string word;
    std::string out;
    while (words >> word) {
        for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!out.empty()) out += ' ';
        out += stemmer.stem(word);
    }
    if (out.empty()) throw Error("stem_phrase: empty phrase");
    return out;
}

inline std::string_view to_string(PorterVariant v) {
    return v == PorterVariant::original ? "porter-original" : "porter-revised";
}

struct EdgeKey {
    std::string source;
    std::string target;
    std::string label;

    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeData {
    std::string label_stem;
    std::set<std::string> sentence_ids;

    friend bool operator==(const EdgeData&, const EdgeData&) = default;
};

class KnowledgeGraph {
public:
    using NodeMap = std::map<std::string, std::set<std::string>>;
    using EdgeMap = std::map<EdgeKey, EdgeData>;

    explicit KnowledgeGraph(PorterVariant stemmer = PorterVariant::original) : stemmer_(stemmer) {}

    // Returns the node id.
    std::string add_node(std::string_view surface) {
        auto id = stem_phrase(surface, stemmer_);
        nodes_[id].insert(std::string(surface));
        return id;
    }

    void add_triple(const Triple& t) {
        auto s = add_node(t.subject);
        auto o = add_node(t.object);
        auto& e = edges_[EdgeKey{s, o, t.relation}];
        e.label_stem = stem_phrase(t.relation, stemmer_);
        if (!t.sentence_id.empty()) e.sentence_ids.insert(t.sentence_id);
    }

    const NodeMap& nodes() const noexcept { return nodes_; }
    const EdgeMap& edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    PorterVariant stemmer() const noexcept { return stemmer_; }

    // Raw insertion used by the reader; the caller validates.
    NodeMap& mutable_nodes() noexcept { return nodes_; }
    EdgeMap& mutable_edges() noexcept { return edges_; }

    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    PorterVariant stemmer_;
    NodeMap nodes_;
    EdgeMap edges_;
};

inline KnowledgeGraph build_graph(const std::vector<Triple>& triples,
                                  PorterVariant stemmer = PorterVariant::original) {
    KnowledgeGraph g(stemmer);
    for (const auto& t : triples) g.add_triple(t);
    return g;
}

// Edge list view: one triple per (edge, sentence id), using the first
// recorded surface of each endpoint. Edges without provenance yield one
// triple with an empty sentence id.
inline std::vector<Triple> graph_triples(const KnowledgeGraph& g) {
    std::vector<Triple> out;
    for (const auto& [key, data] : g.edges()) {
        const auto& s = *g.nodes().at(key.source).begin();
        const auto& o = *g.nodes().at(key.target).begin();
        if (data.sentence_ids.empty()) {
            out.push_back({s, key.label, o, "", ""});
        }
        for (const auto& id : data.sentence_ids) out.push_back({s, key.label, o, id, ""});
    }
    return out;
}

inline nlohmann::ordered_json to_json(const KnowledgeGraph& g) {
    nlohmann::ordered_json j;
    j["stemmer"] = to_string(g.stemmer());
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& [id, surfaces] : g.nodes()) {
        nodes.push_back({{"id", id}, {"surfaces", surfaces}});
    }
    auto& edges = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [key, data] : g.edges()) {
        edges.push_back({{"source", key.source},
                         {"target", key.target},
                         {"label", key.label},
                         {"label_stem", data.label_stem},
                         {"sentence_ids", data.sentence_ids}});
    }
    return j;
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                     const std::string& where, const std::string& name) {
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(name, 0, where + ": missing field '" + key + "'");
    return *it;
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& where, const std::string& name) {
    const auto& v = require(j, key, where, name);
    if (!v.is_string()) throw FormatError(name, 0, where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline std::set<std::string> require_strings(const nlohmann::json& j, const char* key,
                                             const std::string& where, const std::string& name) {
    const auto& v = require(j, key, where, name);
    if (!v.is_array()) throw FormatError(name, 0, where + ": field '" + key + "' must be an array");
    std::set<std::string> out;
    for (const auto& s : v) {
        if (!s.is_string()) throw FormatError(name, 0, where + ": '" + key + "' entries must be strings");
        out.insert(s.get<std::string>());
    }
    return out;
}

}  // namespace detail

inline KnowledgeGraph graph_from_json(const nlohmann::json& j, const std::string& name = "<graph>") {
    if (!j.is_object()) throw FormatError(name, 0, "graph document must be an object");
    auto variant = PorterVariant::original;
    if (auto it = j.find("stemmer"); it != j.end()) {
        if (*it == "porter-revised") {
            variant = PorterVariant::revised;
        } else if (*it != "porter-original") {
            throw FormatError(name, 0, "unknown stemmer " + it->dump());
        }
    }
    KnowledgeGraph g(variant);
    const auto& nodes = detail::require(j, "nodes", "graph", name);
    const auto& edges = detail::require(j, "edges", "graph", name);
    if (!nodes.is_array() || !edges.is_array()) {
        throw FormatError(name, 0, "'nodes' and 'edges' must be arrays");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto where = "nodes[" + std::to_string(i) + "]";
        auto id = detail::require_string(nodes[i], "id", where, name);
        auto surfaces = detail::require_strings(nodes[i], "surfaces", where, name);
        bool canonical = false;
        for (const auto& s : surfaces) canonical = canonical || stem_phrase(s, variant) == id;
        if (!canonical) throw FormatError(name, 0, where + ": id '" + id + "' is not the stem of any surface");
        if (g.nodes().contains(id)) throw FormatError(name, 0, where + ": duplicate node '" + id + "'");
        g.mutable_nodes().emplace(id, std::move(surfaces));
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto where = "edges[" + std::to_string(i) + "]";
        EdgeKey key{detail::require_string(edges[i], "source", where, name),
                    detail::require_string(edges[i], "target", where, name),
                    detail::require_string(edges[i], "label", where, name)};
        for (const auto* end : {&key.source, &key.target}) {
            if (!g.nodes().contains(*end)) {
                throw FormatError(name, 0, where + ": references absent node '" + *end + "'");
            }
        }
        EdgeData data;
        data.sentence_ids = detail::require_strings(edges[i], "sentence_ids", where, name);
        data.label_stem = stem_phrase(key.label, variant);
        if (!g.mutable_edges().emplace(std::move(key), std::move(data)).second) {
            throw FormatError(name, 0, where + ": duplicate edge");
        }
    }
    return g;
}

inline void write_graph(const KnowledgeGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write graph file: " + path);
    out << to_json(g).dump(2) << '\n';
}

inline KnowledgeGraph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path, 0, std::string("malformed JSON: ") + e.what());
    }
    return graph_from_json(j, path);
}

}  // namespace kgprobe

#pragma once

// End-to-end extraction for one (model, dataset) pair and batch comparison
// of the resulting graphs.
//
// Manifest (JSON):
//   {
//     "model_id": "bert-base",            required
//     "dataset": "squad",                 source name, default "other"
//     "cloze": "cloze.jsonl",             required
//     "cloze_format": "native" | "lama",  default "native"
//     "predictions": "preds.jsonl",       absent for a ground-truth run
//     "parses": "model.conllu",           required; parses of the filled sentences
//     "gold_parses": "gold.conllu",       optional; also builds the ground-truth graph
//     "rules": "rules.json",              optional rule configuration
//     "out": "out/bert",                  required output directory
//     "rank": 1,                          candidate rank used to fill the mask
//     "strict": false
//   }
// Relative paths resolve against the manifest's directory.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgprobe/conllu.hpp"
#include "kgprobe/corpus.hpp"
#include "kgprobe/error.hpp"
#include "kgprobe/extract.hpp"
#include "kgprobe/feather.hpp"
#include "kgprobe/ged.hpp"
#include "kgprobe/graph.hpp"
#include "kgprobe/parallel.hpp"

namespace kgprobe {

namespace fs = std::filesystem;

struct RunManifest {
    std::string model_id;
    Source dataset = Source::other;
    fs::path cloze;
    ClozeFormat cloze_format = ClozeFormat::native;
    std::optional<fs::path> predictions;
    fs::path parses;
    std::optional<fs::path> gold_parses;
    std::optional<fs::path> rules;
    fs::path output_dir;
    std::size_t rank = 1;
    Strictness strictness = Strictness::lenient;
    std::size_t threads = 1;

    bool ground_truth() const { return !predictions.has_value(); }

    void validate() const {
        if (model_id.empty()) throw Error("manifest: model_id is required");
        if (rank == 0) throw Error("manifest: rank must be >= 1");
        if (output_dir.empty()) throw Error("manifest: output directory is required");
        auto need = [](const fs::path& p, const char* what) {
            if (p.empty()) throw Error(std::string("manifest: ") + what + " path is required");
            if (!fs::is_regular_file(p)) throw Error(std::string("manifest: ") + what + " file not found: " + p.string());
        };
        need(cloze, "cloze");
        need(parses, "parses");
        if (predictions) need(*predictions, "predictions");
        if (gold_parses) need(*gold_parses, "gold parses");
        if (rules) need(*rules, "rules");
    }
};

inline RunManifest manifest_from_json(const nlohmann::json& j, const fs::path& base = {}) {
    if (!j.is_object()) throw Error("manifest must be a JSON object");
    auto path = [&](const char* key) -> std::optional<fs::path> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) throw Error(std::string("manifest: '") + key + "' must be a string");
        fs::path p = it->get<std::string>();
        return p.is_relative() && !base.empty() ? base / p : p;
    };
    RunManifest m;
    m.model_id = j.value("model_id", std::string{});
    auto ds = j.value("dataset", std::string("other"));
    auto src = source_from_string(ds);
    if (!src) throw Error("manifest: unknown dataset '" + ds + "'");
    m.dataset = *src;
    auto fmt = j.value("cloze_format", std::string("native"));
    if (fmt == "lama") {
        m.cloze_format = ClozeFormat::lama;
    } else if (fmt != "native") {
        throw Error("manifest: unknown cloze_format '" + fmt + "'");
    }
    m.cloze = path("cloze").value_or(fs::path{});
    m.predictions = path("predictions");
    m.parses = path("parses").value_or(fs::path{});
    m.gold_parses = path("gold_parses");
    m.rules = path("rules");
    m.output_dir = path("out").value_or(fs::path{});
    m.rank = j.value("rank", std::size_t{1});
    m.strictness = j.value("strict", false) ? Strictness::strict : Strictness::lenient;
    return m;
}

inline RunManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());
    try {
        return manifest_from_json(nlohmann::json::parse(in), path.parent_path());
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string(), 0, std::string("malformed JSON: ") + e.what());
    }
}

// Graph for one set of filled sentences, with its bookkeeping.
struct GraphBuild {
    KnowledgeGraph graph;
    std::vector<Triple> triples;
    std::vector<std::string> missing_parses;
    std::vector<RecordError> dropped_parses;
    std::size_t parsed_sentences = 0;
};

inline GraphBuild build_from_sentences(const std::vector<FilledSentence>& sentences, const ConlluResult& parses,
                                       const RuleConfig& rules, Strictness mode, std::size_t threads = 1) {
    GraphBuild out;
    out.dropped_parses = parses.warnings;
    auto index = index_by_id(parses.sentences);
    std::vector<const ParsedSentence*> matched(sentences.size(), nullptr);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        auto it = index.find(sentences[i].id);
        if (it == index.end()) {
            if (mode == Strictness::strict) {
                throw RecordError(sentences[i].id, 0, "no parse with this sentence id");
            }
            out.missing_parses.push_back(sentences[i].id);
            continue;
        }
        matched[i] = it->second;
        ++out.parsed_sentences;
    }

    std::vector<std::vector<Triple>> per_sentence(sentences.size());
    parallel_for(sentences.size(), threads, [&](std::size_t i) {
        if (matched[i]) per_sentence[i] = extract_triples(*matched[i], rules);
    });
    for (auto& ts : per_sentence) {
        for (auto& t : ts) out.triples.push_back(std::move(t));
    }
    out.graph = build_graph(out.triples);
    return out;
}

struct RunOutput {
    GraphBuild model;
    std::optional<GraphBuild> gold;
    std::vector<FilledSentence> filled;
    nlohmann::ordered_json report;
};

namespace detail {

inline nlohmann::ordered_json build_report(const GraphBuild& b) {
    std::map<std::string, std::size_t> per_rule;
    for (const auto& id : all_rule_ids()) per_rule[id] = 0;
    for (const auto& t : b.triples) ++per_rule[t.rule_id];
    nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
    for (const auto& e : b.dropped_parses) dropped.push_back({{"id", e.record_id()}, {"line", e.line()}, {"reason", e.what()}});
    return {{"parsed_sentences", b.parsed_sentences},
            {"missing_parses", b.missing_parses},
            {"dropped_parses", dropped},
            {"triples", b.triples.size()},
            {"triples_per_rule", per_rule},
            {"unique_triples", b.graph.edge_count()},
            {"nodes", b.graph.node_count()},
            {"edges", b.graph.edge_count()},
            {"warnings", b.missing_parses.size() + b.dropped_parses.size()}};
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

}  // namespace detail

// Runs the extraction described by the manifest and writes graph.json,
// report.json and filled.jsonl (plus gold_graph.json when gold parses are
// given for a model run) into the output directory.
inline RunOutput run_extraction(const RunManifest& m) {
    m.validate();
    RunOutput out;
    RuleConfig rules = m.rules ? load_rule_config(m.rules->string()) : RuleConfig{};

    auto cloze = load_cloze(m.cloze.string(), m.cloze_format, m.strictness, m.dataset);
    std::vector<RecordError> skipped = cloze.errors;

    if (m.predictions) {
        auto preds = load_predictions(m.predictions->string(), m.strictness);
        skipped.insert(skipped.end(), preds.errors.begin(), preds.errors.end());
        std::map<std::string, const PredictionSet*> by_id;
        for (const auto& p : preds.items) by_id.emplace(p.id, &p);
        for (const auto& r : cloze.items) {
            auto it = by_id.find(r.id);
            if (it == by_id.end()) {
                RecordError e(r.id, 0, "no prediction for record");
                if (m.strictness == Strictness::strict) throw e;
                skipped.push_back(std::move(e));
                continue;
            }
            try {
                out.filled.push_back(fill_mask(r, *it->second, m.rank));
            } catch (const Error& err) {
                RecordError e(r.id, 0, err.what());
                if (m.strictness == Strictness::strict) throw e;
                skipped.push_back(std::move(e));
            }
        }
    } else {
        for (const auto& r : cloze.items) out.filled.push_back(gold_sentence(r));
    }

    auto parses = parse_conllu(m.parses.string());
    if (m.strictness == Strictness::strict && !parses.warnings.empty()) throw parses.warnings.front();
    out.model = build_from_sentences(out.filled, parses, rules, m.strictness, m.threads);

    if (m.predictions && m.gold_parses) {
        std::vector<FilledSentence> gold;
        for (const auto& r : cloze.items) gold.push_back(gold_sentence(r));
        auto gp = parse_conllu(m.gold_parses->string());
        if (m.strictness == Strictness::strict && !gp.warnings.empty()) throw gp.warnings.front();
        out.gold = build_from_sentences(gold, gp, rules, m.strictness, m.threads);
    }

    nlohmann::ordered_json skipped_json = nlohmann::ordered_json::array();
    for (const auto& e : skipped) skipped_json.push_back({{"id", e.record_id()}, {"line", e.line()}, {"reason", e.what()}});
    auto& rep = out.report;
    rep["model_id"] = m.model_id;
    rep["dataset"] = to_string(m.dataset);
    rep["provenance"] = m.ground_truth() ? "gold" : "model";
    rep["rank"] = m.rank;
    rep["records"] = cloze.items.size();
    rep["skipped_records"] = skipped_json;
    rep["filled_sentences"] = out.filled.size();
    rep["graph"] = detail::build_report(out.model);
    if (out.gold) rep["gold_graph"] = detail::build_report(*out.gold);

    fs::create_directories(m.output_dir);
    write_graph(out.model.graph, (m.output_dir / "graph.json").string());
    if (out.gold) write_graph(out.gold->graph, (m.output_dir / "gold_graph.json").string());
    std::string filled;
    for (const auto& f : out.filled) filled += to_json(f).dump() + '\n';
    detail::write_text(m.output_dir / "filled.jsonl", filled);
    detail::write_text(m.output_dir / "report.json", rep.dump(2) + '\n');
    return out;
}

enum class Metric { aed, exact, embedding };

struct CompareOptions {
    std::set<Metric> metrics{Metric::aed, Metric::embedding};
    CostModel costs = CostModel::unit();
    std::size_t node_limit = kDefaultNodeLimit;
    EmbeddingConfig embedding;
    std::size_t threads = 1;
};

struct ComparisonRow {
    std::string graph_id;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::optional<double> aed;
    std::optional<double> exact;
    std::optional<double> euclidean;
};

struct ComparisonTable {
    std::string reference_id;
    std::size_t reference_nodes = 0;
    std::size_t reference_edges = 0;
    std::set<Metric> metrics;
    std::vector<ComparisonRow> rows;
};

using NamedGraph = std::pair<std::string, KnowledgeGraph>;

// One row per non-reference graph, in input order.
inline ComparisonTable compare_all(const std::vector<NamedGraph>& graphs, const std::string& reference_id,
                                   const CompareOptions& opt = {}) {
    if (graphs.size() < 2) throw Error("compare_all needs at least two graphs");
    const NamedGraph* ref = nullptr;
    for (const auto& g : graphs) {
        if (g.first == reference_id) ref = &g;
    }
    if (!ref) throw Error("reference graph '" + reference_id + "' not among the inputs");

    ComparisonTable table{reference_id, ref->second.node_count(), ref->second.edge_count(), opt.metrics, {}};
    const auto ref_labeled = to_labeled(ref->second);
    std::optional<GraphEmbedding> ref_embedding;
    if (opt.metrics.contains(Metric::embedding)) ref_embedding = embed_graph(ref_labeled, opt.embedding);

    std::vector<const NamedGraph*> others;
    for (const auto& g : graphs) {
        if (&g != ref) others.push_back(&g);
    }
    table.rows.resize(others.size());
    parallel_for(others.size(), opt.threads, [&](std::size_t i) {
        const auto& [id, g] = *others[i];
        auto lg = to_labeled(g);
        ComparisonRow row{id, g.node_count(), g.edge_count(), {}, {}, {}};
        if (opt.metrics.contains(Metric::aed)) row.aed = aed(ref_labeled, lg, opt.costs).cost;
        if (opt.metrics.contains(Metric::exact)) row.exact = exact_ged(ref_labeled, lg, opt.costs, opt.node_limit).cost;
        if (ref_embedding) row.euclidean = euclidean(*ref_embedding, embed_graph(lg, opt.embedding));
        table.rows[i] = std::move(row);
    });
    return table;
}

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

inline std::string comparison_csv(const ComparisonTable& t) {
    std::string out = "graph,nodes,edges";
    if (t.metrics.contains(Metric::aed)) out += ",aed";
    if (t.metrics.contains(Metric::exact)) out += ",exact_ged";
    if (t.metrics.contains(Metric::embedding)) out += ",euclidean";
    out += '\n';
    for (const auto& r : t.rows) {
        out += r.graph_id + "," + std::to_string(r.nodes) + "," + std::to_string(r.edges);
        if (t.metrics.contains(Metric::aed)) out += "," + detail::format_number(r.aed.value_or(0));
        if (t.metrics.contains(Metric::exact)) out += "," + detail::format_number(r.exact.value_or(0));
        if (t.metrics.contains(Metric::embedding)) out += "," + detail::format_number(r.euclidean.value_or(0));
        out += '\n';
    }
    return out;
}

// Square matrix CSV with graph ids as row and column headers.
inline std::string distance_matrix_csv(const std::vector<std::string>& ids,
                                       const std::vector<std::vector<double>>& d) {
    std::string out = "graph";
    for (const auto& id : ids) out += "," + id;
    out += '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i];
        for (std::size_t j = 0; j < ids.size(); ++j) out += "," + detail::format_number(d[i][j]);
        out += '\n';
    }
    return out;
}

// Symmetric pairwise matrix; fn(i, j) is evaluated once per unordered pair.
template <typename Fn>
std::vector<std::vector<double>> pairwise(std::size_t n, std::size_t threads, Fn&& fn) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        auto [i, j] = pairs[k];
        d[i][j] = d[j][i] = fn(i, j);
    });
    return d;
}

}  // namespace kgprobe

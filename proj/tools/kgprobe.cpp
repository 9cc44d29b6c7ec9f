// kgprobe: build knowledge graphs from masked-LM cloze predictions and
// compare them.
//
//   kgprobe extract  --cloze C --preds P --parses M [--gold-parses G] --out DIR
//   kgprobe ged      A.json B.json [--method exact|aed] [--node-limit N]
//   kgprobe embed    A.json B.json ... [--theta-max T --eval-points D --order R]
//   kgprobe posor    --lm-graph L --parses M --gt-graph G --gt-parses GP
//   kgprobe report   --graph id=path ... --reference id [--methods aed,embedding]
//
// Exit codes: 0 success, 1 usage or validation error, 2 per-record failure
// in strict mode.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgprobe/kgprobe.hpp"

namespace fs = std::filesystem;
using namespace kgprobe;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRecordFailure = 2;

struct Globals {
    std::size_t threads = default_thread_count();
    bool pretty = false;
};

struct GraphArg {
    std::string id;
    fs::path path;
};

// "id=path" or a bare path; bare ".../<dir>/graph.json" is named after <dir>.
GraphArg parse_graph_arg(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
    fs::path p = arg;
    std::string id = p.stem().string();
    if ((id == "graph" || id == "gold_graph") && p.has_parent_path() && !p.parent_path().filename().empty()) {
        id = p.parent_path().filename().string() + (id == "gold_graph" ? "-gold" : "");
    }
    return {id, p};
}

void write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / name).string());
    out << text;
}

std::string pad(std::string s, std::size_t width) {
    // Width in code points so that "—" lines up.
    std::size_t cps = 0;
    for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
    if (cps < width) s.insert(0, width - cps, ' ');
    return s;
}

// Renders a CSV document as an aligned text table.
std::string pretty_table(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        width.resize(std::max(width.size(), r.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::size_t cps = 0;
            for (unsigned char c : r[i]) cps += (c & 0xC0) != 0x80;
            width[i] = std::max(width[i], cps);
        }
    }
    std::string out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "  " : "") + pad(r[i], width[i]);
        out += '\n';
    }
    return out;
}

std::vector<std::pair<std::string, KnowledgeGraph>> read_graphs(const std::vector<std::string>& args) {
    std::vector<std::pair<std::string, KnowledgeGraph>> out;
    for (const auto& a : args) {
        auto g = parse_graph_arg(a);
        out.emplace_back(g.id, read_graph(g.path.string()));
    }
    return out;
}

ConlluResult read_parses(const std::string& path) {
    auto r = parse_conllu(path);
    for (const auto& w : r.warnings) std::cerr << "warning: dropped parse " << w.what() << '\n';
    return r;
}

PosCounts count_graph(const KnowledgeGraph& g, const ConlluResult& parses, const std::string& name) {
    std::vector<std::string> warnings;
    auto counts = pos_counts(graph_triples(g), index_by_id(parses.sentences), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << name << ": " << w << '\n';
    return counts;
}

// ---- extract --------------------------------------------------------------

struct ExtractArgs {
    std::string manifest;
    std::string cloze;
    std::string cloze_format = "native";
    std::string preds;
    std::string parses;
    std::string gold_parses;
    std::string rules;
    std::string out;
    std::string model_id;
    std::string dataset = "other";
    std::size_t rank = 1;
    bool strict = false;
};

void add_extract(CLI::App& app, ExtractArgs& a) {
    auto* cmd = app.add_subcommand("extract", "Fill cloze masks, extract triples and build knowledge graphs");
    cmd->add_option("--manifest", a.manifest, "Run manifest (JSON); replaces the individual flags");
    cmd->add_option("--cloze", a.cloze, "Cloze records (JSON lines)");
    cmd->add_option("--cloze-format", a.cloze_format, "native or lama")->check(CLI::IsMember({"native", "lama"}));
    cmd->add_option("--preds", a.preds, "Model predictions (JSON lines); omit for a ground-truth run");
    cmd->add_option("--parses", a.parses, "CoNLL-U parses of the filled sentences");
    cmd->add_option("--gold-parses", a.gold_parses, "CoNLL-U parses of the gold sentences");
    cmd->add_option("--rules", a.rules, "Rule configuration (JSON)");
    cmd->add_option("--out", a.out, "Output directory");
    cmd->add_option("--model-id", a.model_id, "Model identifier recorded in the report");
    cmd->add_option("--dataset", a.dataset, "Dataset name")
        ->check(CLI::IsMember({"squad", "re_place_birth", "re_date_birth", "re_place_death", "other"}));
    cmd->add_option("--rank", a.rank, "Candidate rank used to fill the mask")->check(CLI::PositiveNumber);
    cmd->add_flag("--strict", a.strict, "Abort on the first invalid record");
}

int run_extract(const ExtractArgs& a, const Globals& g, const CLI::App& cmd) {
    RunManifest m;
    if (!a.manifest.empty()) {
        m = load_manifest(a.manifest);
        if (!a.out.empty()) m.output_dir = a.out;
        if (a.strict) m.strictness = Strictness::strict;
    } else {
        if (a.cloze.empty() || a.parses.empty() || a.out.empty()) {
            std::cerr << "error: extract requires --cloze, --parses and --out (or --manifest)\n\n" << cmd.help();
            return kUsage;
        }
        m.cloze = a.cloze;
        m.cloze_format = a.cloze_format == "lama" ? ClozeFormat::lama : ClozeFormat::native;
        if (!a.preds.empty()) m.predictions = a.preds;
        m.parses = a.parses;
        if (!a.gold_parses.empty()) m.gold_parses = a.gold_parses;
        if (!a.rules.empty()) m.rules = a.rules;
        m.output_dir = a.out;
        m.model_id = !a.model_id.empty() ? a.model_id : (a.preds.empty() ? "ground-truth" : "model");
        m.dataset = source_from_string(a.dataset).value_or(Source::other);
        m.rank = a.rank;
        m.strictness = a.strict ? Strictness::strict : Strictness::lenient;
    }
    m.threads = g.threads;
    auto out = run_extraction(m);
    const auto& rep = out.report;
    if (g.pretty) {
        std::cout << rep.dump(2) << '\n';
    } else {
        std::cout << "graph\t" << (m.output_dir / "graph.json").string() << "\tnodes=" << out.model.graph.node_count()
                  << "\tedges=" << out.model.graph.edge_count() << '\n';
        if (out.gold) {
            std::cout << "gold_graph\t" << (m.output_dir / "gold_graph.json").string()
                      << "\tnodes=" << out.gold->graph.node_count() << "\tedges=" << out.gold->graph.edge_count()
                      << '\n';
        }
    }
    std::size_t warnings = rep["skipped_records"].size() + rep["graph"]["warnings"].get<std::size_t>();
    if (warnings) std::cerr << "warning: " << warnings << " record(s) skipped or unparsed; see report.json\n";
    return kOk;
}

// ---- ged ------------------------------------------------------------------

struct GedArgs {
    std::vector<std::string> graphs;
    std::string method = "aed";
    std::size_t node_limit = kDefaultNodeLimit;
    std::string out;
};

void add_ged(CLI::App& app, GedArgs& a) {
    auto* cmd = app.add_subcommand("ged", "Graph edit distance between knowledge graphs");
    cmd->add_option("graphs", a.graphs, "Graph files (id=path or path)")->required()->expected(2, -1);
    cmd->add_option("--method", a.method, "exact or aed")->check(CLI::IsMember({"exact", "aed"}));
    cmd->add_option("--node-limit", a.node_limit, "Largest graph accepted by the exact method");
    cmd->add_option("--out", a.out, "Output directory for ged.csv");
}

int run_ged(const GedArgs& a, const Globals& g) {
    auto graphs = read_graphs(a.graphs);
    std::vector<LabeledGraph> lg;
    std::vector<std::string> ids;
    for (const auto& [id, kg] : graphs) {
        ids.push_back(id);
        lg.push_back(to_labeled(kg));
    }
    const auto cm = CostModel::unit();
    const bool exact = a.method == "exact";
    auto d = pairwise(lg.size(), g.threads, [&](std::size_t i, std::size_t j) {
        return exact ? exact_ged(lg[i], lg[j], cm, a.node_limit).cost : aed(lg[i], lg[j], cm).cost;
    });
    auto csv = distance_matrix_csv(ids, d);
    if (!a.out.empty()) write_file(a.out, "ged.csv", csv);
    if (lg.size() == 2 && !g.pretty) {
        std::cout << detail::format_number(d[0][1]) << '\n';
    } else {
        std::cout << (g.pretty ? pretty_table(csv) : csv);
    }
    return kOk;
}

// ---- embed ----------------------------------------------------------------

struct EmbedArgs {
    std::vector<std::string> graphs;
    double theta_max = 2.5;
    std::size_t eval_points = 25;
    std::size_t order = 2;
    std::vector<std::string> features{"log_degree"};
    std::string out;
};

void add_embed(CLI::App& app, EmbedArgs& a) {
    auto* cmd = app.add_subcommand("embed", "Characteristic-function graph embeddings and Euclidean distances");
    cmd->add_option("graphs", a.graphs, "Graph files (id=path or path)")->required()->expected(1, -1);
    cmd->add_option("--theta-max", a.theta_max, "Largest evaluation point")->check(CLI::PositiveNumber);
    cmd->add_option("--eval-points", a.eval_points, "Evaluation points per scale")->check(CLI::PositiveNumber);
    cmd->add_option("--order", a.order, "Number of random-walk scales")->check(CLI::PositiveNumber);
    cmd->add_option("--features", a.features, "Node features: log_degree, clustering")
        ->delimiter(',')
        ->check(CLI::IsMember({"log_degree", "clustering"}));
    cmd->add_option("--out", a.out, "Output directory for embeddings.jsonl and distances.csv");
}

int run_embed(const EmbedArgs& a, const Globals& g) {
    EmbeddingConfig cfg;
    cfg.theta_max = a.theta_max;
    cfg.eval_points = a.eval_points;
    cfg.order = a.order;
    cfg.features.clear();
    for (const auto& f : a.features) cfg.features.push_back(f == "clustering" ? NodeFeature::clustering : NodeFeature::log_degree);
    cfg.validate();

    auto graphs = read_graphs(a.graphs);
    std::vector<GraphEmbedding> emb(graphs.size());
    parallel_for(graphs.size(), g.threads, [&](std::size_t i) { emb[i] = embed_graph(graphs[i].second, cfg); });
    std::vector<std::string> ids;
    std::string lines;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        ids.push_back(graphs[i].first);
        lines += to_json(graphs[i].first, emb[i]).dump() + '\n';
    }
    auto d = pairwise(emb.size(), 1, [&](std::size_t i, std::size_t j) { return euclidean(emb[i], emb[j]); });
    auto csv = distance_matrix_csv(ids, d);
    if (!a.out.empty()) {
        write_file(a.out, "embeddings.jsonl", lines);
        write_file(a.out, "distances.csv", csv);
    }
    if (g.pretty) {
        std::cout << pretty_table(csv);
    } else if (a.out.empty()) {
        std::cout << lines;
    } else {
        std::cout << csv;
    }
    return kOk;
}

// ---- posor ----------------------------------------------------------------

struct PosorArgs {
    std::vector<std::string> lm_graphs;
    std::vector<std::string> parses;
    std::string gt_graph;
    std::string gt_parses;
    std::string out;
};

void add_posor(CLI::App& app, PosorArgs& a) {
    auto* cmd = app.add_subcommand("posor", "Part-of-speech over-prediction rates against a ground-truth graph");
    cmd->add_option("--lm-graph", a.lm_graphs, "Model graph (id=path or path); repeatable")->required();
    cmd->add_option("--parses", a.parses, "CoNLL-U parses behind each --lm-graph, in the same order")->required();
    cmd->add_option("--gt-graph", a.gt_graph, "Ground-truth graph")->required();
    cmd->add_option("--gt-parses", a.gt_parses, "CoNLL-U parses behind the ground-truth graph");
    cmd->add_option("--out", a.out, "Output directory for posor.csv, frequencies.csv and radar_<model>.json");
}

int run_posor(const PosorArgs& a, const Globals& g, const CLI::App& cmd) {
    if (a.parses.size() != a.lm_graphs.size()) {
        std::cerr << "error: give one --parses per --lm-graph\n\n" << cmd.help();
        return kUsage;
    }
    auto gt_arg = parse_graph_arg(a.gt_graph);
    auto gt = read_graph(gt_arg.path.string());
    auto gt_parses = read_parses(a.gt_parses.empty() ? a.parses.front() : a.gt_parses);
    auto gt_counts = count_graph(gt, gt_parses, gt_arg.id);

    std::vector<std::pair<std::string, PosorReport>> rows;
    for (std::size_t i = 0; i < a.lm_graphs.size(); ++i) {
        auto arg = parse_graph_arg(a.lm_graphs[i]);
        auto lm = read_graph(arg.path.string());
        auto counts = count_graph(lm, read_parses(a.parses[i]), arg.id);
        rows.emplace_back(arg.id, posor(counts, gt_counts));
    }
    auto csv = posor_csv(rows);
    if (!a.out.empty()) {
        write_file(a.out, "posor.csv", csv);
        if (gt_counts.total > 0) write_file(a.out, "frequencies.csv", frequencies_csv({{gt_arg.id, gt_counts}}));
        for (const auto& [id, rep] : rows) write_file(a.out, "radar_" + id + ".json", radar_json(id, rep).dump(2) + '\n');
    }
    std::cout << (g.pretty ? pretty_table(csv) : csv);
    return kOk;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> graphs;
    std::string reference;
    std::vector<std::string> methods{"aed", "embedding"};
    std::size_t node_limit = kDefaultNodeLimit;
    std::string gt_graph;
    std::string gt_parses;
    std::vector<std::string> parses;
    std::string out;
};

void add_report(CLI::App& app, ReportArgs& a) {
    auto* cmd = app.add_subcommand("report", "Compare many graphs against a reference graph");
    cmd->add_option("--graph", a.graphs, "Graph (id=path or path); repeatable")->required();
    cmd->add_option("--reference", a.reference, "Id of the reference graph")->required();
    cmd->add_option("--methods", a.methods, "Comma-separated: aed, exact, embedding")
        ->delimiter(',')
        ->check(CLI::IsMember({"aed", "exact", "embedding"}));
    cmd->add_option("--node-limit", a.node_limit, "Largest graph accepted by the exact method");
    cmd->add_option("--gt-graph", a.gt_graph, "Ground-truth graph; enables the POS table");
    cmd->add_option("--gt-parses", a.gt_parses, "CoNLL-U parses behind the ground-truth graph");
    cmd->add_option("--parses", a.parses, "id=path CoNLL-U parses per compared graph (POS table)");
    cmd->add_option("--out", a.out, "Output directory for comparison.csv (and posor.csv)");
}

int run_report(const ReportArgs& a, const Globals& g, const CLI::App& cmd) {
    CompareOptions opt;
    opt.metrics.clear();
    for (const auto& m : a.methods) {
        opt.metrics.insert(m == "aed" ? Metric::aed : m == "exact" ? Metric::exact : Metric::embedding);
    }
    opt.node_limit = a.node_limit;
    opt.threads = g.threads;
    auto graphs = read_graphs(a.graphs);
    auto table = compare_all(graphs, a.reference, opt);
    auto csv = comparison_csv(table);
    if (!a.out.empty()) write_file(a.out, "comparison.csv", csv);
    std::cout << (g.pretty ? pretty_table(csv) : csv);

    if (!a.gt_graph.empty()) {
        if (a.gt_parses.empty() || a.parses.empty()) {
            std::cerr << "error: the POS table needs --gt-parses and --parses id=path\n\n" << cmd.help();
            return kUsage;
        }
        auto gt_arg = parse_graph_arg(a.gt_graph);
        auto gt_counts = count_graph(read_graph(gt_arg.path.string()), read_parses(a.gt_parses), gt_arg.id);
        std::map<std::string, std::string> parse_paths;
        for (const auto& p : a.parses) {
            auto eq = p.find('=');
            if (eq == std::string::npos) throw Error("--parses expects id=path, got '" + p + "'");
            parse_paths[p.substr(0, eq)] = p.substr(eq + 1);
        }
        std::vector<std::pair<std::string, PosorReport>> rows;
        for (const auto& [id, kg] : graphs) {
            auto it = parse_paths.find(id);
            if (it == parse_paths.end()) continue;
            rows.emplace_back(id, posor(count_graph(kg, read_parses(it->second), id), gt_counts));
        }
        auto pcsv = posor_csv(rows);
        if (!a.out.empty()) write_file(a.out, "posor.csv", pcsv);
        std::cout << '\n' << (g.pretty ? pretty_table(pcsv) : pcsv);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kgprobe: knowledge graphs from masked-LM cloze probes"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads (default: KGPROBE_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--pretty", g.pretty, "Human-readable tables instead of machine output");

    ExtractArgs extract;
    GedArgs ged;
    EmbedArgs embed;
    PosorArgs posor_args;
    ReportArgs report;
    add_extract(app, extract);
    add_ged(app, ged);
    add_embed(app, embed);
    add_posor(app, posor_args);
    add_report(app, report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kUsage;
    }

    try {
        auto* cmd = app.get_subcommands().front();
        const auto name = cmd->get_name();
        if (name == "extract") return run_extract(extract, g, *cmd);
        if (name == "ged") return run_ged(ged, g);
        if (name == "embed") return run_embed(embed, g);
        if (name == "posor") return run_posor(posor_args, g, *cmd);
        if (name == "report") return run_report(report, g, *cmd);
    } catch (const RecordError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRecordFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

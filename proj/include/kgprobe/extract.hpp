#pragma once

// Rule-based subject-relation-object extraction over dependency parses.
//
// Rules (priority = evaluation order within one subject token):
//   R1  active SVO            (subject, verb, object)
//   R2  passive with agent    (passive subject, verb + " by", agent)
//   R3  participial modifier  (modified noun, participle + " " + preposition, prep. object)
//   R4  copular attribute     (subject, "is", attribute)
//   R5  open complement       (prep. object of "to V in/at Y", V, matrix object)
//
// Deprel labels are matched through an alias table so that both Universal
// Dependencies output (obj, obl + case) and older Stanford-style labels
// (dobj, prep + pobj, agent) are understood.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgprobe/conllu.hpp"
#include "kgprobe/error.hpp"

namespace kgprobe {

using DeprelSet = std::set<std::string, std::less<>>;

struct Triple {
    std::string subject;
    std::string relation;
    std::string object;
    std::string sentence_id;
    std::string rule_id;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline const std::vector<std::string>& all_rule_ids() {
    static const std::vector<std::string> ids = {"R1", "R2", "R3", "R4", "R5"};
    return ids;
}

struct DeprelAliases {
    DeprelSet subject{"nsubj"};
    DeprelSet passive_subject{"nsubj:pass", "nsubjpass"};
    DeprelSet object{"obj", "dobj"};
    DeprelSet agent{"agent"};
    DeprelSet oblique{"obl", "nmod"};
    DeprelSet case_marker{"case"};
    DeprelSet preposition{"prep"};
    DeprelSet prep_object{"pobj"};
    DeprelSet open_complement{"xcomp"};
    DeprelSet infinitive_marker{"mark", "aux"};
    DeprelSet participle_modifier{"acl", "partmod", "vmod"};
    DeprelSet copula{"cop"};
    DeprelSet attribute{"attr", "acomp"};
    // Branches cut from entity phrases.
    DeprelSet phrase_exclude{"acl",   "relcl", "rcmod", "partmod", "vmod",  "infmod", "advcl",
                             "ccomp", "xcomp", "csubj", "parataxis", "conj", "cc",    "appos",
                             "nmod",  "obl",   "prep",  "case",  "punct", "cop",   "aux",
                             "mark",  "nsubj", "nsubjpass", "obj", "dobj", "iobj", "agent"};
};

struct RuleConfig {
    std::set<std::string> enabled{all_rule_ids().begin(), all_rule_ids().end()};
    DeprelAliases aliases;
    // R3: render every participle preposition as "by".
    bool normalize_participle_preposition = false;
    // R5: prepositions introducing the complement's location argument.
    std::set<std::string> complement_prepositions{"in", "at"};

    bool enabled_rule(std::string_view id) const { return enabled.contains(std::string(id)); }

    static RuleConfig baseline() {
        RuleConfig c;
        c.enabled = {"R1"};
        return c;
    }
};

namespace detail {

inline DeprelSet json_set(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array()) throw Error("rule config: '" + key + "' must be an array of strings");
    DeprelSet out;
    for (const auto& v : j) {
        if (!v.is_string()) throw Error("rule config: '" + key + "' must be an array of strings");
        out.insert(v.get<std::string>());
    }
    return out;
}

}  // namespace detail

// {"enabled_rules": [...], "deprel_aliases": {"object": [...], ...},
//  "normalize_participle_preposition": bool, "complement_prepositions": [...]}
// Missing keys keep their defaults.
inline RuleConfig rule_config_from_json(const nlohmann::json& j) {
    RuleConfig c;
    if (!j.is_object()) throw Error("rule config must be a JSON object");
    if (auto it = j.find("enabled_rules"); it != j.end()) {
        c.enabled.clear();
        for (const auto& id : detail::json_set(*it, "enabled_rules")) {
            if (std::find(all_rule_ids().begin(), all_rule_ids().end(), id) == all_rule_ids().end()) {
                throw Error("rule config: unknown rule id '" + id + "'");
            }
            c.enabled.insert(id);
        }
    }
    if (auto it = j.find("normalize_participle_preposition"); it != j.end()) {
        if (!it->is_boolean()) throw Error("rule config: normalize_participle_preposition must be boolean");
        c.normalize_participle_preposition = it->get<bool>();
    }
    if (auto it = j.find("complement_prepositions"); it != j.end()) {
        auto s = detail::json_set(*it, "complement_prepositions");
        c.complement_prepositions = {s.begin(), s.end()};
    }
    if (auto it = j.find("deprel_aliases"); it != j.end()) {
        if (!it->is_object()) throw Error("rule config: deprel_aliases must be an object");
        auto& a = c.aliases;
        const std::map<std::string, DeprelSet*> roles = {
            {"subject", &a.subject},
            {"passive_subject", &a.passive_subject},
            {"object", &a.object},
            {"agent", &a.agent},
            {"oblique", &a.oblique},
            {"case_marker", &a.case_marker},
            {"preposition", &a.preposition},
            {"prep_object", &a.prep_object},
            {"open_complement", &a.open_complement},
            {"infinitive_marker", &a.infinitive_marker},
            {"participle_modifier", &a.participle_modifier},
            {"copula", &a.copula},
            {"attribute", &a.attribute},
            {"phrase_exclude", &a.phrase_exclude},
        };
        for (const auto& [key, value] : it->items()) {
            auto r = roles.find(key);
            if (r == roles.end()) throw Error("rule config: unknown deprel role '" + key + "'");
            *r->second = detail::json_set(value, key);
        }
    }
    return c;
}

inline RuleConfig load_rule_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rule config: " + path);
    try {
        return rule_config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path, 0, std::string("malformed JSON: ") + e.what());
    }
}

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace detail

// Joins surfaces with single spaces. Punctuation is dropped. Leading
// determiners are dropped from multi-token phrases, except in front of a
// multi-word proper name ("the Super Bowl"), where the determiner is part of
// the name and is capitalized.
inline std::string normalize_phrase(const std::vector<Token>& tokens) {
    if (tokens.empty()) throw Error("normalize_phrase: empty token list");
    std::vector<const Token*> kept;
    for (const auto& t : tokens) {
        if (t.upos != Upos::PUNCT) kept.push_back(&t);
    }
    if (kept.empty()) return {};

    std::size_t lead = 0;
    while (lead < kept.size() && kept[lead]->upos == Upos::DET) ++lead;
    bool capitalize = false;
    if (lead > 0 && lead < kept.size()) {
        bool name = kept.size() - lead >= 2 &&
                    std::all_of(kept.begin() + static_cast<std::ptrdiff_t>(lead), kept.end(),
                                [](const Token* t) { return t->upos == Upos::PROPN; });
        if (name) {
            capitalize = true;
        } else {
            kept.erase(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(lead));
        }
    }

    std::string out;
    for (const auto* t : kept) {
        if (!out.empty()) out += ' ';
        out += t->surface;
    }
    if (capitalize && !out.empty()) {
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    }
    return out;
}

namespace detail {

// A preposition together with the nominal it introduces.
struct PrepArg {
    std::string preposition;
    int object = 0;
};

class RuleContext {
public:
    RuleContext(const ParsedSentence& s, const RuleConfig& cfg) : s_(s), cfg_(cfg), kids_(s.size() + 1) {
        for (const auto& t : s.tokens) {
            if (t.head > 0) kids_[static_cast<std::size_t>(t.head)].push_back(t.index);
        }
    }

    const Token& tok(int i) const { return s_.at(i); }

    std::vector<int> children(int head, const DeprelSet& rels) const {
        std::vector<int> out;
        for (int c : kids_[static_cast<std::size_t>(head)]) {
            if (deprel_in(tok(c).deprel, rels)) out.push_back(c);
        }
        return out;
    }

    bool has_child(int head, const DeprelSet& rels) const { return !children(head, rels).empty(); }

    std::vector<PrepArg> prep_args(int head) const {
        const auto& a = cfg_.aliases;
        std::vector<PrepArg> out;
        for (int c : kids_[static_cast<std::size_t>(head)]) {
            const auto& rel = tok(c).deprel;
            if (deprel_in(rel, a.oblique)) {
                auto markers = children(c, a.case_marker);
                if (markers.empty()) continue;
                std::string prep;
                for (int m : markers) {
                    if (!prep.empty()) prep += ' ';
                    prep += lower(tok(m).surface);
                }
                out.push_back({prep, c});
            } else if (deprel_in(rel, a.preposition)) {
                for (int o : children(c, a.prep_object)) out.push_back({lower(tok(c).surface), o});
            } else if (deprel_in(rel, a.agent)) {
                auto objs = children(c, a.prep_object);
                if (objs.empty()) {
                    // UD-style agent nominal attached directly.
                    out.push_back({"by", c});
                } else {
                    for (int o : objs) out.push_back({"by", o});
                }
            }
        }
        return out;
    }

    std::string phrase(int anchor) const {
        return normalize_phrase(subtree_span(s_, anchor, cfg_.aliases.phrase_exclude));
    }

    const ParsedSentence& sentence() const { return s_; }
    const RuleConfig& config() const { return cfg_; }

private:
    const ParsedSentence& s_;
    const RuleConfig& cfg_;
    std::vector<std::vector<int>> kids_;
};

struct Candidate {
    int subject_anchor;
    int priority;
    int object_anchor;
    Triple triple;
};

inline bool is_be(const Token& t) {
    auto l = lower(t.lemma);
    if (l == "be") return true;
    auto s = lower(t.surface);
    return s == "is" || s == "was" || s == "are" || s == "were" || s == "be" || s == "been" ||
           s == "am" || s == "'s";
}

inline bool is_participle(const Token& t) {
    if (t.upos != Upos::VERB) return false;
    return t.feats == "_" || t.feats.empty() || t.feats.find("VerbForm=Part") != std::string::npos ||
           t.feats.find("VerbForm=Ger") != std::string::npos;
}

}  // namespace detail

inline std::vector<Triple> extract_triples(const ParsedSentence& sentence, const RuleConfig& rules) {
    detail::RuleContext ctx(sentence, rules);
    const auto& a = rules.aliases;
    std::vector<detail::Candidate> found;

    auto emit = [&](int subj, int priority, std::string relation, int obj, const char* rule) {
        Triple t{ctx.phrase(subj), std::move(relation), ctx.phrase(obj), sentence.id, rule};
        found.push_back({subj, priority, obj, std::move(t)});
    };

    for (const auto& tok : sentence.tokens) {
        const int v = tok.index;

        if (rules.enabled_rule("R1") && tok.upos == Upos::VERB) {
            auto objs = ctx.children(v, a.object);
            for (int s : ctx.children(v, a.subject)) {
                for (int o : objs) emit(s, 1, tok.surface, o, "R1");
            }
        }

        if (rules.enabled_rule("R2") && (tok.upos == Upos::VERB || tok.upos == Upos::AUX)) {
            for (int s : ctx.children(v, a.passive_subject)) {
                for (const auto& arg : ctx.prep_args(v)) {
                    if (arg.preposition == "by") emit(s, 2, tok.surface + " by", arg.object, "R2");
                }
            }
        }

        if (rules.enabled_rule("R3") && tok.head > 0 && deprel_in(tok.deprel, a.participle_modifier) &&
            detail::is_participle(tok)) {
            for (const auto& arg : ctx.prep_args(v)) {
                auto marker = rules.normalize_participle_preposition ? std::string("by") : arg.preposition;
                emit(tok.head, 3, tok.surface + " " + marker, arg.object, "R3");
            }
        }

        if (rules.enabled_rule("R4")) {
            // Nominal predicate carrying the copula (UD).
            bool has_cop = false;
            for (int c : ctx.children(v, a.copula)) has_cop = has_cop || detail::is_be(ctx.tok(c));
            if (has_cop) {
                for (int s : ctx.children(v, a.subject)) emit(s, 4, "is", v, "R4");
            }
            // Copular verb heading subject and attribute (older schemes).
            if (detail::is_be(tok)) {
                auto attrs = ctx.children(v, a.attribute);
                for (int s : ctx.children(v, a.subject)) {
                    for (int at : attrs) emit(s, 4, "is", at, "R4");
                }
            }
        }

        if (rules.enabled_rule("R5")) {
            auto matrix_objs = ctx.children(v, a.object);
            if (!matrix_objs.empty()) {
                std::vector<int> frontier = ctx.children(v, a.open_complement);
                std::set<int> visited;
                while (!frontier.empty()) {
                    int c = frontier.back();
                    frontier.pop_back();
                    if (!visited.insert(c).second) continue;
                    for (int next : ctx.children(c, a.open_complement)) frontier.push_back(next);

                    bool to_marked = false;
                    for (int m : ctx.children(c, a.infinitive_marker)) {
                        to_marked = to_marked || detail::lower(ctx.tok(m).surface) == "to";
                    }
                    if (!to_marked || ctx.has_child(c, a.object)) continue;
                    for (const auto& arg : ctx.prep_args(c)) {
                        if (!rules.complement_prepositions.contains(arg.preposition)) continue;
                        for (int x : matrix_objs) emit(arg.object, 5, ctx.tok(c).surface, x, "R5");
                    }
                }
            }
        }
    }

    std::stable_sort(found.begin(), found.end(), [](const auto& l, const auto& r) {
        return std::tie(l.subject_anchor, l.priority, l.object_anchor) <
               std::tie(r.subject_anchor, r.priority, r.object_anchor);
    });

    std::vector<Triple> out;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (auto& c : found) {
        auto& t = c.triple;
        if (t.subject.empty() || t.object.empty() || t.relation.empty()) continue;
        if (detail::lower(t.subject) == detail::lower(t.object)) continue;
        if (!seen.emplace(t.subject, t.relation, t.object).second) continue;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace kgprobe

#pragma once

// Part-of-speech diagnostics over extracted triples: per-tag token counts,
// the over-prediction rate of a model graph against a ground-truth graph,
// frequency tables and radar-plot data.

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgprobe/conllu.hpp"
#include "kgprobe/error.hpp"
#include "kgprobe/extract.hpp"

namespace kgprobe {

// Universal (coarse) tagset used in reports; X collects everything else.
enum class PosTag { ADJ, ADP, ADV, CONJ, DET, NOUN, NUM, PRON, PRT, PUNCT, VERB, X };

// Report column order (X is never a column).
inline constexpr std::array<PosTag, 11> kReportTags = {
    PosTag::ADJ, PosTag::ADP, PosTag::ADV, PosTag::CONJ, PosTag::DET, PosTag::NOUN,
    PosTag::NUM, PosTag::PRON, PosTag::PRT, PosTag::PUNCT, PosTag::VERB};

inline std::string_view to_string(PosTag t) {
    static constexpr std::array<std::string_view, 12> names = {
        "ADJ", "ADP", "ADV", "CONJ", "DET", "NOUN", "NUM", "PRON", "PRT", "PUNCT", "VERB", "X"};
    return names[static_cast<std::size_t>(t)];
}

inline PosTag report_tag(Upos u) {
    switch (u) {
        case Upos::ADJ: return PosTag::ADJ;
        case Upos::ADP: return PosTag::ADP;
        case Upos::ADV: return PosTag::ADV;
        case Upos::AUX:
        case Upos::VERB: return PosTag::VERB;
        case Upos::CCONJ:
        case Upos::SCONJ: return PosTag::CONJ;
        case Upos::DET: return PosTag::DET;
        case Upos::NOUN:
        case Upos::PROPN: return PosTag::NOUN;
        case Upos::NUM: return PosTag::NUM;
        case Upos::PART: return PosTag::PRT;
        case Upos::PRON: return PosTag::PRON;
        case Upos::PUNCT:
        case Upos::SYM: return PosTag::PUNCT;
        case Upos::INTJ:
        case Upos::X: return PosTag::X;
    }
    return PosTag::X;
}

struct PosCounts {
    std::map<PosTag, long> counts;
    long total = 0;

    long operator[](PosTag t) const {
        auto it = counts.find(t);
        return it == counts.end() ? 0 : it->second;
    }

    void add(PosTag t, long n = 1) {
        counts[t] += n;
        total += n;
    }

    PosCounts& operator+=(const PosCounts& o) {
        for (const auto& [t, n] : o.counts) add(t, n);
        return *this;
    }

    friend bool operator==(const PosCounts& a, const PosCounts& b) {
        if (a.total != b.total) return false;
        for (std::size_t i = 0; i <= static_cast<std::size_t>(PosTag::X); ++i) {
            auto t = static_cast<PosTag>(i);
            if (a[t] != b[t]) return false;
        }
        return true;
    }
};

using SentenceIndex = std::unordered_map<std::string, const ParsedSentence*>;

namespace detail {

inline std::vector<std::string> words(std::string_view phrase) {
    std::istringstream in{std::string(phrase)};
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

// Locates the phrase words in the sentence: a contiguous case-insensitive
// run is preferred, otherwise each word is matched on its own. Copular
// relations rendered as "is" fall back to any form of "be".
inline std::vector<std::optional<Upos>> locate(const ParsedSentence& s, const std::vector<std::string>& ws) {
    std::vector<std::optional<Upos>> out(ws.size());
    const auto n = s.tokens.size();
    for (std::size_t start = 0; ws.size() <= n && start + ws.size() <= n; ++start) {
        bool ok = true;
        for (std::size_t k = 0; k < ws.size() && ok; ++k) ok = lower(s.tokens[start + k].surface) == lower(ws[k]);
        if (ok) {
            for (std::size_t k = 0; k < ws.size(); ++k) out[k] = s.tokens[start + k].upos;
            return out;
        }
    }
    for (std::size_t k = 0; k < ws.size(); ++k) {
        auto w = lower(ws[k]);
        for (const auto& t : s.tokens) {
            if (lower(t.surface) == w) {
                out[k] = t.upos;
                break;
            }
        }
        if (!out[k] && w == "is") {
            for (const auto& t : s.tokens) {
                if (is_be(t)) {
                    out[k] = t.upos;
                    break;
                }
            }
        }
    }
    return out;
}

}  // namespace detail

// One count per token of subject, relation and object. Tokens that cannot be
// found in their source sentence count as X; a message per miss is appended
// to `warnings` when given.
inline PosCounts pos_counts(const std::vector<Triple>& triples, const SentenceIndex& parses,
                            std::vector<std::string>* warnings = nullptr) {
    PosCounts out;
    for (const auto& t : triples) {
        auto it = parses.find(t.sentence_id);
        const ParsedSentence* s = it == parses.end() ? nullptr : it->second;
        for (const auto* phrase : {&t.subject, &t.relation, &t.object}) {
            auto ws = detail::words(*phrase);
            std::vector<std::optional<Upos>> tags(ws.size());
            if (s) tags = detail::locate(*s, ws);
            for (std::size_t k = 0; k < ws.size(); ++k) {
                if (tags[k]) {
                    out.add(report_tag(*tags[k]));
                } else {
                    out.add(PosTag::X);
                    if (warnings) {
                        warnings->push_back("token '" + ws[k] + "' not found in sentence '" + t.sentence_id + "'");
                    }
                }
            }
        }
    }
    return out;
}

struct PosorReport {
    // nullopt marks an undefined rate (no ground-truth occurrences but the
    // model produced some).
    std::map<PosTag, std::optional<double>> values;
    PosCounts lm_counts;
    PosCounts gt_counts;
};

inline PosorReport posor(const PosCounts& lm, const PosCounts& gt) {
    PosorReport r{{}, lm, gt};
    for (auto tag : kReportTags) {
        const double l = static_cast<double>(lm[tag]);
        const double g = static_cast<double>(gt[tag]);
        if (g > 0) {
            r.values[tag] = (l - g) * 100.0 / g;
        } else if (l == 0) {
            r.values[tag] = 0.0;
        } else {
            r.values[tag] = std::nullopt;
        }
    }
    return r;
}

// Percentage of all counted tokens (X included) per tag.
inline std::map<PosTag, double> pos_frequencies(const PosCounts& counts) {
    if (counts.total <= 0) throw Error("pos_frequencies: no tokens counted");
    std::map<PosTag, double> out;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(PosTag::X); ++i) {
        auto t = static_cast<PosTag>(i);
        out[t] = 100.0 * static_cast<double>(counts[t]) / static_cast<double>(counts.total);
    }
    return out;
}

// Stand-in for per-class micro-accuracy: 100 - |rate|, clamped at 0.
inline std::map<PosTag, double> radar_values(const PosorReport& report) {
    std::map<PosTag, double> out;
    for (const auto& [tag, v] : report.values) {
        if (v) out[tag] = std::max(0.0, 100.0 - std::abs(*v));
    }
    return out;
}

inline constexpr std::string_view kUndefinedCell = "—";

inline std::string format_one_decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    std::string s = buf;
    if (s == "-0.0") s = "0.0";
    return s;
}

inline std::string format_cell(const std::optional<double>& v) {
    return v ? format_one_decimal(*v) : std::string(kUndefinedCell);
}

// One row per model, one column per report tag.
inline std::string posor_csv(const std::vector<std::pair<std::string, PosorReport>>& rows) {
    std::string out = "model";
    for (auto t : kReportTags) out += "," + std::string(to_string(t));
    out += '\n';
    for (const auto& [model, report] : rows) {
        out += model;
        for (auto t : kReportTags) {
            auto it = report.values.find(t);
            out += "," + format_cell(it == report.values.end() ? std::optional<double>{0.0} : it->second);
        }
        out += '\n';
    }
    return out;
}

inline std::string frequencies_csv(const std::vector<std::pair<std::string, PosCounts>>& rows) {
    std::string out = "model";
    for (auto t : kReportTags) out += "," + std::string(to_string(t));
    out += ",X,total_words\n";
    for (const auto& [model, counts] : rows) {
        auto f = pos_frequencies(counts);
        out += model;
        for (auto t : kReportTags) out += "," + format_one_decimal(f[t]);
        out += "," + format_one_decimal(f[PosTag::X]) + "," + std::to_string(counts.total) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json radar_json(const std::string& model, const PosorReport& report) {
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    auto radar = radar_values(report);
    for (auto t : kReportTags) {
        if (auto it = radar.find(t); it != radar.end()) values[std::string(to_string(t))] = it->second;
    }
    return {{"model", model},
            {"metric", "radar_values"},
            {"definition", "max(0, 100 - |POSOR|) per tag; stand-in for per-class micro-accuracy"},
            {"values", values}};
}

}  // namespace kgprobe

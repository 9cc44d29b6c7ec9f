#pragma once

// Cloze datasets, masked-LM prediction files, and mask resolution.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgprobe/error.hpp"

namespace kgprobe {

inline constexpr std::string_view kMaskToken = "[MASK]";

enum class Source { squad, re_place_birth, re_date_birth, re_place_death, other };

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::squad: return "squad";
        case Source::re_place_birth: return "re_place_birth";
        case Source::re_date_birth: return "re_date_birth";
        case Source::re_place_death: return "re_place_death";
        case Source::other: return "other";
    }
    return "other";
}

inline std::optional<Source> source_from_string(std::string_view s) {
    for (Source v : {Source::squad, Source::re_place_birth, Source::re_date_birth,
                     Source::re_place_death, Source::other}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

enum class ClozeFormat { native, lama };
enum class Strictness { strict, lenient };
enum class Provenance { model, gold };

inline std::string_view to_string(Provenance p) {
    return p == Provenance::model ? "model" : "gold";
}

struct ClozeRecord {
    std::string id;
    std::string masked_sentence;
    std::string gold_label;
    Source source = Source::other;

    friend bool operator==(const ClozeRecord&, const ClozeRecord&) = default;
};

struct Candidate {
    std::string token;
    double score = 0.0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct PredictionSet {
    std::string id;
    std::vector<Candidate> candidates;
};

struct FilledSentence {
    std::string id;
    std::string text;
    std::string filled_token;
    Provenance provenance = Provenance::model;

    friend bool operator==(const FilledSentence&, const FilledSentence&) = default;
};

template <typename T>
struct LoadResult {
    std::vector<T> items;
    std::vector<RecordError> errors;
};

namespace detail {

inline std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string_view::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

inline bool has_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline std::string replace_mask(std::string_view masked, std::string_view token) {
    std::string out(masked);
    auto pos = out.find(kMaskToken);
    out.replace(pos, kMaskToken.size(), token);
    return out;
}

// Google-RE relation URIs as they appear in the LAMA "pred" field.
inline Source lama_source(const nlohmann::json& j, Source fallback) {
    if (auto it = j.find("pred"); it != j.end() && it->is_string()) {
        const auto& pred = it->get_ref<const std::string&>();
        if (pred.ends_with("place_of_birth")) return Source::re_place_birth;
        if (pred.ends_with("date_of_birth")) return Source::re_date_birth;
        if (pred.ends_with("place_of_death")) return Source::re_place_death;
    }
    if (auto it = j.find("sub_label"); it != j.end() && it->is_string() &&
                                       it->get_ref<const std::string&>() == "Squad") {
        return Source::squad;
    }
    return fallback;
}

inline std::string string_field(const nlohmann::json& j, const char* key, const std::string& file,
                                std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw FormatError(file, line, std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

inline nlohmann::json parse_line(const std::string& text, const std::string& file,
                                 std::size_t line) {
    try {
        auto j = nlohmann::json::parse(text);
        if (!j.is_object()) throw FormatError(file, line, "record is not an object");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(file, line, std::string("malformed JSON: ") + e.what());
    }
}

inline bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

inline void collect(std::vector<RecordError>& errors, RecordError e, Strictness mode) {
    if (mode == Strictness::strict) throw e;
    errors.push_back(std::move(e));
}

}  // namespace detail

// Checks the ClozeRecord invariants; returns a description of the first
// violation, or nullopt.
inline std::optional<std::string> validate(const ClozeRecord& r) {
    if (r.id.empty()) return "empty id";
    auto masks = detail::count_occurrences(r.masked_sentence, kMaskToken);
    if (masks != 1) {
        return "expected exactly one " + std::string(kMaskToken) + ", found " +
               std::to_string(masks);
    }
    if (r.gold_label.empty()) return "empty gold_label";
    if (detail::has_whitespace(r.gold_label)) return "gold_label contains whitespace";
    return std::nullopt;
}

// Parses one cloze line. Throws FormatError for structural problems; the
// record invariants are not checked here.
inline ClozeRecord parse_cloze_line(const std::string& text, ClozeFormat format,
                                    const std::string& file, std::size_t line,
                                    Source default_source = Source::other) {
    auto j = detail::parse_line(text, file, line);
    ClozeRecord r;
    if (format == ClozeFormat::native) {
        r.id = detail::string_field(j, "id", file, line);
        r.masked_sentence = detail::string_field(j, "masked_sentence", file, line);
        r.gold_label = detail::string_field(j, "gold_label", file, line);
        r.source = default_source;
        if (auto it = j.find("source"); it != j.end()) {
            if (!it->is_string()) throw FormatError(file, line, "field 'source' must be a string");
            auto s = source_from_string(it->get<std::string>());
            if (!s) throw FormatError(file, line, "unknown source '" + it->get<std::string>() + "'");
            r.source = *s;
        }
        return r;
    }

    auto ms = j.find("masked_sentences");
    if (ms == j.end() || !ms->is_array() || ms->empty() || !(*ms)[0].is_string()) {
        throw FormatError(file, line, "missing non-empty 'masked_sentences' array");
    }
    r.masked_sentence = (*ms)[0].get<std::string>();
    r.gold_label = detail::string_field(j, "obj_label", file, line);
    if (auto it = j.find("id"); it != j.end() && (it->is_string() || it->is_number())) {
        r.id = it->is_string() ? it->get<std::string>() : it->dump();
    } else if (auto u = j.find("uuid"); u != j.end() && u->is_string()) {
        r.id = u->get<std::string>();
    } else {
        r.id = "line-" + std::to_string(line);
    }
    r.source = detail::lama_source(j, default_source);
    return r;
}

inline LoadResult<ClozeRecord> load_cloze(std::istream& in, ClozeFormat format,
                                          Strictness mode = Strictness::lenient,
                                          const std::string& name = "<stream>",
                                          Source default_source = Source::other) {
    LoadResult<ClozeRecord> out;
    std::unordered_set<std::string> seen;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (detail::blank(text)) continue;
        auto r = parse_cloze_line(text, format, name, line, default_source);
        if (auto why = validate(r)) {
            detail::collect(out.errors, RecordError(r.id, line, *why), mode);
            continue;
        }
        if (!seen.insert(r.id).second) {
            detail::collect(out.errors, RecordError(r.id, line, "duplicate id"), mode);
            continue;
        }
        out.items.push_back(std::move(r));
    }
    return out;
}

inline LoadResult<ClozeRecord> load_cloze(const std::string& path, ClozeFormat format,
                                          Strictness mode = Strictness::lenient,
                                          Source default_source = Source::other) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open cloze file: " + path);
    return load_cloze(in, format, mode, path, default_source);
}

inline std::optional<std::string> validate(const PredictionSet& p) {
    if (p.id.empty()) return "empty id";
    if (p.candidates.empty()) return "no candidates";
    if (p.candidates.size() > 5) return "more than 5 candidates";
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
        const auto& c = p.candidates[i];
        if (c.token.empty()) return "empty candidate token";
        if (!std::isfinite(c.score) || c.score < 0.0) return "candidate score not finite and >= 0";
        if (i > 0 && p.candidates[i - 1].score < c.score) return "candidates not sorted by score";
    }
    return std::nullopt;
}

inline LoadResult<PredictionSet> load_predictions(std::istream& in,
                                                  Strictness mode = Strictness::lenient,
                                                  const std::string& name = "<stream>") {
    LoadResult<PredictionSet> out;
    std::unordered_set<std::string> seen;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (detail::blank(text)) continue;
        auto j = detail::parse_line(text, name, line);
        PredictionSet p;
        p.id = detail::string_field(j, "id", name, line);
        auto cands = j.find("candidates");
        if (cands == j.end() || !cands->is_array()) {
            throw FormatError(name, line, "missing 'candidates' array");
        }
        for (const auto& c : *cands) {
            if (!c.is_object() || !c.contains("token") || !c["token"].is_string() ||
                !c.contains("score") || !c["score"].is_number()) {
                throw FormatError(name, line, "candidate must be {token: string, score: number}");
            }
            p.candidates.push_back({c["token"].get<std::string>(), c["score"].get<double>()});
        }
        if (auto why = validate(p)) {
            detail::collect(out.errors, RecordError(p.id, line, *why), mode);
            continue;
        }
        if (!seen.insert(p.id).second) {
            detail::collect(out.errors, RecordError(p.id, line, "duplicate id"), mode);
            continue;
        }
        out.items.push_back(std::move(p));
    }
    return out;
}

inline LoadResult<PredictionSet> load_predictions(const std::string& path,
                                                  Strictness mode = Strictness::lenient) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open predictions file: " + path);
    return load_predictions(in, mode, path);
}

// Replaces the mask with the candidate at 1-based `rank` in descending score
// order; equal scores keep their list order.
inline FilledSentence fill_mask(const ClozeRecord& record, const PredictionSet& preds,
                                std::size_t rank = 1) {
    if (preds.id != record.id) {
        throw Error("prediction id '" + preds.id + "' does not match record '" + record.id + "'");
    }
    if (preds.candidates.empty()) throw Error("record '" + record.id + "' has no candidates");
    if (rank == 0 || rank > preds.candidates.size()) {
        throw Error("rank " + std::to_string(rank) + " out of range for record '" + record.id + "'");
    }
    if (auto why = validate(record)) throw Error("record '" + record.id + "': " + *why);

    std::vector<std::size_t> order(preds.candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds.candidates[a].score > preds.candidates[b].score;
    });
    const auto& token = preds.candidates[order[rank - 1]].token;
    return {record.id, detail::replace_mask(record.masked_sentence, token), token,
            Provenance::model};
}

inline FilledSentence gold_sentence(const ClozeRecord& record) {
    if (auto why = validate(record)) throw Error("record '" + record.id + "': " + *why);
    return {record.id, detail::replace_mask(record.masked_sentence, record.gold_label),
            record.gold_label, Provenance::gold};
}

inline nlohmann::ordered_json to_json(const FilledSentence& s) {
    return {{"id", s.id},
            {"text", s.text},
            {"filled_token", s.filled_token},
            {"provenance", to_string(s.provenance)}};
}

}  // namespace kgprobe

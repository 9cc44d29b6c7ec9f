#pragma once

// CoNLL-U reader for dependency-parsed sentences.
//
// Only the columns the extractor needs are interpreted (FORM, LEMMA, UPOS,
// FEATS, HEAD, DEPREL). Multiword ranges ("3-4") and empty nodes ("5.1") are
// skipped. Each sentence block must carry a "# sent_id = <id>" comment.

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgprobe/error.hpp"

namespace kgprobe {

enum class Upos {
    ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::array<std::string_view, 17> kUposNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

inline std::string_view to_string(Upos u) { return kUposNames[static_cast<std::size_t>(u)]; }

inline std::optional<Upos> upos_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kUposNames.size(); ++i) {
        if (kUposNames[i] == s) return static_cast<Upos>(i);
    }
    return std::nullopt;
}

struct Token {
    int index = 0;
    std::string surface;
    std::string lemma;
    Upos upos = Upos::X;
    int head = 0;
    std::string deprel;
    std::string feats = "_";

    friend bool operator==(const Token&, const Token&) = default;
};

struct ParsedSentence {
    std::string id;
    std::vector<Token> tokens;

    std::size_t size() const noexcept { return tokens.size(); }

    // 1-based access.
    const Token& at(int index) const {
        if (index < 1 || static_cast<std::size_t>(index) > tokens.size()) {
            throw Error("token index " + std::to_string(index) + " out of range in sentence '" +
                        id + "'");
        }
        return tokens[static_cast<std::size_t>(index - 1)];
    }

    int root() const {
        for (const auto& t : tokens) {
            if (t.head == 0) return t.index;
        }
        return 0;
    }

    std::vector<int> children(int index) const {
        std::vector<int> out;
        for (const auto& t : tokens) {
            if (t.head == index) out.push_back(t.index);
        }
        return out;
    }

    friend bool operator==(const ParsedSentence&, const ParsedSentence&) = default;
};

struct ConlluResult {
    std::vector<ParsedSentence> sentences;
    // Sentences dropped because they break the tree invariants.
    std::vector<RecordError> warnings;
};

// Returns a description of the first violated tree invariant, or nullopt.
inline std::optional<std::string> check_tree(const ParsedSentence& s) {
    const int n = static_cast<int>(s.tokens.size());
    if (n == 0) return "sentence has no tokens";
    int roots = 0;
    for (int i = 0; i < n; ++i) {
        const auto& t = s.tokens[static_cast<std::size_t>(i)];
        if (t.index != i + 1) return "token indices are not contiguous from 1";
        if (t.head < 0 || t.head > n) return "head of token " + std::to_string(t.index) + " out of range";
        if (t.head == t.index) return "token " + std::to_string(t.index) + " heads itself";
        if (t.head == 0) ++roots;
    }
    if (roots != 1) return "expected exactly one root, found " + std::to_string(roots);
    for (const auto& t : s.tokens) {
        int cur = t.index;
        int steps = 0;
        while (cur != 0) {
            if (++steps > n) return "cyclic heads through token " + std::to_string(t.index);
            cur = s.tokens[static_cast<std::size_t>(cur - 1)].head;
        }
    }
    return std::nullopt;
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return cols;
}

inline std::optional<int> to_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline ConlluResult parse_conllu(std::istream& in, const std::string& name = "<stream>") {
    ConlluResult out;
    ParsedSentence cur;
    bool have_id = false;
    bool in_block = false;
    std::size_t block_line = 0;

    auto flush = [&]() {
        if (!in_block) return;
        if (!have_id) throw FormatError(name, block_line, "sentence block without '# sent_id'");
        if (auto why = check_tree(cur)) {
            out.warnings.emplace_back(cur.id, block_line, *why);
        } else {
            out.sentences.push_back(std::move(cur));
        }
        cur = ParsedSentence{};
        have_id = false;
        in_block = false;
    };

    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        if (detail::trim(text).empty()) {
            flush();
            continue;
        }
        if (!in_block) {
            in_block = true;
            block_line = line;
        }
        if (text.front() == '#') {
            auto body = detail::trim(text.substr(1));
            if (body.starts_with("sent_id")) {
                auto eq = body.find('=');
                if (eq == std::string_view::npos) throw FormatError(name, line, "malformed sent_id comment");
                auto id = detail::trim(body.substr(eq + 1));
                if (id.empty()) throw FormatError(name, line, "empty sent_id");
                cur.id = std::string(id);
                have_id = true;
            }
            continue;
        }
        auto cols = detail::split_tabs(text);
        if (cols.size() != 10) {
            throw FormatError(name, line, "expected 10 tab-separated columns, found " +
                                              std::to_string(cols.size()));
        }
        if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
        auto index = detail::to_int(cols[0]);
        auto head = detail::to_int(cols[6]);
        if (!index) throw FormatError(name, line, "bad token id '" + std::string(cols[0]) + "'");
        if (!head) throw FormatError(name, line, "bad head '" + std::string(cols[6]) + "'");
        Token t;
        t.index = *index;
        t.surface = std::string(cols[1]);
        t.lemma = std::string(cols[2]);
        t.upos = upos_from_string(cols[3]).value_or(Upos::X);
        t.feats = std::string(cols[5]);
        t.head = *head;
        t.deprel = std::string(cols[7]);
        cur.tokens.push_back(std::move(t));
    }
    flush();
    return out;
}

inline ConlluResult parse_conllu(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CoNLL-U file: " + path);
    return parse_conllu(in, path);
}

// Debug writer; XPOS, DEPS and MISC are written as "_".
inline void write_conllu(std::ostream& os, const std::vector<ParsedSentence>& sentences) {
    for (const auto& s : sentences) {
        os << "# sent_id = " << s.id << '\n';
        for (const auto& t : s.tokens) {
            os << t.index << '\t' << t.surface << '\t' << t.lemma << '\t' << to_string(t.upos)
               << "\t_\t" << t.feats << '\t' << t.head << '\t' << t.deprel << "\t_\t_\n";
        }
        os << '\n';
    }
}

// True when `deprel` or its universal part (before ':') is in `set`.
inline bool deprel_in(std::string_view deprel, const std::set<std::string, std::less<>>& set) {
    if (set.contains(deprel)) return true;
    auto colon = deprel.find(':');
    return colon != std::string_view::npos && set.contains(deprel.substr(0, colon));
}

// The token plus every transitive dependent not reached through an excluded
// relation, in surface order.
inline std::vector<Token> subtree_span(const ParsedSentence& sentence, int index,
                                       const std::set<std::string, std::less<>>& exclude_deprels) {
    sentence.at(index);
    std::vector<std::vector<int>> kids(sentence.size() + 1);
    for (const auto& t : sentence.tokens) {
        if (t.head > 0) kids[static_cast<std::size_t>(t.head)].push_back(t.index);
    }
    std::vector<char> keep(sentence.size() + 1, 0);
    std::vector<int> stack{index};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        if (keep[static_cast<std::size_t>(cur)]) continue;
        keep[static_cast<std::size_t>(cur)] = 1;
        for (int c : kids[static_cast<std::size_t>(cur)]) {
            if (!deprel_in(sentence.at(c).deprel, exclude_deprels)) stack.push_back(c);
        }
    }
    std::vector<Token> out;
    for (const auto& t : sentence.tokens) {
        if (keep[static_cast<std::size_t>(t.index)]) out.push_back(t);
    }
    return out;
}

inline std::unordered_map<std::string, const ParsedSentence*> index_by_id(
    const std::vector<ParsedSentence>& sentences) {
    std::unordered_map<std::string, const ParsedSentence*> out;
    for (const auto& s : sentences) out.emplace(s.id, &s);
    return out;
}

}  // namespace kgprobe

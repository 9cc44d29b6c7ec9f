#pragma once

// Porter suffix-stripping stemmer.
//
// `PorterVariant::original` follows the 1980 rule tables exactly. The
// `revised` variant applies the two later step-2 changes (BLI -> BLE,
// LOGI -> LOG) and leaves words of one or two letters alone, which is what
// the widely distributed reference implementations do.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace kgprobe {

enum class PorterVariant { original, revised };

class PorterStemmer {
public:
    explicit PorterStemmer(PorterVariant variant = PorterVariant::original) : variant_(variant) {}

    // Expects a lowercase ASCII word; other bytes are treated as consonants.
    std::string stem(std::string_view word) const {
        std::string w(word);
        if (variant_ == PorterVariant::revised && w.size() <= 2) return w;
        step1a(w);
        step1b(w);
        step1c(w);
        step2(w);
        step3(w);
        step4(w);
        step5a(w);
        step5b(w);
        return w;
    }

private:
    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    static bool is_vowel_letter(char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    }

    // y is a consonant at word start or after a vowel.
    static std::vector<bool> consonant_flags(std::string_view s) {
        std::vector<bool> flags(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (is_vowel_letter(s[i])) {
                flags[i] = false;
            } else if (s[i] == 'y') {
                flags[i] = i == 0 ? true : !flags[i - 1];
            } else {
                flags[i] = true;
            }
        }
        return flags;
    }

    // Number of VC sequences in [C](VC)^m[V].
    static int measure(std::string_view s) {
        auto flags = consonant_flags(s);
        int m = 0;
        for (std::size_t i = 1; i < flags.size(); ++i) {
            if (!flags[i - 1] && flags[i]) ++m;
        }
        return m;
    }

    static bool contains_vowel(std::string_view s) {
        auto flags = consonant_flags(s);
        return std::find(flags.begin(), flags.end(), false) != flags.end();
    }

    static bool ends_double_consonant(std::string_view s) {
        if (s.size() < 2 || s[s.size() - 1] != s[s.size() - 2]) return false;
        return consonant_flags(s).back();
    }

    // *o: ends consonant-vowel-consonant, last not w, x or y.
    static bool ends_cvc(std::string_view s) {
        if (s.size() < 3) return false;
        auto f = consonant_flags(s);
        const auto n = s.size();
        char last = s[n - 1];
        return f[n - 3] && !f[n - 2] && f[n - 1] && last != 'w' && last != 'x' && last != 'y';
    }

    static std::string_view without(std::string_view w, std::string_view suffix) {
        return w.substr(0, w.size() - suffix.size());
    }

    // The first rule whose suffix matches decides; if its measure condition
    // fails the word is left unchanged.
    template <std::size_t N>
    static void apply_measure_rules(std::string& w, const std::array<Rule, N>& rules, int min_m) {
        for (const auto& r : rules) {
            if (!w.ends_with(r.suffix)) continue;
            auto base = without(w, r.suffix);
            if (measure(base) > min_m) w = std::string(base) + std::string(r.replacement);
            return;
        }
    }

    static void step1a(std::string& w) {
        if (w.ends_with("sses")) {
            w.resize(w.size() - 2);
        } else if (w.ends_with("ies")) {
            w.resize(w.size() - 2);
        } else if (w.ends_with("ss")) {
            // unchanged
        } else if (w.ends_with("s")) {
            w.pop_back();
        }
    }

    static void step1b(std::string& w) {
        if (w.ends_with("eed")) {
            if (measure(without(w, "eed")) > 0) w.pop_back();
            return;
        }
        std::string_view removed;
        if (w.ends_with("ed") && contains_vowel(without(w, "ed"))) {
            removed = "ed";
        } else if (w.ends_with("ing") && contains_vowel(without(w, "ing"))) {
            removed = "ing";
        } else {
            return;
        }
        w.resize(w.size() - removed.size());
        if (w.ends_with("at") || w.ends_with("bl") || w.ends_with("iz")) {
            w += 'e';
        } else if (ends_double_consonant(w)) {
            char c = w.back();
            if (c != 'l' && c != 's' && c != 'z') w.pop_back();
        } else if (measure(w) == 1 && ends_cvc(w)) {
            w += 'e';
        }
    }

    static void step1c(std::string& w) {
        if (w.ends_with("y") && contains_vowel(without(w, "y"))) w.back() = 'i';
    }

    void step2(std::string& w) const {
        static constexpr std::array<Rule, 20> original = {{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},  {"alli", "al"},    {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},  {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},   {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},   {"biliti", "ble"},
        }};
        static constexpr std::array<Rule, 21> revised = {{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
            {"izer", "ize"},    {"bli", "ble"},    {"alli", "al"},    {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},  {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},   {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},   {"biliti", "ble"},
            {"logi", "log"},
        }};
        if (variant_ == PorterVariant::original) {
            apply_measure_rules(w, original, 0);
        } else {
            apply_measure_rules(w, revised, 0);
        }
    }

    static void step3(std::string& w) {
        static constexpr std::array<Rule, 7> rules = {{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        }};
        apply_measure_rules(w, rules, 0);
    }

    static void step4(std::string& w) {
        static constexpr std::array<std::string_view, 19> suffixes = {
            "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
        for (auto suffix : suffixes) {
            if (!w.ends_with(suffix)) continue;
            auto base = without(w, suffix);
            bool ok = measure(base) > 1;
            if (suffix == "ion") ok = ok && !base.empty() && (base.back() == 's' || base.back() == 't');
            if (ok) w.resize(base.size());
            return;
        }
    }

    static void step5a(std::string& w) {
        if (!w.ends_with("e")) return;
        auto base = without(w, "e");
        int m = measure(base);
        if (m > 1 || (m == 1 && !ends_cvc(base))) w.pop_back();
    }

    static void step5b(std::string& w) {
        if (w.ends_with("ll") && measure(w) > 1) w.pop_back();
    }

    PorterVariant variant_;
};

inline std::string porter_stem(std::string_view word,
                               PorterVariant variant = PorterVariant::original) {
    return PorterStemmer(variant).stem(word);
}

}  // namespace kgprobe

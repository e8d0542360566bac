/*
 * Copyright 2026 The letz-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "letz/text_similarity.hpp"

#include <algorithm>
#include <numeric>

#include "letz/error.hpp"

namespace letz {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Base letters for U+00C0..U+00FF; '-' keeps the code point as is.
constexpr std::string_view kLatin1Base = "AAAAAA-CEEEEIIII-NOOOOO-OUUUUY--aaaaaa-ceeeeiiii-nooooo-ouuuuy-y";

// Base letters for U+0100..U+017F.
constexpr std::string_view kLatinExtABase =
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIi--JjKk-LlLlLlLlLlNnNnNn---OoOoOo--RrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZz-";

static_assert(kLatin1Base.size() == 64);
static_assert(kLatinExtABase.size() == 128);

char32_t strip_mark(char32_t c) noexcept {
    if (c >= 0xC0 && c <= 0xFF) {
        char base = kLatin1Base[c - 0xC0];
        return base == '-' ? c : static_cast<char32_t>(base);
    }
    if (c >= 0x100 && c <= 0x17F) {
        char base = kLatinExtABase[c - 0x100];
        return base == '-' ? c : static_cast<char32_t>(base);
    }
    return c;
}

char32_t lower(char32_t c) noexcept {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 0x20 : c;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
    if (c >= 0x100 && c <= 0x137) {
        if (c == 0x130) return U'i';
        if (c == 0x131) return c;
        return (c % 2 == 0) ? c + 1 : c;
    }
    if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
    if (c >= 0x14A && c <= 0x177) return (c % 2 == 0) ? c + 1 : c;
    if (c == 0x178) return 0xFF;
    if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
    if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
    if (c >= 0x410 && c <= 0x42F) return c + 0x20;
    if (c >= 0x400 && c <= 0x40F) return c + 0x50;
    return c;
}

bool is_combining_mark(char32_t c) noexcept { return c >= 0x300 && c <= 0x36F; }

}  // namespace

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        // Reject overlongs, surrogates and out-of-range values.
        static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
        if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string utf8_encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) {
        if (c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) c = kReplacement;
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

bool is_unicode_space(char32_t c) noexcept {
    return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
           c == 0x3000;
}

bool is_unicode_punct(char32_t c) noexcept {
    if (c < 0x80) {
        return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
               (c >= 0x7B && c <= 0x7E);
    }
    switch (c) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
            return true;
        default:
            break;
    }
    return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003);
}

std::string trim(std::string_view s) {
    const std::u32string cps = utf8_decode(s);
    std::size_t start = 0;
    std::size_t end = cps.size();
    while (start < end && is_unicode_space(cps[start])) ++start;
    while (end > start && is_unicode_space(cps[end - 1])) --end;
    if (start == 0 && end == cps.size()) return std::string(s);
    return utf8_encode(std::u32string_view(cps).substr(start, end - start));
}

void SimilarityConfig::validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("similarity.threshold must lie in [0,1], got " + std::to_string(threshold));
    }
}

char32_t fold_codepoint(char32_t c, bool case_fold, bool strip_diacritics) noexcept {
    if (strip_diacritics) c = strip_mark(c);
    if (case_fold) c = lower(c);
    return c;
}

std::u32string fold(std::string_view s, const SimilarityConfig& cfg) {
    std::u32string cps = utf8_decode(s);
    if (!cfg.case_fold && !cfg.strip_diacritics) return cps;
    std::u32string out;
    out.reserve(cps.size());
    for (char32_t c : cps) {
        if (cfg.strip_diacritics && is_combining_mark(c)) continue;
        out.push_back(fold_codepoint(c, cfg.case_fold, cfg.strip_diacritics));
    }
    return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    if (b.empty()) return a.size();

    // Two rows over the shorter string.
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        const char32_t ca = a[i - 1];
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t subst = prev[j - 1] + (ca == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    return levenshtein(utf8_decode(a), utf8_decode(b));
}

double normalized_distance_folded(std::u32string_view a, std::u32string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double normalized_distance(std::string_view a, std::string_view b, const SimilarityConfig& cfg) {
    return normalized_distance_folded(fold(a, cfg), fold(b, cfg));
}

bool is_similar_folded(std::u32string_view a, std::u32string_view b, const SimilarityConfig& cfg) {
    if (a == b) return true;
    const std::size_t longest = std::max(a.size(), b.size());
    const std::size_t gap = longest - std::min(a.size(), b.size());
    if (cfg.metric == DistanceMetric::Raw) {
        if (gap > cfg.max_edits) return false;
        return levenshtein(a, b) <= cfg.max_edits;
    }
    // The length gap is a lower bound on the distance.
    if (static_cast<double>(gap) / static_cast<double>(longest) >= cfg.threshold) return false;
    return normalized_distance_folded(a, b) < cfg.threshold;
}

bool is_similar(std::string_view a, std::string_view b, const SimilarityConfig& cfg) {
    return is_similar_folded(fold(a, cfg), fold(b, cfg), cfg);
}

std::vector<std::string> tokenize(std::string_view sentence) {
    const std::u32string cps = utf8_decode(sentence);
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_unicode_space(cps[i])) ++i;
        std::size_t start = i;
        while (i < cps.size() && !is_unicode_space(cps[i])) ++i;
        std::size_t end = i;
        while (start < end && is_unicode_punct(cps[start])) ++start;
        while (end > start && is_unicode_punct(cps[end - 1])) --end;
        if (end > start) tokens.push_back(utf8_encode(std::u32string_view(cps).substr(start, end - start)));
    }
    return tokens;
}

bool similar_to_any_token(std::string_view word, std::string_view sentence, const SimilarityConfig& cfg) {
    return FoldedTokens(sentence, cfg).similar_to(fold(word, cfg), cfg);
}

FoldedTokens::FoldedTokens(std::string_view sentence, const SimilarityConfig& cfg) {
    for (const auto& token : tokenize(sentence)) tokens_.push_back(fold(token, cfg));
}

bool FoldedTokens::similar_to(std::u32string_view folded_word, const SimilarityConfig& cfg) const {
    return std::any_of(tokens_.begin(), tokens_.end(),
                       [&](const std::u32string& t) { return is_similar_folded(folded_word, t, cfg); });
}

}  // namespace letz

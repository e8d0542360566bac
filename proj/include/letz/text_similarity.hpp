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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace letz {

// UTF-8 <-> code points. Invalid byte sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);

bool is_unicode_space(char32_t c) noexcept;
bool is_unicode_punct(char32_t c) noexcept;

/// Strips leading/trailing Unicode whitespace.
std::string trim(std::string_view s);

enum class DistanceMetric { Normalized, Raw };

/// Controls when two words count as "similar". In normalized mode two words
/// are similar when edit distance / longer length is strictly below
/// `threshold`; in raw mode when the edit distance is at most `max_edits`.
/// Folded equality is always similar.
struct SimilarityConfig {
    double threshold = 0.34;
    bool case_fold = true;
    bool strip_diacritics = true;
    DistanceMetric metric = DistanceMetric::Normalized;
    std::size_t max_edits = 1;

    /// Throws ConfigError when threshold is outside [0,1].
    void validate() const;
};

/// Case/diacritic folding per `cfg`. Covers Latin-1, Latin Extended-A, basic
/// Greek and Cyrillic; combining marks are dropped when stripping diacritics.
std::u32string fold(std::string_view s, const SimilarityConfig& cfg);
char32_t fold_codepoint(char32_t c, bool case_fold, bool strip_diacritics) noexcept;

/// Unit-cost edit distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

double normalized_distance(std::string_view a, std::string_view b, const SimilarityConfig& cfg);
double normalized_distance_folded(std::u32string_view a, std::u32string_view b);

bool is_similar(std::string_view a, std::string_view b, const SimilarityConfig& cfg);
/// Same predicate on already-folded inputs. Skips the DP when the length
/// difference alone rules similarity out.
bool is_similar_folded(std::u32string_view a, std::u32string_view b, const SimilarityConfig& cfg);

/// Splits on Unicode whitespace and trims punctuation from both ends of each
/// token. Internal punctuation (d'Adress, e-Mail) survives.
std::vector<std::string> tokenize(std::string_view sentence);

bool similar_to_any_token(std::string_view word, std::string_view sentence, const SimilarityConfig& cfg);

/// Pre-folded tokens of one sentence, reused across many candidate words.
class FoldedTokens {
public:
    FoldedTokens() = default;
    FoldedTokens(std::string_view sentence, const SimilarityConfig& cfg);

    bool similar_to(std::u32string_view folded_word, const SimilarityConfig& cfg) const;
    std::span<const std::u32string> tokens() const noexcept { return tokens_; }

private:
    std::vector<std::u32string> tokens_;
};

}  // namespace letz

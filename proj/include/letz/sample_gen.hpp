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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "letz/lexicon.hpp"
#include "letz/text_similarity.hpp"

namespace letz {

enum class GenerationMode { Synonym, Translation };
enum class SampleSource { Synonym, Translation, Negative };

std::string_view to_string(GenerationMode mode) noexcept;
std::string_view to_string(SampleSource source) noexcept;
GenerationMode parse_generation_mode(std::string_view name);
SampleSource parse_sample_source(std::string_view name);

struct Provenance {
    std::string headword;
    std::string sense_id;
    SampleSource source = SampleSource::Synonym;

    bool operator==(const Provenance&) const = default;
};

/// One (text, label, class) topic-relevance pair. `target` is 1 when the
/// label describes the text, 0 otherwise.
struct LabeledSample {
    std::string text;
    std::string label;
    int target = 0;
    Provenance provenance;

    bool operator==(const LabeledSample&) const = default;

    /// Throws ValidationError when class/source/emptiness invariants fail.
    void validate() const;
};

struct GenerationConfig {
    GenerationMode mode = GenerationMode::Synonym;
    std::vector<std::string> translation_languages{"de", "fr", "en"};
    SimilarityConfig similarity;
    std::size_t negatives_per_positive = 1;
    std::size_t max_negative_resamples = 100;
    std::uint64_t seed = 0;
    /// Drop repeated (text, label) positives, keeping the first occurrence.
    bool dedup = true;
    bool keep_multiword_labels = true;

    void validate() const;
};

/// Class-1 samples of one noun entry: every (sense, example, candidate label)
/// in that order, minus the headword and its near-spellings.
std::vector<LabeledSample> generate_positives(const DictionaryEntry& entry, const GenerationConfig& cfg);

/// `negatives_per_positive` class-0 samples per positive, ordered by positive.
/// Each positive draws from its own generator stream seeded from
/// (cfg.seed, index), so the result does not depend on the thread count.
std::vector<LabeledSample> generate_negatives(const std::vector<LabeledSample>& positives,
                                              const NounVocabulary& vocab, const GenerationConfig& cfg);
std::vector<LabeledSample> generate_negatives_serial(const std::vector<LabeledSample>& positives,
                                                     const NounVocabulary& vocab, const GenerationConfig& cfg);

struct BuildResult {
    /// Each positive directly followed by its negatives.
    std::vector<LabeledSample> samples;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t duplicates_dropped = 0;
};

BuildResult build_dataset(const std::vector<DictionaryEntry>& entries, const NounVocabulary& vocab,
                          const GenerationConfig& cfg);
BuildResult build_dataset_serial(const std::vector<DictionaryEntry>& entries, const NounVocabulary& vocab,
                                 const GenerationConfig& cfg);

}  // namespace letz

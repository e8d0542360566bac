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

#include "letz/sample_gen.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <unordered_map>
#include <utility>

#include "letz/error.hpp"
#include "letz/rng.hpp"

namespace letz {

std::string_view to_string(GenerationMode mode) noexcept {
    return mode == GenerationMode::Synonym ? "syn" : "wot";
}

std::string_view to_string(SampleSource source) noexcept {
    switch (source) {
        case SampleSource::Synonym: return "synonym";
        case SampleSource::Translation: return "translation";
        case SampleSource::Negative: return "negative";
    }
    return "negative";
}

GenerationMode parse_generation_mode(std::string_view name) {
    if (name == "syn" || name == "synonym") return GenerationMode::Synonym;
    if (name == "wot" || name == "translation") return GenerationMode::Translation;
    throw ConfigError("unknown generation mode '" + std::string(name) + "' (expected syn|wot)");
}

SampleSource parse_sample_source(std::string_view name) {
    for (SampleSource s : {SampleSource::Synonym, SampleSource::Translation, SampleSource::Negative}) {
        if (to_string(s) == name) return s;
    }
    throw ValidationError("unknown provenance source '" + std::string(name) + "'");
}

void LabeledSample::validate() const {
    if (target != 0 && target != 1) throw ValidationError("class must be 0 or 1, got " + std::to_string(target));
    if (trim(text).empty()) throw ValidationError("empty text");
    if (trim(label).empty()) throw ValidationError("empty label");
    const bool negative = provenance.source == SampleSource::Negative;
    if ((target == 0) != negative) {
        throw ValidationError("class " + std::to_string(target) + " inconsistent with source '" +
                              std::string(to_string(provenance.source)) + "'");
    }
}

void GenerationConfig::validate() const {
    similarity.validate();
    if (negatives_per_positive < 1) throw ConfigError("generation.negatives_per_positive must be >= 1");
    if (max_negative_resamples < 1) throw ConfigError("generation.max_negative_resamples must be >= 1");
    if (mode == GenerationMode::Translation && translation_languages.empty()) {
        throw ConfigError("translation mode requires at least one entry in generation.translation_languages");
    }
}

std::vector<LabeledSample> generate_positives(const DictionaryEntry& entry, const GenerationConfig& cfg) {
    if (entry.pos != PosTag::Noun) {
        throw GenerationError("generate_positives called on non-noun entry '" + entry.headword + "'");
    }
    const std::u32string headword = fold(entry.headword, cfg.similarity);
    const SampleSource source =
        cfg.mode == GenerationMode::Synonym ? SampleSource::Synonym : SampleSource::Translation;

    std::vector<LabeledSample> out;
    for (const auto& sense : entry.senses) {
        std::vector<std::string> labels;
        auto consider = [&](const std::string& candidate) {
            if (!cfg.keep_multiword_labels && tokenize(candidate).size() != 1) return;
            if (is_similar_folded(fold(candidate, cfg.similarity), headword, cfg.similarity)) return;
            labels.push_back(candidate);
        };
        if (cfg.mode == GenerationMode::Synonym) {
            for (const auto& s : sense.synonyms) consider(s);
        } else {
            for (const auto& lang : cfg.translation_languages) {
                auto it = sense.translations.find(lang);
                if (it == sense.translations.end()) continue;
                for (const auto& t : it->second) consider(t);
            }
        }
        for (const auto& sentence : sense.example_sentences) {
            for (const auto& label : labels) {
                out.push_back({sentence, label, 1, {entry.headword, sense.sense_id, source}});
            }
        }
    }
    return out;
}

namespace {

class NegativeSampler {
public:
    NegativeSampler(const std::vector<LabeledSample>& positives, const NounVocabulary& vocab,
                    const GenerationConfig& cfg)
        : vocab_(vocab), cfg_(cfg) {
        if (vocab.empty()) throw GenerationError("negative sampling needs a non-empty noun vocabulary");
        folded_.reserve(vocab.size());
        for (const auto& w : vocab.words()) folded_.push_back(fold(w, cfg.similarity));
        for (const auto& p : positives) {
            auto& labels = positive_labels_[p.text];
            labels.push_back(fold(p.label, cfg.similarity));
            labels.push_back(fold(p.provenance.headword, cfg.similarity));
        }
    }

    /// Appends the negatives of positive `index` to `out`.
    void draw(const LabeledSample& positive, std::size_t index, std::vector<LabeledSample>& out) const {
        const auto& sim = cfg_.similarity;
        const FoldedTokens tokens(positive.text, sim);
        // Every label that is relevant for this sentence, plus the headwords it came from.
        std::vector<std::u32string> excluded = positive_labels_.at(positive.text);

        Rng rng(derive_seed(cfg_.seed, index));
        for (std::size_t slot = 0; slot < cfg_.negatives_per_positive; ++slot) {
            bool placed = false;
            for (std::size_t attempt = 0; attempt < cfg_.max_negative_resamples; ++attempt) {
                const std::size_t pick = rng.uniform_index(folded_.size());
                const std::u32string& candidate = folded_[pick];
                if (std::find(excluded.begin(), excluded.end(), candidate) != excluded.end()) continue;
                if (tokens.similar_to(candidate, sim)) continue;
                out.push_back({positive.text,
                               vocab_[pick],
                               0,
                               {positive.provenance.headword, positive.provenance.sense_id, SampleSource::Negative}});
                // Later slots of the same positive must pick a different word.
                excluded.push_back(candidate);
                placed = true;
                break;
            }
            if (!placed) {
                throw GenerationError("no admissible negative label after " +
                                      std::to_string(cfg_.max_negative_resamples) +
                                      " draws for sentence \"" + positive.text + "\" (positive #" +
                                      std::to_string(index) + "); vocabulary too small or threshold too aggressive");
            }
        }
    }

private:
    const NounVocabulary& vocab_;
    const GenerationConfig& cfg_;
    std::vector<std::u32string> folded_;
    std::unordered_map<std::string_view, std::vector<std::u32string>> positive_labels_;
};

void check_positives(const std::vector<LabeledSample>& positives) {
    for (const auto& p : positives) {
        if (p.target != 1) throw GenerationError("generate_negatives expects class-1 samples only");
    }
}

std::vector<LabeledSample> flatten(std::vector<std::vector<LabeledSample>>& parts) {
    std::size_t total = 0;
    for (const auto& part : parts) total += part.size();
    std::vector<LabeledSample> out;
    out.reserve(total);
    for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(out));
    return out;
}

void rethrow_first(const std::vector<std::exception_ptr>& failures) {
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

std::vector<std::vector<LabeledSample>> negatives_per_positive(const std::vector<LabeledSample>& positives,
                                                               const NounVocabulary& vocab,
                                                               const GenerationConfig& cfg, bool parallel) {
    cfg.validate();
    check_positives(positives);
    std::vector<std::vector<LabeledSample>> parts(positives.size());
    if (positives.empty()) return parts;
    const NegativeSampler sampler(positives, vocab, cfg);
    std::vector<std::exception_ptr> failures(positives.size());
    const auto n = static_cast<std::ptrdiff_t>(positives.size());

#pragma omp parallel for schedule(dynamic, 32) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            sampler.draw(positives[i], static_cast<std::size_t>(i), parts[i]);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    rethrow_first(failures);
    return parts;
}

std::vector<LabeledSample> collect_positives(const std::vector<DictionaryEntry>& entries,
                                             const GenerationConfig& cfg, bool parallel,
                                             std::size_t& duplicates_dropped) {
    std::vector<std::vector<LabeledSample>> per_entry(entries.size());
    std::vector<std::exception_ptr> failures(entries.size());
    const auto n = static_cast<std::ptrdiff_t>(entries.size());

#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            per_entry[i] = generate_positives(entries[i], cfg);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    rethrow_first(failures);

    std::vector<LabeledSample> positives = flatten(per_entry);
    duplicates_dropped = 0;
    if (!cfg.dedup) return positives;

    std::set<std::pair<std::string, std::string>> seen;
    std::vector<LabeledSample> unique;
    unique.reserve(positives.size());
    for (auto& p : positives) {
        if (seen.emplace(p.text, p.label).second) {
            unique.push_back(std::move(p));
        } else {
            ++duplicates_dropped;
        }
    }
    return unique;
}

BuildResult build(const std::vector<DictionaryEntry>& entries, const NounVocabulary& vocab,
                  const GenerationConfig& cfg, bool parallel) {
    cfg.validate();
    BuildResult result;
    std::vector<LabeledSample> positives = collect_positives(entries, cfg, parallel, result.duplicates_dropped);
    auto negatives = negatives_per_positive(positives, vocab, cfg, parallel);

    result.positives = positives.size();
    result.samples.reserve(positives.size() * (1 + cfg.negatives_per_positive));
    for (std::size_t i = 0; i < positives.size(); ++i) {
        result.samples.push_back(std::move(positives[i]));
        result.negatives += negatives[i].size();
        std::move(negatives[i].begin(), negatives[i].end(), std::back_inserter(result.samples));
    }
    return result;
}

}  // namespace

std::vector<LabeledSample> generate_negatives(const std::vector<LabeledSample>& positives,
                                              const NounVocabulary& vocab, const GenerationConfig& cfg) {
    auto parts = negatives_per_positive(positives, vocab, cfg, true);
    return flatten(parts);
}

std::vector<LabeledSample> generate_negatives_serial(const std::vector<LabeledSample>& positives,
                                                     const NounVocabulary& vocab, const GenerationConfig& cfg) {
    auto parts = negatives_per_positive(positives, vocab, cfg, false);
    return flatten(parts);
}

BuildResult build_dataset(const std::vector<DictionaryEntry>& entries, const NounVocabulary& vocab,
                          const GenerationConfig& cfg) {
    return build(entries, vocab, cfg, true);
}

BuildResult build_dataset_serial(const std::vector<DictionaryEntry>& entries, const NounVocabulary& vocab,
                                 const GenerationConfig& cfg) {
    return build(entries, vocab, cfg, false);
}

}  // namespace letz

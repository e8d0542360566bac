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

#include "letz/validate.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "letz/error.hpp"

namespace letz {

namespace {

constexpr std::size_t kDatasetLevel = SIZE_MAX;

class SampleChecker {
public:
    SampleChecker(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                  const std::vector<DictionaryEntry>* lexicon)
        : cfg_(cfg), lexicon_(lexicon != nullptr) {
        for (const auto& s : samples) {
            if (s.target != 1) continue;
            auto& folded = relevant_[s.text];
            folded.push_back(fold(s.label, cfg.similarity));
            folded.push_back(fold(s.provenance.headword, cfg.similarity));
        }
        if (lexicon) {
            for (const auto& e : *lexicon) {
                auto& ids = senses_[e.headword];
                for (const auto& sense : e.senses) ids.insert(sense.sense_id);
            }
        }
    }

    void check(const LabeledSample& s, std::size_t index, std::vector<Violation>& out) const {
        try {
            s.validate();
        } catch (const ValidationError& e) {
            out.push_back({index, e.what()});
            return;
        }
        const auto& sim = cfg_.similarity;
        const std::u32string label = fold(s.label, sim);
        if (s.target == 1) {
            if (is_similar_folded(label, fold(s.provenance.headword, sim), sim)) {
                out.push_back({index, "positive label '" + s.label + "' equals or is within threshold of headword '" +
                                          s.provenance.headword + "'"});
            }
        } else {
            const FoldedTokens tokens(s.text, sim);
            for (std::size_t t = 0; t < tokens.tokens().size(); ++t) {
                if (is_similar_folded(label, tokens.tokens()[t], sim)) {
                    out.push_back({index, "negative label '" + s.label + "' is similar to sentence token '" +
                                              utf8_encode(tokens.tokens()[t]) + "'"});
                    break;
                }
            }
            if (auto it = relevant_.find(s.text); it != relevant_.end()) {
                if (std::find(it->second.begin(), it->second.end(), label) != it->second.end()) {
                    out.push_back({index, "negative label '" + s.label +
                                              "' is also a relevant label (or headword) for the same sentence"});
                }
            }
        }
        if (lexicon_) {
            auto it = senses_.find(s.provenance.headword);
            if (it == senses_.end() || !it->second.count(s.provenance.sense_id)) {
                out.push_back({index, "provenance (" + s.provenance.headword + ", " + s.provenance.sense_id +
                                          ") does not resolve to a lexicon sense"});
            }
        }
    }

private:
    const GenerationConfig& cfg_;
    bool lexicon_;
    std::unordered_map<std::string_view, std::vector<std::u32string>> relevant_;
    std::map<std::string, std::set<std::string>, std::less<>> senses_;
};

void check_balance(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                   std::vector<Violation>& out) {
    std::size_t positives = 0;
    std::size_t negatives = 0;
    for (const auto& s : samples) (s.target == 1 ? positives : negatives) += 1;
    if (negatives != positives * cfg.negatives_per_positive) {
        out.push_back({kDatasetLevel, "class counts 1:" + std::to_string(positives) + " / 0:" +
                                          std::to_string(negatives) + " do not match negatives_per_positive = " +
                                          std::to_string(cfg.negatives_per_positive)});
    }
}

std::vector<Violation> run(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                           const std::vector<DictionaryEntry>* lexicon, bool parallel) {
    cfg.validate();
    const SampleChecker checker(samples, cfg, lexicon);
    std::vector<std::vector<Violation>> found(samples.size());
    const auto n = static_cast<std::ptrdiff_t>(samples.size());

#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) checker.check(samples[i], static_cast<std::size_t>(i), found[i]);

    std::vector<Violation> out;
    for (auto& f : found) std::move(f.begin(), f.end(), std::back_inserter(out));
    check_balance(samples, cfg, out);
    return out;
}

}  // namespace

std::vector<Violation> validate_samples(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                                        const std::vector<DictionaryEntry>* lexicon) {
    return run(samples, cfg, lexicon, true);
}

std::vector<Violation> validate_samples_serial(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                                               const std::vector<DictionaryEntry>* lexicon) {
    return run(samples, cfg, lexicon, false);
}

}  // namespace letz

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
#include <string>
#include <vector>

#include "letz/lexicon.hpp"
#include "letz/sample_gen.hpp"

namespace letz {

struct Violation {
    /// 0-based sample index; SIZE_MAX for dataset-level findings.
    std::size_t index;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Re-checks the generation invariants on an already built dataset:
///  - class/source consistency and non-empty text/label,
///  - positives: label neither equal to nor within threshold of the headword,
///  - negatives: label not similar to any sentence token, and not a positive
///    label (or headword) of the same sentence,
///  - class balance at cfg.negatives_per_positive,
///  - provenance resolves to an (entry, sense) when `lexicon` is given.
/// Findings come back ordered by sample index.
std::vector<Violation> validate_samples(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                                        const std::vector<DictionaryEntry>* lexicon = nullptr);
std::vector<Violation> validate_samples_serial(const std::vector<LabeledSample>& samples, const GenerationConfig& cfg,
                                               const std::vector<DictionaryEntry>* lexicon = nullptr);

}  // namespace letz

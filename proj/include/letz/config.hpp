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

#include <string>

#include "letz/dataset_io.hpp"
#include "letz/remote_scorer.hpp"
#include "letz/sample_gen.hpp"

namespace letz {

struct IngestConfig {
    bool keep_proper_nouns = true;
    bool keep_multiword_headwords = true;
};

struct SplitConfig {
    SplitRatios ratios = kDefaultRatios;
    bool group_by_headword = false;
};

struct EvaluationConfig {
    std::string hypothesis_template = std::string(kDefaultTemplate);
    /// Concurrent scoring requests.
    int max_in_flight = 4;
};

/// Everything a pipeline run depends on. `generation.similarity` is the
/// `similarity` section of the config file.
struct PipelineConfig {
    IngestConfig ingest;
    GenerationConfig generation;
    SplitConfig split;
    RemoteScorerConfig scorer;
    EvaluationConfig evaluation;

    /// Throws ConfigError on the first broken invariant.
    void validate() const;
};

/// Reads a JSON config. Missing keys keep their defaults; unknown keys and
/// wrongly typed values are rejected.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& json_text, const std::string& origin = "<config>");

/// Canonical JSON (fixed key order, every field present).
std::string config_to_json(const PipelineConfig& cfg, int indent = -1);
/// FNV-1a 64 of the canonical compact JSON, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace letz

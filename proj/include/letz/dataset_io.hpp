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

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "letz/sample_gen.hpp"

namespace letz {

using SplitRatios = std::array<double, 3>;

inline constexpr SplitRatios kDefaultRatios{0.8, 0.1, 0.1};
inline constexpr std::array<const char*, 3> kSplitNames{"train", "dev", "test"};

struct DatasetSplits {
    std::vector<LabeledSample> train;
    std::vector<LabeledSample> dev;
    std::vector<LabeledSample> test;
    SplitRatios ratios = kDefaultRatios;
    std::uint64_t seed = 0;
    bool group_by_headword = false;
    /// JSON text describing how the splits were produced.
    std::string config_snapshot;

    std::array<const std::vector<LabeledSample>*, 3> parts() const { return {&train, &dev, &test}; }
};

/// Throws ConfigError unless all ratios are positive and sum to 1 (1e-9).
void validate_ratios(const SplitRatios& ratios);

/// Largest-remainder apportionment of n items. Ties between equal remainders
/// go to the split furthest below its running target `carry`, then to the
/// lower index. `carry` is updated with this call's shortfall.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios, std::array<double, 3>* carry = nullptr);

/// Class-stratified split: each class is apportioned separately, so balanced
/// input gives balanced splits. With `group_by_headword` every provenance
/// headword lands in exactly one split.
DatasetSplits split_dataset(const std::vector<LabeledSample>& samples, const SplitRatios& ratios, std::uint64_t seed,
                            bool group_by_headword);

// Serialization: one JSON object per line, fields in fixed order
// text, label, class, provenance{headword, sense_id, source}.
std::string serialize_sample(const LabeledSample& sample);
LabeledSample parse_sample(std::string_view line, std::size_t line_no);
void write_samples(std::ostream& out, const std::vector<LabeledSample>& samples);
std::vector<LabeledSample> read_samples(std::istream& in);

struct DatasetMetadata {
    std::uint64_t seed = 0;
    std::string config_hash;
    /// JSON text; embedded verbatim as an object in the sidecar.
    std::string config_snapshot = "{}";
    std::map<std::string, std::string> notes;
};

std::string sidecar_path(const std::string& dataset_path);

/// Writes the samples plus `<path>.meta.json`. Only the sidecar's
/// `created_at` field varies between identical runs.
void write_dataset(const std::string& path, const std::vector<LabeledSample>& samples, const DatasetMetadata& meta);
std::vector<LabeledSample> read_dataset(const std::string& path);

/// Writes train.jsonl, dev.jsonl and test.jsonl (each with a sidecar) into `dir`.
void write_splits(const std::string& dir, const DatasetSplits& splits, const DatasetMetadata& meta);

struct DatasetStats {
    std::size_t total = 0;
    std::map<int, std::size_t> per_class_counts;
    /// word count -> number of samples
    std::map<std::size_t, std::size_t> word_count_histogram;
    double mean_word_count = 0.0;
    double median_word_count = 0.0;
};

DatasetStats dataset_stats(const std::vector<LabeledSample>& samples);
std::string stats_to_json(const DatasetStats& stats);
void write_histogram_csv(std::ostream& out, const DatasetStats& stats);

}  // namespace letz

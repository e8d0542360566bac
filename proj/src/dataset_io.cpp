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

#include "letz/dataset_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "letz/error.hpp"
#include "letz/rng.hpp"

namespace letz {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kTieEpsilon = 1e-9;

// Stream ids for derive_seed, one per independent shuffle.
constexpr std::uint64_t kClassStream = 0x5350'4C49'5400'0000ULL;
constexpr std::uint64_t kGroupStream = 0x4752'4F55'5000'0000ULL;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

const json& require_field(const json& obj, const char* key, std::size_t line, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(line, path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line, const std::string& path = "") {
    const json& v = require_field(obj, key, line, path);
    if (!v.is_string()) throw ParseError(line, path.empty() ? key : path + "." + key, "expected a string");
    return v.get<std::string>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, std::size_t line,
                    const std::string& path) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ParseError(line, path.empty() ? key : path + "." + key, "unknown field");
        }
    }
}

}  // namespace

void validate_ratios(const SplitRatios& ratios) {
    double sum = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0)) throw ConfigError("split ratios must all be positive");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios, std::array<double, 3>* carry) {
    std::array<double, 3> exact{};
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        exact[s] = static_cast<double>(n) * ratios[s];
        sizes[s] = static_cast<std::size_t>(std::floor(exact[s] + kTieEpsilon));
        remainder[s] = exact[s] - static_cast<double>(sizes[s]);
        assigned += sizes[s];
    }
    // Guards against ratios that sum slightly above 1.
    while (assigned > n) {
        auto s = static_cast<std::size_t>(std::min_element(remainder.begin(), remainder.end()) - remainder.begin());
        --sizes[s];
        remainder[s] += 1.0;
        --assigned;
    }

    const std::array<double, 3> prior = carry ? *carry : std::array<double, 3>{};
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (std::abs(remainder[a] - remainder[b]) > kTieEpsilon) return remainder[a] > remainder[b];
        if (std::abs(prior[a] - prior[b]) > kTieEpsilon) return prior[a] > prior[b];
        return a < b;
    });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];

    if (carry) {
        for (std::size_t s = 0; s < 3; ++s) (*carry)[s] += exact[s] - static_cast<double>(sizes[s]);
    }
    return sizes;
}

DatasetSplits split_dataset(const std::vector<LabeledSample>& samples, const SplitRatios& ratios, std::uint64_t seed,
                            bool group_by_headword) {
    validate_ratios(ratios);
    if (samples.size() < 3) {
        throw ValidationError("cannot split " + std::to_string(samples.size()) + " samples into 3 splits");
    }

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].target].push_back(i);

    std::vector<int> assignment(samples.size(), -1);
    std::array<std::size_t, 3> targets{};
    std::array<double, 3> carry{};
    for (auto& [cls, indices] : by_class) {
        Rng rng(derive_seed(seed, kClassStream + static_cast<std::uint64_t>(cls)));
        rng.shuffle(std::span<std::size_t>(indices));
        const auto sizes = apportion(indices.size(), ratios, &carry);
        std::size_t pos = 0;
        for (std::size_t s = 0; s < 3; ++s) {
            targets[s] += sizes[s];
            for (std::size_t k = 0; k < sizes[s]; ++k) assignment[indices[pos++]] = static_cast<int>(s);
        }
    }

    if (group_by_headword) {
        std::map<std::string_view, std::size_t> group_of;
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            auto [it, inserted] = group_of.emplace(samples[i].provenance.headword, groups.size());
            if (inserted) groups.emplace_back();
            groups[it->second].push_back(i);
        }
        Rng rng(derive_seed(seed, kGroupStream));
        rng.shuffle(std::span<std::vector<std::size_t>>(groups));

        std::array<std::ptrdiff_t, 3> filled{};
        for (const auto& group : groups) {
            std::size_t best = 0;
            for (std::size_t s = 1; s < 3; ++s) {
                const auto deficit = static_cast<std::ptrdiff_t>(targets[s]) - filled[s];
                const auto best_deficit = static_cast<std::ptrdiff_t>(targets[best]) - filled[best];
                if (deficit > best_deficit) best = s;
            }
            filled[best] += static_cast<std::ptrdiff_t>(group.size());
            for (std::size_t i : group) assignment[i] = static_cast<int>(best);
        }
    }

    DatasetSplits splits;
    splits.ratios = ratios;
    splits.seed = seed;
    splits.group_by_headword = group_by_headword;
    std::array<std::vector<LabeledSample>*, 3> out{&splits.train, &splits.dev, &splits.test};
    for (std::size_t i = 0; i < samples.size(); ++i) out[assignment[i]]->push_back(samples[i]);

    ordered_json snapshot{{"ratios", ratios}, {"seed", seed}, {"group_by_headword", group_by_headword},
                          {"stratify_by", "class"}, {"sizing", "largest-remainder per class"}};
    splits.config_snapshot = snapshot.dump();
    return splits;
}

std::string serialize_sample(const LabeledSample& sample) {
    ordered_json node{{"text", sample.text},
                      {"label", sample.label},
                      {"class", sample.target},
                      {"provenance",
                       {{"headword", sample.provenance.headword},
                        {"sense_id", sample.provenance.sense_id},
                        {"source", to_string(sample.provenance.source)}}}};
    return node.dump();
}

LabeledSample parse_sample(std::string_view line, std::size_t line_no) {
    json node;
    try {
        node = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    if (!node.is_object()) throw ParseError(line_no, "", "expected a JSON object");
    reject_unknown(node, {"text", "label", "class", "provenance"}, line_no, "");

    LabeledSample sample;
    sample.text = require_string(node, "text", line_no);
    sample.label = require_string(node, "label", line_no);
    const json& cls = require_field(node, "class", line_no, "");
    if (!cls.is_number_integer()) throw ParseError(line_no, "class", "expected integer 0 or 1");
    const auto value = cls.get<long long>();
    if (value != 0 && value != 1) throw ParseError(line_no, "class", "must be 0 or 1, got " + std::to_string(value));
    sample.target = static_cast<int>(value);

    const json& prov = require_field(node, "provenance", line_no, "");
    if (!prov.is_object()) throw ParseError(line_no, "provenance", "expected an object");
    reject_unknown(prov, {"headword", "sense_id", "source"}, line_no, "provenance");
    sample.provenance.headword = require_string(prov, "headword", line_no, "provenance");
    sample.provenance.sense_id = require_string(prov, "sense_id", line_no, "provenance");
    try {
        sample.provenance.source = parse_sample_source(require_string(prov, "source", line_no, "provenance"));
        sample.validate();
    } catch (const ValidationError& e) {
        throw ParseError(line_no, "", e.what());
    }
    return sample;
}

void write_samples(std::ostream& out, const std::vector<LabeledSample>& samples) {
    for (const auto& s : samples) out << serialize_sample(s) << '\n';
}

std::vector<LabeledSample> read_samples(std::istream& in) {
    std::vector<LabeledSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        samples.push_back(parse_sample(line, line_no));
    }
    return samples;
}

std::string sidecar_path(const std::string& dataset_path) { return dataset_path + ".meta.json"; }

void write_dataset(const std::string& path, const std::vector<LabeledSample>& samples, const DatasetMetadata& meta) {
    {
        auto out = open_for_write(path);
        write_samples(out, samples);
        if (!out) throw IoError("write failed for " + path);
    }

    std::size_t positives = 0;
    for (const auto& s : samples) positives += s.target == 1 ? 1 : 0;
    ordered_json config;
    try {
        config = ordered_json::parse(meta.config_snapshot);
    } catch (const json::parse_error&) {
        config = meta.config_snapshot;
    }
    ordered_json notes = ordered_json::object();
    for (const auto& [k, v] : meta.notes) notes[k] = v;

    ordered_json sidecar{{"format", "letz-samples/1"},
                         {"file", std::filesystem::path(path).filename().string()},
                         {"samples", samples.size()},
                         {"class_counts", {{"0", samples.size() - positives}, {"1", positives}}},
                         {"seed", meta.seed},
                         {"config_hash", meta.config_hash},
                         {"config", std::move(config)},
                         {"notes", std::move(notes)},
                         {"created_at", utc_timestamp()}};
    auto out = open_for_write(sidecar_path(path));
    out << sidecar.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + sidecar_path(path));
}

std::vector<LabeledSample> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset " + path);
    try {
        return read_samples(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.field(), path + ": " + e.what());
    }
}

void write_splits(const std::string& dir, const DatasetSplits& splits, const DatasetMetadata& meta) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
    const auto parts = splits.parts();
    for (std::size_t s = 0; s < 3; ++s) {
        DatasetMetadata part_meta = meta;
        part_meta.notes["split"] = kSplitNames[s];
        write_dataset((std::filesystem::path(dir) / (std::string(kSplitNames[s]) + ".jsonl")).string(), *parts[s],
                      part_meta);
    }
}

DatasetStats dataset_stats(const std::vector<LabeledSample>& samples) {
    DatasetStats stats;
    stats.total = samples.size();
    std::vector<std::size_t> counts;
    counts.reserve(samples.size());
    for (const auto& s : samples) {
        ++stats.per_class_counts[s.target];
        const std::size_t words = tokenize(s.text).size();
        ++stats.word_count_histogram[words];
        counts.push_back(words);
    }
    if (counts.empty()) return stats;

    const double sum = std::accumulate(counts.begin(), counts.end(), 0.0);
    stats.mean_word_count = sum / static_cast<double>(counts.size());
    std::sort(counts.begin(), counts.end());
    const std::size_t mid = counts.size() / 2;
    stats.median_word_count = counts.size() % 2 == 1
                                  ? static_cast<double>(counts[mid])
                                  : (static_cast<double>(counts[mid - 1]) + static_cast<double>(counts[mid])) / 2.0;
    return stats;
}

std::string stats_to_json(const DatasetStats& stats) {
    ordered_json per_class = ordered_json::object();
    for (const auto& [cls, n] : stats.per_class_counts) per_class[std::to_string(cls)] = n;
    ordered_json histogram = ordered_json::object();
    for (const auto& [words, n] : stats.word_count_histogram) histogram[std::to_string(words)] = n;
    ordered_json node{{"total", stats.total},
                      {"per_class_counts", std::move(per_class)},
                      {"mean_word_count", stats.mean_word_count},
                      {"median_word_count", stats.median_word_count},
                      {"word_count_histogram", std::move(histogram)}};
    return node.dump(2);
}

void write_histogram_csv(std::ostream& out, const DatasetStats& stats) {
    out << "word_count,samples\n";
    for (const auto& [words, n] : stats.word_count_histogram) out << words << ',' << n << '\n';
}

}  // namespace letz

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

#include "letz/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "letz/error.hpp"

namespace letz {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Reads typed keys out of one config section and rejects leftovers.
class Section {
public:
    Section(const json& root, std::string name, const std::string& origin) : name_(std::move(name)), origin_(origin) {
        auto it = root.find(name_);
        if (it == root.end()) return;
        if (!it->is_object()) fail("", "expected an object");
        node_ = &*it;
    }

    /// Rejects keys that no read() asked for.
    void done() const {
        if (!node_) return;
        for (const auto& [key, _] : node_->items()) {
            if (!used_.count(key)) fail(key, "unknown key");
        }
    }

    template <typename T>
    void read(const char* key, T& out) {
        used_.insert(key);
        if (!node_) return;
        auto it = node_->find(key);
        if (it == node_->end()) return;
        try {
            check_type<T>(*it, key);
            out = it->get<T>();
        } catch (const json::exception& e) {
            fail(key, e.what());
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(origin_ + ": " + name_ + (key.empty() ? "" : "." + key) + ": " + what);
    }

private:
    template <typename T>
    void check_type(const json& v, const char* key) const {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) fail(key, "expected a boolean");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) fail(key, "expected a number");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) fail(key, "expected an integer");
            if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()) fail(key, "must be >= 0");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) fail(key, "expected a string");
        }
    }

    const json* node_ = nullptr;
    std::string name_;
    const std::string& origin_;
    std::set<std::string> used_;
};

}  // namespace

void PipelineConfig::validate() const {
    generation.validate();
    validate_ratios(split.ratios);
    if (!scorer.endpoint.empty()) scorer.validate();
    if (scorer.timeout_ms <= 0) throw ConfigError("scorer.timeout_ms must be positive");
    if (scorer.max_retries < 0) throw ConfigError("scorer.max_retries must be >= 0");
    if (evaluation.max_in_flight < 1) throw ConfigError("scorer.max_in_flight must be >= 1");
    HypothesisTemplate{evaluation.hypothesis_template};
}

PipelineConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
    static const std::set<std::string> sections{"similarity", "ingest", "generation", "split", "scorer", "evaluation"};
    for (const auto& [key, _] : root.items()) {
        if (!sections.count(key)) throw ConfigError(origin + ": unknown section '" + key + "'");
    }

    PipelineConfig cfg;
    {
        Section s(root, "similarity", origin);
        auto& sim = cfg.generation.similarity;
        s.read("threshold", sim.threshold);
        s.read("case_fold", sim.case_fold);
        s.read("strip_diacritics", sim.strip_diacritics);
        std::string metric = sim.metric == DistanceMetric::Raw ? "raw" : "normalized";
        s.read("metric", metric);
        if (metric == "normalized") {
            sim.metric = DistanceMetric::Normalized;
        } else if (metric == "raw") {
            sim.metric = DistanceMetric::Raw;
        } else {
            s.fail("metric", "expected \"normalized\" or \"raw\"");
        }
        s.read("max_edits", sim.max_edits);
        s.done();
    }
    {
        Section s(root, "ingest", origin);
        s.read("keep_proper_nouns", cfg.ingest.keep_proper_nouns);
        s.read("keep_multiword_headwords", cfg.ingest.keep_multiword_headwords);
        s.done();
    }
    {
        Section s(root, "generation", origin);
        auto& gen = cfg.generation;
        std::string mode(to_string(gen.mode));
        s.read("mode", mode);
        gen.mode = parse_generation_mode(mode);
        s.read("translation_languages", gen.translation_languages);
        s.read("negatives_per_positive", gen.negatives_per_positive);
        s.read("max_negative_resamples", gen.max_negative_resamples);
        s.read("seed", gen.seed);
        s.read("dedup", gen.dedup);
        s.read("keep_multiword_labels", gen.keep_multiword_labels);
        s.done();
    }
    {
        Section s(root, "split", origin);
        s.read("ratios", cfg.split.ratios);
        s.read("group_by_headword", cfg.split.group_by_headword);
        s.done();
    }
    {
        Section s(root, "scorer", origin);
        s.read("endpoint", cfg.scorer.endpoint);
        s.read("timeout_ms", cfg.scorer.timeout_ms);
        s.read("max_retries", cfg.scorer.max_retries);
        s.read("backoff_ms", cfg.scorer.backoff_ms);
        s.read("max_in_flight", cfg.evaluation.max_in_flight);
        s.done();
    }
    {
        Section s(root, "evaluation", origin);
        s.read("template", cfg.evaluation.hypothesis_template);
        s.done();
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string config_to_json(const PipelineConfig& cfg, int indent) {
    const auto& sim = cfg.generation.similarity;
    const auto& gen = cfg.generation;
    ordered_json node{
        {"similarity",
         {{"threshold", sim.threshold},
          {"case_fold", sim.case_fold},
          {"strip_diacritics", sim.strip_diacritics},
          {"metric", sim.metric == DistanceMetric::Raw ? "raw" : "normalized"},
          {"max_edits", sim.max_edits}}},
        {"ingest",
         {{"keep_proper_nouns", cfg.ingest.keep_proper_nouns},
          {"keep_multiword_headwords", cfg.ingest.keep_multiword_headwords}}},
        {"generation",
         {{"mode", to_string(gen.mode)},
          {"translation_languages", gen.translation_languages},
          {"negatives_per_positive", gen.negatives_per_positive},
          {"max_negative_resamples", gen.max_negative_resamples},
          {"seed", gen.seed},
          {"dedup", gen.dedup},
          {"keep_multiword_labels", gen.keep_multiword_labels}}},
        {"split", {{"ratios", cfg.split.ratios}, {"group_by_headword", cfg.split.group_by_headword}}},
        {"scorer",
         {{"endpoint", cfg.scorer.endpoint},
          {"timeout_ms", cfg.scorer.timeout_ms},
          {"max_retries", cfg.scorer.max_retries},
          {"backoff_ms", cfg.scorer.backoff_ms},
          {"max_in_flight", cfg.evaluation.max_in_flight}}},
        {"evaluation", {{"template", cfg.evaluation.hypothesis_template}}}};
    return node.dump(indent);
}

std::string config_hash(const PipelineConfig& cfg) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : config_to_json(cfg)) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace letz

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

// Test-only helpers: synthetic lexicons, temp directories and brute-force
// oracles. Nothing here calls into the code paths it is used to check.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "letz/lexicon.hpp"

namespace letz::testing {

inline std::string fixture(const std::string& name) { return std::string(LETZ_TEST_DATA_DIR) + "/" + name; }
inline std::string labels_file(const std::string& name) { return std::string(LETZ_LABELS_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("letz-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// --- synthetic data -------------------------------------------------------

class WordMaker {
public:
    explicit WordMaker(std::uint64_t seed) : rng_(seed) {}

    std::string word(std::size_t min_syllables, std::size_t max_syllables) {
        static const std::vector<std::string> syllables{"ba", "ke", "lo", "mi", "nu", "ra", "se", "ti", "vo",
                                                        "zu", "dä", "ché", "ëm", "gou", "pi", "wa", "fla",
                                                        "tro", "sch", "ei", "ar", "ol", "un", "kr", "bl"};
        const std::size_t n = min_syllables + rng_() % (max_syllables - min_syllables + 1);
        std::string w;
        for (std::size_t i = 0; i < n; ++i) w += syllables[rng_() % syllables.size()];
        return w;
    }

    std::string noun() {
        std::string w = word(3, 5);
        if (w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
        return w;
    }

    std::uint64_t next() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

/// `entries` unique noun entries (plus every fifth a verb), each with 1-2
/// senses, 1-2 synonyms per sense and 1-2 example sentences that mention
/// the headword.
inline std::vector<DictionaryEntry> synthetic_lexicon(std::size_t entries, std::uint64_t seed) {
    WordMaker maker(seed);
    std::set<std::string> used;
    std::vector<DictionaryEntry> out;
    while (out.size() < entries) {
        std::string head = maker.noun();
        if (!used.insert(head).second) continue;
        DictionaryEntry e;
        e.headword = head;
        e.pos = out.size() % 5 == 4 ? PosTag::Verb : PosTag::Noun;
        const std::size_t senses = 1 + maker.next() % 2;
        for (std::size_t s = 0; s < senses; ++s) {
            Sense sense;
            sense.sense_id = head + "#" + std::to_string(s + 1);
            const std::size_t syns = 1 + maker.next() % 2;
            for (std::size_t k = 0; k < syns; ++k) sense.synonyms.push_back(maker.noun());
            sense.translations["de"] = {maker.noun()};
            sense.translations["fr"] = {maker.word(2, 4)};
            sense.translations["en"] = {maker.word(2, 3)};
            const std::size_t sentences = 1 + maker.next() % 2;
            for (std::size_t k = 0; k < sentences; ++k) {
                std::string text;
                const std::size_t words = 4 + maker.next() % 7;
                const std::size_t head_at = maker.next() % words;
                for (std::size_t w = 0; w < words; ++w) {
                    if (!text.empty()) text += ' ';
                    text += w == head_at ? head : maker.word(1, 3);
                }
                text += maker.next() % 3 == 0 ? "!" : ".";
                sense.example_sentences.push_back(text);
            }
            e.senses.push_back(std::move(sense));
        }
        out.push_back(std::move(e));
    }
    return out;
}

// --- brute-force oracles --------------------------------------------------

/// Plain recursive edit distance with memoization over (i, j).
inline std::size_t levenshtein_oracle(const std::u32string& a, const std::u32string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::size_t best = std::min(self(self, i - 1, j) + 1, self(self, i, j - 1) + 1);
        best = std::min(best, self(self, i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1));
        memo[key] = best;
        return best;
    };
    return rec(rec, a.size(), b.size());
}

/// Accuracy and macro-F1 straight from the definitions.
struct OracleMetrics {
    double accuracy;
    double macro_f1;
};

inline OracleMetrics metrics_oracle(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred,
                                    std::size_t classes) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) correct += gold[i] == pred[i];
    double f1_sum = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (pred[i] == c && gold[i] == c) tp += 1;
            if (pred[i] == c && gold[i] != c) fp += 1;
            if (pred[i] != c && gold[i] == c) fn += 1;
        }
        const double f1 = (2 * tp + fp + fn) == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
        f1_sum += f1;
    }
    return {gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size()),
            f1_sum / static_cast<double>(classes)};
}

}  // namespace letz::testing

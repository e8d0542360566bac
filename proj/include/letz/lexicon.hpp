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

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace letz {

enum class PosTag { Noun, Verb, Adj, Adv, Other };

std::string_view to_string(PosTag tag) noexcept;
/// Parses a normalized tag name (NOUN, VERB, ADJ, ADV, OTHER).
std::optional<PosTag> parse_pos_tag(std::string_view name) noexcept;

/// Maps source part-of-speech tags onto the closed normalized set. Lookup is
/// exact first, then ASCII-case-insensitive; anything unknown becomes Other.
class PosMap {
public:
    /// Identity map for the normalized names plus a few common source
    /// spellings (Substantiv, noun, n, ...). Proper-noun tags map to Noun
    /// only when `keep_proper_nouns` is set.
    static PosMap defaults(bool keep_proper_nouns = true);
    /// Reads a JSON object {"source tag": "NOUN", ...} layered over defaults().
    static PosMap load(const std::string& path, bool keep_proper_nouns = true);

    void set(std::string source_tag, PosTag tag);
    PosTag normalize(std::string_view source_tag) const;

private:
    std::map<std::string, PosTag, std::less<>> exact_;
    std::map<std::string, PosTag, std::less<>> folded_;
};

struct Sense {
    std::string sense_id;
    std::vector<std::string> synonyms;
    /// Language code -> translations, e.g. "de" -> {"Moment"}.
    std::map<std::string, std::vector<std::string>> translations;
    std::vector<std::string> example_sentences;

    bool operator==(const Sense&) const = default;
};

struct DictionaryEntry {
    std::string headword;
    PosTag pos = PosTag::Other;
    std::vector<Sense> senses;

    bool operator==(const DictionaryEntry&) const = default;
};

/// Deduplicated noun headwords in code-point order.
class NounVocabulary {
public:
    NounVocabulary() = default;
    explicit NounVocabulary(std::vector<std::string> words);

    const std::vector<std::string>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }
    bool contains(std::string_view word) const;
    const std::string& operator[](std::size_t i) const { return words_[i]; }

private:
    std::vector<std::string> words_;
};

/// Parses one canonical lexicon record. `line_no` only feeds error messages.
DictionaryEntry parse_entry(std::string_view line, std::size_t line_no, const PosMap& pos_map);

/// Parses line-delimited lexicon records, skipping blank lines. Records are
/// decoded in parallel; the first failing line (in input order) is reported.
std::vector<DictionaryEntry> parse_dictionary(std::istream& in, const PosMap& pos_map = PosMap::defaults());
/// Single-threaded reference path for parse_dictionary.
std::vector<DictionaryEntry> parse_dictionary_serial(std::istream& in, const PosMap& pos_map = PosMap::defaults());
std::vector<DictionaryEntry> load_dictionary(const std::string& path, const PosMap& pos_map = PosMap::defaults());

std::string serialize_entry(const DictionaryEntry& entry);
void write_dictionary(std::ostream& out, const std::vector<DictionaryEntry>& entries);

struct NounFilterOptions {
    /// Headwords containing whitespace ("Rout Kräiz") are kept by default.
    bool keep_multiword_headwords = true;
};

std::vector<DictionaryEntry> filter_nouns(const std::vector<DictionaryEntry>& entries,
                                          const NounFilterOptions& options = {});

NounVocabulary build_noun_vocabulary(const std::vector<DictionaryEntry>& entries);

}  // namespace letz

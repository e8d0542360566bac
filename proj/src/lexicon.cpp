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

#include "letz/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "letz/error.hpp"
#include "letz/text_similarity.hpp"

namespace letz {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string ascii_upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(c >= 'a' && c <= 'z' ? c - 0x20 : c); });
    return out;
}

bool has_space(std::string_view s) {
    const std::u32string cps = utf8_decode(s);
    return std::any_of(cps.begin(), cps.end(), is_unicode_space);
}

std::string require_text(const json& node, std::size_t line, const std::string& path, bool trimmed) {
    if (!node.is_string()) throw ParseError(line, path, "expected a string");
    const auto& raw = node.get_ref<const std::string&>();
    std::string value = trim(raw);
    if (value.empty()) throw ParseError(line, path, "must be non-empty after trimming");
    return trimmed ? value : raw;
}

std::vector<std::string> require_text_array(const json& node, std::size_t line, const std::string& path,
                                            bool trimmed) {
    if (!node.is_array()) throw ParseError(line, path, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        out.push_back(require_text(node[i], line, path + "[" + std::to_string(i) + "]", trimmed));
    }
    return out;
}

Sense parse_sense(const json& node, std::size_t line, const std::string& path, const std::string& headword,
                  std::size_t ordinal) {
    if (!node.is_object()) throw ParseError(line, path, "expected an object");
    Sense sense;
    if (auto it = node.find("id"); it != node.end()) {
        sense.sense_id = require_text(*it, line, path + ".id", true);
    } else {
        sense.sense_id = headword + "#" + std::to_string(ordinal + 1);
    }
    if (auto it = node.find("synonyms"); it != node.end()) {
        sense.synonyms = require_text_array(*it, line, path + ".synonyms", true);
    }
    if (auto it = node.find("translations"); it != node.end()) {
        if (!it->is_object()) throw ParseError(line, path + ".translations", "expected an object");
        for (const auto& [lang, words] : it->items()) {
            if (trim(lang).empty()) throw ParseError(line, path + ".translations", "empty language code");
            sense.translations[lang] = require_text_array(words, line, path + ".translations." + lang, true);
        }
    }
    if (auto it = node.find("examples"); it != node.end()) {
        sense.example_sentences = require_text_array(*it, line, path + ".examples", false);
    }
    return sense;
}

}  // namespace

std::string_view to_string(PosTag tag) noexcept {
    switch (tag) {
        case PosTag::Noun: return "NOUN";
        case PosTag::Verb: return "VERB";
        case PosTag::Adj: return "ADJ";
        case PosTag::Adv: return "ADV";
        case PosTag::Other: return "OTHER";
    }
    return "OTHER";
}

std::optional<PosTag> parse_pos_tag(std::string_view name) noexcept {
    for (PosTag tag : {PosTag::Noun, PosTag::Verb, PosTag::Adj, PosTag::Adv, PosTag::Other}) {
        if (to_string(tag) == name) return tag;
    }
    return std::nullopt;
}

PosMap PosMap::defaults(bool keep_proper_nouns) {
    PosMap map;
    for (PosTag tag : {PosTag::Noun, PosTag::Verb, PosTag::Adj, PosTag::Adv, PosTag::Other}) {
        map.set(std::string(to_string(tag)), tag);
    }
    for (const char* t : {"N", "NN", "SUBST", "SUBSTANTIV", "SUBSTANTIF", "NOM", "NOUN_F", "NOUN_M", "NOUN_N"}) {
        map.set(t, PosTag::Noun);
    }
    for (const char* t : {"V", "VB", "VERB_AUX", "AUX", "VERBE"}) map.set(t, PosTag::Verb);
    for (const char* t : {"A", "JJ", "ADJECTIVE", "ADJEKTIV", "ADJECTIF"}) map.set(t, PosTag::Adj);
    for (const char* t : {"R", "RB", "ADVERB", "ADVERBE"}) map.set(t, PosTag::Adv);
    for (const char* t : {"PROPN", "NNP", "EIGENNAME", "NOM_PROPRE"}) {
        map.set(t, keep_proper_nouns ? PosTag::Noun : PosTag::Other);
    }
    return map;
}

PosMap PosMap::load(const std::string& path, bool keep_proper_nouns) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open POS map " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("POS map " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("POS map " + path + ": expected an object of tag -> NOUN|VERB|ADJ|ADV|OTHER");
    PosMap map = defaults(keep_proper_nouns);
    for (const auto& [source, target] : doc.items()) {
        if (!target.is_string()) throw ConfigError("POS map " + path + ": value for '" + source + "' is not a string");
        auto tag = parse_pos_tag(target.get<std::string>());
        if (!tag) throw ConfigError("POS map " + path + ": unknown normalized tag '" + target.get<std::string>() + "'");
        map.set(source, *tag);
    }
    return map;
}

void PosMap::set(std::string source_tag, PosTag tag) {
    folded_[ascii_upper(source_tag)] = tag;
    exact_[std::move(source_tag)] = tag;
}

PosTag PosMap::normalize(std::string_view source_tag) const {
    if (auto it = exact_.find(source_tag); it != exact_.end()) return it->second;
    if (auto it = folded_.find(ascii_upper(source_tag)); it != folded_.end()) return it->second;
    return PosTag::Other;
}

NounVocabulary::NounVocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    // std::string compares bytewise unsigned, which for UTF-8 is code-point order.
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
}

bool NounVocabulary::contains(std::string_view word) const {
    return std::binary_search(words_.begin(), words_.end(), word, std::less<>{});
}

DictionaryEntry parse_entry(std::string_view line, std::size_t line_no, const PosMap& pos_map) {
    json node;
    try {
        node = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(line_no, "", std::string("invalid JSON: ") + e.what());
    }
    if (!node.is_object()) throw ParseError(line_no, "", "expected a JSON object");

    DictionaryEntry entry;
    auto hw = node.find("headword");
    if (hw == node.end()) throw ParseError(line_no, "headword", "missing field");
    entry.headword = require_text(*hw, line_no, "headword", true);

    auto pos = node.find("pos");
    if (pos == node.end()) throw ParseError(line_no, "pos", "missing field");
    if (!pos->is_string()) throw ParseError(line_no, "pos", "expected a string");
    entry.pos = pos_map.normalize(pos->get_ref<const std::string&>());

    if (auto senses = node.find("senses"); senses != node.end()) {
        if (!senses->is_array()) throw ParseError(line_no, "senses", "expected an array");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < senses->size(); ++i) {
            const std::string path = "senses[" + std::to_string(i) + "]";
            Sense sense = parse_sense((*senses)[i], line_no, path, entry.headword, i);
            if (!seen.insert(sense.sense_id).second) {
                throw ValidationError("line " + std::to_string(line_no) + ", field " + path +
                                      ".id: duplicate sense_id '" + sense.sense_id + "' in entry '" +
                                      entry.headword + "'");
            }
            entry.senses.push_back(std::move(sense));
        }
    }
    return entry;
}

namespace {

struct NumberedLine {
    std::size_t line_no;
    std::string text;
};

std::vector<NumberedLine> read_records(std::istream& in) {
    std::vector<NumberedLine> lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.push_back({line_no, std::move(line)});
    }
    return lines;
}

}  // namespace

std::vector<DictionaryEntry> parse_dictionary_serial(std::istream& in, const PosMap& pos_map) {
    std::vector<DictionaryEntry> entries;
    for (const auto& rec : read_records(in)) entries.push_back(parse_entry(rec.text, rec.line_no, pos_map));
    return entries;
}

std::vector<DictionaryEntry> parse_dictionary(std::istream& in, const PosMap& pos_map) {
    const std::vector<NumberedLine> records = read_records(in);
    const auto n = static_cast<std::ptrdiff_t>(records.size());
    std::vector<DictionaryEntry> entries(records.size());
    std::vector<std::exception_ptr> failures(records.size());

#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            entries[i] = parse_entry(records[i].text, records[i].line_no, pos_map);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }

    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return entries;
}

std::vector<DictionaryEntry> load_dictionary(const std::string& path, const PosMap& pos_map) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon " + path);
    return parse_dictionary(in, pos_map);
}

std::string serialize_entry(const DictionaryEntry& entry) {
    ordered_json senses = ordered_json::array();
    for (const auto& sense : entry.senses) {
        ordered_json translations = ordered_json::object();
        for (const auto& [lang, words] : sense.translations) translations[lang] = words;
        senses.push_back(ordered_json{{"id", sense.sense_id},
                                      {"synonyms", sense.synonyms},
                                      {"translations", std::move(translations)},
                                      {"examples", sense.example_sentences}});
    }
    ordered_json node{{"headword", entry.headword}, {"pos", to_string(entry.pos)}, {"senses", std::move(senses)}};
    return node.dump();
}

void write_dictionary(std::ostream& out, const std::vector<DictionaryEntry>& entries) {
    for (const auto& entry : entries) out << serialize_entry(entry) << '\n';
}

std::vector<DictionaryEntry> filter_nouns(const std::vector<DictionaryEntry>& entries,
                                          const NounFilterOptions& options) {
    std::vector<DictionaryEntry> nouns;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(nouns), [&](const DictionaryEntry& e) {
        return e.pos == PosTag::Noun && (options.keep_multiword_headwords || !has_space(e.headword));
    });
    return nouns;
}

NounVocabulary build_noun_vocabulary(const std::vector<DictionaryEntry>& entries) {
    std::vector<std::string> words;
    words.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.pos == PosTag::Noun) words.push_back(e.headword);
    }
    return NounVocabulary(std::move(words));
}

}  // namespace letz

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

// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "letz/cli.hpp"
#include "letz/dataset_io.hpp"
#include "letz/lexicon.hpp"
#include "letz/remote_scorer.hpp"
#include "letz/sample_gen.hpp"
#include "letz/text_similarity.hpp"
#include "letz/validate.hpp"
#include "letz/zsc_eval.hpp"
#include "stub_server.hpp"
#include "support.hpp"

using namespace letz;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "letz-forge");
    std::ostringstream o, e;
    const int code = run(args, o, e);
    if (out) *out = o.str() + e.str();
    return code;
}

// --- independent leakage checker -------------------------------------------
// Own tokenizer and folding, restricted to the alphabet the synthetic
// lexicon uses, plus the recursive edit-distance oracle.

std::u32string fold_synthetic(const std::string& word) {
    std::u32string out;
    for (char32_t c : utf8_decode(word)) {
        if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
        switch (c) {
            case U'ä': c = U'a'; break;
            case U'é': case U'ë': c = U'e'; break;
            default: break;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<std::u32string> tokens_synthetic(const std::string& sentence) {
    std::vector<std::u32string> out;
    std::istringstream in(sentence);
    std::string w;
    while (in >> w) {
        while (!w.empty() && (w.back() == '.' || w.back() == '!')) w.pop_back();
        if (!w.empty()) out.push_back(fold_synthetic(w));
    }
    return out;
}

bool too_close(const std::u32string& a, const std::u32string& b, double threshold) {
    if (a == b) return true;
    const double longest = static_cast<double>(std::max(a.size(), b.size()));
    return static_cast<double>(testing::levenshtein_oracle(a, b)) / longest < threshold;
}

// --- criteria ----------------------------------------------------------------

Verdict balance() {
    const auto lexicon = testing::synthetic_lexicon(1000, 101);
    testing::TempDir dir;
    std::ostringstream text;
    write_dictionary(text, lexicon);
    testing::write_file(dir / "lex.jsonl", text.str());

    const auto start = std::chrono::steady_clock::now();
    const auto nouns = filter_nouns(load_dictionary(dir / "lex.jsonl"));
    const auto built = build_dataset(nouns, build_noun_vocabulary(nouns), GenerationConfig{});
    const double elapsed = seconds_since(start);

    bool ok = elapsed < 1.0;
    std::size_t ones = 0;
    std::size_t zeros = 0;
    for (const auto& s : built.samples) (s.target == 1 ? ones : zeros) += 1;
    ok = ok && ones == zeros && ones > 0;
    // Further seeds and lexicons.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GenerationConfig cfg;
        cfg.seed = seed;
        const auto lex = filter_nouns(testing::synthetic_lexicon(300, seed * 13));
        const auto r = build_dataset(lex, build_noun_vocabulary(lex), cfg);
        ok = ok && r.positives == r.negatives && r.positives * 2 == r.samples.size();
    }
    std::ostringstream detail;
    detail << ones << " class 1 / " << zeros << " class 0 from 1000 entries in " << elapsed << " s";
    return {ok, detail.str()};
}

std::vector<LabeledSample> balanced(std::size_t per_class) {
    std::vector<LabeledSample> out;
    out.reserve(per_class * 2);
    for (std::size_t i = 0; i < per_class; ++i) {
        const std::string text = "s" + std::to_string(i);
        out.push_back({text, "p" + std::to_string(i), 1, {"h", "h#1", SampleSource::Synonym}});
        out.push_back({text, "n" + std::to_string(i), 0, {"h", "h#1", SampleSource::Negative}});
    }
    return out;
}

Verdict split_geometry() {
    const auto a = split_dataset(balanced(14778 / 2), kDefaultRatios, 1, false);
    const auto b = split_dataset(balanced(48916 / 2), kDefaultRatios, 1, false);
    std::ostringstream detail;
    detail << "14778 -> " << a.train.size() << '/' << a.dev.size() << '/' << a.test.size() << ", 48916 -> "
           << b.train.size() << '/' << b.dev.size() << '/' << b.test.size();
    const bool ok = a.train.size() == 11822 && a.dev.size() == 1478 && a.test.size() == 1478 &&
                    b.train.size() == 39132 && b.dev.size() == 4892 && b.test.size() == 4892;
    return {ok, detail.str()};
}

Verdict leakage() {
    const auto nouns = filter_nouns(testing::synthetic_lexicon(2500, 303));
    GenerationConfig cfg;
    cfg.negatives_per_positive = 2;
    const auto built = build_dataset(nouns, build_noun_vocabulary(nouns), cfg);
    const double threshold = cfg.similarity.threshold;

    std::size_t negatives = 0;
    std::size_t positives = 0;
    std::size_t negative_leaks = 0;
    std::size_t positive_leaks = 0;
    for (const auto& s : built.samples) {
        if (s.target == 0) {
            if (negatives == 10000) continue;
            ++negatives;
            const auto label = fold_synthetic(s.label);
            for (const auto& t : tokens_synthetic(s.text)) {
                if (too_close(label, t, threshold)) {
                    ++negative_leaks;
                    break;
                }
            }
        } else {
            ++positives;
            if (too_close(fold_synthetic(s.label), fold_synthetic(s.provenance.headword), threshold)) ++positive_leaks;
        }
    }
    std::ostringstream detail;
    detail << negative_leaks << " leaks in " << negatives << " negatives, " << positive_leaks << " in " << positives
           << " positives";
    return {negatives == 10000 && negative_leaks == 0 && positive_leaks == 0, detail.str()};
}

Verdict levenshtein_kernel() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(404);
    const std::u32string alphabet = U"abcdeéëäö";
    auto random_string = [&] {
        std::u32string s(rng() % 13, U'a');
        for (auto& c : s) c = alphabet[rng() % alphabet.size()];
        return s;
    };
    std::size_t mismatches = 0;
    std::size_t property_failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_string();
        const auto b = random_string();
        const auto c = random_string();
        const std::size_t ab = levenshtein(a, b);
        if (ab != testing::levenshtein_oracle(a, b)) ++mismatches;
        const std::size_t ba = levenshtein(b, a);
        const std::size_t bc = levenshtein(b, c);
        const std::size_t ac = levenshtein(a, c);
        if (ab != ba) ++property_failures;
        if (levenshtein(a, a) != 0) ++property_failures;
        if ((ab == 0) != (a == b)) ++property_failures;
        if (ac > ab + bc) ++property_failures;
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << mismatches << " oracle mismatches, " << property_failures << " metric violations on 10000 pairs/triples in "
           << elapsed << " s";
    return {mismatches == 0 && property_failures == 0 && elapsed < 10.0, detail.str()};
}

Verdict orthographic_pairs() {
    const SimilarityConfig cfg;
    const bool million = is_similar("Million", "Millioun", cfg);
    const bool alerte = is_similar("alerte", "Alert", cfg);
    // Both pairs are dropped as synonym labels.
    DictionaryEntry entry;
    entry.headword = "Millioun";
    entry.pos = PosTag::Noun;
    entry.senses.push_back({"Millioun#1", {"Million"}, {}, {"Eng Millioun Leit."}});
    const bool dropped = generate_positives(entry, GenerationConfig{}).empty();
    std::ostringstream detail;
    detail << "Million/Millioun d=" << normalized_distance("Million", "Millioun", cfg)
           << ", alerte/Alert d=" << normalized_distance("alerte", "Alert", cfg);
    return {million && alerte && dropped, detail.str()};
}

std::map<std::string, std::string> data_files(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (name.ends_with(".meta.json")) continue;
        out[fs::relative(e.path(), root).string()] = testing::read_file(e.path().string());
    }
    return out;
}

Verdict determinism() {
    testing::TempDir dir;
    std::ostringstream text;
    write_dictionary(text, testing::synthetic_lexicon(3000, 606));
    testing::write_file(dir / "lex.jsonl", text.str());

    std::vector<std::map<std::string, std::string>> runs;
    for (const char* jobs : {"1", "1", "8", "8"}) {
        const std::string out = dir / ("run" + std::to_string(runs.size()));
        fs::create_directories(out);
        const std::vector<std::string> global{"--seed", "42", "--jobs", jobs};
        auto with = [&](std::vector<std::string> rest) {
            std::vector<std::string> args(global);
            args.insert(args.end(), rest.begin(), rest.end());
            return args;
        };
        if (cli(with({"ingest", "--input", dir / "lex.jsonl", "--output", out + "/lex.norm.jsonl"})) != 0 ||
            cli(with({"build", "--lexicon", out + "/lex.norm.jsonl", "--output", out + "/all.jsonl"})) != 0 ||
            cli(with({"split", "--input", out + "/all.jsonl", "--out-dir", out + "/splits"})) != 0) {
            return {false, std::string("pipeline failed at --jobs ") + jobs};
        }
        runs.push_back(data_files(out));
    }
    const bool same = runs[0] == runs[1] && runs[1] == runs[2] && runs[2] == runs[3];
    std::ostringstream detail;
    detail << runs[0].size() << " data files compared across 2 runs at 1 and 2 runs at 8 jobs";
    return {same && runs[0].size() == 6, detail.str()};
}

EvalDataset synthetic_eval(const std::string& labels_file, std::uint64_t seed) {
    EvalDataset d;
    d.name = labels_file;
    d.labels = load_label_map(testing::labels_file(labels_file));
    testing::WordMaker maker(seed);
    for (std::size_t c = 0; c < d.labels.size(); ++c) {
        for (std::size_t k = 0; k < d.labels[c].expected_count.value_or(10); ++k) {
            d.examples.push_back({maker.word(2, 4) + " " + maker.word(2, 4) + " " + std::to_string(d.examples.size()), c});
        }
    }
    return d;
}

Verdict evaluation_harness() {
    bool ok = true;
    std::ostringstream detail;
    for (const char* file : {"sib200.jsonl", "luxnews.jsonl"}) {
        const auto d = synthetic_eval(file, 7);
        const auto report = evaluate(d, score_matrix(d, HypothesisTemplate{}, OracleScorer(d)));
        ok = ok && report.accuracy == 1.0 && report.macro_f1 == 1.0;
        detail << file << " " << d.examples.size() << " ex acc " << report.accuracy << " f1 " << report.macro_f1
               << "; ";
    }
    const LabelMap two(std::vector<LabelClass>{{"A", "a", {}}, {"B", "b", {}}});
    const std::vector<std::size_t> gold{0, 0, 1, 1};
    const std::vector<std::size_t> pred{0, 1, 1, 1};
    const auto fixture = metrics_from_predictions(gold, pred, two);
    ok = ok && std::abs(fixture.accuracy - 0.75) <= 1e-9 && std::abs(fixture.macro_f1 - 0.7333333333333333) <= 1e-9;
    detail << "fixture acc " << fixture.accuracy << " f1 " << fixture.macro_f1 << "; ";

    std::mt19937_64 rng(707);
    std::size_t disagreements = 0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t k = 2 + rng() % 8;
        const std::size_t n = 1 + rng() % 200;
        std::vector<LabelClass> classes;
        for (std::size_t c = 0; c < k; ++c) classes.push_back({"c" + std::to_string(c), "w" + std::to_string(c), {}});
        std::vector<std::size_t> g(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = rng() % k;
            p[i] = rng() % 2 ? g[i] : rng() % k;
        }
        const auto got = metrics_from_predictions(g, p, LabelMap(classes));
        const auto want = testing::metrics_oracle(g, p, k);
        if (std::abs(got.accuracy - want.accuracy) > 1e-12 || std::abs(got.macro_f1 - want.macro_f1) > 1e-12) {
            ++disagreements;
        }
    }
    ok = ok && disagreements == 0;
    detail << disagreements << " disagreements on 1000 random configurations";
    return {ok, detail.str()};
}

Verdict argmax_contract() {
    std::mt19937_64 rng(808);
    const std::vector<std::function<double(double)>> transforms{
        [](double x) { return 3.0 * x; },
        [](double x) { return 0.001 * x; },
        [](double x) { return std::exp(x); },
        [](double x) { return std::log1p(x); },
        [](double x) { return x * x * x + x; },
        [](double x) { return 2.0 * x - 5.0; },
    };
    std::size_t failures = 0;
    std::size_t tie_rows = 0;
    for (int round = 0; round < 1000; ++round) {
        const std::size_t k = 2 + rng() % 10;
        std::vector<double> row(k);
        for (auto& v : row) v = static_cast<double>(rng() % 21) / 20.0;  // ties are common
        const std::size_t top = predict(row);
        const double best = *std::max_element(row.begin(), row.end());
        const auto first = static_cast<std::size_t>(std::find(row.begin(), row.end(), best) - row.begin());
        if (top != first) ++failures;
        if (std::count(row.begin(), row.end(), best) > 1) ++tie_rows;
        for (const auto& f : transforms) {
            std::vector<double> mapped(row);
            for (auto& v : mapped) v = f(v);
            if (predict(mapped) != top) ++failures;
        }
    }
    std::ostringstream detail;
    detail << failures << " failures over 1000 rows x " << transforms.size() << " transforms (" << tie_rows
           << " rows with tied maxima)";
    return {failures == 0 && tie_rows > 0, detail.str()};
}

Verdict remote_protocol() {
    auto cfg_for = [](const std::string& endpoint) {
        RemoteScorerConfig cfg;
        cfg.endpoint = endpoint;
        cfg.timeout_ms = 300;
        cfg.max_retries = 2;
        cfg.backoff_ms = 5;
        return cfg;
    };
    struct Case {
        std::string name;
        testing::StubServer::Handler handler;
        std::optional<RemoteErrorKind> expected;
        int expected_requests;
    };
    std::vector<Case> cases;
    cases.push_back({"success", testing::reply(R"({"probabilities":[0.2,0.8]})"), std::nullopt, 1});
    cases.push_back({"length-mismatch", testing::reply(R"({"probabilities":[0.2]})"), RemoteErrorKind::LengthMismatch, 1});
    cases.push_back({"out-of-range", testing::reply(R"({"probabilities":[0.2,1.8]})"), RemoteErrorKind::OutOfRange, 1});
    cases.push_back({"timeout",
                     [](const std::string&, httplib::Response& res) {
                         std::this_thread::sleep_for(std::chrono::milliseconds(700));
                         res.set_content(R"({"probabilities":[0.2,0.8]})", "application/json");
                     },
                     RemoteErrorKind::Timeout, 3});
    cases.push_back({"server-error",
                     [](const std::string&, httplib::Response& res) { res.status = 503; },
                     RemoteErrorKind::HttpStatus, 3});

    bool ok = true;
    std::ostringstream detail;
    std::set<std::string> outcomes;
    for (auto& c : cases) {
        testing::StubServer server(c.handler);
        std::string outcome;
        try {
            const auto probs = remote_score(cfg_for(server.endpoint()), "p", {"h1", "h2"});
            outcome = "ok";
            ok = ok && !c.expected && probs == std::vector<double>{0.2, 0.8};
        } catch (const RemoteScorerError& e) {
            outcome = std::string(to_string(e.kind()));
            ok = ok && c.expected == e.kind() && e.attempts() == c.expected_requests;
        }
        // The slow handler may still be running when the client gives up.
        std::this_thread::sleep_for(std::chrono::milliseconds(c.name == "timeout" ? 800 : 0));
        ok = ok && server.requests() == c.expected_requests;
        outcomes.insert(outcome);
        detail << c.name << "=" << outcome << "/" << server.requests() << "req ";
    }
    ok = ok && outcomes.size() == cases.size();
    return {ok, detail.str()};
}

Verdict reference_round_trip() {
    const auto fixture = read_dataset(testing::fixture("reference_samples.jsonl"));
    const auto lexicon = load_dictionary(testing::fixture("lexicon.jsonl"));
    std::map<std::string, const DictionaryEntry*> by_head;
    for (const auto& e : lexicon) by_head[e.headword] = &e;

    // Build: the positives are regenerated exactly; each negative is an
    // admissible draw once the vocabulary is restricted to that word.
    bool built = true;
    for (const auto& s : fixture) {
        const auto* entry = by_head.at(s.provenance.headword);
        const auto positives = generate_positives(*entry, GenerationConfig{});
        std::vector<LabeledSample> same_text;
        for (const auto& p : positives) {
            if (p.text == s.text) same_text.push_back(p);
        }
        if (s.target == 1) {
            built = built && std::find(same_text.begin(), same_text.end(), s) != same_text.end();
        } else {
            const auto negatives = generate_negatives({same_text.front()}, NounVocabulary({s.label}), GenerationConfig{});
            built = built && negatives.size() == 1 && negatives[0] == s;
        }
    }

    testing::TempDir dir;
    write_dataset(dir / "reference_samples.jsonl", fixture, DatasetMetadata{});
    std::string validate_out;
    const int validate_code =
        cli({"validate", "--input", dir / "reference_samples.jsonl", "--lexicon", testing::fixture("lexicon.jsonl")}, &validate_out);
    const bool reread = read_dataset(dir / "reference_samples.jsonl") == fixture;

    // Evaluate: each (text, label) pair is an example whose gold class is
    // its entailment class.
    std::ostringstream eval, labels;
    for (const auto& s : fixture) {
        eval << nlohmann::json{{"text", s.text + " || " + s.label}, {"gold_class", std::to_string(s.target)}}.dump()
             << '\n';
    }
    labels << R"({"class":"1","label":"jo"})" << '\n' << R"({"class":"0","label":"neen"})" << '\n';
    testing::write_file(dir / "eval.jsonl", eval.str());
    testing::write_file(dir / "labels.jsonl", labels.str());
    const int eval_code = cli({"evaluate", "--dataset", dir / "eval.jsonl", "--labels", dir / "labels.jsonl",
                               "--scorer", "oracle", "--report", dir / "report.json"});
    std::vector<int> classes;
    bool evaluated = eval_code == 0;
    if (evaluated) {
        const auto report = nlohmann::json::parse(testing::read_file(dir / "report.json"));
        for (const auto& p : report.at("predictions")) classes.push_back(std::stoi(p.get<std::string>()));
        evaluated = classes == std::vector<int>{1, 0, 1, 0};
    }
    std::ostringstream detail;
    detail << "build " << (built ? "ok" : "mismatch") << ", validate exit " << validate_code << ", reread "
           << (reread ? "identical" : "differs") << ", evaluated classes";
    for (int c : classes) detail << ' ' << c;
    return {built && validate_code == 0 && reread && evaluated, detail.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"balance", balance},
        {"split geometry", split_geometry},
        {"leakage invariants", leakage},
        {"levenshtein kernel", levenshtein_kernel},
        {"orthographic variants", orthographic_pairs},
        {"determinism", determinism},
        {"evaluation harness", evaluation_harness},
        {"argmax contract", argmax_contract},
        {"remote scorer protocol", remote_protocol},
        {"reference samples", reference_round_trip},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v{false, ""};
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << v.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

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

#include "letz/zsc_eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>

#include <json.hpp>
#include <omp.h>

namespace letz {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kPlaceholder = "{label}";

template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        json node;
        try {
            node = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, "", path + ": invalid JSON: " + e.what());
        }
        if (!node.is_object()) throw ParseError(line_no, "", path + ": expected a JSON object");
        fn(node, line_no);
    }
}

std::string string_field(const json& node, const char* key, std::size_t line_no) {
    auto it = node.find(key);
    if (it == node.end()) throw ParseError(line_no, key, "missing field");
    if (!it->is_string()) throw ParseError(line_no, key, "expected a string");
    return it->get<std::string>();
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

LabelMap::LabelMap(std::vector<LabelClass> classes) : classes_(std::move(classes)) {
    if (classes_.size() < 2) throw ValidationError("label map needs at least 2 classes");
    std::set<std::string> ids;
    std::set<std::string> labels;
    for (const auto& c : classes_) {
        if (trim(c.id).empty() || trim(c.label).empty()) throw ValidationError("label map entries must be non-empty");
        if (!ids.insert(c.id).second) throw ValidationError("duplicate class id '" + c.id + "'");
        if (!labels.insert(c.label).second) throw ValidationError("duplicate label word '" + c.label + "'");
    }
}

std::optional<std::size_t> LabelMap::index_of(std::string_view class_id) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].id == class_id) return i;
    }
    return std::nullopt;
}

LabelMap load_label_map(const std::string& path) {
    std::vector<LabelClass> classes;
    for_each_jsonl(path, [&](const json& node, std::size_t line_no) {
        LabelClass c{string_field(node, "class", line_no), string_field(node, "label", line_no), std::nullopt};
        if (auto n = node.find("n"); n != node.end()) {
            if (!n->is_number_unsigned()) throw ParseError(line_no, "n", "expected a non-negative integer");
            c.expected_count = n->get<std::size_t>();
        }
        classes.push_back(std::move(c));
    });
    try {
        return LabelMap(std::move(classes));
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

EvalDataset load_eval_dataset(const std::string& path, LabelMap labels) {
    EvalDataset dataset;
    dataset.name = path;
    for_each_jsonl(path, [&](const json& node, std::size_t line_no) {
        std::string text = string_field(node, "text", line_no);
        std::string gold = string_field(node, "gold_class", line_no);
        auto index = labels.index_of(gold);
        if (!index) throw ParseError(line_no, "gold_class", "class '" + gold + "' is not in the label map");
        dataset.examples.push_back({std::move(text), *index});
    });
    dataset.labels = std::move(labels);
    return dataset;
}

HypothesisTemplate::HypothesisTemplate(std::string text) : text_(std::move(text)) {
    const auto first = text_.find(kPlaceholder);
    if (first == std::string::npos) throw ConfigError("hypothesis template has no {label} placeholder");
    if (text_.find(kPlaceholder, first + 1) != std::string::npos) {
        throw ConfigError("hypothesis template has more than one {label} placeholder");
    }
    slot_ = first;
}

std::string HypothesisTemplate::render(std::string_view label) const {
    std::string out;
    out.reserve(text_.size() + label.size());
    out.append(text_, 0, slot_);
    out.append(label);
    out.append(text_, slot_ + kPlaceholder.size());
    return out;
}

std::string render_hypothesis(const HypothesisTemplate& tpl, std::string_view label) { return tpl.render(label); }

OracleScorer::OracleScorer(const EvalDataset& dataset) {
    for (const auto& ex : dataset.examples) gold_label_.emplace(ex.text, dataset.labels[ex.gold].label);
}

std::vector<double> OracleScorer::score(std::string_view premise, std::span<const Candidate> candidates) const {
    auto it = gold_label_.find(premise);
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(it != gold_label_.end() && it->second == c.label ? 1.0 : 0.0);
    return out;
}

std::vector<double> LexicalScorer::score(std::string_view premise, std::span<const Candidate> candidates) const {
    const FoldedTokens tokens(premise, cfg_);
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        const std::u32string label = fold(c.label, cfg_);
        double best = 0.0;
        for (const auto& t : tokens.tokens()) best = std::max(best, 1.0 - normalized_distance_folded(label, t));
        out.push_back(best);
    }
    return out;
}

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) throw ValidationError("score matrix size does not match its dimensions");
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("score matrix entry outside [0,1]");
    }
}

namespace {

double score_cell(const EvalDataset& dataset, const std::vector<Candidate>& candidates,
                  const EntailmentScorer& scorer, std::size_t i, std::size_t j) {
    const Candidate& c = candidates[j];
    std::vector<double> result;
    try {
        result = scorer.score(dataset.examples[i].text, std::span<const Candidate>(&c, 1));
    } catch (const std::exception& e) {
        throw ScoringError(i, c.label, e.what());
    }
    if (result.size() != 1) {
        throw ScoringError(i, c.label, "scorer returned " + std::to_string(result.size()) + " values for 1 hypothesis");
    }
    if (!(result[0] >= 0.0 && result[0] <= 1.0)) {
        throw ScoringError(i, c.label, "probability " + std::to_string(result[0]) + " outside [0,1]");
    }
    return result[0];
}

std::vector<Candidate> make_candidates(const EvalDataset& dataset, const HypothesisTemplate& tpl) {
    std::vector<Candidate> candidates;
    for (const auto& c : dataset.labels.classes()) candidates.push_back({c.label, tpl.render(c.label)});
    return candidates;
}

}  // namespace

ScoreMatrix score_matrix(const EvalDataset& dataset, const HypothesisTemplate& tpl, const EntailmentScorer& scorer,
                         int max_in_flight) {
    const auto candidates = make_candidates(dataset, tpl);
    const std::size_t rows = dataset.examples.size();
    const std::size_t cols = candidates.size();
    std::vector<double> values(rows * cols);
    std::vector<std::exception_ptr> failures(rows * cols);
    const auto cells = static_cast<std::ptrdiff_t>(rows * cols);
    const int threads = max_in_flight > 0 ? max_in_flight : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 8) num_threads(threads) if (threads > 1)
    for (std::ptrdiff_t k = 0; k < cells; ++k) {
        const auto i = static_cast<std::size_t>(k) / cols;
        const auto j = static_cast<std::size_t>(k) % cols;
        try {
            values[k] = score_cell(dataset, candidates, scorer, i, j);
        } catch (...) {
            failures[k] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return ScoreMatrix(rows, cols, std::move(values));
}

ScoreMatrix score_matrix_serial(const EvalDataset& dataset, const HypothesisTemplate& tpl,
                                const EntailmentScorer& scorer) {
    const auto candidates = make_candidates(dataset, tpl);
    std::vector<double> values;
    values.reserve(dataset.examples.size() * candidates.size());
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        for (std::size_t j = 0; j < candidates.size(); ++j) values.push_back(score_cell(dataset, candidates, scorer, i, j));
    }
    return ScoreMatrix(dataset.examples.size(), candidates.size(), std::move(values));
}

std::size_t predict(std::span<const double> row) {
    if (row.empty()) throw ValidationError("cannot predict from an empty score row");
    std::size_t best = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (std::isnan(row[j])) throw ValidationError("NaN in score row at column " + std::to_string(j));
        if (!std::isfinite(row[j])) throw ValidationError("non-finite score at column " + std::to_string(j));
        if (row[j] > row[best]) best = j;
    }
    return best;
}

EvalReport metrics_from_predictions(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                                    const LabelMap& labels) {
    if (gold.size() != predicted.size()) throw ValidationError("gold and predicted lengths differ");
    const std::size_t n = labels.size();
    EvalReport report;
    report.confusion.assign(n, std::vector<std::size_t>(n, 0));
    report.predictions.assign(predicted.begin(), predicted.end());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] >= n || predicted[i] >= n) throw ValidationError("class index out of range");
        ++report.confusion[gold[i]][predicted[i]];
        correct += gold[i] == predicted[i] ? 1 : 0;
    }
    report.accuracy = safe_ratio(static_cast<double>(correct), static_cast<double>(gold.size()));

    double f1_sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t predicted_c = 0;
        std::size_t support = 0;
        for (std::size_t k = 0; k < n; ++k) {
            predicted_c += report.confusion[k][c];
            support += report.confusion[c][k];
        }
        const auto tp = static_cast<double>(report.confusion[c][c]);
        ClassMetrics m{labels[c].id, labels[c].label};
        m.support = support;
        m.precision = safe_ratio(tp, static_cast<double>(predicted_c));
        m.recall = safe_ratio(tp, static_cast<double>(support));
        m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
        f1_sum += m.f1;
        report.per_class.push_back(std::move(m));
    }
    report.macro_f1 = f1_sum / static_cast<double>(n);
    return report;
}

EvalReport evaluate(const EvalDataset& dataset, const ScoreMatrix& matrix) {
    if (matrix.rows() != dataset.examples.size() || matrix.cols() != dataset.labels.size()) {
        throw ValidationError("score matrix is " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                              " but dataset has " + std::to_string(dataset.examples.size()) + " examples and " +
                              std::to_string(dataset.labels.size()) + " labels");
    }
    std::vector<std::size_t> gold;
    std::vector<std::size_t> predicted;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        gold.push_back(dataset.examples[i].gold);
        predicted.push_back(predict(matrix.row(i)));
    }
    return metrics_from_predictions(gold, predicted, dataset.labels);
}

std::string report_to_json(const EvalReport& report, const EvalDataset& dataset, std::string_view scorer,
                           std::string_view hypothesis_template) {
    ordered_json per_class = ordered_json::array();
    for (const auto& m : report.per_class) {
        per_class.push_back({{"class", m.id},
                             {"label", m.label},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", m.support}});
    }
    ordered_json predictions = ordered_json::array();
    for (std::size_t p : report.predictions) predictions.push_back(dataset.labels[p].id);
    ordered_json node{{"dataset", dataset.name},
                      {"scorer", scorer},
                      {"template", hypothesis_template},
                      {"examples", dataset.examples.size()},
                      {"accuracy", report.accuracy},
                      {"macro_f1", report.macro_f1},
                      {"per_class", std::move(per_class)},
                      {"confusion", report.confusion},
                      {"predictions", std::move(predictions)},
                      {"conventions",
                       {{"tie_break", "lowest label index"}, {"undefined_f1", "zero"}, {"confusion", "rows=gold, cols=predicted"}}}};
    return node.dump(2);
}

}  // namespace letz

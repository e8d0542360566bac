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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "letz/error.hpp"
#include "letz/text_similarity.hpp"

namespace letz {

struct LabelClass {
    std::string id;     // e.g. "Sports"
    std::string label;  // label word fed to the hypothesis, e.g. "Sport"
    std::optional<std::size_t> expected_count;

    bool operator==(const LabelClass&) const = default;
};

/// Ordered class -> label-word map. At least two classes; ids and label
/// words distinct.
class LabelMap {
public:
    LabelMap() = default;
    explicit LabelMap(std::vector<LabelClass> classes);

    std::size_t size() const noexcept { return classes_.size(); }
    const LabelClass& operator[](std::size_t i) const { return classes_[i]; }
    const std::vector<LabelClass>& classes() const noexcept { return classes_; }
    std::optional<std::size_t> index_of(std::string_view class_id) const;

private:
    std::vector<LabelClass> classes_;
};

/// Reads JSON lines {"class": id, "label": word, "n": count?}.
LabelMap load_label_map(const std::string& path);

struct EvalExample {
    std::string text;
    std::size_t gold = 0;  // index into the label map
};

struct EvalDataset {
    std::string name;
    std::vector<EvalExample> examples;
    LabelMap labels;
};

/// Reads JSON lines {"text": ..., "gold_class": id}; every gold_class must
/// exist in `labels`.
EvalDataset load_eval_dataset(const std::string& path, LabelMap labels);

inline constexpr std::string_view kDefaultTemplate = "Dëst Beispill ass iwwer {label}.";

class HypothesisTemplate {
public:
    /// Throws ConfigError unless `{label}` occurs exactly once.
    explicit HypothesisTemplate(std::string text = std::string(kDefaultTemplate));

    std::string render(std::string_view label) const;
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
    std::size_t slot_ = 0;
};

std::string render_hypothesis(const HypothesisTemplate& tpl, std::string_view label);

struct Candidate {
    std::string label;
    std::string hypothesis;
};

/// Entailment probability of each candidate hypothesis given the premise.
/// Implementations must be safe to call concurrently.
class EntailmentScorer {
public:
    virtual ~EntailmentScorer() = default;
    virtual std::vector<double> score(std::string_view premise, std::span<const Candidate> candidates) const = 0;
    virtual std::string name() const = 0;
};

/// Test scorer: 1.0 for the gold label of a known premise, 0.0 otherwise.
class OracleScorer final : public EntailmentScorer {
public:
    explicit OracleScorer(const EvalDataset& dataset);
    std::vector<double> score(std::string_view premise, std::span<const Candidate> candidates) const override;
    std::string name() const override { return "oracle"; }

private:
    std::map<std::string, std::string, std::less<>> gold_label_;
};

class ConstantScorer final : public EntailmentScorer {
public:
    explicit ConstantScorer(double value) : value_(value) {}
    std::vector<double> score(std::string_view, std::span<const Candidate> candidates) const override {
        return std::vector<double>(candidates.size(), value_);
    }
    std::string name() const override { return "constant"; }

private:
    double value_;
};

/// Dependency-free baseline: max over premise tokens of
/// 1 - normalized_distance(label, token).
class LexicalScorer final : public EntailmentScorer {
public:
    explicit LexicalScorer(SimilarityConfig cfg = {}) : cfg_(cfg) {}
    std::vector<double> score(std::string_view premise, std::span<const Candidate> candidates) const override;
    std::string name() const override { return "lexical"; }

private:
    SimilarityConfig cfg_;
};

/// Rows are examples, columns follow label-map order.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool operator==(const ScoreMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Scorer failure for one (example, label) cell.
class ScoringError : public Error {
public:
    ScoringError(std::size_t example, std::string label, const std::string& what)
        : Error("scoring example " + std::to_string(example) + " against label '" + label + "': " + what),
          example_(example),
          label_(std::move(label)) {}

    std::size_t example() const noexcept { return example_; }
    const std::string& label() const noexcept { return label_; }

private:
    std::size_t example_;
    std::string label_;
};

/// Scores every (example, label) pair independently, up to `max_in_flight`
/// pairs at once (0 = OpenMP default). Cells are position-addressed.
ScoreMatrix score_matrix(const EvalDataset& dataset, const HypothesisTemplate& tpl, const EntailmentScorer& scorer,
                         int max_in_flight = 0);
ScoreMatrix score_matrix_serial(const EvalDataset& dataset, const HypothesisTemplate& tpl,
                                const EntailmentScorer& scorer);

/// Argmax with ties to the lowest index. Throws ValidationError on an empty
/// row or a non-finite entry.
std::size_t predict(std::span<const double> row);

struct ClassMetrics {
    std::string id;
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    /// confusion[gold][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<std::size_t> predictions;
};

EvalReport evaluate(const EvalDataset& dataset, const ScoreMatrix& matrix);
/// Metrics from gold/predicted class indices. Undefined precision, recall or
/// F1 (zero denominator) count as 0.
EvalReport metrics_from_predictions(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                                    const LabelMap& labels);

std::string report_to_json(const EvalReport& report, const EvalDataset& dataset, std::string_view scorer,
                           std::string_view hypothesis_template);

}  // namespace letz

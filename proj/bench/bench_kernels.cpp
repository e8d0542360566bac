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

// Serial reference vs OpenMP path for each parallel kernel. Run with
// --benchmark_filter to pick one; OMP_NUM_THREADS caps the parallel side.

#include <benchmark/benchmark.h>

#include <sstream>

#include "letz/lexicon.hpp"
#include "letz/sample_gen.hpp"
#include "letz/validate.hpp"
#include "letz/zsc_eval.hpp"
#include "support.hpp"

using namespace letz;

namespace {

struct Workload {
    std::vector<DictionaryEntry> lexicon;
    std::vector<DictionaryEntry> nouns;
    NounVocabulary vocab;
    std::string lexicon_text;
    std::vector<LabeledSample> positives;
    std::vector<LabeledSample> samples;
    EvalDataset eval;
};

const Workload& workload() {
    static const Workload w = [] {
        Workload w;
        w.lexicon = testing::synthetic_lexicon(5000, 2024);
        std::ostringstream out;
        write_dictionary(out, w.lexicon);
        w.lexicon_text = out.str();
        w.nouns = filter_nouns(w.lexicon);
        w.vocab = build_noun_vocabulary(w.nouns);
        for (const auto& e : w.nouns) {
            auto p = generate_positives(e, GenerationConfig{});
            w.positives.insert(w.positives.end(), p.begin(), p.end());
        }
        w.samples = build_dataset(w.nouns, w.vocab, GenerationConfig{}).samples;
        w.eval.name = "bench";
        w.eval.labels = LabelMap(std::vector<LabelClass>{
            {"Sports", "Sport", {}}, {"Travel", "Rees", {}}, {"Politics", "Politik", {}}, {"Health", "Gesondheet", {}}});
        for (std::size_t i = 0; i < 2000 && i < w.positives.size(); ++i) {
            w.eval.examples.push_back({w.positives[i].text, i % 4});
        }
        return w;
    }();
    return w;
}

void BM_parse_serial(benchmark::State& state) {
    for (auto _ : state) {
        std::istringstream in(workload().lexicon_text);
        benchmark::DoNotOptimize(parse_dictionary_serial(in));
    }
}

void BM_parse_parallel(benchmark::State& state) {
    for (auto _ : state) {
        std::istringstream in(workload().lexicon_text);
        benchmark::DoNotOptimize(parse_dictionary(in));
    }
}

void BM_negatives_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(generate_negatives_serial(w.positives, w.vocab, GenerationConfig{}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.positives.size()));
}

void BM_negatives_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(generate_negatives(w.positives, w.vocab, GenerationConfig{}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.positives.size()));
}

void BM_validate_serial(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(validate_samples_serial(w.samples, GenerationConfig{}, &w.lexicon));
}

void BM_validate_parallel(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(validate_samples(w.samples, GenerationConfig{}, &w.lexicon));
}

void BM_score_matrix_serial(benchmark::State& state) {
    const auto& w = workload();
    const LexicalScorer scorer;
    for (auto _ : state) benchmark::DoNotOptimize(score_matrix_serial(w.eval, HypothesisTemplate{}, scorer));
}

void BM_score_matrix_parallel(benchmark::State& state) {
    const auto& w = workload();
    const LexicalScorer scorer;
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_matrix(w.eval, HypothesisTemplate{}, scorer, static_cast<int>(state.range(0))));
    }
}

}  // namespace

BENCHMARK(BM_parse_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parse_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_negatives_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_negatives_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_validate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_validate_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_score_matrix_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_matrix_parallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
    workload();  // build inputs outside any timed region
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

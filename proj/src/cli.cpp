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

#include "letz/cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "letz/config.hpp"
#include "letz/dataset_io.hpp"
#include "letz/error.hpp"
#include "letz/lexicon.hpp"
#include "letz/remote_scorer.hpp"
#include "letz/sample_gen.hpp"
#include "letz/validate.hpp"
#include "letz/zsc_eval.hpp"

namespace letz {

namespace {

using ordered_json = nlohmann::ordered_json;

struct GlobalOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    int jobs = 0;
    std::string log_level = "info";
};

struct IngestOptions {
    std::string input;
    std::string pos_map;
    std::string output;
};

struct BuildOptions {
    std::string lexicon;
    std::string pos_map;
    std::string mode;
    std::string output;
};

struct SplitOptions {
    std::string input;
    std::vector<double> ratios;
    bool group_by_headword = false;
    std::string out_dir;
};

struct StatsOptions {
    std::string input;
    std::string histogram_csv;
};

struct ValidateOptions {
    std::string input;
    std::string lexicon;
};

struct EvaluateOptions {
    std::string dataset;
    std::string labels;
    std::string hypothesis_template;
    std::string scorer = "lexical";
    std::string endpoint;
    std::string report;
};

// Restores the OpenMP thread count on scope exit so --jobs does not leak
// into later in-process runs.
class JobsGuard {
public:
    explicit JobsGuard(int jobs) : previous_(omp_get_max_threads()) {
        if (jobs > 0) omp_set_num_threads(jobs);
    }
    ~JobsGuard() { omp_set_num_threads(previous_); }
    JobsGuard(const JobsGuard&) = delete;
    JobsGuard& operator=(const JobsGuard&) = delete;

private:
    int previous_;
};

class Pipeline {
public:
    Pipeline(const GlobalOptions& globals, std::ostream& out, std::ostream& err) : out_(out) {
        auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
        log_ = std::make_shared<spdlog::logger>("letz-forge", sink);
        log_->set_pattern("[%l] %v");
        log_->set_level(spdlog::level::from_str(globals.log_level));
        cfg_ = globals.config_path.empty() ? PipelineConfig{} : load_config(globals.config_path);
        if (globals.seed_opt && globals.seed_opt->count() > 0) cfg_.generation.seed = globals.seed;
    }

    int ingest(const IngestOptions& o) {
        announce("ingest");
        const PosMap pos_map = pos_map_for(o.pos_map);
        const auto entries = load_dictionary(o.input, pos_map);
        const auto nouns = filter_nouns(entries, {cfg_.ingest.keep_multiword_headwords});
        const auto vocab = build_noun_vocabulary(nouns);

        std::ofstream lex(o.output, std::ios::binary | std::ios::trunc);
        if (!lex) throw IoError("cannot write " + o.output);
        write_dictionary(lex, entries);
        const std::string vocab_path = o.output + ".vocab.txt";
        std::ofstream voc(vocab_path, std::ios::binary | std::ios::trunc);
        if (!voc) throw IoError("cannot write " + vocab_path);
        for (const auto& w : vocab.words()) voc << w << '\n';

        log_->info("parsed {} entries, {} nouns, vocabulary of {} words", entries.size(), nouns.size(), vocab.size());
        out_ << "ingested " << entries.size() << " entries (" << nouns.size() << " nouns) into " << o.output << '\n';
        return kExitOk;
    }

    int build(const BuildOptions& o) {
        if (!o.mode.empty()) cfg_.generation.mode = parse_generation_mode(o.mode);
        cfg_.validate();
        announce("build");
        const auto entries = load_dictionary(o.lexicon, pos_map_for(o.pos_map));
        const auto nouns = filter_nouns(entries, {cfg_.ingest.keep_multiword_headwords});
        const auto vocab = build_noun_vocabulary(nouns);
        const BuildResult result = build_dataset(nouns, vocab, cfg_.generation);

        DatasetMetadata meta = metadata();
        meta.notes["mode"] = std::string(to_string(cfg_.generation.mode));
        meta.notes["positives"] = std::to_string(result.positives);
        meta.notes["negatives"] = std::to_string(result.negatives);
        meta.notes["duplicates_dropped"] = std::to_string(result.duplicates_dropped);
        meta.notes["dedup_policy"] = cfg_.generation.dedup
                                         ? "repeated (text, label) positives dropped, first kept (assumed policy)"
                                         : "disabled";
        write_dataset(o.output, result.samples, meta);

        if (result.duplicates_dropped > 0) log_->info("dropped {} duplicate positives", result.duplicates_dropped);
        out_ << "wrote " << result.samples.size() << " samples (" << result.positives << " class 1, "
             << result.negatives << " class 0) to " << o.output << '\n';
        return kExitOk;
    }

    int split(const SplitOptions& o) {
        if (!o.ratios.empty()) {
            if (o.ratios.size() != 3) throw ConfigError("--ratios needs exactly three values");
            std::copy(o.ratios.begin(), o.ratios.end(), cfg_.split.ratios.begin());
        }
        if (o.group_by_headword) cfg_.split.group_by_headword = true;
        cfg_.validate();
        announce("split");
        const auto samples = read_dataset(o.input);
        const auto splits = split_dataset(samples, cfg_.split.ratios, cfg_.generation.seed, cfg_.split.group_by_headword);

        DatasetMetadata meta = metadata();
        meta.config_snapshot = ordered_json{{"pipeline", ordered_json::parse(config_to_json(cfg_))},
                                            {"split", ordered_json::parse(splits.config_snapshot)}}
                                   .dump();
        meta.notes["source"] = std::filesystem::path(o.input).filename().string();
        meta.notes["headword_split_policy"] =
            splits.group_by_headword ? "grouped: each headword in exactly one split"
                                     : "unknown policy: headwords may appear in several splits";
        write_splits(o.out_dir, splits, meta);

        out_ << "split " << samples.size() << " samples into train/dev/test = " << splits.train.size() << '/'
             << splits.dev.size() << '/' << splits.test.size() << " under " << o.out_dir << '\n';
        return kExitOk;
    }

    int stats(const StatsOptions& o) {
        announce("stats");
        const auto stats = dataset_stats(read_dataset(o.input));
        out_ << stats_to_json(stats) << '\n';
        if (!o.histogram_csv.empty()) {
            std::ofstream csv(o.histogram_csv, std::ios::binary | std::ios::trunc);
            if (!csv) throw IoError("cannot write " + o.histogram_csv);
            write_histogram_csv(csv, stats);
        }
        return kExitOk;
    }

    int validate(const ValidateOptions& o) {
        announce("validate");
        std::vector<LabeledSample> samples;
        try {
            samples = read_dataset(o.input);
        } catch (const ParseError& e) {
            out_ << "violation [schema]: " << e.what() << '\n';
            out_ << "validated 0 samples: 1 violation(s)\n";
            return kExitDataError;
        }
        std::optional<std::vector<DictionaryEntry>> lexicon;
        if (!o.lexicon.empty()) lexicon = load_dictionary(o.lexicon, pos_map_for(""));

        const auto violations = validate_samples(samples, cfg_.generation, lexicon ? &*lexicon : nullptr);
        for (const auto& v : violations) {
            if (v.index == SIZE_MAX) {
                out_ << "violation [dataset]: " << v.message << '\n';
            } else {
                out_ << "violation [sample " << v.index << ", line " << v.index + 1 << "]: " << v.message << '\n';
            }
        }
        out_ << "headword split policy: " << headword_policy(o.input) << '\n';
        out_ << "validated " << samples.size() << " samples: " << violations.size() << " violation(s)\n";
        return violations.empty() ? kExitOk : kExitDataError;
    }

    int evaluate(const EvaluateOptions& o) {
        if (!o.hypothesis_template.empty()) cfg_.evaluation.hypothesis_template = o.hypothesis_template;
        if (!o.endpoint.empty()) cfg_.scorer.endpoint = o.endpoint;
        cfg_.validate();
        announce("evaluate");
        const HypothesisTemplate tpl(cfg_.evaluation.hypothesis_template);
        EvalDataset dataset = load_eval_dataset(o.dataset, load_label_map(o.labels));
        check_expected_counts(dataset);

        std::unique_ptr<EntailmentScorer> scorer;
        if (o.scorer == "oracle") {
            scorer = std::make_unique<OracleScorer>(dataset);
        } else if (o.scorer == "lexical") {
            scorer = std::make_unique<LexicalScorer>(cfg_.generation.similarity);
        } else {
            if (cfg_.scorer.endpoint.empty()) throw ConfigError("remote scorer needs scorer.endpoint or --endpoint");
            scorer = std::make_unique<RemoteScorer>(cfg_.scorer);
        }

        const ScoreMatrix matrix = score_matrix(dataset, tpl, *scorer, cfg_.evaluation.max_in_flight);
        const EvalReport report = letz::evaluate(dataset, matrix);
        if (!o.report.empty()) {
            std::ofstream rep(o.report, std::ios::binary | std::ios::trunc);
            if (!rep) throw IoError("cannot write " + o.report);
            rep << report_to_json(report, dataset, scorer->name(), tpl.text()) << '\n';
        }
        out_ << "accuracy " << report.accuracy << " macro_f1 " << report.macro_f1 << " over "
             << dataset.examples.size() << " examples (" << scorer->name() << " scorer)\n";
        return kExitOk;
    }

private:
    void announce(std::string_view command) {
        log_->info("{}: config hash {} seed {}", command, config_hash(cfg_), cfg_.generation.seed);
    }

    PosMap pos_map_for(const std::string& path) const {
        return path.empty() ? PosMap::defaults(cfg_.ingest.keep_proper_nouns)
                            : PosMap::load(path, cfg_.ingest.keep_proper_nouns);
    }

    DatasetMetadata metadata() const {
        DatasetMetadata meta;
        meta.seed = cfg_.generation.seed;
        meta.config_hash = config_hash(cfg_);
        meta.config_snapshot = config_to_json(cfg_);
        return meta;
    }

    std::string headword_policy(const std::string& dataset_path) const {
        std::ifstream in(sidecar_path(dataset_path));
        if (!in) return "unknown policy (no metadata sidecar)";
        try {
            const auto meta = nlohmann::json::parse(in);
            const auto& split = meta.at("config").at("split");
            if (split.at("group_by_headword").get<bool>()) return "grouped by headword";
        } catch (const nlohmann::json::exception&) {
            return "unknown policy (dataset was not produced by split)";
        }
        return "unknown policy (headwords may span splits)";
    }

    void check_expected_counts(const EvalDataset& dataset) const {
        std::vector<std::size_t> counts(dataset.labels.size(), 0);
        for (const auto& ex : dataset.examples) ++counts[ex.gold];
        for (std::size_t c = 0; c < counts.size(); ++c) {
            const auto& expected = dataset.labels[c].expected_count;
            if (expected && *expected != counts[c]) {
                log_->warn("class {} has {} examples, label map expects {}", dataset.labels[c].id, counts[c], *expected);
            }
        }
    }

    std::ostream& out_;
    std::shared_ptr<spdlog::logger> log_;
    PipelineConfig cfg_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"letz-forge: build entailment-style topic classification data from a lexicon and evaluate "
                 "zero-shot classifiers"};
    app.name(args.empty() ? "letz-forge" : std::filesystem::path(args[0]).filename().string());
    app.require_subcommand(1);

    GlobalOptions globals;
    app.add_option("--config", globals.config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    globals.seed_opt = app.add_option("--seed", globals.seed, "Seed for sampling and splitting");
    app.add_option("--jobs", globals.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--log-level", globals.log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    IngestOptions ingest_opts;
    auto* ingest = app.add_subcommand("ingest", "Parse a canonical lexicon dump and normalize POS tags");
    ingest->fallthrough();
    ingest->add_option("--input", ingest_opts.input, "Lexicon, one JSON record per line")->required()->check(CLI::ExistingFile);
    ingest->add_option("--pos-map", ingest_opts.pos_map, "JSON object mapping source tags to NOUN|VERB|ADJ|ADV|OTHER")
        ->check(CLI::ExistingFile);
    ingest->add_option("--output", ingest_opts.output, "Normalized lexicon output")->required();

    BuildOptions build_opts;
    auto* build = app.add_subcommand("build", "Generate labeled samples from a lexicon");
    build->fallthrough();
    build->add_option("--lexicon", build_opts.lexicon, "Lexicon file")->required()->check(CLI::ExistingFile);
    build->add_option("--pos-map", build_opts.pos_map, "POS map for raw lexicons")->check(CLI::ExistingFile);
    build->add_option("--mode", build_opts.mode, "syn (synonym labels) or wot (translation labels)")
        ->check(CLI::IsMember({"syn", "wot"}));
    build->add_option("--output", build_opts.output, "Dataset output (JSON lines)")->required();

    SplitOptions split_opts;
    auto* split = app.add_subcommand("split", "Stratified train/dev/test split");
    split->fallthrough();
    split->add_option("--input", split_opts.input, "Dataset to split")->required()->check(CLI::ExistingFile);
    split->add_option("--ratios", split_opts.ratios, "train,dev,test ratios")->delimiter(',')->expected(3);
    split->add_flag("--group-by-headword", split_opts.group_by_headword, "Keep each headword within one split");
    split->add_option("--out-dir", split_opts.out_dir, "Output directory")->required();

    StatsOptions stats_opts;
    auto* stats = app.add_subcommand("stats", "Class counts and word-count distribution");
    stats->fallthrough();
    stats->add_option("--input", stats_opts.input, "Dataset")->required()->check(CLI::ExistingFile);
    stats->add_option("--histogram-csv", stats_opts.histogram_csv, "Write the word-count histogram as CSV");

    ValidateOptions validate_opts;
    auto* validate = app.add_subcommand("validate", "Re-check sample invariants; exits 1 on any violation");
    validate->fallthrough();
    validate->add_option("--input", validate_opts.input, "Dataset")->required()->check(CLI::ExistingFile);
    validate->add_option("--lexicon", validate_opts.lexicon, "Also check that provenance resolves")
        ->check(CLI::ExistingFile);

    EvaluateOptions eval_opts;
    auto* evaluate = app.add_subcommand("evaluate", "Zero-shot evaluation via entailment scoring");
    evaluate->fallthrough();
    evaluate->add_option("--dataset", eval_opts.dataset, "Examples {text, gold_class}")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--labels", eval_opts.labels, "Label map {class, label, n}")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--template", eval_opts.hypothesis_template, "Hypothesis template with one {label}");
    evaluate->add_option("--scorer", eval_opts.scorer, "oracle|lexical|remote")
        ->check(CLI::IsMember({"oracle", "lexical", "remote"}));
    evaluate->add_option("--endpoint", eval_opts.endpoint, "Remote scorer URL (overrides scorer.endpoint)");
    evaluate->add_option("--report", eval_opts.report, "Write the JSON report here");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) argv.push_back("letz-forge");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        JobsGuard jobs(globals.jobs);
        Pipeline pipeline(globals, out, err);
        if (ingest->parsed()) return pipeline.ingest(ingest_opts);
        if (build->parsed()) return pipeline.build(build_opts);
        if (split->parsed()) return pipeline.split(split_opts);
        if (stats->parsed()) return pipeline.stats(stats_opts);
        if (validate->parsed()) return pipeline.validate(validate_opts);
        return pipeline.evaluate(eval_opts);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: unexpected failure: " << e.what() << '\n';
        return kExitDataError;
    }
}

}  // namespace letz

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gaprag/config.hpp"
#include "gaprag/controller.hpp"
#include "gaprag/evaluation.hpp"
#include "gaprag/prompts.hpp"
#include "gaprag/supervision.hpp"

namespace {

using namespace gaprag;

[[noreturn]] void fatal(const std::string& code, const std::string& message) {
    std::cerr << "error: " << code << ": " << message << "\n";
    std::exit(1);
}

CorpusHandle load_corpus_or_die(const RunConfig& config) {
    if (config.corpus_path.empty()) fatal("E_CONFIG", "config has no corpus path");
    try {
        auto result = ingest_corpus(config.corpus_path);
        for (const auto& issue : result.issues)
            std::cerr << "warning: " << config.corpus_path << ":" << issue.line << ": "
                      << issue.message << "\n";
        return std::move(result.corpus);
    } catch (const std::exception& e) {
        fatal("E_IO", e.what());
    }
}

const BackendConfig& backend_config_or_die(const RunConfig& config,
                                           const std::string& role) {
    auto it = config.backends.find(role);
    if (it == config.backends.end())
        fatal("E_CONFIG", "config has no backend for role: " + role);
    return it->second;
}

int cmd_index(const std::string& config_path) {
    RunConfig config = RunConfig::load(config_path);
    CorpusHandle corpus = load_corpus_or_die(config);
    if (corpus.empty()) fatal("E_EMPTY_CORPUS", "corpus has no valid documents");
    Bm25Index index = Bm25Index::build(corpus, config.index_params);
    if (config.index_path.empty()) fatal("E_CONFIG", "config has no index path");
    std::filesystem::create_directories(
        std::filesystem::path(config.index_path).parent_path());
    index.save(config.index_path);
    std::cout << "indexed " << corpus.size() << " documents -> " << config.index_path
              << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, std::string questions_override,
            std::string output_override) {
    RunConfig config = RunConfig::load(config_path);
    if (!questions_override.empty()) config.questions_path = questions_override;
    if (!output_override.empty()) config.output_path = output_override;
    if (config.questions_path.empty()) fatal("E_CONFIG", "no questions file configured");
    if (config.output_path.empty()) fatal("E_CONFIG", "no output file configured");

    CorpusHandle corpus = load_corpus_or_die(config);
    if (corpus.empty()) fatal("E_EMPTY_CORPUS", "corpus has no valid documents");
    Bm25Index index = Bm25Index::build(corpus, config.index_params);

    auto judge = make_backend(backend_config_or_die(config, "judge"));
    auto extractor = make_backend(backend_config_or_die(config, "extractor"));
    auto reasoner = make_backend(backend_config_or_die(config, "reasoner"));

    Components components;
    components.corpus = &corpus;
    components.index = &index;
    components.judge = judge.get();
    components.extractor = extractor.get();
    components.reasoner = reasoner.get();

    auto questions = load_question_file(config.questions_path);

    // Resumable: skip question_ids already present in the output file.
    std::set<std::string> done;
    if (std::filesystem::exists(config.output_path)) {
        for (const auto& traj : load_trace_file(config.output_path))
            done.insert(traj.question_id);
    }
    std::vector<QuestionRecord> pending;
    for (auto& q : questions)
        if (!done.count(q.question_id)) pending.push_back(std::move(q));

    auto trajectories =
        run_questions(pending, config.pipeline, components, config.workers);

    std::ofstream out(config.output_path, std::ios::app);
    if (!out) fatal("E_IO", "cannot write trace file: " + config.output_path);
    std::size_t failures = 0;
    for (const auto& traj : trajectories) {
        if (traj.failed) {
            ++failures;
            std::cerr << "warning: question " << traj.question_id
                      << " failed: " << traj.failure_reason << "\n";
        }
        out << trajectory_to_json(traj).dump() << "\n";
    }
    std::cout << "ran " << trajectories.size() << " questions (" << done.size()
              << " skipped as done, " << failures << " failed) -> " << config.output_path
              << "\n";
    return 0;
}

int cmd_collect(const std::string& config_path, std::string output_override) {
    RunConfig config = RunConfig::load(config_path);
    if (!output_override.empty()) config.output_path = output_override;
    if (config.questions_path.empty()) fatal("E_CONFIG", "no questions file configured");
    if (config.output_path.empty()) fatal("E_CONFIG", "no output file configured");
    config.pipeline.mode = PipelineMode::trace_collection;

    CorpusHandle corpus = load_corpus_or_die(config);
    if (corpus.empty()) fatal("E_EMPTY_CORPUS", "corpus has no valid documents");
    Bm25Index index = Bm25Index::build(corpus, config.index_params);

    auto judge = make_backend(backend_config_or_die(config, "judge"));
    auto extractor = make_backend(backend_config_or_die(config, "extractor"));

    Components components;
    components.corpus = &corpus;
    components.index = &index;
    components.judge = judge.get();
    components.extractor = extractor.get();

    auto questions = load_question_file(config.questions_path);
    for (const auto& q : questions)
        if (q.gold_supporting_titles.empty())
            fatal("E_INPUT", "question without supporting_titles: " + q.question_id);

    auto snapshots =
        collect_snapshots(questions, config.pipeline, components, config.workers);
    save_snapshots(snapshots, config.output_path);
    std::cout << "collected " << snapshots.size() << " snapshots from "
              << questions.size() << " questions -> " << config.output_path << "\n";
    return 0;
}

int cmd_label(const std::string& config_path, const std::string& input,
              const std::string& output) {
    RunConfig config = RunConfig::load(config_path);
    if (!std::filesystem::exists(input))
        fatal("E_PREREQ", "snapshot file missing (run `collect` first): " + input);
    auto snapshots = load_snapshots(input);
    auto teacher = make_backend(backend_config_or_die(config, "teacher"));
    std::size_t labeled = 0;
    for (auto& snap : snapshots) {
        teacher_label(snap, *teacher);
        if (snap.teacher_verdict) ++labeled;
    }
    save_snapshots(snapshots, output);
    std::cout << "labeled " << labeled << "/" << snapshots.size() << " snapshots -> "
              << output << "\n";
    return 0;
}

int cmd_split(const std::string& config_path, const std::string& input,
              const std::string& out_dir) {
    RunConfig config = RunConfig::load(config_path);
    if (!std::filesystem::exists(input))
        fatal("E_PREREQ", "labeled snapshot file missing (run `label` first): " + input);
    auto snapshots = load_snapshots(input);
    auto outcome = filter_supervision(std::move(snapshots));
    auto split = split_dataset(outcome.kept, config.split_fraction, config.split_seed);

    std::filesystem::create_directories(out_dir);
    auto path = [&out_dir](const char* name) { return out_dir + "/" + name; };
    save_snapshots(split.train, path("train_snapshots.jsonl"));
    save_snapshots(split.val, path("val_snapshots.jsonl"));
    save_snapshots(outcome.dropped, path("dropped_snapshots.jsonl"));
    export_sft(split.train, path("train_sft.jsonl"));
    export_sft(split.val, path("val_sft.jsonl"));

    auto stats = supervision_stats(outcome.kept);
    nlohmann::json js;
    js["total"] = stats.total;
    js["sufficient"] = stats.sufficient;
    js["insufficient"] = stats.insufficient;
    js["per_turn_counts"] = stats.per_turn_counts;
    js["train"] = split.train.size();
    js["val"] = split.val.size();
    js["dropped"] = outcome.dropped.size();
    std::ofstream stats_out(path("stats.json"));
    stats_out << js.dump(2) << "\n";

    std::cout << "kept " << outcome.kept.size() << " (dropped "
              << outcome.dropped.size() << "), split " << split.train.size() << "/"
              << split.val.size() << " -> " << out_dir << "\n";
    return 0;
}

int cmd_analyze(const std::vector<std::string>& trace_paths, const std::string& gold_path,
                const std::string& report_path, bool group_by_final_turn) {
    std::vector<QuestionRecord> gold;
    if (!gold_path.empty()) gold = load_question_file(gold_path);

    if (trace_paths.size() > 1) {
        // Budget-sweep style: one F1 line per trace file.
        std::cout << "trace\tn\tEM\tF1\n";
        for (const auto& path : trace_paths) {
            auto report = aggregate_run(load_trace_file(path), gold);
            std::cout << path << "\t" << report.metrics.n << "\t" << report.metrics.em
                      << "\t" << report.metrics.f1 << "\n";
        }
        return 0;
    }

    auto trajectories = load_trace_file(trace_paths.front());
    auto report = aggregate_run(trajectories, gold);
    if (!report.confusion && !gold.empty())
        std::cerr << "notice: no gold supporting titles matched; confusion matrix skipped\n";
    std::cout << report_to_text(report);
    if (group_by_final_turn) {
        std::cout << "final_turn\tn\tevidence\tconcat\tratio\n";
        for (const auto& g : report.compression.groups)
            std::cout << g.final_turn << "\t" << g.n << "\t" << g.mean_evidence_words
                      << "\t" << g.mean_concat_words << "\t"
                      << (g.ratio ? std::to_string(*g.ratio) : std::string("-")) << "\n";
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) fatal("E_IO", "cannot write report: " + report_path);
        out << report_to_json(report).dump(2) << "\n";
    }
    return 0;
}

int cmd_verify(const std::string& config_path) {
    RunConfig config = RunConfig::load(config_path);
    CorpusHandle corpus = load_corpus_or_die(config);
    if (corpus.empty()) fatal("E_EMPTY_CORPUS", "corpus has no valid documents");
    Bm25Index index = Bm25Index::build(corpus, config.index_params);

    auto judge = make_backend(backend_config_or_die(config, "judge"));
    auto extractor = make_backend(backend_config_or_die(config, "extractor"));
    auto reasoner = make_backend(backend_config_or_die(config, "reasoner"));

    Components components{&corpus, &index, judge.get(), extractor.get(), reasoner.get()};
    auto questions = load_question_file(config.questions_path);

    std::vector<std::string> problems;
    for (const auto& q : questions) {
        auto traj = run_question(q, config.pipeline, components);
        if (traj.failed) {
            problems.push_back(q.question_id + ": " + traj.failure_reason);
            continue;
        }
        for (const auto& turn : traj.turns) {
            if (!turn.evidence_block) continue;
            for (const auto& cand : turn.evidence_block->selected) {
                const Document* doc = corpus.by_title(cand.doc_title);
                if (!doc) {
                    problems.push_back(q.question_id + ": evidence title not in corpus: " +
                                       cand.doc_title);
                    continue;
                }
                auto sentences = segment_sentences(doc->text);
                if (std::find(sentences.begin(), sentences.end(), cand.text) ==
                    sentences.end())
                    problems.push_back(q.question_id +
                                       ": evidence sentence not verbatim in [" +
                                       cand.doc_title + "]: " + cand.text);
            }
        }
    }
    if (problems.empty()) {
        std::cout << "fixtures ok (" << questions.size() << " questions replayed)\n";
        return 0;
    }
    for (const auto& p : problems) std::cerr << "inconsistency: " << p << "\n";
    fatal("E_FIXTURES", std::to_string(problems.size()) + " inconsistencies found");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterative gap-guided retrieval engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string questions_override, output_override;
    std::string input_path, output_path, out_dir, gold_path, report_path;
    std::vector<std::string> trace_paths;
    bool group_by_final_turn = false;

    auto add_config = [&config_path](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run config JSON file")->required();
    };

    auto* sub_index = app.add_subcommand("index", "build and persist the BM25 index");
    add_config(sub_index);

    auto* sub_run = app.add_subcommand("run", "run the retrieval loop over questions");
    add_config(sub_run);
    sub_run->add_option("--questions", questions_override, "questions JSONL (overrides config)");
    sub_run->add_option("--output", output_override, "trace JSONL output (overrides config)");

    auto* sub_collect =
        app.add_subcommand("collect", "roll out to full budget and collect snapshots");
    add_config(sub_collect);
    sub_collect->add_option("--output", output_override, "snapshot JSONL output");

    auto* sub_label = app.add_subcommand("label", "teacher-label collected snapshots");
    add_config(sub_label);
    sub_label->add_option("--input", input_path, "snapshot JSONL from `collect`")->required();
    sub_label->add_option("--output", output_path, "labeled snapshot JSONL")->required();

    auto* sub_split =
        app.add_subcommand("split", "filter, split, and export SFT training data");
    add_config(sub_split);
    sub_split->add_option("--input", input_path, "labeled snapshot JSONL from `label`")
        ->required();
    sub_split->add_option("--out-dir", out_dir, "output directory")->required();

    auto* sub_analyze = app.add_subcommand("analyze", "aggregate metrics from trace files");
    sub_analyze->add_option("--trace", trace_paths, "trace JSONL file(s)")->required();
    sub_analyze->add_option("--gold", gold_path, "gold questions JSONL");
    sub_analyze->add_option("--report", report_path, "machine-readable report JSON");
    sub_analyze->add_flag("--group-by-final-turn", group_by_final_turn,
                          "emit the per-final-turn compression table");

    auto* sub_verify = app.add_subcommand("verify", "cross-check fixture scripts and corpus");
    add_config(sub_verify);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub_index->parsed()) return cmd_index(config_path);
        if (sub_run->parsed()) return cmd_run(config_path, questions_override, output_override);
        if (sub_collect->parsed()) return cmd_collect(config_path, output_override);
        if (sub_label->parsed()) return cmd_label(config_path, input_path, output_path);
        if (sub_split->parsed()) return cmd_split(config_path, input_path, out_dir);
        if (sub_analyze->parsed())
            return cmd_analyze(trace_paths, gold_path, report_path, group_by_final_turn);
        if (sub_verify->parsed()) return cmd_verify(config_path);
    } catch (const std::exception& e) {
        fatal("E_RUNTIME", e.what());
    }
    return 0;
}

#pragma once

#include "stepgrade/corpus.hpp"
#include "stepgrade/evaluation.hpp"
#include "stepgrade/gateway.hpp"
#include "stepgrade/log.hpp"
#include "stepgrade/pipeline.hpp"
#include "stepgrade/prompts.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stepgrade::cli {

// Stable exit-code contract.
inline constexpr int exit_ok = 0;
inline constexpr int exit_fatal = 1;
inline constexpr int exit_partial = 2;
inline constexpr int exit_integrity = 3;

namespace detail {

struct GradeArgs {
    std::string corpus;
    std::string mode = "cot";
    std::string out_dir = "out";
    std::string prompts_dir = "prompts";
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4";
    std::string api_key_env = "STEPGRADE_API_KEY";
    double temperature = 0.0;
    double timeout_s = 60.0;
    int max_retries = 3;
    int workers = 4;
    std::string cache_dir;
    bool replay = false;
    bool record = false;
};

struct EvaluateArgs {
    std::string corpus;
    std::string reports_cot;
    std::string reports_regular;
    std::string reference;
    std::string fixture;
    std::string out_dir = "out";
};

struct CacheArgs {
    std::string cache_dir;
    bool yes = false;
};

inline GatewayConfig gateway_config_from(const GradeArgs& args) {
    GatewayConfig config;
    config.endpoint_url = args.endpoint;
    config.api_key_env = args.api_key_env;
    config.model = args.model;
    config.temperature = args.temperature;
    config.max_retries = args.max_retries;
    config.timeout_s = args.timeout_s;
    if (!args.cache_dir.empty()) {
        config.cache_dir = std::filesystem::path(args.cache_dir);
    }
    if (args.replay && args.record) {
        throw ConfigError("--replay and --record are mutually exclusive");
    }
    config.mode = args.replay   ? GatewayMode::replay
                  : args.record ? GatewayMode::record
                                : GatewayMode::live;
    config.validate();
    return config;
}

inline void print_findings(const std::vector<Finding>& findings, std::ostream& out) {
    for (const auto& finding : findings) {
        out << (finding.severity == Severity::error ? "error" : "warning") << ": "
            << finding.subject << ": " << finding.message << "\n";
    }
}

inline bool has_errors(const std::vector<Finding>& findings) {
    for (const auto& finding : findings) {
        if (finding.severity == Severity::error) {
            return true;
        }
    }
    return false;
}

inline int cmd_grade(const GradeArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<GradingMode> modes;
    if (args.mode == "both") {
        modes = {GradingMode::cot, GradingMode::regular};
    } else if (const auto mode = parse_grading_mode(args.mode)) {
        modes = {*mode};
    } else {
        err << "unknown mode \"" << args.mode << "\" (expected cot, regular, or both)\n";
        return exit_fatal;
    }

    CorpusManifest manifest;
    try {
        manifest = load_manifest(args.corpus);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
    const auto findings = validate_corpus(manifest);
    if (has_errors(findings)) {
        err << "corpus validation failed:\n";
        print_findings(findings, err);
        return exit_fatal;
    }

    GatewayConfig config;
    try {
        config = gateway_config_from(args);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
    Gateway gateway(config);

    const std::filesystem::path out_dir(args.out_dir);
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    size_t failures = 0;
    try {
        for (const auto mode : modes) {
            const TemplateSet templates =
                load_templates(std::filesystem::path(args.prompts_dir), mode);
            BatchOptions options;
            options.workers = args.workers;
            options.output_dir = out_dir / "reports" / to_string(mode);
            const auto items = grade_corpus(gateway, manifest, mode, templates, options);
            for (const auto& item : items) {
                nlohmann::ordered_json entry;
                entry["id"] = item.assignment_id;
                entry["mode"] = to_string(mode);
                if (item.report) {
                    entry["status"] = "ok";
                    entry["path"] = std::string("reports/") + to_string(mode) + "/" +
                                    item.assignment_id + ".json";
                } else {
                    entry["status"] = "error";
                    entry["error"] = item.error;
                    ++failures;
                }
                results.push_back(std::move(entry));
            }
        }
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }

    nlohmann::ordered_json run_manifest;
    run_manifest["model"] = config.model;
    auto modes_json = nlohmann::ordered_json::array();
    for (const auto mode : modes) {
        modes_json.push_back(to_string(mode));
    }
    run_manifest["modes"] = std::move(modes_json);
    run_manifest["assignments"] = manifest.assignments.size();
    run_manifest["results"] = std::move(results);
    stepgrade::detail::atomic_write_file(out_dir / "run_manifest.json",
                                         run_manifest.dump(2) + "\n");

    out << "graded " << manifest.assignments.size() << " assignment(s) in " << modes.size()
        << " mode(s), " << failures << " failure(s)\n";
    return failures == 0 ? exit_ok : exit_partial;
}

inline int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    ComparisonReport comparison;
    try {
        if (!args.fixture.empty()) {
            comparison = comparison_from_fixture(load_deviation_fixture(args.fixture));
        } else {
            if (args.corpus.empty()) {
                err << "--corpus is required unless --fixture is given\n";
                return exit_fatal;
            }
            const CorpusManifest manifest = load_manifest(args.corpus);
            std::filesystem::path reference_path;
            if (!args.reference.empty()) {
                reference_path = args.reference;
            } else if (manifest.reference_path) {
                reference_path = *manifest.reference_path;
            } else {
                err << "no --reference given and the manifest names no reference file\n";
                return exit_fatal;
            }
            const auto reference = load_reference(reference_path, manifest);
            std::map<std::string, GradingReport> cot;
            std::map<std::string, GradingReport> regular;
            if (!args.reports_cot.empty()) {
                cot = load_report_dir(args.reports_cot);
            }
            if (!args.reports_regular.empty()) {
                regular = load_report_dir(args.reports_regular);
            }
            comparison = build_comparison(cot, regular, reference.references, manifest);
        }
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }

    const std::filesystem::path out_dir(args.out_dir);
    stepgrade::detail::atomic_write_file(out_dir / "comparison.csv",
                                         emit_table(comparison, TableFormat::csv));
    stepgrade::detail::atomic_write_file(out_dir / "comparison.md",
                                         emit_table(comparison, TableFormat::markdown));

    out << emit_summary_lines(comparison);
    for (const auto& warning : comparison.warnings) {
        out << "warning: " << warning << "\n";
    }
    return exit_ok;
}

inline int cmd_validate(const std::string& corpus, std::ostream& out, std::ostream& err) {
    CorpusManifest manifest;
    try {
        manifest = load_manifest(corpus);
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
    const auto findings = validate_corpus(manifest);
    if (findings.empty()) {
        out << "corpus valid: " << manifest.assignments.size() << " assignment(s)\n";
        return exit_ok;
    }
    print_findings(findings, out);
    return has_errors(findings) ? exit_fatal : exit_ok;
}

inline int cmd_cache_stats(const CacheArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const auto stats = cache_stats(args.cache_dir);
        out << "records: " << stats.record_count << "\n";
        out << "total bytes: " << stats.total_bytes << "\n";
        return exit_ok;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
}

inline int cmd_cache_clear(const CacheArgs& args, std::ostream& out, std::ostream& err) {
    if (!args.yes) {
        err << "refusing to clear the cache without --yes\n";
        return exit_fatal;
    }
    try {
        out << "deleted " << clear_cache(args.cache_dir) << " record(s)\n";
        return exit_ok;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
}

inline int cmd_cache_verify(const CacheArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const auto findings = verify_cache(args.cache_dir);
        if (findings.empty()) {
            out << "cache intact: " << cache_stats(args.cache_dir).record_count
                << " record(s)\n";
            return exit_ok;
        }
        for (const auto& finding : findings) {
            out << "corrupt: " << finding.path << ": " << finding.reason << "\n";
        }
        return exit_integrity;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
}

} // namespace detail

/// Entry point shared by the binary and the tests. `args` excludes the
/// program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"StepGrade: staged LLM grading of programming assignments"};
    app.set_config("--config", "", "Read options from an INI/TOML config file");

    std::string log_level = "info";
    app.add_option("--log-level", log_level, "error, warn, info, or debug")
        ->envname("STEPGRADE_LOG_LEVEL");

    detail::GradeArgs grade_args;
    auto* grade = app.add_subcommand("grade", "Grade a corpus of assignments");
    grade->add_option("--corpus", grade_args.corpus, "Corpus directory or manifest file")
        ->required()
        ->envname("STEPGRADE_CORPUS");
    grade->add_option("--mode", grade_args.mode, "cot, regular, or both")
        ->envname("STEPGRADE_MODE");
    grade->add_option("--out", grade_args.out_dir, "Output directory")
        ->envname("STEPGRADE_OUT");
    grade->add_option("--prompts", grade_args.prompts_dir, "Prompt template directory")
        ->envname("STEPGRADE_PROMPTS");
    grade->add_option("--endpoint", grade_args.endpoint, "OpenAI-compatible base URL")
        ->envname("STEPGRADE_ENDPOINT");
    grade->add_option("--model", grade_args.model, "Model name")->envname("STEPGRADE_MODEL");
    grade->add_option("--api-key-env", grade_args.api_key_env,
                      "Environment variable holding the API key");
    grade->add_option("--temperature", grade_args.temperature, "Sampling temperature");
    grade->add_option("--timeout", grade_args.timeout_s, "Request timeout in seconds");
    grade->add_option("--max-retries", grade_args.max_retries, "Retries for transient errors");
    grade->add_option("--workers", grade_args.workers, "Concurrent grading workers")
        ->envname("STEPGRADE_WORKERS");
    grade->add_option("--cache", grade_args.cache_dir, "Response cache directory")
        ->envname("STEPGRADE_CACHE");
    grade->add_flag("--replay", grade_args.replay, "Serve responses from the cache only");
    grade->add_flag("--record", grade_args.record, "Record live responses into the cache");

    detail::EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Compare grading reports against human reference grades");
    evaluate->add_option("--corpus", evaluate_args.corpus, "Corpus directory or manifest file")
        ->envname("STEPGRADE_CORPUS");
    evaluate->add_option("--reports-cot", evaluate_args.reports_cot,
                         "Directory of CoT grading reports");
    evaluate->add_option("--reports-regular", evaluate_args.reports_regular,
                         "Directory of regular grading reports");
    evaluate->add_option("--reference", evaluate_args.reference,
                         "Human reference grades file");
    evaluate->add_option("--fixture", evaluate_args.fixture,
                         "Deviation fixture file (replaces reports and reference)");
    evaluate->add_option("--out", evaluate_args.out_dir, "Output directory")
        ->envname("STEPGRADE_OUT");

    detail::EvaluateArgs compare_args;
    auto* compare =
        app.add_subcommand("compare", "Evaluate with two report directories (alias)");
    compare->add_option("cot_dir", compare_args.reports_cot, "Directory of CoT reports")
        ->required();
    compare->add_option("regular_dir", compare_args.reports_regular,
                        "Directory of regular reports")
        ->required();
    compare->add_option("--corpus", compare_args.corpus, "Corpus directory or manifest file")
        ->envname("STEPGRADE_CORPUS");
    compare->add_option("--reference", compare_args.reference, "Human reference grades file");
    compare->add_option("--out", compare_args.out_dir, "Output directory")
        ->envname("STEPGRADE_OUT");

    std::string validate_corpus_path;
    auto* validate = app.add_subcommand("validate", "Check a corpus and report findings");
    validate->add_option("--corpus", validate_corpus_path, "Corpus directory or manifest file")
        ->required()
        ->envname("STEPGRADE_CORPUS");

    detail::CacheArgs cache_args;
    auto* cache = app.add_subcommand("cache", "Inspect or maintain the response cache");
    cache->require_subcommand(1);
    auto add_cache_dir = [&](CLI::App* sub) {
        sub->add_option("--cache", cache_args.cache_dir, "Response cache directory")
            ->required()
            ->envname("STEPGRADE_CACHE");
    };
    auto* cache_stats_cmd = cache->add_subcommand("stats", "Record count and total bytes");
    add_cache_dir(cache_stats_cmd);
    auto* cache_clear_cmd = cache->add_subcommand("clear", "Delete all cache records");
    add_cache_dir(cache_clear_cmd);
    cache_clear_cmd->add_flag("--yes", cache_args.yes, "Confirm deletion");
    auto* cache_verify_cmd = cache->add_subcommand("verify", "Re-hash records, report corruption");
    add_cache_dir(cache_verify_cmd);

    app.require_subcommand(1);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_fatal;
    }

    log::Level level = log::Level::info;
    if (!log::parse_level(log_level, level)) {
        err << "unknown log level \"" << log_level << "\"\n";
        return exit_fatal;
    }
    log::set_level(level);

    try {
        if (grade->parsed()) {
            return detail::cmd_grade(grade_args, out, err);
        }
        if (evaluate->parsed()) {
            return detail::cmd_evaluate(evaluate_args, out, err);
        }
        if (compare->parsed()) {
            return detail::cmd_evaluate(compare_args, out, err);
        }
        if (validate->parsed()) {
            return detail::cmd_validate(validate_corpus_path, out, err);
        }
        if (cache->parsed()) {
            if (cache_stats_cmd->parsed()) {
                return detail::cmd_cache_stats(cache_args, out, err);
            }
            if (cache_clear_cmd->parsed()) {
                return detail::cmd_cache_clear(cache_args, out, err);
            }
            if (cache_verify_cmd->parsed()) {
                return detail::cmd_cache_verify(cache_args, out, err);
            }
        }
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return exit_fatal;
    }
    err << "no subcommand given\n";
    return exit_fatal;
}

} // namespace stepgrade::cli

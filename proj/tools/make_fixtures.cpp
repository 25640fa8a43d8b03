// Regenerates the committed replay cache under fixtures/cache: for every
// assignment, mode, and stage it synthesizes a deterministic response whose
// grade equals the human reference grade plus the recorded deviation, then
// records the pipeline's real prompt/response exchange.

#include "stepgrade/cli.hpp"
#include "stepgrade/corpus.hpp"
#include "stepgrade/evaluation.hpp"
#include "stepgrade/gateway.hpp"
#include "stepgrade/pipeline.hpp"
#include "stepgrade/prompts.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace stepgrade;

std::string verdict_for(Grade grade) {
    if (grade.tenths() >= 90) return "excellent";
    if (grade.tenths() >= 80) return "solid";
    if (grade.tenths() >= 70) return "adequate";
    return "limited";
}

std::string synth_feedback(const std::string& title, Criterion criterion, Grade grade) {
    const std::string verdict = verdict_for(grade);
    switch (criterion) {
        case Criterion::functionality:
            return "The solution to \"" + title + "\" is functionally " + verdict +
                   ". It produces the expected outputs across the main input ranges; "
                   "tightening the handling of boundary and empty inputs would make the "
                   "behaviour fully robust.";
        case Criterion::code_quality:
            return "Code quality for \"" + title + "\" is " + verdict +
                   ". Variable naming and overall structure are mostly clear; adding "
                   "docstrings and splitting longer blocks into helper functions would "
                   "improve readability and maintainability.";
        case Criterion::algorithmic_efficiency:
            return "Algorithmic efficiency of \"" + title + "\" is " + verdict +
                   ". The chosen approach is workable at this input scale; reviewing the "
                   "dominant loop for redundant work and considering a more direct data "
                   "structure would reduce the running cost.";
    }
    return verdict;
}

std::string fixed_timestamp(int index) {
    char buffer[80];
    std::snprintf(buffer, sizeof(buffer), "2026-01-01T%02d:%02d:%02d.000Z", index / 3600,
                  (index / 60) % 60, index % 60);
    return buffer;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regenerate the deterministic replay cache"};
    std::string corpus_path = "corpus";
    std::string prompts_dir = "prompts";
    std::string fixture_path = "fixtures/table2_deviations.json";
    std::string out_dir = "fixtures/cache";
    std::string model = "gpt-4";
    app.add_option("--corpus", corpus_path, "Corpus directory or manifest file");
    app.add_option("--prompts", prompts_dir, "Prompt template directory");
    app.add_option("--fixture", fixture_path, "Deviation fixture file");
    app.add_option("--out", out_dir, "Cache directory to write");
    app.add_option("--model", model, "Model name to stamp into the records");
    CLI11_PARSE(app, argc, argv);

    try {
        const CorpusManifest manifest = load_manifest(corpus_path);
        const DeviationFixture fixture = load_deviation_fixture(fixture_path);
        std::map<std::string, const ComparisonRow*> rows;
        for (const auto& row : fixture.rows) {
            rows[row.id] = &row;
        }
        for (const auto& assignment : manifest.assignments) {
            if (!rows.count(assignment.id)) {
                throw Error("fixture has no row for assignment \"" + assignment.id + "\"");
            }
        }

        std::filesystem::create_directories(out_dir);

        int clock_index = 0;
        const ComparisonRow* current_row = nullptr;
        GradingMode current_mode = GradingMode::cot;
        int stage_index = 0;

        GatewayConfig config;
        config.mode = GatewayMode::record;
        config.cache_dir = std::filesystem::path(out_dir);
        config.model = model;
        config.temperature = 0.0;
        config.endpoint_url = "http://fixture.invalid";

        Transport transport = [&](const ChatRequest& request) -> ChatResponse {
            const Criterion criterion = all_criteria[static_cast<size_t>(stage_index++)];
            const int human =
                current_row->human_tenths[static_cast<size_t>(criterion)];
            const int deviation =
                *current_row->deviation(current_mode, criterion);
            const Grade grade = Grade::from_tenths(human + deviation);
            ChatResponse response;
            response.content = synth_feedback(current_row->title, criterion, grade) +
                               "\nGRADE: " + grade.to_string();
            response.model_echo = request.model;
            response.latency_ms = 0;
            return response;
        };
        Clock clock = [&]() { return fixed_timestamp(clock_index++); };

        Gateway gateway(config, transport, clock);

        for (const auto mode : {GradingMode::cot, GradingMode::regular}) {
            current_mode = mode;
            const TemplateSet templates = load_templates(prompts_dir, mode);
            for (const auto& assignment : manifest.assignments) {
                current_row = rows.at(assignment.id);
                stage_index = 0;
                auto [loaded, submission] = load_submission(manifest, assignment.id);
                const std::string question = load_question(manifest, assignment.id);
                if (mode == GradingMode::cot) {
                    run_cot_pipeline(gateway, loaded, question, submission, templates);
                } else {
                    run_regular_baseline(gateway, loaded, question, submission, templates);
                }
            }
        }

        const auto stats = cache_stats(out_dir);
        std::cout << "wrote " << stats.record_count << " record(s), " << stats.total_bytes
                  << " bytes to " << out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

// Acceptance suite: one test case per release criterion, reported as a
// single PASS/FAIL line each.

#include "stepgrade/cli.hpp"
#include "stepgrade/evaluation.hpp"
#include "stepgrade/pipeline.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

using namespace stepgrade;
using test_support::Rational;
using test_support::TempDir;

namespace {

class AcceptancePrinter : public Catch::EventListenerBase {
public:
    using Catch::EventListenerBase::EventListenerBase;
    void testCaseEnded(const Catch::TestCaseStats& stats) override {
        const char* outcome = stats.totals.testCases.skipped > 0 ? "SKIP"
                              : stats.totals.assertions.allOk() ? "PASS"
                                                                : "FAIL";
        std::cout << "[acceptance] " << stats.testInfo->name << ": " << outcome << std::endl;
    }
};
CATCH_REGISTER_LISTENER(AcceptancePrinter)

std::string corpus_path() { return (test_support::source_dir() / "corpus").string(); }
std::string prompts_path() { return (test_support::source_dir() / "prompts").string(); }
std::string cache_path() {
    return (test_support::source_dir() / "fixtures" / "cache").string();
}
std::string fixture_path() {
    return (test_support::source_dir() / "fixtures" / "table2_deviations.json").string();
}

int run_cli_quiet(std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(std::move(args), out, err);
    if (out_text) {
        *out_text = out.str();
    }
    return code;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

TEST_CASE("criterion 1: MAE cells reproduce from the shipped deviation fixture",
          "[acceptance]") {
    const auto start = std::chrono::steady_clock::now();

    TempDir out;
    std::string stdout_text;
    const int code = run_cli_quiet(
        {"evaluate", "--fixture", fixture_path(), "--out", out.path().string()},
        &stdout_text);
    REQUIRE(code == cli::exit_ok);

    const auto report = comparison_from_fixture(load_deviation_fixture(fixture_path()));

    struct Cell {
        DifficultyLevel difficulty;
        Criterion criterion;
        GradingMode mode;
        int expected_hundredths;
    };
    const std::vector<Cell> cells = {
        {DifficultyLevel::easy, Criterion::functionality, GradingMode::regular, 66},
        {DifficultyLevel::easy, Criterion::functionality, GradingMode::cot, 44},
        {DifficultyLevel::easy, Criterion::code_quality, GradingMode::regular, 53},
        {DifficultyLevel::easy, Criterion::code_quality, GradingMode::cot, 40},
        {DifficultyLevel::easy, Criterion::algorithmic_efficiency, GradingMode::regular, 61},
        {DifficultyLevel::easy, Criterion::algorithmic_efficiency, GradingMode::cot, 41},
        {DifficultyLevel::intermediate, Criterion::functionality, GradingMode::regular, 71},
        {DifficultyLevel::intermediate, Criterion::functionality, GradingMode::cot, 52},
        {DifficultyLevel::intermediate, Criterion::code_quality, GradingMode::regular, 44},
        {DifficultyLevel::intermediate, Criterion::code_quality, GradingMode::cot, 24},
        {DifficultyLevel::intermediate, Criterion::algorithmic_efficiency,
         GradingMode::regular, 51},
        {DifficultyLevel::intermediate, Criterion::algorithmic_efficiency, GradingMode::cot,
         26},
        {DifficultyLevel::advanced, Criterion::functionality, GradingMode::regular, 62},
        {DifficultyLevel::advanced, Criterion::functionality, GradingMode::cot, 56},
        {DifficultyLevel::advanced, Criterion::code_quality, GradingMode::regular, 95},
        {DifficultyLevel::advanced, Criterion::code_quality, GradingMode::cot, 62},
        // the 18th cell recomputes to 0.72 against a stated 0.54
        {DifficultyLevel::advanced, Criterion::algorithmic_efficiency, GradingMode::regular,
         72},
        {DifficultyLevel::advanced, Criterion::algorithmic_efficiency, GradingMode::cot, 58},
    };
    REQUIRE(report.summaries.size() == 18);
    for (const auto& cell : cells) {
        const auto* summary = report.find_summary(cell.difficulty, cell.criterion, cell.mode);
        REQUIRE(summary != nullptr);
        // hundredths equality == agreement to within the +/-0.005 tolerance
        CHECK(summary->mae_hundredths == cell.expected_hundredths);
    }

    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("0.72") != std::string::npos);
    CHECK(report.warnings[0].find("0.54") != std::string::npos);
    CHECK(stdout_text.find("warning: computed MAE 0.72") != std::string::npos);

    CHECK(seconds_since(start) < 1.0);
}

TEST_CASE("criterion 2: CoT threads context forward and regular mode stays isolated",
          "[acceptance]") {
    const auto manifest = load_manifest(corpus_path());
    REQUIRE(manifest.assignments.size() == 30);
    const auto cot_templates = load_templates(prompts_path(), GradingMode::cot);
    const auto regular_templates = load_templates(prompts_path(), GradingMode::regular);

    int passing = 0;
    for (const auto& assignment : manifest.assignments) {
        // prompt-capturing mock with unique per-stage feedback markers
        std::vector<ChatRequest> captured;
        std::mutex mutex;
        int call = 0;
        Transport capture = [&](const ChatRequest& request) -> ChatResponse {
            std::lock_guard<std::mutex> lock(mutex);
            captured.push_back(request);
            const std::string marker =
                "MARKER-" + assignment.id + "-stage" + std::to_string(call++);
            return {marker + " detailed feedback body\nGRADE: 8.0", "mock", std::nullopt, 0};
        };
        GatewayConfig config;
        config.endpoint_url = "http://mock.invalid/v1";
        Gateway gateway(config, capture);

        const auto [loaded, submission] = load_submission(manifest, assignment.id);
        const auto question = load_question(manifest, assignment.id);

        run_cot_pipeline(gateway, loaded, question, submission, cot_templates);
        REQUIRE(captured.size() == 3);
        const std::string stage0_marker = "MARKER-" + assignment.id + "-stage0";
        const std::string stage1_marker = "MARKER-" + assignment.id + "-stage1";
        const auto& second = captured[1].messages.back().content;
        const auto& third = captured[2].messages.back().content;
        const bool threaded = second.find(stage0_marker) != std::string::npos &&
                              third.find(stage0_marker) != std::string::npos &&
                              third.find(stage1_marker) != std::string::npos;

        captured.clear();
        call = 0;
        run_regular_baseline(gateway, loaded, question, submission, regular_templates);
        REQUIRE(captured.size() == 3);
        bool isolated = true;
        for (const auto& request : captured) {
            for (const auto& message : request.messages) {
                isolated = isolated && message.content.find("MARKER-") == std::string::npos;
            }
        }
        if (threaded && isolated) {
            ++passing;
        }
    }
    CHECK(passing == 30);
}

TEST_CASE("criterion 3: grade extraction is total on the contract and errors after one re-ask",
          "[acceptance]") {
    for (int tenths = 10; tenths <= 100; ++tenths) {
        const auto parsed =
            parse_grade("feedback text\nGRADE: " + Grade::from_tenths(tenths).to_string());
        REQUIRE(parsed.grade.tenths() == tenths);
    }

    std::mt19937 rng(20260810);
    std::uniform_int_distribution<int> tenths_dist(10, 100);
    std::uniform_int_distribution<int> line_count(0, 5);
    std::uniform_int_distribution<int> word_count(1, 10);
    std::uniform_int_distribution<int> word_pick(0, 9);
    std::uniform_int_distribution<int> deco(0, 4);
    const char* words[] = {"review", "grade",  "score", "loops", "edge",
                           "cases",  "output", "tests", "clean", "logic"};
    const char* prefixes[] = {"", "**", "# ", "> ", "- "};
    const char* suffixes[] = {"", "**", "`", ".", " "};
    int checked = 0;
    for (int round = 0; round < 1200; ++round) {
        const int expected = tenths_dist(rng);
        std::string text;
        for (int l = line_count(rng); l > 0; --l) {
            for (int w = word_count(rng); w > 0; --w) {
                text += words[word_pick(rng)];
                text += ' ';
            }
            text += '\n';
        }
        text += prefixes[deco(rng)];
        text += "GRADE: " + Grade::from_tenths(expected).to_string();
        text += suffixes[deco(rng)];
        for (int l = line_count(rng); l > 0; --l) {
            text += '\n';
            for (int w = word_count(rng); w > 0; --w) {
                text += words[word_pick(rng)];
                text += ' ';
            }
        }
        REQUIRE(parse_grade(text).grade.tenths() == expected);
        ++checked;
    }
    CHECK(checked >= 1000);

    // malformed twice: the stage fails after exactly one re-ask (2 calls)
    int calls = 0;
    Transport malformed = [&](const ChatRequest&) -> ChatResponse {
        ++calls;
        return {"no grade line in this prose", "mock", std::nullopt, 0};
    };
    GatewayConfig config;
    config.endpoint_url = "http://mock.invalid/v1";
    Gateway gateway(config, malformed);
    const auto manifest = load_manifest(corpus_path());
    const auto [assignment, submission] = load_submission(manifest, "calc-factorial");
    const auto question = load_question(manifest, "calc-factorial");
    REQUIRE_THROWS_AS(run_cot_pipeline(gateway, assignment, question, submission,
                                       load_templates(prompts_path(), GradingMode::cot)),
                      PipelineError);
    CHECK(calls == 2);
}

TEST_CASE("criterion 4: replay runs are byte-identical across runs and worker counts",
          "[acceptance]") {
    auto replay_into = [&](const TempDir& out, int workers) {
        const int code = run_cli_quiet(
            {"grade", "--corpus", corpus_path(), "--prompts", prompts_path(), "--mode",
             "both", "--replay", "--cache", cache_path(), "--workers",
             std::to_string(workers), "--out", out.path().string()});
        REQUIRE(code == cli::exit_ok);
    };
    TempDir first;
    TempDir second;
    TempDir third;
    replay_into(first, 1);
    replay_into(second, 1);
    replay_into(third, 8);

    const auto a = test_support::dir_bytes(first.path());
    const auto b = test_support::dir_bytes(second.path());
    const auto c = test_support::dir_bytes(third.path());
    REQUIRE(a.size() == 61); // 30 reports x 2 modes + run manifest
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("criterion 5: deviation and MAE agree with the rational oracle on 10k pairs",
          "[acceptance]") {
    std::mt19937 rng(73);
    std::uniform_int_distribution<int> tenths(Grade::min_tenths, Grade::max_tenths);

    std::vector<int> batch;
    std::vector<Rational> batch_rationals;
    std::uniform_int_distribution<int> batch_size(1, 17);
    int next_flush = batch_size(rng);

    for (int pair = 0; pair < 10000; ++pair) {
        const auto llm = Grade::from_tenths(tenths(rng));
        const auto human = Grade::from_tenths(tenths(rng));

        const auto oracle_deviation = Rational::from_decimal(llm.to_string()) -
                                      Rational::from_decimal(human.to_string());
        const int tenths_deviation = compute_deviation_tenths(llm, human);
        REQUIRE(Rational::of(tenths_deviation, 10) == oracle_deviation);

        batch.push_back(tenths_deviation);
        batch_rationals.push_back(oracle_deviation);
        if (static_cast<int>(batch.size()) == next_flush) {
            const auto oracle_mae = test_support::rational_round_scaled(
                test_support::rational_mean_abs(batch_rationals), 2);
            REQUIRE(compute_mae_hundredths(batch) == oracle_mae);
            batch.clear();
            batch_rationals.clear();
            next_flush = batch_size(rng);
        }
    }
}

TEST_CASE("criterion 6: desk-scale replay plus evaluate is fast and fully tabulated",
          "[acceptance]") {
    const auto start = std::chrono::steady_clock::now();

    TempDir out;
    REQUIRE(run_cli_quiet({"grade", "--corpus", corpus_path(), "--prompts", prompts_path(),
                           "--mode", "both", "--replay", "--cache", cache_path(), "--out",
                           out.path().string()}) == cli::exit_ok);
    std::string summary;
    REQUIRE(run_cli_quiet({"evaluate", "--corpus", corpus_path(), "--reports-cot",
                           (out.path() / "reports" / "cot").string(), "--reports-regular",
                           (out.path() / "reports" / "regular").string(), "--out",
                           out.path().string()},
                          &summary) == cli::exit_ok);

    CHECK(seconds_since(start) < 10.0);

    const auto markdown = test_support::read_file(out.path() / "comparison.md");
    size_t assignment_rows = 0;
    size_t mae_rows = 0;
    std::istringstream lines(markdown);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("| Easy |", 0) == 0 || line.rfind("| Intermediate |", 0) == 0 ||
            line.rfind("| Advanced |", 0) == 0) {
            if (line.find("Mean Absolute Error") != std::string::npos) {
                ++mae_rows;
            } else {
                ++assignment_rows;
            }
        }
    }
    CHECK(assignment_rows == 30);
    CHECK(mae_rows == 3);
    CHECK(summary.find("Easy | Functionality | regular 0.66 | cot 0.44") !=
          std::string::npos);
}

// Network-gated smoke test; run explicitly with the [live] tag after
// exporting STEPGRADE_ENDPOINT, STEPGRADE_MODEL, and STEPGRADE_API_KEY.
TEST_CASE("criterion 7: live smoke grading of three assignments", "[.][live]") {
    const char* endpoint = std::getenv("STEPGRADE_ENDPOINT");
    const char* key = std::getenv("STEPGRADE_API_KEY");
    if (endpoint == nullptr || key == nullptr) {
        SKIP("STEPGRADE_ENDPOINT / STEPGRADE_API_KEY not set");
    }

    GatewayConfig config;
    config.endpoint_url = endpoint;
    if (const char* model = std::getenv("STEPGRADE_MODEL")) {
        config.model = model;
    }
    Gateway gateway(config);

    const auto manifest = load_manifest(corpus_path());
    const auto templates = load_templates(prompts_path(), GradingMode::cot);
    int complete = 0;
    for (size_t i = 0; i < 3; ++i) {
        const auto& id = manifest.assignments[i].id;
        const auto [assignment, submission] = load_submission(manifest, id);
        const auto report = run_cot_pipeline(gateway, assignment,
                                             load_question(manifest, id), submission,
                                             templates);
        REQUIRE(report.stages.size() == 3);
        for (const auto& stage : report.stages) {
            REQUIRE(stage.grade.tenths() >= Grade::min_tenths);
            REQUIRE(stage.grade.tenths() <= Grade::max_tenths);
            REQUIRE_FALSE(stage.feedback.empty());
        }
        ++complete;
    }
    CHECK(complete == 3);
}

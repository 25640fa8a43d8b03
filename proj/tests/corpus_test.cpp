#include "stepgrade/corpus.hpp"

#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace stepgrade;
using test_support::TempDir;
using test_support::write_file;

namespace {

/// Minimal one-assignment corpus for error-path tests.
void write_mini_corpus(const std::filesystem::path& root, const std::string& manifest_json) {
    write_file(root / "manifest.json", manifest_json);
    write_file(root / "questions" / "calc-factorial.txt", "Compute the factorial.\n");
    write_file(root / "submissions" / "calc-factorial.py", "print(1)\n");
}

const std::string mini_manifest = R"({
  "assignments": [
    {
      "id": "calc-factorial",
      "title": "Calculate Factorial",
      "difficulty": "Easy",
      "description": "Write a function to compute the factorial of a given number.",
      "question_path": "questions/calc-factorial.txt",
      "submission_path": "submissions/calc-factorial.py"
    }
  ]
})";

} // namespace

TEST_CASE("shipped manifest loads with 10 assignments per difficulty", "[corpus]") {
    const auto manifest = load_manifest(test_support::source_dir() / "corpus");
    REQUIRE(manifest.assignments.size() == 30);
    CHECK(manifest.count(DifficultyLevel::easy) == 10);
    CHECK(manifest.count(DifficultyLevel::intermediate) == 10);
    CHECK(manifest.count(DifficultyLevel::advanced) == 10);
    REQUIRE(manifest.reference_path.has_value());
}

TEST_CASE("manifest loading is deterministic", "[corpus]") {
    const auto a = load_manifest(test_support::source_dir() / "corpus");
    const auto b = load_manifest(test_support::source_dir() / "corpus");
    REQUIRE(a.assignments.size() == b.assignments.size());
    for (size_t i = 0; i < a.assignments.size(); ++i) {
        CHECK(a.assignments[i].id == b.assignments[i].id);
        CHECK(a.assignments[i].title == b.assignments[i].title);
        CHECK(a.assignments[i].difficulty == b.assignments[i].difficulty);
        CHECK(a.assignments[i].description == b.assignments[i].description);
    }
}

TEST_CASE("empty manifest is a valid empty corpus", "[corpus]") {
    TempDir dir;
    write_file(dir.path() / "manifest.json", R"({"assignments": []})");
    const auto manifest = load_manifest(dir.path());
    CHECK(manifest.assignments.empty());
    CHECK(validate_corpus(manifest).empty());
}

TEST_CASE("duplicate assignment ids are rejected by name", "[corpus]") {
    TempDir dir;
    std::string doubled = mini_manifest;
    const auto pos = doubled.rfind("]");
    doubled.insert(pos, R"(,
    {
      "id": "calc-factorial",
      "title": "Calculate Factorial Again",
      "difficulty": "Easy",
      "description": "duplicate",
      "question_path": "questions/calc-factorial.txt",
      "submission_path": "submissions/calc-factorial.py"
    }
)");
    write_mini_corpus(dir.path(), doubled);
    REQUIRE_THROWS_WITH(load_manifest(dir.path()),
                        Catch::Matchers::ContainsSubstring("calc-factorial"));
}

TEST_CASE("unknown difficulty label is a load error", "[corpus]") {
    TempDir dir;
    std::string bad = mini_manifest;
    bad.replace(bad.find("\"Easy\""), 6, "\"Trivial\"");
    write_mini_corpus(dir.path(), bad);
    REQUIRE_THROWS_WITH(load_manifest(dir.path()),
                        Catch::Matchers::ContainsSubstring("Trivial"));
}

TEST_CASE("dangling file reference is a load error", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    std::filesystem::remove(dir.path() / "submissions" / "calc-factorial.py");
    REQUIRE_THROWS_WITH(load_manifest(dir.path()),
                        Catch::Matchers::ContainsSubstring("dangling file reference"));
}

TEST_CASE("malformed manifest document is reported", "[corpus]") {
    TempDir dir;
    write_file(dir.path() / "manifest.json", "{ not json");
    REQUIRE_THROWS_WITH(load_manifest(dir.path()),
                        Catch::Matchers::ContainsSubstring("malformed"));
    REQUIRE_THROWS_AS(load_manifest(dir.path() / "absent.json"), CorpusError);
}

TEST_CASE("load_submission returns the assignment and its source", "[corpus]") {
    const auto manifest = load_manifest(test_support::source_dir() / "corpus");
    const auto [assignment, submission] = load_submission(manifest, "calc-factorial");
    CHECK(assignment.title == "Calculate Factorial");
    CHECK(assignment.description ==
          "Write a function to compute the factorial of a given number.");
    CHECK(submission.assignment_id == "calc-factorial");
    CHECK(submission.source.find("factorial") != std::string::npos);
    CHECK(submission.language_tag == "python");
}

TEST_CASE("load_submission rejects unknown ids and empty files", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    const auto manifest = load_manifest(dir.path());
    REQUIRE_THROWS_WITH(load_submission(manifest, "nope"),
                        Catch::Matchers::ContainsSubstring("unknown assignment id"));
    write_file(dir.path() / "submissions" / "calc-factorial.py", "  \n");
    REQUIRE_THROWS_WITH(load_submission(manifest, "calc-factorial"),
                        Catch::Matchers::ContainsSubstring("empty"));
}

TEST_CASE("text files are newline-normalized to LF", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    write_file(dir.path() / "submissions" / "calc-factorial.py",
               "line_one = 1\r\nline_two = 2\r\n");
    const auto manifest = load_manifest(dir.path());
    const auto [assignment, submission] = load_submission(manifest, "calc-factorial");
    CHECK(submission.source == "line_one = 1\nline_two = 2\n");
}

TEST_CASE("shipped reference has the calc-factorial grades", "[corpus]") {
    const auto manifest = load_manifest(test_support::source_dir() / "corpus");
    const auto loaded = load_reference(*manifest.reference_path, manifest);
    REQUIRE(loaded.missing_ids.empty());
    REQUIRE(loaded.references.size() == 30);
    const auto& reference = loaded.references.at("calc-factorial");
    CHECK(reference.functionality == Grade::from_value(9.5));
    CHECK(reference.code_quality == Grade::from_value(8.5));
    CHECK(reference.efficiency == Grade::from_value(9.0));
}

TEST_CASE("reference grades outside [1.0, 10.0] are rejected", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    const auto manifest = load_manifest(dir.path());
    write_file(dir.path() / "ref.json",
               R"({"calc-factorial": {"functionality": 11.0, "code_quality": 8.0, "efficiency": 9.0}})");
    REQUIRE_THROWS_WITH(load_reference(dir.path() / "ref.json", manifest),
                        Catch::Matchers::ContainsSubstring("out of range"));
}

TEST_CASE("reference grades with two fractional digits are rejected", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    const auto manifest = load_manifest(dir.path());
    write_file(dir.path() / "ref.json",
               R"({"calc-factorial": {"functionality": 9.55, "code_quality": 8.0, "efficiency": 9.0}})");
    REQUIRE_THROWS_WITH(load_reference(dir.path() / "ref.json", manifest),
                        Catch::Matchers::ContainsSubstring("fractional digit"));
}

TEST_CASE("dangling reference ids are rejected", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    const auto manifest = load_manifest(dir.path());
    write_file(dir.path() / "ref.json",
               R"({"ghost": {"functionality": 9.0, "code_quality": 8.0, "efficiency": 9.0}})");
    REQUIRE_THROWS_WITH(load_reference(dir.path() / "ref.json", manifest),
                        Catch::Matchers::ContainsSubstring("ghost"));
}

TEST_CASE("partial reference coverage reports the missing ids", "[corpus]") {
    const auto manifest = load_manifest(test_support::source_dir() / "corpus");
    const auto full = load_reference(*manifest.reference_path, manifest);

    nlohmann::ordered_json doc =
        nlohmann::ordered_json::parse(serialize_reference(full.references));
    doc.erase("chatbot");
    TempDir dir;
    write_file(dir.path() / "ref.json", doc.dump(2));

    const auto partial = load_reference(dir.path() / "ref.json", manifest);
    CHECK(partial.references.size() == 29);
    REQUIRE(partial.missing_ids.size() == 1);
    CHECK(partial.missing_ids[0] == "chatbot");
}

TEST_CASE("reference round-trips through serialize_reference", "[corpus]") {
    const auto manifest = load_manifest(test_support::source_dir() / "corpus");

    std::mt19937 rng(20260810);
    std::uniform_int_distribution<int> tenths(Grade::min_tenths, Grade::max_tenths);
    std::uniform_int_distribution<int> keep(0, 1);

    for (int round = 0; round < 20; ++round) {
        ReferenceMap original;
        for (const auto& assignment : manifest.assignments) {
            if (round > 0 && keep(rng) == 0) {
                continue;
            }
            HumanReference reference;
            reference.assignment_id = assignment.id;
            reference.functionality = Grade::from_tenths(tenths(rng));
            reference.code_quality = Grade::from_tenths(tenths(rng));
            reference.efficiency = Grade::from_tenths(tenths(rng));
            original.emplace(assignment.id, reference);
        }
        if (original.empty()) {
            continue;
        }
        TempDir dir;
        write_file(dir.path() / "ref.json", serialize_reference(original));
        const auto loaded = load_reference(dir.path() / "ref.json", manifest);
        REQUIRE(loaded.references.size() == original.size());
        for (const auto& [id, reference] : original) {
            const auto& got = loaded.references.at(id);
            CHECK(got.functionality == reference.functionality);
            CHECK(got.code_quality == reference.code_quality);
            CHECK(got.efficiency == reference.efficiency);
        }
    }
}

TEST_CASE("validate_corpus passes the shipped corpus", "[corpus]") {
    const auto manifest = load_manifest(test_support::source_dir() / "corpus");
    CHECK(validate_corpus(manifest).empty());
}

TEST_CASE("validate_corpus collects findings without aborting", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    auto manifest = load_manifest(dir.path());

    std::filesystem::remove(dir.path() / "questions" / "calc-factorial.txt");
    manifest.assignments[0].description = "  ";

    const auto findings = validate_corpus(manifest);
    REQUIRE(findings.size() == 2);
    CHECK(findings[0].severity == Severity::error);
    CHECK(findings[0].message.find("calc-factorial.txt") != std::string::npos);
    CHECK(findings[1].severity == Severity::warning);
    CHECK(findings[1].message.find("description") != std::string::npos);
}

TEST_CASE("validate_corpus flags invalid UTF-8", "[corpus]") {
    TempDir dir;
    write_mini_corpus(dir.path(), mini_manifest);
    write_file(dir.path() / "submissions" / "calc-factorial.py",
               std::string("ok = 1\n\xFF\xFE broken\n"));
    const auto manifest = load_manifest(dir.path());
    const auto findings = validate_corpus(manifest);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].message.find("UTF-8") != std::string::npos);
}

TEST_CASE("grade values enforce range and precision", "[corpus]") {
    CHECK(Grade::from_value(1.0).tenths() == 10);
    CHECK(Grade::from_value(10.0).tenths() == 100);
    CHECK(Grade::from_value(8.3).to_string() == "8.3");
    CHECK_THROWS_AS(Grade::from_value(0.9), Error);
    CHECK_THROWS_AS(Grade::from_value(10.1), Error);
    CHECK_THROWS_AS(Grade::from_value(8.25), Error);
    CHECK_THROWS_AS(Grade::from_tenths(9), Error);
    CHECK_THROWS_AS(Grade::from_tenths(101), Error);
}

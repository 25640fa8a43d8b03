#pragma once

#include "stepgrade/corpus.hpp"
#include "stepgrade/detail/digest.hpp"
#include "stepgrade/errors.hpp"
#include "stepgrade/report.hpp"
#include "stepgrade/types.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stepgrade {

/// Signed difference of one LLM grade from the human grade, in exact
/// tenths. Positive means the LLM graded more generously.
struct Deviation {
    std::string assignment_id;
    Criterion criterion = Criterion::functionality;
    GradingMode mode = GradingMode::cot;
    int value_tenths = 0;
};

inline int compute_deviation_tenths(Grade llm, Grade human) {
    return llm.tenths() - human.tenths();
}

inline double compute_deviation(Grade llm, Grade human) {
    return compute_deviation_tenths(llm, human) / 10.0;
}

/// Mean of absolute deviations, accumulated in integer tenths and
/// reported in integer hundredths, rounding half away from zero.
inline int compute_mae_hundredths(const std::vector<int>& deviations_tenths) {
    if (deviations_tenths.empty()) {
        throw EvaluationError("MAE of an empty deviation list is undefined");
    }
    int64_t sum_abs = 0;
    for (const int tenths : deviations_tenths) {
        sum_abs += tenths >= 0 ? tenths : -static_cast<int64_t>(tenths);
    }
    const auto n = static_cast<int64_t>(deviations_tenths.size());
    // mean in hundredths is 10*sum_abs/n; round half away from zero.
    return static_cast<int>((20 * sum_abs + n) / (2 * n));
}

inline double compute_mae(const std::vector<int>& deviations_tenths) {
    return compute_mae_hundredths(deviations_tenths) / 100.0;
}

struct MaeSummary {
    DifficultyLevel difficulty = DifficultyLevel::easy;
    Criterion criterion = Criterion::functionality;
    GradingMode mode = GradingMode::cot;
    int mae_hundredths = 0;
    int n = 0;
};

/// One assignment's worth of comparison data: the human grades plus the
/// per-mode deviations (absent when that mode was not graded).
struct ComparisonRow {
    std::string id;
    std::string title;
    DifficultyLevel difficulty = DifficultyLevel::easy;
    std::array<int, 3> human_tenths{}; // indexed by Criterion
    std::array<std::array<std::optional<int>, 3>, 2> deviation_tenths{}; // [mode][criterion]

    std::optional<int> deviation(GradingMode mode, Criterion criterion) const {
        return deviation_tenths[static_cast<size_t>(mode)][static_cast<size_t>(criterion)];
    }
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows; // manifest order
    std::vector<MaeSummary> summaries;
    std::vector<std::string> excluded; // unjoinable assignment ids
    std::vector<std::string> warnings;
    std::string corpus_hash;
    std::string model;
    std::string created_at;
    std::array<bool, 2> mode_present{}; // indexed by GradingMode

    const MaeSummary* find_summary(DifficultyLevel difficulty, Criterion criterion,
                                   GradingMode mode) const {
        for (const auto& summary : summaries) {
            if (summary.difficulty == difficulty && summary.criterion == criterion &&
                summary.mode == mode) {
                return &summary;
            }
        }
        return nullptr;
    }
};

namespace detail {

/// Summaries for every (difficulty, criterion, present mode) group with
/// at least one contributing row, in table order.
inline std::vector<MaeSummary> summarize(const std::vector<ComparisonRow>& rows,
                                         const std::array<bool, 2>& mode_present) {
    std::vector<MaeSummary> summaries;
    for (const auto difficulty : all_difficulties) {
        for (const auto criterion : all_criteria) {
            for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
                if (!mode_present[static_cast<size_t>(mode)]) {
                    continue;
                }
                std::vector<int> deviations;
                for (const auto& row : rows) {
                    if (row.difficulty != difficulty) {
                        continue;
                    }
                    if (const auto value = row.deviation(mode, criterion)) {
                        deviations.push_back(*value);
                    }
                }
                if (deviations.empty()) {
                    continue;
                }
                summaries.push_back({difficulty, criterion, mode,
                                     compute_mae_hundredths(deviations),
                                     static_cast<int>(deviations.size())});
            }
        }
    }
    return summaries;
}

inline int tenths_from_json_number(const nlohmann::json& value, const std::string& where) {
    if (!value.is_number()) {
        throw EvaluationError(where + ": expected a number");
    }
    const double v = value.get<double>();
    const double scaled = v * 10.0;
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-6) {
        throw EvaluationError(where + ": more than one fractional digit");
    }
    return static_cast<int>(nearest);
}

inline int hundredths_from_json_number(const nlohmann::json& value, const std::string& where) {
    if (!value.is_number()) {
        throw EvaluationError(where + ": expected a number");
    }
    const double v = value.get<double>();
    const double scaled = v * 100.0;
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-4) {
        throw EvaluationError(where + ": more than two fractional digits");
    }
    return static_cast<int>(nearest);
}

} // namespace detail

/// Loads every `*.json` report in a directory, keyed by assignment id.
inline std::map<std::string, GradingReport> load_report_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw EvaluationError("report directory not readable: " + dir.string());
    }
    std::map<std::string, GradingReport> reports;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        if (entry.path().filename() == "run_manifest.json") {
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(detail::read_text_file(entry.path()));
            auto report = report_from_json(doc);
            reports.emplace(report.assignment_id, std::move(report));
        } catch (const std::exception& e) {
            throw EvaluationError("cannot load report " + entry.path().string() + ": " +
                                  e.what());
        }
    }
    return reports;
}

inline std::string corpus_hash(const CorpusManifest& manifest) {
    const auto manifest_path = manifest.root / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        return "";
    }
    return detail::sha256_hex(detail::read_text_file(manifest_path));
}

/// Joins per-mode reports with the human reference by assignment id.
/// Assignments missing the reference or missing a report in any present
/// mode are excluded whole and listed in the report metadata.
inline ComparisonReport build_comparison(const std::map<std::string, GradingReport>& reports_cot,
                                         const std::map<std::string, GradingReport>& reports_regular,
                                         const ReferenceMap& reference,
                                         const CorpusManifest& manifest) {
    ComparisonReport report;
    report.mode_present[static_cast<size_t>(GradingMode::cot)] = !reports_cot.empty();
    report.mode_present[static_cast<size_t>(GradingMode::regular)] = !reports_regular.empty();
    if (!report.mode_present[0] && !report.mode_present[1]) {
        throw EvaluationError("no grading reports supplied for either mode");
    }
    report.corpus_hash = corpus_hash(manifest);

    auto reports_for = [&](GradingMode mode) -> const std::map<std::string, GradingReport>& {
        return mode == GradingMode::cot ? reports_cot : reports_regular;
    };

    for (const auto& assignment : manifest.assignments) {
        const auto ref = reference.find(assignment.id);
        bool joinable = ref != reference.end();
        for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
            if (report.mode_present[static_cast<size_t>(mode)] &&
                !reports_for(mode).count(assignment.id)) {
                joinable = false;
            }
        }
        if (!joinable) {
            report.excluded.push_back(assignment.id);
            continue;
        }

        ComparisonRow row;
        row.id = assignment.id;
        row.title = assignment.title;
        row.difficulty = assignment.difficulty;
        for (const auto criterion : all_criteria) {
            row.human_tenths[static_cast<size_t>(criterion)] =
                ref->second.grade_for(criterion).tenths();
        }
        for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
            if (!report.mode_present[static_cast<size_t>(mode)]) {
                continue;
            }
            const auto& graded = reports_for(mode).at(assignment.id);
            if (report.model.empty()) {
                report.model = graded.model;
            }
            for (const auto criterion : all_criteria) {
                row.deviation_tenths[static_cast<size_t>(mode)][static_cast<size_t>(criterion)] =
                    compute_deviation_tenths(graded.stage(criterion).grade,
                                             ref->second.grade_for(criterion));
            }
        }
        report.rows.push_back(std::move(row));
    }

    if (report.rows.empty()) {
        throw EvaluationError("zero joinable assignments between reports and reference");
    }
    if (!report.excluded.empty()) {
        report.warnings.push_back(std::to_string(report.excluded.size()) +
                                  " assignment(s) excluded from the comparison (missing "
                                  "reference grades or reports)");
    }
    for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
        if (!report.mode_present[static_cast<size_t>(mode)]) {
            report.warnings.push_back(std::string("no ") + to_string(mode) +
                                      "-mode reports supplied; comparison covers the other "
                                      "mode only");
        }
    }
    report.summaries = detail::summarize(report.rows, report.mode_present);
    return report;
}

/// The deviation fixture: rows of human grades plus both modes' recorded
/// deviations, and the stated per-group MAE values to cross-check.
struct DeviationFixture {
    std::vector<ComparisonRow> rows;
    struct StatedMae {
        DifficultyLevel difficulty;
        Criterion criterion;
        GradingMode mode;
        int hundredths;
    };
    std::vector<StatedMae> stated;
    std::vector<std::string> notes;
};

inline DeviationFixture load_deviation_fixture(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const std::exception& e) {
        throw EvaluationError("cannot load deviation fixture " + path.string() + ": " +
                              e.what());
    }

    DeviationFixture fixture;
    if (doc.contains("notes")) {
        for (const auto& note : doc.at("notes")) {
            fixture.notes.push_back(note.get<std::string>());
        }
    }
    for (const auto& entry : doc.at("assignments")) {
        ComparisonRow row;
        row.id = entry.at("id").get<std::string>();
        row.title = entry.at("title").get<std::string>();
        const auto difficulty = parse_difficulty(entry.at("difficulty").get<std::string>());
        if (!difficulty) {
            throw EvaluationError("fixture row \"" + row.id + "\": unknown difficulty");
        }
        row.difficulty = *difficulty;
        const auto& human = entry.at("human");
        row.human_tenths = {
            detail::tenths_from_json_number(human.at("functionality"), row.id),
            detail::tenths_from_json_number(human.at("code_quality"), row.id),
            detail::tenths_from_json_number(human.at("efficiency"), row.id)};
        for (const auto tenths : row.human_tenths) {
            if (tenths < Grade::min_tenths || tenths > Grade::max_tenths) {
                throw EvaluationError("fixture row \"" + row.id +
                                      "\": human grade out of [1.0, 10.0]");
            }
        }
        const auto& deviation = entry.at("deviation");
        for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
            const auto& values = deviation.at(to_string(mode));
            for (const auto criterion : all_criteria) {
                const char* key = criterion == Criterion::functionality ? "functionality"
                                  : criterion == Criterion::code_quality ? "code_quality"
                                                                         : "efficiency";
                row.deviation_tenths[static_cast<size_t>(mode)][static_cast<size_t>(
                    criterion)] = detail::tenths_from_json_number(values.at(key), row.id);
            }
        }
        fixture.rows.push_back(std::move(row));
    }
    if (doc.contains("stated_mae")) {
        for (const auto& entry : doc.at("stated_mae")) {
            const auto difficulty =
                parse_difficulty(entry.at("difficulty").get<std::string>());
            const auto criterion = parse_criterion(entry.at("criterion").get<std::string>());
            if (!difficulty || !criterion) {
                throw EvaluationError("fixture stated_mae entry has unknown keys");
            }
            for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
                fixture.stated.push_back(
                    {*difficulty, *criterion, mode,
                     detail::hundredths_from_json_number(entry.at(to_string(mode)),
                                                         "stated_mae")});
            }
        }
    }
    return fixture;
}

/// Builds the comparison directly from fixture rows and cross-checks the
/// computed MAE cells against the fixture's stated values, warning on
/// every mismatch instead of silently adopting the stated figure.
inline ComparisonReport comparison_from_fixture(const DeviationFixture& fixture) {
    ComparisonReport report;
    report.rows = fixture.rows;
    report.mode_present = {true, true};
    if (report.rows.empty()) {
        throw EvaluationError("deviation fixture has no rows");
    }
    report.summaries = detail::summarize(report.rows, report.mode_present);
    for (const auto& stated : fixture.stated) {
        const auto* summary =
            report.find_summary(stated.difficulty, stated.criterion, stated.mode);
        if (!summary) {
            continue;
        }
        if (summary->mae_hundredths != stated.hundredths) {
            report.warnings.push_back(
                std::string("computed MAE ") + format_hundredths(summary->mae_hundredths) +
                " for " + to_string(stated.difficulty) + "/" + to_string(stated.criterion) +
                "/" + to_string(stated.mode) + " differs from the stated value " +
                format_hundredths(stated.hundredths) +
                " (the row deviations are authoritative)");
        }
    }
    return report;
}

// --- rendering ---

namespace detail {

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out += "\"";
    return out;
}

struct MaeCellText {
    std::string regular;
    std::string cot;
};

/// Lower-MAE cell per pair is bolded in markdown; ties bold both.
inline MaeCellText mae_cells(const ComparisonReport& report, DifficultyLevel difficulty,
                             Criterion criterion, bool markdown) {
    const auto* regular = report.find_summary(difficulty, criterion, GradingMode::regular);
    const auto* cot = report.find_summary(difficulty, criterion, GradingMode::cot);
    MaeCellText cells;
    const bool bold_regular =
        markdown && regular && (!cot || regular->mae_hundredths <= cot->mae_hundredths);
    const bool bold_cot =
        markdown && cot && (!regular || cot->mae_hundredths <= regular->mae_hundredths);
    if (regular) {
        cells.regular = bold_regular && cot ? "**" + format_hundredths(regular->mae_hundredths) + "**"
                                            : format_hundredths(regular->mae_hundredths);
    } else {
        cells.regular = markdown ? "—" : "";
    }
    if (cot) {
        cells.cot = bold_cot && regular ? "**" + format_hundredths(cot->mae_hundredths) + "**"
                                        : format_hundredths(cot->mae_hundredths);
    } else {
        cells.cot = markdown ? "—" : "";
    }
    return cells;
}

} // namespace detail

enum class TableFormat { csv, markdown };

/// Deterministic comparison-table rendering: assignments grouped by
/// difficulty in row order, one MAE row per group, columns
/// Human/Regular/CoT per criterion.
inline std::string emit_table(const ComparisonReport& report, TableFormat format) {
    const bool markdown = format == TableFormat::markdown;
    const char* missing = markdown ? "—" : "";

    std::string out;
    if (markdown) {
        out += "# Grading comparison\n\n";
        if (!report.model.empty()) {
            out += "Model: " + report.model + "\n\n";
        }
        if (!report.corpus_hash.empty()) {
            out += "Corpus: sha256:" + report.corpus_hash + "\n\n";
        }
        out += "| Level | Assignment";
        for (const auto criterion : all_criteria) {
            const std::string name = display_name(criterion);
            out += " | " + name + " (Human) | " + name + " (Regular) | " + name + " (CoT)";
        }
        out += " |\n|";
        for (int i = 0; i < 11; ++i) {
            out += "---|";
        }
        out += "\n";
    } else {
        out += "level,assignment";
        for (const auto criterion : all_criteria) {
            const std::string name = to_string(criterion);
            out += "," + name + "_human," + name + "_regular," + name + "_cot";
        }
        out += "\n";
    }

    auto emit_row = [&](const std::vector<std::string>& cells) {
        if (markdown) {
            out += "|";
            for (const auto& cell : cells) {
                out += " " + cell + " |";
            }
            out += "\n";
        } else {
            for (size_t i = 0; i < cells.size(); ++i) {
                if (i > 0) {
                    out += ",";
                }
                out += detail::csv_escape(cells[i]);
            }
            out += "\n";
        }
    };

    for (const auto difficulty : all_difficulties) {
        bool group_seen = false;
        for (const auto& row : report.rows) {
            if (row.difficulty != difficulty) {
                continue;
            }
            group_seen = true;
            std::vector<std::string> cells{to_string(difficulty), row.title};
            for (const auto criterion : all_criteria) {
                cells.push_back(
                    Grade::from_tenths(row.human_tenths[static_cast<size_t>(criterion)])
                        .to_string());
                for (const auto mode : {GradingMode::regular, GradingMode::cot}) {
                    const auto value = row.deviation(mode, criterion);
                    cells.push_back(value ? format_signed_tenths(*value) : missing);
                }
            }
            emit_row(cells);
        }
        if (!group_seen) {
            continue;
        }
        std::vector<std::string> cells{
            to_string(difficulty),
            markdown ? "**Mean Absolute Error**" : "Mean Absolute Error"};
        for (const auto criterion : all_criteria) {
            const auto mae = detail::mae_cells(report, difficulty, criterion, markdown);
            cells.push_back("N/A");
            cells.push_back(mae.regular.empty() ? missing : mae.regular);
            cells.push_back(mae.cot.empty() ? missing : mae.cot);
        }
        emit_row(cells);
    }

    if (markdown && !report.warnings.empty()) {
        out += "\nWarnings:\n\n";
        for (const auto& warning : report.warnings) {
            out += "- " + warning + "\n";
        }
    }
    return out;
}

/// One line per (difficulty, criterion) group for terminal output, e.g.
/// "Easy | Functionality | regular 0.66 | cot 0.44 | lower: cot".
inline std::string emit_summary_lines(const ComparisonReport& report) {
    std::string out;
    for (const auto difficulty : all_difficulties) {
        for (const auto criterion : all_criteria) {
            const auto* regular =
                report.find_summary(difficulty, criterion, GradingMode::regular);
            const auto* cot = report.find_summary(difficulty, criterion, GradingMode::cot);
            if (!regular && !cot) {
                continue;
            }
            out += std::string(to_string(difficulty)) + " | " + display_name(criterion);
            out += " | regular ";
            out += regular ? format_hundredths(regular->mae_hundredths) : "—";
            out += " | cot ";
            out += cot ? format_hundredths(cot->mae_hundredths) : "—";
            if (regular && cot) {
                out += " | lower: ";
                if (regular->mae_hundredths < cot->mae_hundredths) {
                    out += "regular";
                } else if (cot->mae_hundredths < regular->mae_hundredths) {
                    out += "cot";
                } else {
                    out += "tie";
                }
            }
            out += "\n";
        }
    }
    return out;
}

} // namespace stepgrade

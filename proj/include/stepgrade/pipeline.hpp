#pragma once

#include "stepgrade/corpus.hpp"
#include "stepgrade/detail/fs.hpp"
#include "stepgrade/errors.hpp"
#include "stepgrade/gateway.hpp"
#include "stepgrade/log.hpp"
#include "stepgrade/prompts.hpp"
#include "stepgrade/report.hpp"
#include "stepgrade/types.hpp"

#include <atomic>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

namespace stepgrade {

/// Pipeline failure after the re-ask was exhausted; names the failed
/// criterion and preserves whatever the run produced so far.
class PipelineError : public Error {
public:
    PipelineError(Criterion criterion, const std::string& what,
                  std::vector<StageResult> partial_stages,
                  std::vector<TranscriptEntry> transcript)
        : Error(what), criterion_(criterion), partial_stages_(std::move(partial_stages)),
          transcript_(std::move(transcript)) {}

    Criterion criterion() const { return criterion_; }
    const std::vector<StageResult>& partial_stages() const { return partial_stages_; }
    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

private:
    Criterion criterion_;
    std::vector<StageResult> partial_stages_;
    std::vector<TranscriptEntry> transcript_;
};

struct ParsedGrade {
    Grade grade;
    std::string feedback;
    bool rounded = false; // true when extra precision was rounded away
};

namespace detail {

// A grade line is the output contract `GRADE: <number>`, alone on its
// line, tolerating markdown decoration around it.
inline const std::regex& grade_line_regex() {
    static const std::regex re(
        R"(^[ \t>#*_`\-]*GRADE[ \t]*:[ \t]*([0-9]+(?:\.[0-9]+)?)[ \t*_`.]*$)",
        std::regex::icase);
    return re;
}

/// Exact decimal parse of the matched number text: range-checks on the
/// literal digits, then rounds half away from zero to one fractional
/// digit. Never goes through binary floating point.
inline std::pair<int, bool> grade_tenths_from_text(const std::string& number) {
    const auto dot = number.find('.');
    std::string ipart = dot == std::string::npos ? number : number.substr(0, dot);
    const std::string fpart = dot == std::string::npos ? "" : number.substr(dot + 1);

    size_t first_digit = 0;
    while (first_digit + 1 < ipart.size() && ipart[first_digit] == '0') {
        ++first_digit;
    }
    ipart = ipart.substr(first_digit);
    if (ipart.size() > 2) {
        throw GradeParseError("grade " + number + " is outside [1, 10]");
    }
    const int integer_part = std::stoi(ipart);
    const bool fraction_nonzero = fpart.find_first_not_of('0') != std::string::npos;
    if (integer_part < 1 || integer_part > 10 || (integer_part == 10 && fraction_nonzero)) {
        throw GradeParseError("grade " + number + " is outside [1, 10]");
    }

    int tenths = integer_part * 10 + (fpart.empty() ? 0 : fpart[0] - '0');
    bool rounded = false;
    if (fpart.size() > 1) {
        rounded = true;
        if (fpart[1] >= '5') {
            ++tenths;
        }
    }
    return {tenths, rounded};
}

} // namespace detail

/// Scans the response for the last line matching the output contract and
/// splits it from the surrounding feedback text.
inline ParsedGrade parse_grade(const std::string& raw) {
    if (raw.empty()) {
        throw GradeParseError("empty model response");
    }
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= raw.size()) {
        const size_t eol = raw.find('\n', pos);
        lines.push_back(eol == std::string::npos ? raw.substr(pos)
                                                 : raw.substr(pos, eol - pos));
        if (eol == std::string::npos) {
            break;
        }
        pos = eol + 1;
    }

    std::smatch match;
    std::optional<size_t> grade_line;
    std::string number;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (std::regex_match(lines[i], match, detail::grade_line_regex())) {
            grade_line = i;
            number = match[1].str();
        }
    }
    if (!grade_line) {
        throw GradeParseError("no GRADE: line found in model response");
    }

    const auto [tenths, rounded] = detail::grade_tenths_from_text(number);
    if (rounded) {
        log::warn("grade " + number + " has more than one fractional digit; rounded to " +
                  Grade::from_tenths(tenths).to_string());
    }

    std::string feedback;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i == *grade_line) {
            continue;
        }
        feedback += lines[i];
        feedback += '\n';
    }
    return {Grade::from_tenths(tenths), detail::trim(feedback), rounded};
}

namespace detail {

inline constexpr const char* format_reminder =
    "Reminder: end your reply with a final line of the form GRADE: <number>, "
    "where <number> is between 1 and 10 with at most one decimal digit, and "
    "include your written feedback.";

struct StageOutcome {
    StageResult result;
    std::string timestamp;
};

/// Runs one criterion: render, call, parse, and on a contract violation
/// re-ask exactly once with the format reminder appended.
inline StageOutcome run_stage(Gateway& gateway, const PromptTemplate& tpl,
                              const std::string& question, const Submission& submission,
                              const std::vector<StageResult>& prior,
                              std::vector<TranscriptEntry>& transcript) {
    RequestParams params;
    params.model = gateway.config().model;
    params.temperature = gateway.config().temperature;
    const ChatRequest request = render_prompt(tpl, question, submission, prior, params);
    GatewayResult call = gateway.execute(request);
    transcript.push_back({tpl.criterion, request, call.response});

    auto finish = [&](const ParsedGrade& parsed, const ChatResponse& response,
                      const std::string& timestamp) -> StageOutcome {
        StageResult result{tpl.criterion, parsed.grade, parsed.feedback, response.content};
        return {std::move(result), timestamp};
    };

    std::string first_failure;
    try {
        const ParsedGrade parsed = parse_grade(call.response.content);
        if (!parsed.feedback.empty()) {
            return finish(parsed, call.response, call.timestamp);
        }
        first_failure = "response contained a grade but no feedback text";
    } catch (const GradeParseError& e) {
        first_failure = e.what();
    }

    log::warn(std::string("stage ") + to_string(tpl.criterion) + ": " + first_failure +
              "; re-asking with format reminder");
    ChatRequest retry = request;
    retry.messages.push_back({ChatRole::assistant, call.response.content.empty()
                                                       ? "(empty response)"
                                                       : call.response.content});
    retry.messages.push_back({ChatRole::user, format_reminder});
    GatewayResult second = gateway.execute(retry);
    transcript.push_back({tpl.criterion, retry, second.response});

    try {
        const ParsedGrade parsed = parse_grade(second.response.content);
        if (parsed.feedback.empty()) {
            throw GradeParseError("response contained a grade but no feedback text");
        }
        return finish(parsed, second.response, second.timestamp);
    } catch (const GradeParseError& e) {
        throw GradeParseError(std::string("stage ") + to_string(tpl.criterion) +
                              " failed after re-ask: " + e.what());
    }
}

inline GradingReport run_pipeline(Gateway& gateway, const Assignment& assignment,
                                  const std::string& question, const Submission& submission,
                                  const TemplateSet& templates, GradingMode mode) {
    if (templates.mode != mode) {
        throw TemplateError(std::string("template set is for mode ") +
                            to_string(templates.mode) + ", expected " + to_string(mode));
    }
    GradingReport report;
    report.assignment_id = assignment.id;
    report.mode = mode;
    report.model = gateway.config().model;

    std::vector<StageResult> completed;
    std::string last_timestamp;
    for (const auto criterion : all_criteria) {
        const auto& tpl = templates.for_criterion(criterion);
        const std::vector<StageResult> prior =
            mode == GradingMode::cot ? completed : std::vector<StageResult>{};
        try {
            StageOutcome outcome =
                run_stage(gateway, tpl, question, submission, prior, report.transcript);
            last_timestamp = outcome.timestamp;
            completed.push_back(std::move(outcome.result));
        } catch (const GradeParseError& e) {
            throw PipelineError(criterion,
                                "grading \"" + assignment.id + "\" failed at stage " +
                                    to_string(criterion) + ": " + e.what(),
                                completed, report.transcript);
        }
    }
    report.stages = std::move(completed);
    report.created_at = last_timestamp;
    validate_report(report);
    return report;
}

} // namespace detail

/// Three sequential stages in criterion order; each stage's prompt embeds
/// every prior stage's feedback.
inline GradingReport run_cot_pipeline(Gateway& gateway, const Assignment& assignment,
                                      const std::string& question,
                                      const Submission& submission,
                                      const TemplateSet& templates) {
    return detail::run_pipeline(gateway, assignment, question, submission, templates,
                                GradingMode::cot);
}

/// Three independent single-prompt calls, one per criterion, with no
/// cross-stage context.
inline GradingReport run_regular_baseline(Gateway& gateway, const Assignment& assignment,
                                          const std::string& question,
                                          const Submission& submission,
                                          const TemplateSet& templates) {
    return detail::run_pipeline(gateway, assignment, question, submission, templates,
                                GradingMode::regular);
}

struct BatchItem {
    std::string assignment_id;
    std::optional<GradingReport> report;
    std::string error; // empty on success
};

struct BatchOptions {
    int workers = 4;
    std::optional<std::filesystem::path> output_dir; // writes <dir>/<id>.json when set
};

/// Grades every assignment in manifest order. Per-assignment failures are
/// collected as error records; the batch itself keeps going.
inline std::vector<BatchItem> grade_corpus(Gateway& gateway, const CorpusManifest& manifest,
                                           GradingMode mode, const TemplateSet& templates,
                                           const BatchOptions& options = {}) {
    if (options.output_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*options.output_dir, ec);
        if (ec || !std::filesystem::is_directory(*options.output_dir)) {
            throw Error("cannot create output directory: " + options.output_dir->string());
        }
    }

    const size_t n = manifest.assignments.size();
    std::vector<BatchItem> items(n);
    for (size_t i = 0; i < n; ++i) {
        items[i].assignment_id = manifest.assignments[i].id;
    }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            const auto& id = manifest.assignments[i].id;
            try {
                auto [assignment, submission] = load_submission(manifest, id);
                const std::string question = load_question(manifest, id);
                GradingReport report =
                    mode == GradingMode::cot
                        ? run_cot_pipeline(gateway, assignment, question, submission, templates)
                        : run_regular_baseline(gateway, assignment, question, submission,
                                               templates);
                if (options.output_dir) {
                    detail::atomic_write_file(*options.output_dir / (id + ".json"),
                                              to_json(report).dump(2) + "\n");
                }
                items[i].report = std::move(report);
            } catch (const std::exception& e) {
                items[i].error = e.what();
                log::error("assignment \"" + id + "\": " + e.what());
            }
        }
    };

    const int worker_count =
        std::max(1, std::min<int>(options.workers, static_cast<int>(n == 0 ? 1 : n)));
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(worker_count));
        for (int w = 0; w < worker_count; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }
    return items;
}

} // namespace stepgrade

#pragma once

#include "stepgrade/chat.hpp"
#include "stepgrade/errors.hpp"
#include "stepgrade/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace stepgrade {

struct StageResult {
    Criterion criterion = Criterion::functionality;
    Grade grade = Grade::from_tenths(10);
    std::string feedback;
    std::string raw_response;
};

/// One prompt/response exchange made while grading, including re-asks.
struct TranscriptEntry {
    Criterion criterion = Criterion::functionality;
    ChatRequest request;
    ChatResponse response;
};

struct GradingReport {
    std::string assignment_id;
    GradingMode mode = GradingMode::cot;
    std::vector<StageResult> stages; // exactly 3, in Criterion order
    std::string model;
    std::string created_at;
    std::vector<TranscriptEntry> transcript;

    const StageResult& stage(Criterion criterion) const {
        for (const auto& result : stages) {
            if (result.criterion == criterion) {
                return result;
            }
        }
        throw Error("report for \"" + assignment_id + "\" lacks stage " +
                    to_string(criterion));
    }
};

inline nlohmann::ordered_json to_json(const GradingReport& report) {
    nlohmann::ordered_json j;
    j["assignment_id"] = report.assignment_id;
    j["mode"] = to_string(report.mode);
    j["model"] = report.model;
    j["created_at"] = report.created_at;
    auto stages = nlohmann::ordered_json::array();
    for (const auto& stage : report.stages) {
        nlohmann::ordered_json s;
        s["criterion"] = to_string(stage.criterion);
        s["grade"] = stage.grade.value();
        s["feedback"] = stage.feedback;
        s["raw_response"] = stage.raw_response;
        stages.push_back(std::move(s));
    }
    j["stages"] = std::move(stages);
    auto transcript = nlohmann::ordered_json::array();
    for (const auto& entry : report.transcript) {
        nlohmann::ordered_json t;
        t["criterion"] = to_string(entry.criterion);
        t["request"] = to_json(entry.request);
        t["response"] = to_json(entry.response);
        transcript.push_back(std::move(t));
    }
    j["transcript"] = std::move(transcript);
    return j;
}

/// Reports carry one stage per criterion, in evaluation order.
inline void validate_report(const GradingReport& report) {
    if (report.stages.size() != 3) {
        throw Error("report for \"" + report.assignment_id + "\" has " +
                    std::to_string(report.stages.size()) + " stages, expected 3");
    }
    for (size_t i = 0; i < 3; ++i) {
        if (report.stages[i].criterion != all_criteria[i]) {
            throw Error("report for \"" + report.assignment_id +
                        "\" has stages out of criterion order");
        }
        if (report.stages[i].feedback.empty()) {
            throw Error("report for \"" + report.assignment_id + "\" stage " +
                        to_string(report.stages[i].criterion) + " has empty feedback");
        }
    }
}

inline GradingReport report_from_json(const nlohmann::json& j) {
    GradingReport report;
    report.assignment_id = j.at("assignment_id").get<std::string>();
    const auto mode = parse_grading_mode(j.at("mode").get<std::string>());
    if (!mode) {
        throw Error("unknown grading mode in report: " + j.at("mode").dump());
    }
    report.mode = *mode;
    report.model = j.at("model").get<std::string>();
    report.created_at = j.at("created_at").get<std::string>();
    for (const auto& stage_json : j.at("stages")) {
        StageResult stage;
        const auto criterion = parse_criterion(stage_json.at("criterion").get<std::string>());
        if (!criterion) {
            throw Error("unknown criterion in report: " + stage_json.at("criterion").dump());
        }
        stage.criterion = *criterion;
        stage.grade = Grade::from_value(stage_json.at("grade").get<double>());
        stage.feedback = stage_json.at("feedback").get<std::string>();
        stage.raw_response = stage_json.at("raw_response").get<std::string>();
        report.stages.push_back(std::move(stage));
    }
    if (j.contains("transcript")) {
        for (const auto& entry_json : j.at("transcript")) {
            TranscriptEntry entry;
            const auto criterion = parse_criterion(entry_json.at("criterion").get<std::string>());
            if (!criterion) {
                throw Error("unknown criterion in transcript: " +
                            entry_json.at("criterion").dump());
            }
            entry.criterion = *criterion;
            entry.request = chat_request_from_json(entry_json.at("request"));
            entry.response = chat_response_from_json(entry_json.at("response"));
            report.transcript.push_back(std::move(entry));
        }
    }
    validate_report(report);
    return report;
}

} // namespace stepgrade

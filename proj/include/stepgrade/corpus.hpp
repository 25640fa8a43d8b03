#pragma once

#include "stepgrade/detail/fs.hpp"
#include "stepgrade/detail/text.hpp"
#include "stepgrade/errors.hpp"
#include "stepgrade/log.hpp"
#include "stepgrade/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace stepgrade {

struct Assignment {
    std::string id;
    std::string title;
    DifficultyLevel difficulty = DifficultyLevel::easy;
    std::string description;
    std::filesystem::path question_path;   // resolved against the manifest directory
    std::filesystem::path submission_path; // resolved against the manifest directory
};

struct Submission {
    std::string assignment_id;
    std::string source;
    std::string language_tag = "python";
};

struct HumanReference {
    std::string assignment_id;
    Grade functionality = Grade::from_tenths(10);
    Grade code_quality = Grade::from_tenths(10);
    Grade efficiency = Grade::from_tenths(10);

    Grade grade_for(Criterion criterion) const {
        switch (criterion) {
            case Criterion::functionality: return functionality;
            case Criterion::code_quality: return code_quality;
            case Criterion::algorithmic_efficiency: return efficiency;
        }
        throw Error("bad criterion");
    }
};

struct CorpusManifest {
    std::filesystem::path root; // directory the manifest was loaded from
    std::vector<Assignment> assignments;
    std::optional<std::filesystem::path> reference_path;

    const Assignment* find(const std::string& id) const {
        for (const auto& assignment : assignments) {
            if (assignment.id == id) {
                return &assignment;
            }
        }
        return nullptr;
    }

    size_t count(DifficultyLevel level) const {
        size_t n = 0;
        for (const auto& assignment : assignments) {
            if (assignment.difficulty == level) {
                ++n;
            }
        }
        return n;
    }
};

namespace detail {

/// Grades in corpus files carry at most one fractional digit.
inline Grade grade_from_json_number(const nlohmann::json& value, const std::string& where) {
    if (!value.is_number()) {
        throw CorpusError(where + ": grade must be a number");
    }
    try {
        return Grade::from_value(value.get<double>());
    } catch (const Error& e) {
        throw CorpusError(where + ": " + e.what());
    }
}

} // namespace detail

/// Accepts either the manifest file itself or a directory containing
/// `manifest.json`. Relative question/submission paths resolve against
/// the manifest's directory.
inline CorpusManifest load_manifest(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    fs::path manifest_path = path;
    if (fs::is_directory(manifest_path)) {
        manifest_path /= "manifest.json";
    }
    if (!fs::exists(manifest_path)) {
        throw CorpusError("manifest not found: " + manifest_path.string());
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_text_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw CorpusError("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("assignments") || !doc.at("assignments").is_array()) {
        throw CorpusError("malformed manifest " + manifest_path.string() +
                          ": expected object with an \"assignments\" array");
    }

    CorpusManifest manifest;
    manifest.root = manifest_path.parent_path();

    std::unordered_set<std::string> seen_ids;
    for (const auto& entry : doc.at("assignments")) {
        Assignment assignment;
        try {
            assignment.id = entry.at("id").get<std::string>();
            assignment.title = entry.at("title").get<std::string>();
            assignment.description = entry.at("description").get<std::string>();
            const auto difficulty_label = entry.at("difficulty").get<std::string>();
            const auto difficulty = parse_difficulty(difficulty_label);
            if (!difficulty) {
                throw CorpusError("assignment \"" + assignment.id +
                                  "\": unknown difficulty label \"" + difficulty_label + "\"");
            }
            assignment.difficulty = *difficulty;
            assignment.question_path =
                manifest.root / fs::path(entry.at("question_path").get<std::string>());
            assignment.submission_path =
                manifest.root / fs::path(entry.at("submission_path").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw CorpusError("malformed assignment entry in " + manifest_path.string() + ": " +
                              e.what());
        }
        if (assignment.id.empty()) {
            throw CorpusError("assignment with empty id in " + manifest_path.string());
        }
        if (!seen_ids.insert(assignment.id).second) {
            throw CorpusError("duplicate assignment id \"" + assignment.id + "\"");
        }
        if (!fs::exists(assignment.question_path)) {
            throw CorpusError("assignment \"" + assignment.id +
                              "\": dangling file reference " + assignment.question_path.string());
        }
        if (!fs::exists(assignment.submission_path)) {
            throw CorpusError("assignment \"" + assignment.id +
                              "\": dangling file reference " + assignment.submission_path.string());
        }
        manifest.assignments.push_back(std::move(assignment));
    }

    if (doc.contains("reference_path") && !doc.at("reference_path").is_null()) {
        manifest.reference_path =
            manifest.root / fs::path(doc.at("reference_path").get<std::string>());
    }
    return manifest;
}

inline std::string load_question(const CorpusManifest& manifest, const std::string& id) {
    const Assignment* assignment = manifest.find(id);
    if (!assignment) {
        throw CorpusError("unknown assignment id \"" + id + "\"");
    }
    std::string text = detail::read_text_file(assignment->question_path);
    if (detail::trim(text).empty()) {
        throw CorpusError("assignment \"" + id + "\": question file is empty");
    }
    return text;
}

inline std::pair<Assignment, Submission> load_submission(const CorpusManifest& manifest,
                                                         const std::string& id) {
    const Assignment* assignment = manifest.find(id);
    if (!assignment) {
        throw CorpusError("unknown assignment id \"" + id + "\"");
    }
    Submission submission;
    submission.assignment_id = id;
    submission.source = detail::read_text_file(assignment->submission_path);
    if (detail::trim(submission.source).empty()) {
        throw CorpusError("assignment \"" + id + "\": submission file is empty");
    }
    return {*assignment, submission};
}

using ReferenceMap = std::map<std::string, HumanReference>;

struct ReferenceLoadResult {
    ReferenceMap references;
    std::vector<std::string> missing_ids; // corpus assignments absent from the file
};

/// Reference file schema: object keyed by assignment id, each value an
/// object with numeric "functionality", "code_quality", "efficiency".
inline ReferenceLoadResult load_reference(const std::filesystem::path& path,
                                          const CorpusManifest& manifest) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const Error&) {
        throw CorpusError("reference file not found: " + path.string());
    } catch (const nlohmann::json::exception& e) {
        throw CorpusError("malformed reference file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw CorpusError("malformed reference file " + path.string() + ": expected an object");
    }

    ReferenceLoadResult result;
    for (const auto& [id, entry] : doc.items()) {
        if (!manifest.find(id)) {
            throw CorpusError("reference entry \"" + id + "\" does not resolve to a corpus assignment");
        }
        if (!entry.is_object()) {
            throw CorpusError("reference entry \"" + id + "\" must be an object");
        }
        HumanReference reference;
        reference.assignment_id = id;
        reference.functionality =
            detail::grade_from_json_number(entry.at("functionality"), "reference \"" + id + "\"");
        reference.code_quality =
            detail::grade_from_json_number(entry.at("code_quality"), "reference \"" + id + "\"");
        reference.efficiency =
            detail::grade_from_json_number(entry.at("efficiency"), "reference \"" + id + "\"");
        result.references.emplace(id, std::move(reference));
    }

    for (const auto& assignment : manifest.assignments) {
        if (!result.references.count(assignment.id)) {
            result.missing_ids.push_back(assignment.id);
        }
    }
    if (!result.missing_ids.empty()) {
        log::warn("reference file " + path.string() + " is missing " +
                  std::to_string(result.missing_ids.size()) + " assignment(s)");
    }
    return result;
}

/// Inverse of load_reference for valid maps (round-trips exactly).
inline std::string serialize_reference(const ReferenceMap& references) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [id, reference] : references) {
        doc[id] = {{"functionality", reference.functionality.value()},
                   {"code_quality", reference.code_quality.value()},
                   {"efficiency", reference.efficiency.value()}};
    }
    return doc.dump(2) + "\n";
}

enum class Severity { error, warning };

struct Finding {
    Severity severity = Severity::error;
    std::string subject; // assignment id or file path
    std::string message;
};

/// Sweeps the whole corpus and reports all problems at once instead of
/// stopping at the first. An empty list means fully valid.
inline std::vector<Finding> validate_corpus(const CorpusManifest& manifest) {
    namespace fs = std::filesystem;
    std::vector<Finding> findings;

    auto check_file = [&](const std::string& id, const fs::path& path, const char* kind) {
        if (!fs::exists(path)) {
            findings.push_back({Severity::error, id,
                                std::string(kind) + " file missing: " + path.string()});
            return;
        }
        std::string text;
        try {
            text = detail::read_text_file(path);
        } catch (const Error&) {
            findings.push_back({Severity::error, id,
                                std::string(kind) + " file unreadable: " + path.string()});
            return;
        }
        if (detail::trim(text).empty()) {
            findings.push_back({Severity::error, id,
                                std::string(kind) + " file is empty: " + path.string()});
        } else if (!detail::is_valid_utf8(text)) {
            findings.push_back({Severity::error, id,
                                std::string(kind) + " file is not valid UTF-8: " + path.string()});
        }
    };

    for (const auto& assignment : manifest.assignments) {
        check_file(assignment.id, assignment.question_path, "question");
        check_file(assignment.id, assignment.submission_path, "submission");
        if (detail::trim(assignment.description).empty()) {
            findings.push_back({Severity::warning, assignment.id, "description is blank"});
        }
        if (detail::trim(assignment.title).empty()) {
            findings.push_back({Severity::warning, assignment.id, "title is blank"});
        }
    }

    if (manifest.reference_path) {
        try {
            auto loaded = load_reference(*manifest.reference_path, manifest);
            for (const auto& id : loaded.missing_ids) {
                findings.push_back({Severity::warning, id, "no human reference grades"});
            }
        } catch (const Error& e) {
            findings.push_back({Severity::error, manifest.reference_path->string(), e.what()});
        }
    }
    return findings;
}

} // namespace stepgrade

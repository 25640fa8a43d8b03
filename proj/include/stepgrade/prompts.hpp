#pragma once

#include "stepgrade/chat.hpp"
#include "stepgrade/corpus.hpp"
#include "stepgrade/detail/fs.hpp"
#include "stepgrade/errors.hpp"
#include "stepgrade/report.hpp"
#include "stepgrade/types.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace stepgrade {

/// A stage prompt. Placeholders use single-brace syntax: {question},
/// {code}, {functionality_feedback}, {code_quality_feedback}. Use "{{"
/// and "}}" for literal braces.
struct PromptTemplate {
    Criterion criterion = Criterion::functionality;
    GradingMode mode = GradingMode::cot;
    std::string system_text;
    std::string user_template;
};

struct TemplateSet {
    GradingMode mode = GradingMode::cot;
    std::array<PromptTemplate, 3> templates; // indexed by Criterion

    const PromptTemplate& for_criterion(Criterion criterion) const {
        return templates[static_cast<size_t>(criterion)];
    }
};

namespace detail {

inline bool references_placeholder(const PromptTemplate& tpl, const std::string& name) {
    const std::string token = "{" + name + "}";
    return tpl.user_template.find(token) != std::string::npos ||
           tpl.system_text.find(token) != std::string::npos;
}

inline std::string template_label(const PromptTemplate& tpl) {
    return std::string(to_string(tpl.mode)) + "/" + to_string(tpl.criterion);
}

} // namespace detail

/// Enforces the per-stage placeholder contract: CoT stage 2 consumes the
/// stage-1 feedback, stage 3 consumes both, and regular templates consume
/// no prior feedback at all.
inline void validate_template(const PromptTemplate& tpl) {
    const auto label = detail::template_label(tpl);
    if (!detail::references_placeholder(tpl, "question") ||
        !detail::references_placeholder(tpl, "code")) {
        throw TemplateError("template " + label + " must reference {question} and {code}");
    }
    const bool wants_functionality = detail::references_placeholder(tpl, "functionality_feedback");
    const bool wants_code_quality = detail::references_placeholder(tpl, "code_quality_feedback");
    if (tpl.mode == GradingMode::regular) {
        if (wants_functionality || wants_code_quality) {
            throw TemplateError("regular template " + label +
                                " must not reference prior-stage feedback");
        }
    } else {
        switch (tpl.criterion) {
            case Criterion::functionality:
                if (wants_functionality || wants_code_quality) {
                    throw TemplateError("template " + label +
                                        " must not reference prior-stage feedback");
                }
                break;
            case Criterion::code_quality:
                if (!wants_functionality) {
                    throw TemplateError("template " + label +
                                        " must reference {functionality_feedback}");
                }
                if (wants_code_quality) {
                    throw TemplateError("template " + label +
                                        " must not reference {code_quality_feedback}");
                }
                break;
            case Criterion::algorithmic_efficiency:
                if (!wants_functionality || !wants_code_quality) {
                    throw TemplateError("template " + label +
                                        " must reference both prior feedback placeholders");
                }
                break;
        }
    }
    if (tpl.system_text.find("GRADE:") == std::string::npos &&
        tpl.user_template.find("GRADE:") == std::string::npos) {
        throw TemplateError("template " + label +
                            " must instruct the model to end with a GRADE: line");
    }
}

/// Parses a template file. The file holds two sections introduced by
/// "## system" and "## user" lines, in that order.
inline PromptTemplate parse_template_text(const std::string& text, Criterion criterion,
                                          GradingMode mode, const std::string& origin) {
    PromptTemplate tpl;
    tpl.criterion = criterion;
    tpl.mode = mode;

    std::string* section = nullptr;
    std::string system_text;
    std::string user_text;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        const std::string line =
            eol == std::string::npos ? text.substr(pos) : text.substr(pos, eol - pos);
        if (detail::trim(line) == "## system") {
            section = &system_text;
        } else if (detail::trim(line) == "## user") {
            section = &user_text;
        } else if (section != nullptr) {
            section->append(line);
            section->push_back('\n');
        } else if (!detail::trim(line).empty()) {
            throw TemplateError(origin + ": content before the first section header");
        }
        if (eol == std::string::npos) {
            break;
        }
        pos = eol + 1;
    }
    tpl.system_text = detail::trim(system_text);
    tpl.user_template = detail::trim(user_text);
    if (tpl.user_template.empty()) {
        throw TemplateError(origin + ": missing or empty \"## user\" section");
    }
    validate_template(tpl);
    return tpl;
}

/// Loads `<dir>/<mode>/<criterion>.txt` for all three criteria.
inline TemplateSet load_templates(const std::filesystem::path& prompts_dir, GradingMode mode) {
    TemplateSet set;
    set.mode = mode;
    for (const auto criterion : all_criteria) {
        const auto path =
            prompts_dir / to_string(mode) / (std::string(to_string(criterion)) + ".txt");
        if (!std::filesystem::exists(path)) {
            throw TemplateError("template file not found: " + path.string());
        }
        set.templates[static_cast<size_t>(criterion)] =
            parse_template_text(detail::read_text_file(path), criterion, mode, path.string());
    }
    return set;
}

namespace detail {

inline std::string substitute_placeholders(const std::string& text,
                                           const std::map<std::string, std::string>& values,
                                           const std::string& origin) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                out.push_back('{');
                i += 2;
                continue;
            }
            const size_t close = text.find('}', i + 1);
            if (close != std::string::npos) {
                const std::string name = text.substr(i + 1, close - i - 1);
                const bool name_ok = !name.empty() &&
                                     name.find_first_not_of("abcdefghijklmnopqrstuvwxyz_") ==
                                         std::string::npos;
                if (name_ok) {
                    const auto found = values.find(name);
                    if (found == values.end()) {
                        throw RenderError(origin + ": unresolved placeholder {" + name + "}");
                    }
                    out += found->second;
                    i = close + 1;
                    continue;
                }
            }
            out.push_back('{');
            ++i;
        } else if (c == '}') {
            if (i + 1 < text.size() && text[i + 1] == '}') {
                out.push_back('}');
                i += 2;
                continue;
            }
            out.push_back('}');
            ++i;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

} // namespace detail

struct RequestParams {
    std::string model = "gpt-4";
    double temperature = 0.0;
    std::optional<int> max_tokens;
};

/// Renders one stage prompt. `prior` carries exactly the completed stages
/// preceding the template's criterion for CoT templates and must be empty
/// for regular ones; prior feedback is substituted verbatim.
inline ChatRequest render_prompt(const PromptTemplate& tpl, const std::string& question,
                                 const Submission& submission,
                                 const std::vector<StageResult>& prior,
                                 const RequestParams& params) {
    const auto label = detail::template_label(tpl);
    if (tpl.mode == GradingMode::regular) {
        if (!prior.empty()) {
            throw RenderError("regular template " + label +
                              " takes no prior stage results (got " +
                              std::to_string(prior.size()) + ")");
        }
    } else {
        const auto expected = static_cast<size_t>(tpl.criterion);
        if (prior.size() != expected) {
            throw RenderError("CoT template " + label + " expects " + std::to_string(expected) +
                              " prior stage(s), got " + std::to_string(prior.size()));
        }
        for (size_t i = 0; i < prior.size(); ++i) {
            if (prior[i].criterion != all_criteria[i]) {
                throw RenderError("CoT template " + label + ": prior stages out of order");
            }
        }
    }

    std::map<std::string, std::string> values;
    values["question"] = question;
    values["code"] = submission.source;
    for (const auto& stage : prior) {
        if (stage.criterion == Criterion::functionality) {
            values["functionality_feedback"] = stage.feedback;
        } else if (stage.criterion == Criterion::code_quality) {
            values["code_quality_feedback"] = stage.feedback;
        }
    }

    ChatRequest request;
    request.model = params.model;
    request.temperature = params.temperature;
    request.max_tokens = params.max_tokens;
    if (!tpl.system_text.empty()) {
        request.messages.push_back(
            {ChatRole::system, detail::substitute_placeholders(tpl.system_text, values, label)});
    }
    request.messages.push_back(
        {ChatRole::user, detail::substitute_placeholders(tpl.user_template, values, label)});
    validate_request(request);
    return request;
}

} // namespace stepgrade

#pragma once

#include "stepgrade/detail/digest.hpp"
#include "stepgrade/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace stepgrade {

enum class ChatRole { system, user, assistant };

inline const char* to_string(ChatRole role) {
    switch (role) {
        case ChatRole::system: return "system";
        case ChatRole::user: return "user";
        case ChatRole::assistant: return "assistant";
    }
    return "?";
}

inline std::optional<ChatRole> parse_chat_role(std::string_view name) {
    if (name == "system") return ChatRole::system;
    if (name == "user") return ChatRole::user;
    if (name == "assistant") return ChatRole::assistant;
    return std::nullopt;
}

struct ChatMessage {
    ChatRole role = ChatRole::user;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    double temperature = 0.0;
    std::vector<ChatMessage> messages;
    std::optional<int> max_tokens;

    bool operator==(const ChatRequest&) const = default;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
    int total_tokens = 0;

    bool operator==(const TokenUsage&) const = default;
};

struct ChatResponse {
    std::string content;
    std::string model_echo;
    std::optional<TokenUsage> usage;
    long latency_ms = 0;

    bool operator==(const ChatResponse&) const = default;
};

enum class GatewayMode { live, replay, record };

inline const char* to_string(GatewayMode mode) {
    switch (mode) {
        case GatewayMode::live: return "live";
        case GatewayMode::replay: return "replay";
        case GatewayMode::record: return "record";
    }
    return "?";
}

inline std::optional<GatewayMode> parse_gateway_mode(std::string_view name) {
    if (name == "live") return GatewayMode::live;
    if (name == "replay") return GatewayMode::replay;
    if (name == "record") return GatewayMode::record;
    return std::nullopt;
}

struct GatewayConfig {
    std::string endpoint_url = "https://api.openai.com/v1";
    std::string api_key_env = "STEPGRADE_API_KEY";
    std::string model = "gpt-4";
    double temperature = 0.0;
    int max_retries = 3;
    double timeout_s = 60.0;
    std::optional<std::filesystem::path> cache_dir;
    GatewayMode mode = GatewayMode::live;

    void validate() const {
        if (timeout_s <= 0) {
            throw ConfigError("timeout_s must be positive");
        }
        if (max_retries < 0) {
            throw ConfigError("max_retries must be non-negative");
        }
        if (temperature < 0.0 || temperature > 2.0) {
            throw ConfigError("temperature must lie in [0, 2]");
        }
        if (mode != GatewayMode::live && !cache_dir) {
            throw ConfigError(std::string(to_string(mode)) + " mode requires cache_dir");
        }
    }
};

/// One cached prompt/response exchange. Stored as `<key>.json` in the
/// cache directory, where key = cache_key(request).
struct TranscriptRecord {
    std::string key;
    ChatRequest request;
    ChatResponse response;
    std::string timestamp; // ISO-8601 UTC

    bool operator==(const TranscriptRecord&) const = default;
};

inline void validate_request(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw GatewayError("chat request has no messages");
    }
    for (size_t i = 0; i < request.messages.size(); ++i) {
        if (request.messages[i].content.empty()) {
            throw GatewayError("chat message " + std::to_string(i) + " has empty content");
        }
        if (i > 0 && request.messages[i].role == ChatRole::system) {
            throw GatewayError("system message must come first");
        }
    }
    if (request.max_tokens && *request.max_tokens <= 0) {
        throw GatewayError("max_tokens must be positive");
    }
}

/// Canonical form hashed by cache_key. Byte layout is fixed:
///   {"model":<json string>,"temperature":<one decimal digit>,
///    "messages":[{"role":<json string>,"content":<json string>},...]}
/// with no whitespace, strings minimally JSON-escaped as UTF-8, and
/// max_tokens deliberately absent.
inline std::string canonical_request_serialization(const ChatRequest& request) {
    std::string out = "{\"model\":";
    out += nlohmann::json(request.model).dump();
    char temp[32];
    std::snprintf(temp, sizeof(temp), "%.1f", request.temperature);
    out += ",\"temperature\":";
    out += temp;
    out += ",\"messages\":[";
    for (size_t i = 0; i < request.messages.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += "{\"role\":";
        out += nlohmann::json(std::string(to_string(request.messages[i].role))).dump();
        out += ",\"content\":";
        out += nlohmann::json(request.messages[i].content).dump();
        out += '}';
    }
    out += "]}";
    return out;
}

/// SHA-256 over the canonical serialization; stable across platforms and
/// independent of max_tokens and timestamps.
inline std::string cache_key(const ChatRequest& request) {
    return detail::sha256_hex(canonical_request_serialization(request));
}

// --- JSON (de)serialization used by the cache and by report files ---

inline nlohmann::ordered_json to_json(const ChatRequest& request) {
    nlohmann::ordered_json j;
    j["model"] = request.model;
    j["temperature"] = request.temperature;
    auto messages = nlohmann::ordered_json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.content}});
    }
    j["messages"] = std::move(messages);
    if (request.max_tokens) {
        j["max_tokens"] = *request.max_tokens;
    }
    return j;
}

inline ChatRequest chat_request_from_json(const nlohmann::json& j) {
    ChatRequest request;
    request.model = j.at("model").get<std::string>();
    request.temperature = j.at("temperature").get<double>();
    for (const auto& message_json : j.at("messages")) {
        const auto role = parse_chat_role(message_json.at("role").get<std::string>());
        if (!role) {
            throw GatewayError("unknown chat role: " + message_json.at("role").dump());
        }
        request.messages.push_back({*role, message_json.at("content").get<std::string>()});
    }
    if (j.contains("max_tokens") && !j.at("max_tokens").is_null()) {
        request.max_tokens = j.at("max_tokens").get<int>();
    }
    return request;
}

inline nlohmann::ordered_json to_json(const ChatResponse& response) {
    nlohmann::ordered_json j;
    j["content"] = response.content;
    j["model_echo"] = response.model_echo;
    if (response.usage) {
        j["usage"] = {{"prompt_tokens", response.usage->prompt_tokens},
                      {"completion_tokens", response.usage->completion_tokens},
                      {"total_tokens", response.usage->total_tokens}};
    } else {
        j["usage"] = nullptr;
    }
    j["latency_ms"] = response.latency_ms;
    return j;
}

inline ChatResponse chat_response_from_json(const nlohmann::json& j) {
    ChatResponse response;
    response.content = j.at("content").get<std::string>();
    response.model_echo = j.at("model_echo").get<std::string>();
    if (j.contains("usage") && !j.at("usage").is_null()) {
        TokenUsage usage;
        usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0);
        usage.completion_tokens = j.at("usage").value("completion_tokens", 0);
        usage.total_tokens = j.at("usage").value("total_tokens", 0);
        response.usage = usage;
    }
    response.latency_ms = j.at("latency_ms").get<long>();
    return response;
}

inline nlohmann::ordered_json to_json(const TranscriptRecord& record) {
    nlohmann::ordered_json j;
    j["key"] = record.key;
    j["timestamp"] = record.timestamp;
    j["request"] = to_json(record.request);
    j["response"] = to_json(record.response);
    return j;
}

inline TranscriptRecord transcript_record_from_json(const nlohmann::json& j) {
    TranscriptRecord record;
    record.key = j.at("key").get<std::string>();
    record.timestamp = j.at("timestamp").get<std::string>();
    record.request = chat_request_from_json(j.at("request"));
    record.response = chat_response_from_json(j.at("response"));
    return record;
}

} // namespace stepgrade

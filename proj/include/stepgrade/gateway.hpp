#pragma once

#include "stepgrade/chat.hpp"
#include "stepgrade/detail/fs.hpp"
#include "stepgrade/errors.hpp"
#include "stepgrade/log.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace stepgrade {

/// Transport-level failure. Retriable failures (HTTP 429/5xx, timeouts,
/// connection errors) are retried by the gateway with backoff.
class TransportError : public GatewayError {
public:
    TransportError(const std::string& what, bool retriable, int status = 0)
        : GatewayError(what), retriable_(retriable), status_(status) {}
    bool retriable() const { return retriable_; }
    int status() const { return status_; }

private:
    bool retriable_;
    int status_;
};

using Transport = std::function<ChatResponse(const ChatRequest&)>;
using Clock = std::function<std::string()>; // ISO-8601 UTC timestamps

namespace detail {

inline std::string iso8601_now() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto secs = time_point_cast<seconds>(now);
    const auto millis = duration_cast<milliseconds>(now - secs).count();
    const std::time_t t = system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buffer[80];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                  tm.tm_sec, static_cast<int>(millis));
    return buffer;
}

/// "http://host:port/base" -> ("http://host:port", "/base")
inline std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint_url must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, ""};
    }
    std::string base_path = url.substr(path_start);
    while (!base_path.empty() && base_path.back() == '/') {
        base_path.pop_back();
    }
    return {url.substr(0, path_start), base_path};
}

} // namespace detail

/// Builds the default transport: an OpenAI-compatible chat-completions
/// POST against config.endpoint_url, reading the first choice's message.
inline Transport make_http_transport(const GatewayConfig& config, const std::string& api_key) {
    return [config, api_key](const ChatRequest& request) -> ChatResponse {
        const auto [host, base_path] = detail::split_endpoint(config.endpoint_url);

        httplib::Client client(host);
        const auto timeout_ms = static_cast<time_t>(config.timeout_s * 1000.0);
        client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        if (!api_key.empty()) {
            client.set_bearer_token_auth(api_key);
        }

        nlohmann::ordered_json body;
        body["model"] = request.model;
        body["temperature"] = request.temperature;
        auto messages = nlohmann::ordered_json::array();
        for (const auto& message : request.messages) {
            messages.push_back(
                {{"role", to_string(message.role)}, {"content", message.content}});
        }
        body["messages"] = std::move(messages);
        if (request.max_tokens) {
            body["max_tokens"] = *request.max_tokens;
        }

        const auto start = std::chrono::steady_clock::now();
        auto result = client.Post(base_path + "/chat/completions", body.dump(),
                                  "application/json");
        const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();

        if (!result) {
            throw TransportError("connection to " + host + " failed: " +
                                     httplib::to_string(result.error()),
                                 /*retriable=*/true);
        }
        if (result->status == 429 || result->status >= 500) {
            throw TransportError("HTTP " + std::to_string(result->status) + " from " + host,
                                 /*retriable=*/true, result->status);
        }
        if (result->status != 200) {
            throw TransportError("HTTP " + std::to_string(result->status) + " from " + host +
                                     ": " + result->body,
                                 /*retriable=*/false, result->status);
        }

        nlohmann::json payload;
        try {
            payload = nlohmann::json::parse(result->body);
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed response body: ") + e.what(),
                                 /*retriable=*/false, result->status);
        }
        ChatResponse response;
        try {
            response.content =
                payload.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed response body: ") + e.what(),
                                 /*retriable=*/false, result->status);
        }
        response.model_echo = payload.value("model", request.model);
        if (payload.contains("usage") && payload.at("usage").is_object()) {
            TokenUsage usage;
            usage.prompt_tokens = payload.at("usage").value("prompt_tokens", 0);
            usage.completion_tokens = payload.at("usage").value("completion_tokens", 0);
            usage.total_tokens = payload.at("usage").value("total_tokens", 0);
            response.usage = usage;
        }
        response.latency_ms = static_cast<long>(latency);
        return response;
    };
}

/// Outcome of one gateway call, with the provenance the pipeline needs
/// for deterministic reporting.
struct GatewayResult {
    ChatResponse response;
    bool cache_hit = false;
    std::string timestamp; // of the backing transcript record (or of the call)
    int retry_count = 0;
};

class Gateway {
public:
    explicit Gateway(GatewayConfig config, Transport transport = {}, Clock clock = {})
        : config_(std::move(config)), transport_(std::move(transport)),
          clock_(std::move(clock)) {
        config_.validate();
        if (!clock_) {
            clock_ = detail::iso8601_now;
        }
    }

    const GatewayConfig& config() const { return config_; }

    /// Live/record entry point: sends the request, retrying transient
    /// failures with exponential backoff. Record mode also persists a
    /// TranscriptRecord.
    ChatResponse complete(const ChatRequest& request) {
        require_network_mode("complete");
        auto [response, retries] = send_with_retries(request);
        (void)retries;
        if (config_.mode == GatewayMode::record) {
            store_record(request, response);
        }
        return response;
    }

    /// Cache-through entry point. Hits are served from cache_dir without
    /// touching the network; misses fail in replay mode and otherwise
    /// delegate to the transport and persist the exchange.
    GatewayResult cached_complete(const ChatRequest& request) {
        if (!config_.cache_dir) {
            throw ConfigError("cached_complete requires cache_dir");
        }
        validate_request(request);
        const auto key = cache_key(request);
        const auto path = record_path(key);
        if (std::filesystem::exists(path)) {
            auto record = load_record(path);
            return {record.response, true, record.timestamp, 0};
        }
        if (config_.mode == GatewayMode::replay) {
            throw ReplayMissError(key, "replay miss: no cache record for key " + key +
                                           " (" + path.string() + ")");
        }
        require_network_mode("cached_complete");
        auto [response, retries] = send_with_retries(request);
        const auto record = store_record(request, response);
        return {record.response, false, record.timestamp, retries};
    }

    /// Mode-aware dispatch used by the grading pipeline.
    GatewayResult execute(const ChatRequest& request) {
        if (config_.cache_dir) {
            return cached_complete(request);
        }
        require_network_mode("execute");
        auto [response, retries] = send_with_retries(request);
        return {response, false, clock_(), retries};
    }

private:
    void require_network_mode(const char* operation) const {
        if (config_.mode == GatewayMode::replay) {
            throw GatewayError(std::string(operation) +
                               " would hit the network in replay mode");
        }
    }

    std::filesystem::path record_path(const std::string& key) const {
        return *config_.cache_dir / (key + ".json");
    }

    std::pair<ChatResponse, int> send_with_retries(const ChatRequest& request) {
        validate_request(request);
        Transport transport = transport_;
        if (!transport) {
            const char* key = std::getenv(config_.api_key_env.c_str());
            if (key == nullptr || *key == '\0') {
                throw MissingCredentialError("credential environment variable " +
                                             config_.api_key_env + " is not set");
            }
            transport = make_http_transport(config_, key);
        }

        int retries = 0;
        while (true) {
            try {
                ChatResponse response = transport(request);
                if (retries > 0) {
                    log::info("gateway request succeeded after " + std::to_string(retries) +
                              " retries");
                }
                return {response, retries};
            } catch (const TransportError& e) {
                if (!e.retriable() || retries >= config_.max_retries) {
                    if (e.retriable()) {
                        throw GatewayError(std::string("retries exhausted after ") +
                                           std::to_string(retries) + " retries: " + e.what());
                    }
                    throw;
                }
                const auto delay = backoff_delay_ms(retries);
                ++retries;
                log::warn("transient gateway error (retry " + std::to_string(retries) + " of " +
                          std::to_string(config_.max_retries) + ", backoff " +
                          std::to_string(delay) + " ms): " + e.what());
                std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            }
        }
    }

    // Base 0.5 s, doubling per retry, jitter +/-20%.
    long backoff_delay_ms(int retry_index) const {
        const double base = 500.0 * static_cast<double>(1u << std::min(retry_index, 16));
        static thread_local std::mt19937 rng{std::random_device{}()};
        std::uniform_real_distribution<double> jitter(0.8, 1.2);
        return static_cast<long>(base * jitter(rng));
    }

    TranscriptRecord store_record(const ChatRequest& request, const ChatResponse& response) {
        TranscriptRecord record;
        record.key = cache_key(request);
        record.request = request;
        record.response = response;
        record.timestamp = clock_();
        detail::atomic_write_file(record_path(record.key), to_json(record).dump(2) + "\n");
        return record;
    }

    TranscriptRecord load_record(const std::filesystem::path& path) const {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(detail::read_text_file(path));
        } catch (const std::exception& e) {
            throw CorruptRecordError(path.string(),
                                     "corrupt cache record " + path.string() + ": " + e.what());
        }
        TranscriptRecord record;
        try {
            record = transcript_record_from_json(doc);
        } catch (const std::exception& e) {
            throw CorruptRecordError(path.string(),
                                     "corrupt cache record " + path.string() + ": " + e.what());
        }
        if (cache_key(record.request) != record.key ||
            path.stem().string() != record.key) {
            throw CorruptRecordError(path.string(), "corrupt cache record " + path.string() +
                                                        ": key does not match request");
        }
        return record;
    }

    GatewayConfig config_;
    Transport transport_;
    Clock clock_;
};

/// All records in a cache directory, ordered by timestamp then key.
inline std::vector<TranscriptRecord> export_transcript(const std::filesystem::path& cache_dir) {
    if (!std::filesystem::is_directory(cache_dir)) {
        throw GatewayError("cache directory not readable: " + cache_dir.string());
    }
    std::vector<TranscriptRecord> records;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(detail::read_text_file(entry.path()));
            records.push_back(transcript_record_from_json(doc));
        } catch (const std::exception& e) {
            throw CorruptRecordError(entry.path().string(), "corrupt cache record " +
                                                                entry.path().string() + ": " +
                                                                e.what());
        }
    }
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.key < b.key;
    });
    return records;
}

struct CacheStats {
    size_t record_count = 0;
    uintmax_t total_bytes = 0;
};

inline CacheStats cache_stats(const std::filesystem::path& cache_dir) {
    if (!std::filesystem::is_directory(cache_dir)) {
        throw GatewayError("cache directory not readable: " + cache_dir.string());
    }
    CacheStats stats;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            ++stats.record_count;
            stats.total_bytes += entry.file_size();
        }
    }
    return stats;
}

struct CacheCorruption {
    std::string path;
    std::string reason;
};

/// Re-hashes every record; returns one entry per corrupt file.
inline std::vector<CacheCorruption> verify_cache(const std::filesystem::path& cache_dir) {
    if (!std::filesystem::is_directory(cache_dir)) {
        throw GatewayError("cache directory not readable: " + cache_dir.string());
    }
    std::vector<CacheCorruption> findings;
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        try {
            const auto doc = nlohmann::json::parse(detail::read_text_file(path));
            const auto record = transcript_record_from_json(doc);
            if (cache_key(record.request) != record.key) {
                findings.push_back({path.string(), "stored key does not match request hash"});
            } else if (path.stem().string() != record.key) {
                findings.push_back({path.string(), "file name does not match stored key"});
            }
        } catch (const std::exception& e) {
            findings.push_back({path.string(), e.what()});
        }
    }
    return findings;
}

inline size_t clear_cache(const std::filesystem::path& cache_dir) {
    if (!std::filesystem::is_directory(cache_dir)) {
        throw GatewayError("cache directory not readable: " + cache_dir.string());
    }
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(cache_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            paths.push_back(entry.path());
        }
    }
    for (const auto& path : paths) {
        std::filesystem::remove(path);
    }
    return paths.size();
}

} // namespace stepgrade

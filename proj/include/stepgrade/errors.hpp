#pragma once

#include <stdexcept>
#include <string>

namespace stepgrade {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CorpusError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class RenderError : public Error {
public:
    using Error::Error;
};

class GatewayError : public Error {
public:
    using Error::Error;
};

class MissingCredentialError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// Replay-mode cache miss; carries the key that was not found.
class ReplayMissError : public GatewayError {
public:
    ReplayMissError(const std::string& key, const std::string& what)
        : GatewayError(what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// A cache record whose body does not match its key or cannot be parsed.
class CorruptRecordError : public GatewayError {
public:
    CorruptRecordError(const std::string& path, const std::string& what)
        : GatewayError(what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Raised when no grade line can be extracted from a model response.
class GradeParseError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

} // namespace stepgrade

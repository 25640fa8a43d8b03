#pragma once

#include "stepgrade/log.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace test_support {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "stepgrade_test_") {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                (prefix + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Captures log lines for the lifetime of the object.
class LogCapture {
public:
    LogCapture() {
        stepgrade::log::set_level(stepgrade::log::Level::debug);
        stepgrade::log::set_sink([this](stepgrade::log::Level level, const std::string& msg) {
            lines_.push_back(std::string(stepgrade::log::level_name(level)) + ": " + msg);
        });
    }
    ~LogCapture() {
        stepgrade::log::set_sink({});
        stepgrade::log::set_level(stepgrade::log::Level::info);
    }
    bool contains(const std::string& needle) const {
        for (const auto& line : lines_) {
            if (line.find(needle) != std::string::npos) {
                return true;
            }
        }
        return false;
    }
    const std::vector<std::string>& lines() const { return lines_; }

private:
    std::vector<std::string> lines_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Relative path -> file bytes, for whole-directory comparisons.
inline std::map<std::string, std::string> dir_bytes(const std::filesystem::path& root) {
    std::map<std::string, std::string> contents;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            contents[std::filesystem::relative(entry.path(), root).string()] =
                read_file(entry.path());
        }
    }
    return contents;
}

inline std::filesystem::path source_dir() {
    return std::filesystem::path(STEPGRADE_SOURCE_DIR);
}

/// Exact rational arithmetic used as the independent oracle for all
/// deviation/MAE checks. Deliberately takes a different route than the
/// implementation: decimal strings in, nearest-integer search for
/// rounding rather than a closed-form expression.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational of(long long n, long long d) {
        Rational r{n, d};
        r.reduce();
        return r;
    }

    /// Parses decimal text like "-1.3" or "9.5".
    static Rational from_decimal(const std::string& text) {
        const bool negative = !text.empty() && text[0] == '-';
        const std::string body = negative || (!text.empty() && text[0] == '+')
                                     ? text.substr(1)
                                     : text;
        const auto dot = body.find('.');
        long long scale = 1;
        long long value = 0;
        for (size_t i = 0; i < body.size(); ++i) {
            if (i == dot) {
                continue;
            }
            value = value * 10 + (body[i] - '0');
            if (dot != std::string::npos && i > dot) {
                scale *= 10;
            }
        }
        return of(negative ? -value : value, scale);
    }

    void reduce() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    Rational operator-(const Rational& other) const {
        return of(num * other.den - other.num * den, den * other.den);
    }
    Rational operator+(const Rational& other) const {
        return of(num * other.den + other.num * den, den * other.den);
    }
    Rational abs() const { return of(num < 0 ? -num : num, den); }

    bool operator==(const Rational& other) const {
        return num == other.num && den == other.den;
    }
};

/// Mean of absolute values, exact.
inline Rational rational_mean_abs(const std::vector<Rational>& values) {
    Rational sum = Rational::of(0, 1);
    for (const auto& value : values) {
        sum = sum + value.abs();
    }
    return Rational::of(sum.num, sum.den * static_cast<long long>(values.size()));
}

/// Nearest integer to value*10^digits, ties away from zero, found by
/// search over the two floor/ceil candidates using exact comparisons.
inline long long rational_round_scaled(const Rational& value, int digits) {
    long long scale = 1;
    for (int i = 0; i < digits; ++i) {
        scale *= 10;
    }
    const long long n = value.num * scale;
    const long long d = value.den;
    long long lo = n / d; // trunc toward zero
    if (n < 0 && lo * d != n) {
        --lo;
    }
    const long long hi = lo + 1;
    // distances |n/d - lo| vs |hi - n/d|, scaled by d
    const long long dist_lo = n - lo * d;
    const long long dist_hi = hi * d - n;
    if (dist_lo < dist_hi) {
        return lo;
    }
    if (dist_hi < dist_lo) {
        return hi;
    }
    return n >= 0 ? hi : lo; // tie: away from zero
}

} // namespace test_support

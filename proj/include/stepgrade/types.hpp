#pragma once

#include "stepgrade/errors.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace stepgrade {

enum class DifficultyLevel { easy, intermediate, advanced };

inline constexpr std::array<DifficultyLevel, 3> all_difficulties = {
    DifficultyLevel::easy, DifficultyLevel::intermediate, DifficultyLevel::advanced};

inline const char* to_string(DifficultyLevel level) {
    switch (level) {
        case DifficultyLevel::easy: return "Easy";
        case DifficultyLevel::intermediate: return "Intermediate";
        case DifficultyLevel::advanced: return "Advanced";
    }
    return "?";
}

inline std::optional<DifficultyLevel> parse_difficulty(std::string_view label) {
    if (label == "Easy") return DifficultyLevel::easy;
    if (label == "Intermediate") return DifficultyLevel::intermediate;
    if (label == "Advanced") return DifficultyLevel::advanced;
    return std::nullopt;
}

/// The three grading criteria, in their fixed evaluation order.
enum class Criterion { functionality = 0, code_quality = 1, algorithmic_efficiency = 2 };

inline constexpr std::array<Criterion, 3> all_criteria = {
    Criterion::functionality, Criterion::code_quality, Criterion::algorithmic_efficiency};

inline const char* to_string(Criterion criterion) {
    switch (criterion) {
        case Criterion::functionality: return "functionality";
        case Criterion::code_quality: return "code_quality";
        case Criterion::algorithmic_efficiency: return "algorithmic_efficiency";
    }
    return "?";
}

inline const char* display_name(Criterion criterion) {
    switch (criterion) {
        case Criterion::functionality: return "Functionality";
        case Criterion::code_quality: return "Code Quality";
        case Criterion::algorithmic_efficiency: return "Algorithmic Efficiency";
    }
    return "?";
}

inline std::optional<Criterion> parse_criterion(std::string_view name) {
    if (name == "functionality") return Criterion::functionality;
    if (name == "code_quality") return Criterion::code_quality;
    if (name == "algorithmic_efficiency") return Criterion::algorithmic_efficiency;
    return std::nullopt;
}

enum class GradingMode { cot = 0, regular = 1 };

inline const char* to_string(GradingMode mode) {
    return mode == GradingMode::cot ? "cot" : "regular";
}

inline std::optional<GradingMode> parse_grading_mode(std::string_view name) {
    if (name == "cot") return GradingMode::cot;
    if (name == "regular") return GradingMode::regular;
    return std::nullopt;
}

/// A grade on [1.0, 10.0] with exactly one fractional digit, stored in
/// integer tenths so that downstream deviation arithmetic is exact.
class Grade {
public:
    static constexpr int min_tenths = 10;
    static constexpr int max_tenths = 100;

    static Grade from_tenths(int tenths) {
        if (tenths < min_tenths || tenths > max_tenths) {
            throw Error("grade out of range [1.0, 10.0]: " +
                        std::to_string(tenths / 10.0));
        }
        return Grade(tenths);
    }

    /// Accepts values whose decimal expansion has at most one fractional
    /// digit; anything finer is rejected.
    static Grade from_value(double value) {
        const double scaled = value * 10.0;
        const double nearest = std::round(scaled);
        if (std::abs(scaled - nearest) > 1e-6) {
            char buffer[64];
            std::snprintf(buffer, sizeof(buffer),
                          "grade %g has more than one fractional digit", value);
            throw Error(buffer);
        }
        return from_tenths(static_cast<int>(nearest));
    }

    int tenths() const { return tenths_; }
    double value() const { return tenths_ / 10.0; }

    std::string to_string() const {
        char buffer[16];
        std::snprintf(buffer, sizeof(buffer), "%d.%d", tenths_ / 10, tenths_ % 10);
        return buffer;
    }

    friend bool operator==(Grade a, Grade b) { return a.tenths_ == b.tenths_; }
    friend bool operator!=(Grade a, Grade b) { return a.tenths_ != b.tenths_; }

private:
    explicit Grade(int tenths) : tenths_(tenths) {}
    int tenths_;
};

/// Signed tenths rendered as deviations: "+0.5", "-1.2", "0.0".
inline std::string format_signed_tenths(int tenths) {
    char buffer[16];
    if (tenths == 0) {
        return "0.0";
    }
    const char sign = tenths > 0 ? '+' : '-';
    const int magnitude = tenths > 0 ? tenths : -tenths;
    std::snprintf(buffer, sizeof(buffer), "%c%d.%d", sign, magnitude / 10, magnitude % 10);
    return buffer;
}

/// Non-negative hundredths rendered with two fractional digits: "0.44".
inline std::string format_hundredths(int hundredths) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%d.%02d", hundredths / 100, hundredths % 100);
    return buffer;
}

} // namespace stepgrade

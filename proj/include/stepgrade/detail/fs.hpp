#pragma once

#include "stepgrade/detail/text.hpp"
#include "stepgrade/errors.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace stepgrade::detail {

/// Reads a whole file as text, newline-normalized to LF.
inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return normalize_newlines(buffer.str());
}

/// Writes via a temp file in the same directory, then renames into place.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    const auto dir = path.parent_path();
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
    }
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    const auto tmp = path.string() + ".tmp." + std::to_string(rng());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write file: " + tmp);
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error("write failed: " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace stepgrade::detail

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gaprag/llm_backend.hpp"

namespace test_helpers {

inline std::string fixture_path(const std::string& rel) {
    return std::string(GAPRAG_FIXTURE_DIR) + "/" + rel;
}

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("gaprag_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

/// Wraps a backend and counts complete() calls per prompt kind.
class CountingBackend : public gaprag::ChatBackend {
public:
    explicit CountingBackend(gaprag::ChatBackend& inner) : inner_(inner) {}

    std::string complete(gaprag::PromptKind kind,
                         const std::vector<gaprag::ChatMessage>& messages) override {
        ++counts_[static_cast<int>(kind)];
        return inner_.complete(kind, messages);
    }

    int count(gaprag::PromptKind kind) const { return counts_[static_cast<int>(kind)]; }

private:
    gaprag::ChatBackend& inner_;
    int counts_[4] = {0, 0, 0, 0};
};

}  // namespace test_helpers

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "gaprag/bm25.hpp"
#include "gaprag/controller.hpp"
#include "gaprag/llm_backend.hpp"

namespace gaprag {

struct BackendConfig {
    std::string kind;  // "scripted" | "remote"
    std::string script_path;
    RemoteSpec remote;
};

/// Single structured run configuration (JSON file); flags override fields.
struct RunConfig {
    std::string corpus_path;
    Bm25Params index_params;
    std::string index_path;
    PipelineConfig pipeline;
    std::map<std::string, BackendConfig> backends;  // keyed by role name
    std::string questions_path;
    std::string output_path;
    int workers = 1;
    double split_fraction = 0.9;
    std::uint64_t split_seed = 42;

    static RunConfig load(const std::string& path);
};

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config);

}  // namespace gaprag

#include "gaprag/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gaprag {

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);

    RunConfig config;
    config.corpus_path = j.value("corpus", "");
    if (j.contains("index")) {
        const auto& idx = j["index"];
        config.index_params.k1 = idx.value("k1", 0.9);
        config.index_params.b = idx.value("b", 0.4);
        config.index_path = idx.value("path", "");
    }
    if (j.contains("pipeline")) {
        const auto& p = j["pipeline"];
        config.pipeline.max_turns = p.value("max_turns", 4);
        config.pipeline.top_k = p.value("top_k", 6);
        config.pipeline.query_gap_limit = p.value("query_gap_limit", 1);
        config.pipeline.evidence_cap = p.value("evidence_cap", 6);
        std::string mode = p.value("mode", "inference");
        if (mode == "inference")
            config.pipeline.mode = PipelineMode::inference;
        else if (mode == "trace_collection")
            config.pipeline.mode = PipelineMode::trace_collection;
        else
            throw std::runtime_error("unknown pipeline mode: " + mode);
        config.pipeline.deterministic_timing = p.value("deterministic_timing", false);
    }
    if (j.contains("backends")) {
        for (auto& [role, node] : j["backends"].items()) {
            BackendConfig bc;
            bc.kind = node.value("kind", "scripted");
            if (bc.kind == "scripted") {
                bc.script_path = node.at("script").get<std::string>();
            } else if (bc.kind == "remote") {
                bc.remote.endpoint = node.at("endpoint").get<std::string>();
                bc.remote.model_name = node.value("model", "");
                bc.remote.temperature = node.value("temperature", 0.0);
                bc.remote.max_tokens = node.value("max_tokens", 512);
                bc.remote.max_in_flight = node.value("max_in_flight", 4);
            } else {
                throw std::runtime_error("unknown backend kind: " + bc.kind);
            }
            config.backends[role] = std::move(bc);
        }
    }
    config.questions_path = j.value("questions", "");
    config.output_path = j.value("output", "");
    config.workers = j.value("workers", 1);
    if (j.contains("split")) {
        config.split_fraction = j["split"].value("fraction", 0.9);
        config.split_seed = j["split"].value("seed", std::uint64_t{42});
    }
    return config;
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config) {
    if (config.kind == "scripted")
        return std::make_unique<ScriptedBackend>(
            ScriptedBackend::from_jsonl(config.script_path));
    if (config.kind == "remote") return std::make_unique<RemoteBackend>(config.remote);
    throw std::runtime_error("unknown backend kind: " + config.kind);
}

}  // namespace gaprag

#include "gaprag/llm_backend.hpp"

#include <condition_variable>
#include <cstdlib>
#include <fstream>

#include "json.hpp"

#include "httplib.h"

namespace gaprag {

const char* prompt_kind_name(PromptKind kind) {
    switch (kind) {
        case PromptKind::judge: return "judge";
        case PromptKind::teacher: return "teacher";
        case PromptKind::extractor: return "extractor";
        case PromptKind::reasoner: return "reasoner";
    }
    return "judge";
}

PromptKind prompt_kind_from_name(const std::string& name) {
    if (name == "judge") return PromptKind::judge;
    if (name == "teacher") return PromptKind::teacher;
    if (name == "extractor") return PromptKind::extractor;
    if (name == "reasoner") return PromptKind::reasoner;
    throw std::invalid_argument("unknown prompt kind: " + name);
}

void ScriptedBackend::add_rule(ScriptRule rule) { rules_.push_back(std::move(rule)); }

ScriptedBackend ScriptedBackend::from_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open script file: " + path);
    ScriptedBackend backend;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed script rule");
        ScriptRule rule;
        rule.kind = prompt_kind_from_name(j.at("kind").get<std::string>());
        rule.match = j.at("match").get<std::string>();
        std::string mode = j.value("match_mode", "substring");
        if (mode == "substring")
            rule.mode = MatchMode::substring;
        else if (mode == "regex")
            rule.mode = MatchMode::regex;
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown match_mode " + mode);
        rule.response = j.at("response").get<std::string>();
        backend.add_rule(std::move(rule));
    }
    return backend;
}

std::string ScriptedBackend::complete(PromptKind kind,
                                      const std::vector<ChatMessage>& messages) {
    if (messages.empty())
        throw std::invalid_argument("complete requires at least one message");
    std::string user_text;
    for (const auto& m : messages)
        if (m.role == MessageRole::user) {
            if (!user_text.empty()) user_text.push_back('\n');
            user_text += m.content;
        }
    for (const auto& rule : rules_) {
        if (rule.kind != kind) continue;
        bool hit = false;
        if (rule.mode == MatchMode::substring) {
            hit = user_text.find(rule.match) != std::string::npos;
        } else {
            std::regex re(rule.match);
            hit = std::regex_search(user_text, re);
        }
        if (hit) return rule.response;
    }
    throw BackendError(BackendError::Kind::NoScript,
                       std::string("no script rule matches ") + prompt_kind_name(kind) +
                           " prompt");
}

struct RemoteBackend::Impl {
    RemoteSpec spec;
    std::string host;
    std::string path;
    std::mutex slots_mutex;
    std::condition_variable slots_cv;
    int in_flight = 0;
};

namespace {

// Splits "http://host:port/path" into (scheme://host:port, /path).
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw std::invalid_argument("endpoint must include scheme: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/v1/chat/completions"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

const char* role_name(MessageRole role) {
    switch (role) {
        case MessageRole::system: return "system";
        case MessageRole::user: return "user";
        case MessageRole::assistant: return "assistant";
    }
    return "user";
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteSpec spec) : impl_(std::make_unique<Impl>()) {
    impl_->spec = std::move(spec);
    auto [host, path] = split_endpoint(impl_->spec.endpoint);
    impl_->host = host;
    impl_->path = path;
}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::complete(PromptKind, const std::vector<ChatMessage>& messages) {
    if (messages.empty())
        throw std::invalid_argument("complete requires at least one message");

    nlohmann::json body;
    body["model"] = impl_->spec.model_name;
    body["temperature"] = impl_->spec.temperature;
    body["max_tokens"] = impl_->spec.max_tokens;
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages)
        msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    body["messages"] = std::move(msgs);

    httplib::Headers headers;
    if (const char* key = std::getenv(impl_->spec.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    {
        std::unique_lock lock(impl_->slots_mutex);
        impl_->slots_cv.wait(lock,
                             [this] { return impl_->in_flight < impl_->spec.max_in_flight; });
        ++impl_->in_flight;
    }
    struct SlotRelease {
        Impl* impl;
        ~SlotRelease() {
            std::lock_guard lock(impl->slots_mutex);
            --impl->in_flight;
            impl->slots_cv.notify_one();
        }
    } release{impl_.get()};

    std::string payload = body.dump();
    httplib::Result res;
    for (int attempt = 0; attempt < 2; ++attempt) {
        httplib::Client client(impl_->host);
        client.set_read_timeout(120, 0);
        res = client.Post(impl_->path, headers, payload, "application/json");
        if (res) break;
    }
    if (!res)
        throw BackendError(BackendError::Kind::Transport,
                           "transport failure contacting " + impl_->spec.endpoint);
    if (res->status < 200 || res->status >= 300)
        throw BackendError(BackendError::Kind::Remote,
                           "remote returned status " + std::to_string(res->status),
                           res->status);

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (!reply.is_discarded() && reply.contains("choices") && !reply["choices"].empty() &&
        reply["choices"][0].contains("message"))
        return reply["choices"][0]["message"].value("content", "");
    // Non-JSON or non-standard body: hand it back raw for stub servers.
    return res->body;
}

}  // namespace gaprag

#pragma once

#include <memory>
#include <mutex>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaprag {

enum class MessageRole { system, user, assistant };

struct ChatMessage {
    MessageRole role;
    std::string content;
};

enum class PromptKind { judge, teacher, extractor, reasoner };

const char* prompt_kind_name(PromptKind kind);
PromptKind prompt_kind_from_name(const std::string& name);

class BackendError : public std::runtime_error {
public:
    enum class Kind { Transport, NoScript, Remote };

    BackendError(Kind kind, const std::string& message, int status = 0)
        : std::runtime_error(message), kind_(kind), status_(status) {}

    Kind kind() const { return kind_; }
    int status() const { return status_; }

private:
    Kind kind_;
    int status_;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    /// One completion round trip. `kind` identifies the calling role so that
    /// scripted backends can dispatch on it.
    virtual std::string complete(PromptKind kind,
                                 const std::vector<ChatMessage>& messages) = 0;
};

enum class MatchMode { substring, regex };

struct ScriptRule {
    PromptKind kind;
    std::string match;
    MatchMode mode = MatchMode::substring;
    std::string response;
};

/// Deterministic replay backend: ordered rules matched against the user
/// message; first match wins, no match raises BackendError::NoScript.
class ScriptedBackend : public ChatBackend {
public:
    ScriptedBackend() = default;

    void add_rule(ScriptRule rule);
    std::size_t rule_count() const { return rules_.size(); }
    const std::vector<ScriptRule>& rules() const { return rules_; }

    /// Rule file: JSONL records {kind, match, match_mode, response}.
    static ScriptedBackend from_jsonl(const std::string& path);

    std::string complete(PromptKind kind,
                         const std::vector<ChatMessage>& messages) override;

private:
    std::vector<ScriptRule> rules_;
};

struct RemoteSpec {
    std::string endpoint;  // e.g. http://localhost:8080/v1/chat/completions
    std::string model_name;
    double temperature = 0.0;
    int max_tokens = 512;
    int max_in_flight = 4;
    std::string api_key_env = "GAPRAG_API_KEY";
};

/// OpenAI-compatible chat-completions client with one automatic retry on
/// transport failure and a max-in-flight cap.
class RemoteBackend : public ChatBackend {
public:
    explicit RemoteBackend(RemoteSpec spec);
    ~RemoteBackend() override;

    std::string complete(PromptKind kind,
                         const std::vector<ChatMessage>& messages) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gaprag

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gaprag/evidence.hpp"
#include "gaprag/gap_schema.hpp"
#include "gaprag/llm_backend.hpp"

namespace gaprag {

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// System templates; byte-identical copies live under fixtures/prompts/.
const std::string& judge_system_prompt();
const std::string& teacher_system_prompt();
const std::string& teacher_user_template();  // interpolation slots <q>, <ctx>
const std::string& extractor_system_prompt();
const std::string& reasoner_system_prompt();

/// Marker used in user messages when no evidence has been collected yet.
const std::string& empty_context_marker();

std::vector<ChatMessage> render_judge_prompt(const std::string& question,
                                             const std::string& context_text);
std::vector<ChatMessage> render_teacher_prompt(const std::string& question,
                                               const std::string& context_text);
std::vector<ChatMessage> render_extractor_prompt(const std::string& question,
                                                 const std::vector<GapItem>& gaps,
                                                 const std::vector<SentenceCandidate>& pool,
                                                 int cap);
std::vector<ChatMessage> render_reasoner_prompt(const std::string& question,
                                                const std::string& context_text);

}  // namespace gaprag

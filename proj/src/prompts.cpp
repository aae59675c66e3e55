#include "gaprag/prompts.hpp"

namespace gaprag {

namespace {

const char* const kJudgeSystem =
    R"(You are a QA/RAG sufficiency judge.

Given a QUESTION and a CONTEXT (documents retrieved so far), decide whether the CONTEXT alone
contains enough information to reliably answer the QUESTION. If not, list the gap items that describe
what information is still missing.

Output format (strict):
- Output exactly one JSON object and nothing else.
- The output must have exactly two keys: "sufficient" and "gap items".

Schema:
{
  "sufficient": true/false,
  "gap items": [
    {
      "category": "bridge entity | attribute | relation | evidence span | other",
      "target": "string",
      "slot": "string",
      "description": "string"
    }
  ]
}

Constraint:
- If "sufficient" is true, then "gap items" must be an empty list [].)";

const char* const kTeacherSystem =
    R"(You are a QA/RAG sufficiency judge.

You will be given:
- a QUESTION
- the current-round CONTEXT (what the QA system has retrieved so far)

Your tasks:

1. Decide whether the given CONTEXT alone contains enough information to reliably answer the QUESTION.
- Answer using the boolean field "sufficient".

IMPORTANT:
- You MUST base your decision ONLY on the CONTEXT.
- Even if you personally know the correct answer from world knowledge or training data, if the CONTEXT does not clearly support a correct answer, you MUST set "sufficient": false.
- Only when the CONTEXT itself already provides enough explicit evidence to justify a correct answer, you may set "sufficient": true.

2. If the information is NOT sufficient (i.e., "sufficient": false), list the gap items needed to answer the QUESTION.

Use the field "gap_items": a list of 1-3 objects, each with:
- "category": one of ["bridge entity","attribute","relation","evidence span","other"]
- "target": a short string naming the entity or concept this gap is about
- "slot": a coarse type of the missing fact (e.g., alias, name, nationality, birth place, location)
- "description": a short English phrase describing the missing information

Guidelines:
- Only mark gap items as missing if they are NOT explicitly stated in the CONTEXT.
- Think about the reasoning chain and identify which links are still missing.
- Avoid vague statements like "need more information" without specifying what is missing.

Surface forms and aliases:
- If QUESTION uses one name (A) and CONTEXT introduces an alias (B), create ONE gap item with target A / B and descriptions that mention both forms.
- Do NOT create two separate gap items for the same underlying relation just due to surface forms.

3. If the information IS sufficient (i.e., "sufficient": true), set "gap_items": [].)";

const char* const kTeacherUserTemplate =
    R"(You MUST respond with a single JSON object and NOTHING else.

The JSON MUST have exactly the following shape:

{
  "sufficient": true/false,
  "gap items": [
    { "category": "...", "target": "...", "slot": "...", "description": "..." },
    ...
  ]
}

Do NOT add any extra keys.
Do NOT add explanations outside the JSON.

EXAMPLE (for style ONLY; alias is already present in CONTEXT)

QUESTION: "What nationality was A's wife?"
CONTEXT: (... includes "A is better known as B", but does NOT mention wife's name or nationality)
Output:

{
  "sufficient": false,
  "gap items": [
    { "category": "relation", "target": "A / B", "slot": "spouse name",
      "description": "The name of A (B)'s wife." },
    { "category": "attribute", "target": "A (B)'s wife", "slot": "nationality",
      "description": "The nationality of A (B)'s wife." }
  ]
}

QUESTION

<q>

CONTEXT (this is the ONLY evidence you may use)

<ctx>

Now output ONLY the JSON object:)";

const char* const kExtractorSystem =
    R"(You are a sentence-level evidence selector for a multi-hop RAG system.

You will receive:
1. an ORIGINAL QUESTION,
2. MISSING FACTS that describe what information is still missing,
3. a numbered list of SENTENCES from retrieved documents.

Your task is to select the sentence ids that maximize answerability for the ORIGINAL QUESTION.

Selection policy:
1. First prioritize sentences that fill the MISSING FACTS, especially bridge entities, attributes, relations, and evidence spans needed for the next hop.
2. Then prioritize sentences that directly support the final answer to the ORIGINAL QUESTION.
3. Prefer sentences that are self-contained and explicit:
   - they mention the key entity, relation, attribute, date, number, or answer-bearing fact;
   - they remain understandable when extracted alone.
4. If a selected sentence depends on nearby context to be understandable or useful, include the minimal additional sentence(s) needed to preserve that context.
5. Do not infer, rewrite, paraphrase, or generate evidence text. Only return ids from the provided list.
6. If no sentence is useful, return an empty list.

Output format (strict):
Return exactly one JSON object and nothing else:
{"evidence global ids": [1, 5, 7]}

Constraints:
- "evidence global ids" must be a JSON array of integers.
- Select at most K sentences, where K is given in the user message.
- Only use ids that appear in the numbered sentence list.
- Do not repeat ids.)";

const char* const kReasonerSystem =
    R"(You are a question answering assistant.

Answer the QUESTION using only the information in the CONTEXT.
Respond with the answer span only, without explanation.)";

const std::string kEmptyContextMarker = "(no evidence collected yet)";

std::string replace_slot(std::string text, const std::string& slot,
                         const std::string& value) {
    auto pos = text.find(slot);
    if (pos == std::string::npos)
        throw RenderError("template slot not found: " + slot);
    return text.replace(pos, slot.size(), value);
}

std::string context_or_marker(const std::string& context_text) {
    return context_text.empty() ? kEmptyContextMarker : context_text;
}

}  // namespace

const std::string& judge_system_prompt() {
    static const std::string s = kJudgeSystem;
    return s;
}
const std::string& teacher_system_prompt() {
    static const std::string s = kTeacherSystem;
    return s;
}
const std::string& teacher_user_template() {
    static const std::string s = kTeacherUserTemplate;
    return s;
}
const std::string& extractor_system_prompt() {
    static const std::string s = kExtractorSystem;
    return s;
}
const std::string& reasoner_system_prompt() {
    static const std::string s = kReasonerSystem;
    return s;
}
const std::string& empty_context_marker() { return kEmptyContextMarker; }

std::vector<ChatMessage> render_judge_prompt(const std::string& question,
                                             const std::string& context_text) {
    if (question.empty()) throw RenderError("judge prompt requires a question");
    std::string user = "QUESTION\n\n" + question + "\n\nCONTEXT\n\n" +
                       context_or_marker(context_text);
    return {{MessageRole::system, judge_system_prompt()}, {MessageRole::user, user}};
}

std::vector<ChatMessage> render_teacher_prompt(const std::string& question,
                                               const std::string& context_text) {
    if (question.empty()) throw RenderError("teacher prompt requires a question");
    std::string user = replace_slot(teacher_user_template(), "<q>", question);
    user = replace_slot(std::move(user), "<ctx>", context_or_marker(context_text));
    return {{MessageRole::system, teacher_system_prompt()}, {MessageRole::user, user}};
}

std::vector<ChatMessage> render_extractor_prompt(const std::string& question,
                                                 const std::vector<GapItem>& gaps,
                                                 const std::vector<SentenceCandidate>& pool,
                                                 int cap) {
    if (question.empty()) throw RenderError("extractor prompt requires a question");
    if (cap < 1) throw RenderError("extractor cap must be >= 1");

    std::string user = "ORIGINAL QUESTION\n\n" + question + "\n\nMISSING FACTS\n\n";
    if (gaps.empty()) {
        user += "(none)\n";
    } else {
        for (const auto& gap : gaps) {
            user += std::string("- ") + category_surface(gap.category) +
                    ": target=" + gap.target + "; slot=" + gap.slot +
                    "; description=" + gap.description + "\n";
        }
    }
    user += "\nSENTENCES\n\n";
    for (const auto& cand : pool) {
        user += std::to_string(cand.global_id) + ". [" + cand.doc_title + "] " +
                cand.text + "\n";
    }
    user += "\nSelect at most K=" + std::to_string(cap) + " sentences.";
    return {{MessageRole::system, extractor_system_prompt()}, {MessageRole::user, user}};
}

std::vector<ChatMessage> render_reasoner_prompt(const std::string& question,
                                                const std::string& context_text) {
    if (question.empty()) throw RenderError("reasoner prompt requires a question");
    std::string user = "QUESTION\n\n" + question + "\n\nCONTEXT\n\n" +
                       context_or_marker(context_text);
    return {{MessageRole::system, reasoner_system_prompt()}, {MessageRole::user, user}};
}

}  // namespace gaprag

// Copyright 2026 The adaptrag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADAPTRAG_PROMPTS_H_
#define ADAPTRAG_PROMPTS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/corpus_index.h"
#include "adaptrag/llm_gateway.h"
#include "adaptrag/workflow.h"

// Chat prompt templates for the executors and the planner.
//
// A template is plain text in which a line starting with "system:",
// "assistant:" or "user:" opens a new message; following lines belong to that
// message. Placeholders are substituted verbatim:
//   {content of Question}   the question or working query
//   {content of Documents}  candidate documents, one "Document<j>(...)" line each
//   {content of Context}    sub-questions and sub-answers gathered so far
namespace adaptrag::prompts {

inline constexpr std::string_view kQuestionSlot = "{content of Question}";
inline constexpr std::string_view kDocumentsSlot = "{content of Documents}";
inline constexpr std::string_view kContextSlot = "{content of Context}";

struct PromptTemplate {
  std::vector<ChatMessage> messages;
};

// Throws PreconditionError if the text has no role marker.
PromptTemplate ParseTemplate(std::string_view text);

// Built-in templates. Throws PreconditionError for roles without an LLM
// prompt (RA).
const PromptTemplate& ForExecutor(ExecutorId role);
const PromptTemplate& Planner();
std::string_view RawTemplateText(std::string_view name);

struct PromptFields {
  std::string question;
  std::string documents;
  std::string context;
};

std::vector<ChatMessage> Render(const PromptTemplate& tmpl,
                                const PromptFields& fields);

// "Document0(Title: ...) text" per line, newlines inside text flattened.
// An empty list renders as kNoDocuments.
inline constexpr std::string_view kNoDocuments = "Documents: None";
std::string RenderDocuments(std::span<const Document> docs);

struct QaPair {
  std::string question;
  std::string answer;  // empty when unanswered
};

// Sub-question block as shown to the summarizer and the planner:
//   Sub-questions:
//   Sub-question 1: ...
//   Sub-answers:
//   Sub-answer 1: ...
std::string RenderSubQuestionContext(std::span<const QaPair> pairs);

// "role: content" per message, for logging and observations.
std::string Flatten(std::span<const ChatMessage> messages);

}  // namespace adaptrag::prompts

#endif  // ADAPTRAG_PROMPTS_H_

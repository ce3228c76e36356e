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

#include "adaptrag/prompts.h"

#include <map>

#include "adaptrag/errors.h"
#include "adaptrag/text.h"

namespace adaptrag::prompts {
namespace internal {
const std::map<std::string, std::string_view, std::less<>>& PromptAssets();
}  // namespace internal

namespace {

// Single left-to-right pass, so substituted text is never re-expanded.
std::string Substitute(std::string_view tmpl, const PromptFields& fields) {
  const std::pair<std::string_view, const std::string*> slots[] = {
      {kQuestionSlot, &fields.question},
      {kDocumentsSlot, &fields.documents},
      {kContextSlot, &fields.context}};
  std::string out;
  size_t pos = 0;
  while (pos < tmpl.size()) {
    bool matched = false;
    if (tmpl[pos] == '{') {
      for (const auto& [marker, value] : slots) {
        if (tmpl.substr(pos, marker.size()) == marker) {
          out += *value;
          pos += marker.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += tmpl[pos++];
  }
  return out;
}

std::string FlattenNewlines(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

PromptTemplate ParseTemplate(std::string_view text) {
  static constexpr std::pair<std::string_view, ChatRole> kMarkers[] = {
      {"system:", ChatRole::kSystem},
      {"assistant:", ChatRole::kAssistant},
      {"user:", ChatRole::kUser}};
  PromptTemplate tmpl;
  for (const auto& line : text::SplitLines(text)) {
    bool opened = false;
    for (const auto& [marker, role] : kMarkers) {
      if (text::StartsWith(line, marker)) {
        std::string_view rest = std::string_view(line).substr(marker.size());
        if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        tmpl.messages.push_back({role, std::string(rest)});
        opened = true;
        break;
      }
    }
    if (opened) continue;
    if (tmpl.messages.empty()) {
      if (text::Trim(line).empty()) continue;
      throw PreconditionError("prompt template text before first role marker");
    }
    tmpl.messages.back().content += '\n';
    tmpl.messages.back().content += line;
  }
  if (tmpl.messages.empty()) {
    throw PreconditionError("prompt template has no messages");
  }
  for (auto& message : tmpl.messages) {
    while (!message.content.empty() && (message.content.back() == '\n' ||
                                        message.content.back() == ' ')) {
      message.content.pop_back();
    }
  }
  return tmpl;
}

std::string_view RawTemplateText(std::string_view name) {
  const auto& assets = internal::PromptAssets();
  const auto it = assets.find(name);
  if (it == assets.end()) {
    throw PreconditionError("unknown prompt template " + std::string(name));
  }
  return it->second;
}

const PromptTemplate& ForExecutor(ExecutorId role) {
  static const std::map<ExecutorId, PromptTemplate> templates = [] {
    std::map<ExecutorId, PromptTemplate> out;
    out.emplace(ExecutorId::kQDS, ParseTemplate(RawTemplateText("qds")));
    out.emplace(ExecutorId::kQDP, ParseTemplate(RawTemplateText("qdp")));
    out.emplace(ExecutorId::kQR, ParseTemplate(RawTemplateText("qr")));
    out.emplace(ExecutorId::kDS, ParseTemplate(RawTemplateText("ds")));
    out.emplace(ExecutorId::kAG, ParseTemplate(RawTemplateText("ag")));
    out.emplace(ExecutorId::kAS, ParseTemplate(RawTemplateText("as")));
    return out;
  }();
  const auto it = templates.find(role);
  if (it == templates.end()) {
    throw PreconditionError("executor " + std::string(ExecutorName(role)) +
                            " has no prompt");
  }
  return it->second;
}

const PromptTemplate& Planner() {
  static const PromptTemplate tmpl = ParseTemplate(RawTemplateText("planner"));
  return tmpl;
}

std::vector<ChatMessage> Render(const PromptTemplate& tmpl,
                                const PromptFields& fields) {
  std::vector<ChatMessage> out = tmpl.messages;
  for (auto& message : out) {
    message.content = Substitute(message.content, fields);
  }
  return out;
}

std::string RenderDocuments(std::span<const Document> docs) {
  if (docs.empty()) return std::string(kNoDocuments);
  std::string out;
  for (size_t j = 0; j < docs.size(); ++j) {
    if (j > 0) out += '\n';
    out += "Document" + std::to_string(j) + "(Title: " +
           FlattenNewlines(docs[j].title) + ") " + FlattenNewlines(docs[j].text);
  }
  return out;
}

std::string RenderSubQuestionContext(std::span<const QaPair> pairs) {
  if (pairs.empty()) return "";
  std::string out = "Sub-questions:";
  for (size_t i = 0; i < pairs.size(); ++i) {
    out += "\nSub-question " + std::to_string(i + 1) + ": " +
           FlattenNewlines(pairs[i].question);
  }
  out += "\nSub-answers:";
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].answer.empty()) continue;
    out += "\nSub-answer " + std::to_string(i + 1) + ": " +
           FlattenNewlines(pairs[i].answer);
  }
  return out;
}

std::string Flatten(std::span<const ChatMessage> messages) {
  std::string out;
  for (const auto& message : messages) {
    if (!out.empty()) out += '\n';
    out += ChatRoleName(message.role);
    out += ": ";
    out += message.content;
  }
  return out;
}

}  // namespace adaptrag::prompts

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

#ifndef ADAPTRAG_SYNTHWORLD_H_
#define ADAPTRAG_SYNTHWORLD_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptrag/corpus_index.h"
#include "adaptrag/executors.h"
#include "adaptrag/llm_gateway.h"

namespace adaptrag {

struct Fact {
  std::string subject;
  std::string relation;  // headquartered_in, founded_in, works_for, born_in
  std::string object;
  bool operator==(const Fact&) const = default;
};

// The sentence that states a fact; it appears verbatim in one document.
std::string FactSentence(const Fact& fact);

enum class QuestionKind {
  kSingleHop,
  kNoisySingleHop,
  kSerial2Hop,
  kParallelCompare,
};

std::string_view QuestionKindName(QuestionKind kind);
QuestionKind QuestionKindFromName(std::string_view name);

// What a scripted answer generator needs to know about one query.
struct AnswerKey {
  std::string gold;
  std::string distractor;  // same relation, no token shared with gold
  std::vector<size_t> support;  // fact indices
  // Answerable without documents. When known_prefix is set, only if the
  // query carries that known fact.
  bool parametric = false;
  std::string known_prefix;
  bool operator==(const AnswerKey&) const = default;
};

struct SynthSubQuestion {
  std::string text;
  AnswerKey answer_key;
  bool operator==(const SynthSubQuestion&) const = default;
};

struct SynthQuestion {
  std::string text;
  std::vector<std::string> gold_answers;
  QuestionKind kind = QuestionKind::kSingleHop;
  AnswerKey answer_key;
  std::string rewrite;  // the question with its noise prefix removed
  std::vector<SynthSubQuestion> sub_questions;
  bool operator==(const SynthQuestion&) const = default;
};

struct SynthWorld {
  uint64_t seed = 0;
  std::vector<Fact> facts;
  std::vector<Document> corpus;
  std::vector<size_t> fact_document;  // corpus ordinal holding each fact
  std::vector<SynthQuestion> questions;
  bool operator==(const SynthWorld&) const = default;
};

struct WorldOptions {
  uint64_t seed = 1;
  size_t n_entities = 24;
  size_t n_distractors = 40;
  // Extra documents per company that mention it next to the word "founded".
  size_t org_mentions = 3;
  size_t n_questions_per_kind = 10;
};

// Deterministic for a fixed seed. Questions are ordered kind by kind.
// Throws PreconditionError when a count is zero or n_entities < 2.
SynthWorld GenerateWorld(const WorldOptions& options);

std::string WorldToJson(const SynthWorld& world);
SynthWorld WorldFromJson(std::string_view json);
SynthWorld LoadWorld(const std::filesystem::path& path);

// {"question", "golden_answers"} per line.
std::string WorldDatasetJsonl(const SynthWorld& world);

// Token counts of a scripted completion; at 1e-7 USD per prompt token and
// 2e-7 per completion token they equal the nominal executor costs.
TokenUsage ScriptedUsage(ExecutorId role);
ModelPrice ScriptedPrice();

// Pure, deterministic stand-in for the executor LLM over a synthetic world.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(const SynthWorld& world);

  // Throws ExecutorError when the prompt's question is unknown to the world
  // or the role has no prompt.
  ChatReply Complete(ExecutorId role,
                     std::span<const ChatMessage> prompt) const override;
  std::optional<double> PriceUsd(ExecutorId role,
                                 const TokenUsage& usage) const override;

 private:
  struct QueryRef {
    size_t question = 0;
    std::optional<size_t> sub_question;
  };
  struct ParsedPrompt {
    QueryRef ref;
    std::string known_facts;
    std::string documents;
    std::vector<std::string> sub_answers;
  };

  ParsedPrompt Parse(ExecutorId role, std::span<const ChatMessage> prompt) const;
  const AnswerKey& AnswerKeyOf(const QueryRef& ref) const;
  std::string Answer(const ParsedPrompt& parsed) const;
  std::string Summarize(const ParsedPrompt& parsed) const;

  const SynthWorld& world_;
  std::map<std::string, QueryRef, std::less<>> queries_;
};

}  // namespace adaptrag

#endif  // ADAPTRAG_SYNTHWORLD_H_

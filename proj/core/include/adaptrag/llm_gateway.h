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

#ifndef ADAPTRAG_LLM_GATEWAY_H_
#define ADAPTRAG_LLM_GATEWAY_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "adaptrag/errors.h"

namespace adaptrag {

enum class ChatRole { kSystem, kAssistant, kUser };

std::string_view ChatRoleName(ChatRole role);

struct ChatMessage {
  ChatRole role = ChatRole::kUser;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct TokenUsage {
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    completion_tokens += other.completion_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) {
    return a += b;
  }
  int64_t total() const { return prompt_tokens + completion_tokens; }
  bool operator==(const TokenUsage&) const = default;
};

struct ChatReply {
  std::string text;
  TokenUsage usage;
};

struct ModelPrice {
  double input_usd_per_token = 0.0;
  double output_usd_per_token = 0.0;
};

class PricingTable {
 public:
  // Throws PreconditionError on negative prices.
  void Set(std::string model, ModelPrice price);
  const ModelPrice* Find(std::string_view model) const;
  const std::map<std::string, ModelPrice, std::less<>>& entries() const {
    return prices_;
  }

 private:
  std::map<std::string, ModelPrice, std::less<>> prices_;
};

// prompt_tokens * input price + completion_tokens * output price.
// Throws PreconditionError for a model missing from the table.
double UsageToUsd(const TokenUsage& usage, std::string_view model,
                  const PricingTable& pricing);

// Network failure, timeout, or retryable status persisting after all attempts.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int last_status)
      : Error(what), last_status_(last_status) {}
  // 0 when the last attempt produced no HTTP response at all.
  int last_status() const { return last_status_; }

 private:
  int last_status_;
};

// Non-retryable, non-2xx HTTP status.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, int status)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// 2xx reply whose body does not have the chat-completions shape.
class DecodeError : public Error {
 public:
  using Error::Error;
};

struct GatewayConfig {
  // scheme://host[:port][/prefix]; the endpoint path is appended to it.
  std::string base_url = "http://127.0.0.1:8000";
  std::string endpoint_path = "/v1/chat/completions";
  // Name of the environment variable holding the bearer token. The token
  // itself is never stored in config or logged.
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  int max_concurrency = 4;
};

// Validates messages: non-empty list, system first, known roles, non-empty
// content. Throws PreconditionError.
void ValidateChatMessages(std::span<const ChatMessage> messages);

std::string BuildChatRequestBody(std::span<const ChatMessage> messages,
                                 std::string_view model, double temperature);
// Reads choices[0].message.content and usage.{prompt,completion}_tokens.
// Throws DecodeError.
ChatReply ParseChatResponseBody(std::string_view body);

// Blocking client for an OpenAI-compatible chat-completions endpoint.
// Safe for concurrent use; at most max_concurrency requests are in flight.
class ChatClient {
 public:
  explicit ChatClient(GatewayConfig config);
  ~ChatClient();
  ChatClient(const ChatClient&) = delete;
  ChatClient& operator=(const ChatClient&) = delete;

  ChatReply Chat(std::span<const ChatMessage> messages,
                 const std::string& model, double temperature,
                 std::optional<std::chrono::milliseconds> timeout = {}) const;

  const GatewayConfig& config() const { return config_; }

 private:
  struct State;

  GatewayConfig config_;
  std::unique_ptr<State> state_;
};

}  // namespace adaptrag

#endif  // ADAPTRAG_LLM_GATEWAY_H_

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

#include "adaptrag/llm_gateway.h"

#include <cstdlib>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace adaptrag {
namespace {

using nlohmann::json;

bool IsRetryableStatus(int status) { return status == 429 || status >= 500; }

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

SplitUrl SplitBaseUrl(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  const size_t host_start =
      scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = base_url.find('/', host_start);
  SplitUrl split;
  if (path_start == std::string::npos) {
    split.origin = base_url;
  } else {
    split.origin = base_url.substr(0, path_start);
    split.prefix = base_url.substr(path_start);
    while (!split.prefix.empty() && split.prefix.back() == '/') {
      split.prefix.pop_back();
    }
  }
  return split;
}

}  // namespace

std::string_view ChatRoleName(ChatRole role) {
  switch (role) {
    case ChatRole::kSystem:
      return "system";
    case ChatRole::kAssistant:
      return "assistant";
    case ChatRole::kUser:
      return "user";
  }
  return "user";
}

void PricingTable::Set(std::string model, ModelPrice price) {
  if (price.input_usd_per_token < 0.0 || price.output_usd_per_token < 0.0) {
    throw PreconditionError("negative price for model " + model);
  }
  prices_[std::move(model)] = price;
}

const ModelPrice* PricingTable::Find(std::string_view model) const {
  const auto it = prices_.find(model);
  return it == prices_.end() ? nullptr : &it->second;
}

double UsageToUsd(const TokenUsage& usage, std::string_view model,
                  const PricingTable& pricing) {
  const ModelPrice* price = pricing.Find(model);
  if (price == nullptr) {
    throw PreconditionError("no pricing for model " + std::string(model));
  }
  return static_cast<double>(usage.prompt_tokens) * price->input_usd_per_token +
         static_cast<double>(usage.completion_tokens) *
             price->output_usd_per_token;
}

void ValidateChatMessages(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw PreconditionError("chat: empty message list");
  if (messages.front().role != ChatRole::kSystem) {
    throw PreconditionError("chat: first message must have role system");
  }
  for (const auto& message : messages) {
    if (message.content.empty()) {
      throw PreconditionError("chat: message content must be non-empty");
    }
  }
}

std::string BuildChatRequestBody(std::span<const ChatMessage> messages,
                                 std::string_view model, double temperature) {
  json body;
  body["model"] = model;
  body["messages"] = json::array();
  for (const auto& message : messages) {
    body["messages"].push_back(
        {{"role", ChatRoleName(message.role)}, {"content", message.content}});
  }
  body["temperature"] = temperature;
  return body.dump();
}

ChatReply ParseChatResponseBody(std::string_view body) {
  json parsed;
  try {
    parsed = json::parse(body);
  } catch (const json::exception& e) {
    throw DecodeError(std::string("chat reply is not JSON: ") + e.what());
  }
  try {
    ChatReply reply;
    reply.text = parsed.at("choices").at(0).at("message").at("content")
                     .get<std::string>();
    if (parsed.contains("usage") && parsed["usage"].is_object()) {
      const auto& usage = parsed["usage"];
      reply.usage.prompt_tokens = usage.value("prompt_tokens", int64_t{0});
      reply.usage.completion_tokens =
          usage.value("completion_tokens", int64_t{0});
    }
    if (reply.usage.prompt_tokens < 0 || reply.usage.completion_tokens < 0) {
      throw DecodeError("chat reply reports negative token usage");
    }
    return reply;
  } catch (const json::exception& e) {
    throw DecodeError(std::string("unexpected chat reply shape: ") + e.what());
  }
}

struct ChatClient::State {
  explicit State(int permits) : slots(permits) {}
  std::counting_semaphore<> slots;
};

ChatClient::ChatClient(GatewayConfig config)
    : config_(std::move(config)),
      state_(std::make_unique<State>(std::max(1, config_.max_concurrency))) {
  if (config_.max_attempts < 1) {
    throw PreconditionError("gateway max_attempts must be >= 1");
  }
}

ChatClient::~ChatClient() = default;

ChatReply ChatClient::Chat(
    std::span<const ChatMessage> messages, const std::string& model,
    double temperature,
    std::optional<std::chrono::milliseconds> timeout) const {
  ValidateChatMessages(messages);
  const auto per_request = timeout.value_or(config_.timeout);

  if (!state_->slots.try_acquire_for(per_request)) {
    throw TransportError("chat: timed out waiting for a concurrency slot", 0);
  }
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{state_->slots};

  const SplitUrl url = SplitBaseUrl(config_.base_url);
  const std::string path = url.prefix + config_.endpoint_path;
  const std::string body = BuildChatRequestBody(messages, model, temperature);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str());
      key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(per_request);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      per_request - seconds);

  auto backoff = config_.initial_backoff;
  int last_status = 0;
  std::string last_problem;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    httplib::Client client(url.origin);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    auto result = client.Post(path, headers, body, "application/json");
    if (result) {
      const int status = result->status;
      if (status >= 200 && status < 300) {
        return ParseChatResponseBody(result->body);
      }
      if (!IsRetryableStatus(status)) {
        throw ProtocolError("chat: HTTP status " + std::to_string(status),
                            status);
      }
      last_status = status;
      last_problem = "HTTP status " + std::to_string(status);
    } else {
      last_status = 0;
      last_problem = httplib::to_string(result.error());
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<int64_t>(
          backoff.count() * config_.backoff_multiplier));
    }
  }
  throw TransportError("chat: giving up after " +
                           std::to_string(config_.max_attempts) +
                           " attempts: " + last_problem,
                       last_status);
}

}  // namespace adaptrag

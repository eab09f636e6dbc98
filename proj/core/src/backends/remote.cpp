// Copyright 2026 The ragbench Authors
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

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ragbench/backends.hpp"

namespace ragbench::backends {
namespace {

using json = nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& base, const std::string& path) {
  if (base.empty()) throw ConfigError("remote backend: base_url is not set");
  const auto scheme_end = base.find("://");
  const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto slash = base.find('/', host_begin);
  Endpoint e;
  e.origin = base.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : base.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + path;
  return e;
}

void sleep_for(const RetryPolicy& policy, int attempt) {
  const auto delay = policy.backoff_after(attempt);
  if (policy.sleep) {
    policy.sleep(delay);
  } else {
    std::this_thread::sleep_for(delay);
  }
}

// POSTs `body` with retries; returns the parsed 2xx JSON payload.
template <typename Gate>
json post_with_retries(const RemoteConfig& cfg, Gate& gate, const Endpoint& ep,
                       const json& body) {
  const std::string payload = body.dump();
  std::string last_error = "no attempt made";
  const int attempts = std::max(1, cfg.retry.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    {
      AdmissionGate::Ticket ticket(gate);
      httplib::Client client(ep.origin);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
      const auto usecs =
          std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());
      httplib::Headers headers;
      if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
      auto res = client.Post(ep.path, headers, payload, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
      } else if (res->status >= 200 && res->status < 300) {
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) throw MalformedResponse("response body is not JSON");
        return parsed;
      } else {
        last_error = "HTTP " + std::to_string(res->status);
      }
    }
    spdlog::warn("request to {}{} failed (attempt {}/{}): {}", ep.origin, ep.path, attempt,
                 attempts, last_error);
    if (attempt < attempts) sleep_for(cfg.retry, attempt);
  }
  throw AllRetriesExhausted(attempts, last_error);
}

}  // namespace

void RemoteConfig::apply_environment(const char* base_var, const char* key_var) {
  if (base_url.empty()) {
    if (const char* v = std::getenv(base_var)) base_url = v;
  }
  if (api_key.empty()) {
    if (const char* v = std::getenv(key_var)) api_key = v;
  }
}

AdmissionGate::AdmissionGate(int limit)
    : limit_(std::max(1, limit)), slots_(std::max(1, limit)) {}

AdmissionGate::Ticket::Ticket(AdmissionGate& gate) : gate_(gate) {
  gate_.slots_.acquire();
  const int now = ++gate_.in_flight_;
  int peak = gate_.peak_.load();
  while (now > peak && !gate_.peak_.compare_exchange_weak(peak, now)) {
  }
}

AdmissionGate::Ticket::~Ticket() {
  --gate_.in_flight_;
  gate_.slots_.release();
}

RemoteLlm::RemoteLlm(RemoteConfig config)
    : config_(std::move(config)), gate_(config_.concurrency) {
  if (config_.path.empty()) config_.path = "/chat/completions";
}

RemoteLlm::~RemoteLlm() = default;

ChatResponse RemoteLlm::complete(const ChatRequest& request) {
  request.validate();
  const json body = {
      {"model", config_.model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
  };
  const json res = post_with_retries(config_, gate_, split_url(config_.base_url, config_.path), body);
  try {
    ChatResponse out;
    const json& choices = res.at("choices");
    if (!choices.is_array() || choices.empty()) throw MalformedResponse("empty choices");
    const json& content = choices.at(0).at("message").at("content");
    out.text = content.is_null() ? std::string() : content.get<std::string>();
    if (res.contains("usage") && res["usage"].is_object()) {
      out.usage.input_tokens = res["usage"].value("prompt_tokens", std::int64_t{0});
      out.usage.output_tokens = res["usage"].value("completion_tokens", std::int64_t{0});
    } else {
      out.usage.input_tokens =
          static_cast<std::int64_t>(text::default_tokenizer().count(request.prompt));
      out.usage.output_tokens =
          static_cast<std::int64_t>(text::default_tokenizer().count(out.text));
    }
    return out;
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("chat response: ") + e.what());
  }
}

RemoteEmbedder::RemoteEmbedder(RemoteConfig config)
    : config_(std::move(config)), gate_(config_.concurrency) {
  if (config_.path.empty()) config_.path = "/embeddings";
}

RemoteEmbedder::~RemoteEmbedder() = default;

EmbeddingBackend::RawBatch RemoteEmbedder::embed_batch(std::span<const std::string> texts) {
  const json body = {{"model", config_.model},
                     {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const json res = post_with_retries(config_, gate_, split_url(config_.base_url, config_.path), body);
  try {
    RawBatch raw;
    for (const json& item : res.at("data")) {
      EmbeddingVector v;
      v.values = item.at("embedding").get<std::vector<float>>();
      if (v.dimension() != config_.dimension) {
        throw DimensionMismatch(config_.dimension, v.dimension());
      }
      raw.vectors.push_back(std::move(v));
    }
    if (res.contains("usage") && res["usage"].is_object()) {
      raw.usage.input_tokens = res["usage"].value("prompt_tokens", std::int64_t{0});
    } else {
      for (const auto& t : texts) {
        raw.usage.input_tokens += static_cast<std::int64_t>(text::default_tokenizer().count(t));
      }
    }
    return raw;
  } catch (const json::exception& e) {
    throw MalformedResponse(std::string("embedding response: ") + e.what());
  }
}

}  // namespace ragbench::backends

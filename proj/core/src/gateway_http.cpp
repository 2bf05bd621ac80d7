#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/gateway.hpp"
#include "rddg/rng.hpp"

namespace rddg {

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
  return status == 429 || status == 408 || (status >= 500 && status < 600);
}

}  // namespace

HttpGateway::HttpGateway(TransportConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (const char* value = std::getenv(cfg_.credential_env.c_str()); value && *value)
    credential_ = value;
  jitter_state_ = std::hash<std::string>{}(cfg_.endpoint) ^ 0x5bd1e995u;
}

CompletionResult HttpGateway::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::json body;
  body["model"] = cfg_.model;
  body["temperature"] = cfg_.temperature;
  body["max_tokens"] = cfg_.max_output_tokens;
  body["messages"] = nlohmann::json::array();
  std::size_t prompt_chars = 0;
  for (const auto& m : messages) {
    if (m.content.empty() && m.role != ChatRole::assistant)
      throw ConfigError("chat message content must be non-empty");
    body["messages"].push_back({{"role", chat_role_string(m.role)}, {"content", m.content}});
    prompt_chars += m.content.size();
  }
  const std::string payload = body.dump();

  const ParsedUrl url = parse_url(cfg_.endpoint);
  Rng jitter(jitter_state_++);

  std::string last_error;
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      // exponential backoff with full jitter
      const double cap = cfg_.backoff_base_seconds * static_cast<double>(1 << (attempt - 2));
      const double sleep_s = cap * jitter.uniform();
      std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
    }

    httplib::Client client(url.origin);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);

    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;  // network errors are retryable
    }
    if (res->status == 401 || res->status == 403)
      throw TransportError("authentication failed (" + std::to_string(res->status) +
                           "); check the " + cfg_.credential_env + " environment variable");
    if (retryable_status(res->status)) {
      last_error = "retryable HTTP status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw TransportError("HTTP status " + std::to_string(res->status) + ": " + res->body);

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed response body: ") + e.what());
    }
    if (!reply.contains("choices") || reply["choices"].empty() ||
        !reply["choices"][0].contains("message"))
      throw TransportError("malformed response body: missing choices[0].message");

    CompletionResult result;
    result.text = reply["choices"][0]["message"].value("content", "");
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    result.usage.seconds = elapsed.count();
    if (reply.contains("usage") && reply["usage"].contains("prompt_tokens")) {
      result.usage.input_tokens = reply["usage"].value("prompt_tokens", 0L);
      result.usage.output_tokens = reply["usage"].value("completion_tokens", 0L);
      result.usage.estimated = false;
    } else {
      // no usage report: estimate at 4 characters per token and flag it
      result.usage.input_tokens = static_cast<long>(prompt_chars / 4);
      result.usage.output_tokens = static_cast<long>(result.text.size() / 4);
      result.usage.estimated = true;
    }
    record(result.usage, request_cost(result.usage, cfg_));
    return result;
  }
  throw TransportError("all " + std::to_string(cfg_.max_attempts) +
                       " attempts failed; last error: " + last_error);
}

}  // namespace rddg

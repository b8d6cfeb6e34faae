#pragma once

// HTTP chat-completion transport. Kept out of llm.hpp so only binaries that
// actually go online compile the HTTP stack. Expects an OpenAI-style
// chat-completions endpoint; the bearer token comes from HOMEGEN_API_KEY.

#include <cstdlib>
#include <string>

#include <httplib.h>

#include "homegen/llm.hpp"

namespace homegen {

inline std::string http_chat_complete(const ChatConfig& config,
                                      const std::string& prompt) {
  if (config.endpoint.empty())
    throw ServiceError("no endpoint configured for online mode");

  // Split "scheme://host[:port]/path".
  std::string url = config.endpoint;
  std::string path = "/v1/chat/completions";
  std::size_t scheme_end = url.find("://");
  std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  std::size_t path_begin = url.find('/', host_begin);
  std::string origin = url.substr(0, path_begin);
  if (path_begin != std::string::npos && path_begin + 1 < url.size())
    path = url.substr(path_begin);

  Json body;
  body["model"] = config.model;
  body["temperature"] = config.temperature;
  body["top_p"] = config.top_p;
  body["presence_penalty"] = config.penalty;
  Json msg;
  msg["role"] = "user";
  msg["content"] = prompt;
  body["messages"] = Json::array({msg});

  httplib::Client client(origin);
  client.set_connection_timeout(config.timeout_sec, 0);
  client.set_read_timeout(config.timeout_sec, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv("HOMEGEN_API_KEY"))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      // Client errors will not improve on retry.
      if (res->status >= 400 && res->status < 500)
        throw ServiceError("chat endpoint rejected request: " + last_error);
      continue;
    }
    Json reply = Json::parse(res->body, nullptr, false);
    if (reply.is_discarded())
      throw ServiceError("chat endpoint returned malformed JSON");
    try {
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const Json::exception&) {
      throw ServiceError("chat endpoint response missing choices[0].message.content");
    }
  }
  throw ServiceError("chat endpoint unreachable after " +
                     std::to_string(config.max_retries + 1) + " attempts (" +
                     last_error + ")");
}

}  // namespace homegen

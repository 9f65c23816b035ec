#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

#include "shortcoder/llm/llm.hpp"

namespace shortcoder::llm {

HttpChatProvider::HttpChatProvider(ProviderConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint must be an http:// or https:// URL: " + config_.endpoint);
  }
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = config_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
}

std::string HttpChatProvider::complete(const std::vector<Message>& messages, long seed, int) const {
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = config_.temperature;
  body["seed"] = seed;

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.auth_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status));
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected response body: ") + e.what());
  }
}

}  // namespace shortcoder::llm

#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shortcoder/dataset/dataset.hpp"
#include "shortcoder/rules/rules.hpp"

namespace shortcoder::llm {

struct PromptTemplate {
  std::string system_role;
  std::string task_description;  // may contain {rule_id}, {rule_name}, {rule_hint}
  std::vector<std::string> rules;  // one line per rule, R1..R10
  std::string example_original;
  std::string example_simplified;
  std::string delimiter_open = "<{}>";
  std::string delimiter_close = "</{}>";

  static PromptTemplate default_template();
};

/// "<name>\nbody\n</name>" with the template's delimiters.
std::string wrap(const PromptTemplate& t, std::string_view name, std::string_view body);

/// Blocks in fixed order: system, task, rules, example.
std::string build_prompt(const PromptTemplate& t, rules::RuleId target);

struct ParsedPair {
  std::string original;
  std::string simplified;
};

class Rejection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extracts the <original> and <simplified> blocks. Throws Rejection.
ParsedPair parse_response(std::string_view text, const PromptTemplate& t = PromptTemplate::default_template());

struct Message {
  std::string role;
  std::string content;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Response body for the conversation. `seed` and `attempt` only matter to
  /// deterministic providers. Throws TransportError.
  virtual std::string complete(const std::vector<Message>& messages, long seed, int attempt) const = 0;
};

/// Canned responses: attempt a of seed s returns responses[(s + a) % n].
class MockProvider : public ChatProvider {
 public:
  explicit MockProvider(std::vector<std::string> responses);
  /// One well-formed response per rule, built from the reference examples.
  static MockProvider for_rule(rules::RuleId id);

  std::string complete(const std::vector<Message>& messages, long seed, int attempt) const override;

 private:
  std::vector<std::string> responses_;
};

struct ProviderConfig {
  std::string endpoint;                    // e.g. http://host:port/v1/chat/completions
  std::string auth_env = "SHORTCODER_LLM_KEY";
  std::string model = "gpt-4";
  double temperature = 0.0;
  int max_retries = 2;

  /// Throws std::invalid_argument on negative retries or temperature.
  void validate() const;
  /// endpoint from SHORTCODER_LLM_ENDPOINT when set.
  static ProviderConfig from_env();
};

/// OpenAI-style chat completion over HTTP(S).
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderConfig config);
  std::string complete(const std::vector<Message>& messages, long seed, int attempt) const override;

 private:
  ProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

struct Synthesis {
  std::optional<dataset::CodePair> pair;
  std::vector<std::string> rejections;  // one per failed attempt
  int attempts = 0;
};

/// Up to 1 + max_retries attempts. Accepts a candidate only if both sides
/// parse, differ, `target` fires on the original, and the static check does
/// not find them inequivalent. Throws TransportError if the last attempt
/// failed in transport.
Synthesis synthesize_pair(const ChatProvider& provider, const ProviderConfig& config,
                          rules::RuleId target, long seed,
                          const PromptTemplate& t = PromptTemplate::default_template(),
                          rules::Strictness strictness = rules::Strictness::PaperFaithful);

}  // namespace shortcoder::llm

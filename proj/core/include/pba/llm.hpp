#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pba/tokenizer.hpp"
#include "pba/types.hpp"

namespace pba {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// Minimal chat interface so real, recorded, and mock backends are
// interchangeable. CI uses recorded/mock only.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages,
                               double temperature) = 0;
};

// Scripted client for tests: returns queued responses in order.
class MockChatClient : public ChatClient {
 public:
  explicit MockChatClient(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  std::string complete(const std::vector<ChatMessage>& messages,
                       double temperature) override;
  const std::vector<std::string>& seen_prompts() const { return prompts_; }

 private:
  std::vector<std::string> responses_;
  std::vector<std::string> prompts_;
  std::size_t next_ = 0;
};

// Replay cache keyed by prompt digest. With an inner client, misses are
// forwarded and appended to the cache file; without one, a miss is an error.
class CachedChatClient : public ChatClient {
 public:
  CachedChatClient(std::string cache_path, ChatClient* live = nullptr);
  std::string complete(const std::vector<ChatMessage>& messages,
                       double temperature) override;

 private:
  std::string cache_path_;
  ChatClient* live_;
  std::map<std::string, std::string> cache_;
};

// OpenAI-style chat-completions backend, configured via environment:
// PBA_LLM_ENDPOINT, PBA_LLM_API_KEY, PBA_LLM_MODEL, PBA_LLM_TIMEOUT_S.
// Rate-limit responses are retried with exponential backoff.
class HttpChatClient : public ChatClient {
 public:
  static HttpChatClient from_env();
  HttpChatClient(std::string endpoint, std::string api_key, std::string model,
                 int timeout_s);
  std::string complete(const std::vector<ChatMessage>& messages,
                       double temperature) override;

 private:
  std::string host_, path_, api_key_, model_;
  int timeout_s_;
};

// One inappropriate-break position p_j = (w_i, b_i, w_{i+1}) resolved to its
// interval index in the query.
struct VerdictPosition {
  std::string left;
  BreakToken brk = BreakToken::br0;
  std::string right;
  int index = 0;

  bool operator==(const VerdictPosition&) const = default;
};

struct LlmVerdict {
  Rank rank{3};
  std::vector<VerdictPosition> positions;

  bool operator==(const LlmVerdict&) const = default;
};

enum class VerdictErrorKind {
  kMissingRank,
  kRankOutOfRange,
  kMalformedPosition,
  kUnknownPosition,
};

class VerdictParseError : public ParseError {
 public:
  VerdictParseError(VerdictErrorKind kind, const std::string& msg)
      : ParseError(msg), kind_(kind) {}
  VerdictErrorKind kind() const { return kind_; }

 private:
  VerdictErrorKind kind_;
};

// Raised when every attempt produced unparseable text; carries the raw
// responses for inspection.
class LlmProtocolError : public Error {
 public:
  LlmProtocolError(const std::string& msg, std::vector<std::string> raw)
      : Error(msg), raw_responses_(std::move(raw)) {}
  const std::vector<std::string>& raw_responses() const {
    return raw_responses_;
  }

 private:
  std::vector<std::string> raw_responses_;
};

struct PromptBundle {
  std::string preamble;                   // task definition + rubric + grammar
  std::vector<std::string> shot_blocks;   // rendered few-shot examples
  std::string query_text;                 // rendered query sequence
  TokenSequence query;                    // kept for verdict resolution
  double temperature = 0.0;

  std::string to_text() const;
  std::vector<ChatMessage> messages() const;
};

// The shipped scoring-rubric text (versioned prompt asset).
const std::string& default_rubric();

// Deterministic prompt assembly. In faithful mode the shot count must be 0 or
// 4; exploratory mode accepts any count. Shots must carry overall ranks;
// their gold position sets are the intervals ranked Poor or Fair.
PromptBundle build_prompt(const TokenSequence& query,
                          const std::vector<LabeledUtterance>& shots,
                          const std::string& rubric, bool faithful = true);

// Uniform sample of k context examples without replacement.
std::vector<LabeledUtterance> select_shots(
    const std::vector<LabeledUtterance>& train_split, std::size_t k,
    std::mt19937_64& rng);

// Total over arbitrary text: either a verdict or a VerdictParseError, never
// anything else. Repeated word pairs resolve to the earliest unconsumed
// matching interval.
LlmVerdict parse_verdict(const std::string& text, const TokenSequence& query);

// Output grammar: "Rank: <1|2|3>\nInappropriate: none | w br w[, ...]".
std::string render_verdict(const LlmVerdict& verdict);

// Sends the prompt and parses the reply; on parse failure re-asks with a
// format reminder up to `retries` more times.
LlmVerdict assess_with_llm(ChatClient& client, const PromptBundle& bundle,
                           int retries);

std::string verdict_to_json_line(const std::string& utterance_id,
                                 const LlmVerdict& verdict);

}  // namespace pba

#include "pba/llm.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "pba/digest.hpp"

namespace pba {

using json = nlohmann::json;

// --- clients ---

std::string MockChatClient::complete(const std::vector<ChatMessage>& messages,
                                     double /*temperature*/) {
  std::ostringstream p;
  for (const auto& m : messages) p << m.role << ": " << m.content << "\n";
  prompts_.push_back(p.str());
  if (next_ >= responses_.size())
    throw NetworkError("mock client: no scripted response left");
  return responses_[next_++];
}

namespace {

std::string messages_digest(const std::vector<ChatMessage>& messages,
                            double temperature) {
  std::ostringstream p;
  p << "t=" << temperature << "\n";
  for (const auto& m : messages)
    p << m.role << "\x1f" << m.content << "\x1e";
  return hex_digest(p.str());
}

}  // namespace

CachedChatClient::CachedChatClient(std::string cache_path, ChatClient* live)
    : cache_path_(std::move(cache_path)), live_(live) {
  std::ifstream in(cache_path_, std::ios::binary);
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.contains("prompt_digest") ||
        !j.contains("response_text"))
      throw DataError("transcript cache '" + cache_path_ + "': bad record");
    cache_[j["prompt_digest"].get<std::string>()] =
        j["response_text"].get<std::string>();
  }
}

std::string CachedChatClient::complete(
    const std::vector<ChatMessage>& messages, double temperature) {
  std::string key = messages_digest(messages, temperature);
  auto hit = cache_.find(key);
  if (hit != cache_.end()) return hit->second;
  if (!live_)
    throw NetworkError("transcript cache miss (digest " + key +
                       ") and no live client configured");
  std::string response = live_->complete(messages, temperature);
  cache_[key] = response;
  std::ofstream out(cache_path_, std::ios::binary | std::ios::app);
  out << json{{"prompt_digest", key}, {"response_text", response}}.dump()
      << '\n';
  return response;
}

HttpChatClient HttpChatClient::from_env() {
  const char* endpoint = std::getenv("PBA_LLM_ENDPOINT");
  const char* key = std::getenv("PBA_LLM_API_KEY");
  const char* model = std::getenv("PBA_LLM_MODEL");
  const char* timeout = std::getenv("PBA_LLM_TIMEOUT_S");
  if (!endpoint || !model)
    throw ConfigError(
        "live LLM client needs PBA_LLM_ENDPOINT and PBA_LLM_MODEL");
  return HttpChatClient(endpoint, key ? key : "", model,
                        timeout ? std::atoi(timeout) : 60);
}

HttpChatClient::HttpChatClient(std::string endpoint, std::string api_key,
                               std::string model, int timeout_s)
    : api_key_(std::move(api_key)),
      model_(std::move(model)),
      timeout_s_(timeout_s) {
  auto slash = endpoint.find('/', endpoint.find("//") == std::string::npos
                                      ? 0
                                      : endpoint.find("//") + 2);
  if (slash == std::string::npos) {
    host_ = endpoint;
    path_ = "/v1/chat/completions";
  } else {
    host_ = endpoint.substr(0, slash);
    path_ = endpoint.substr(slash);
  }
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages,
                                     double temperature) {
  json body;
  body["model"] = model_;
  body["temperature"] = temperature;
  body["messages"] = json::array();
  for (const auto& m : messages)
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(host_);
  client.set_read_timeout(timeout_s_, 0);
  httplib::Headers headers;
  if (!api_key_.empty())
    headers.emplace("Authorization", "Bearer " + api_key_);

  int backoff_ms = 500;
  for (int attempt = 0; attempt < 5; ++attempt) {
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
      throw NetworkError("LLM transport failure talking to " + host_);
    if (res->status == 429) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
      continue;
    }
    if (res->status != 200)
      throw NetworkError("LLM backend returned HTTP " +
                         std::to_string(res->status) + ": " + res->body);
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        reply["choices"].empty())
      throw NetworkError("LLM backend returned an unexpected payload");
    return reply["choices"][0]["message"]["content"].get<std::string>();
  }
  throw NetworkError("LLM backend rate-limited after repeated backoff");
}

// --- prompts ---

const std::string& default_rubric() {
  static const std::string rubric =
      "You assess phrase breaks in a second-language learner's speech.\n"
      "The speech is given as a token sequence of words interleaved with\n"
      "break tokens describing the pause after each word: br0 = no pause,\n"
      "br1 = slight or optional pause, br2 = a clear break, br3 = a long\n"
      "break.\n"
      "Rate the overall phrasing on this scale:\n"
      "  1 (Poor): breaks frequently contradict the sentence structure.\n"
      "  2 (Fair): mostly acceptable phrasing with some misplaced or\n"
      "            missing breaks.\n"
      "  3 (Great): breaks consistently match the sentence structure.\n"
      "Also list every inappropriate break position, including positions\n"
      "where an expected break is missing.\n"
      "Answer in exactly this format, with no extra commentary:\n"
      "Rank: <1|2|3>\n"
      "Inappropriate: none\n"
      "or\n"
      "Inappropriate: <word> <br_token> <word>, <word> <br_token> <word>\n"
      "[rubric-v1]\n";
  return rubric;
}

std::string render_verdict(const LlmVerdict& verdict) {
  std::ostringstream out;
  out << "Rank: " << verdict.rank.value() << "\nInappropriate: ";
  if (verdict.positions.empty()) {
    out << "none";
  } else {
    for (std::size_t i = 0; i < verdict.positions.size(); ++i) {
      const auto& p = verdict.positions[i];
      if (i) out << ", ";
      out << p.left << ' ' << break_name(p.brk) << ' ' << p.right;
    }
  }
  return out.str();
}

PromptBundle build_prompt(const TokenSequence& query,
                          const std::vector<LabeledUtterance>& shots,
                          const std::string& rubric, bool faithful) {
  if (query.word_count() == 0) throw DataError("build_prompt: empty query");
  if (faithful && shots.size() != 0 && shots.size() != 4)
    throw ConfigError("build_prompt: faithful mode needs 0 or 4 shots, got " +
                      std::to_string(shots.size()));

  PromptBundle bundle{rubric, {}, render(query), query, 0.0};
  for (const auto& shot : shots) {
    if (!shot.overall_rank)
      throw DataError("build_prompt: shot '" + shot.utterance.utterance_id +
                      "' has no overall rank");
    TokenSequence seq = tokenize(shot.utterance);
    LlmVerdict gold{*shot.overall_rank, {}};
    if (shot.interval_ranks) {
      for (std::size_t i = 0; i < shot.interval_ranks->size(); ++i)
        if ((*shot.interval_ranks)[i] != great())
          gold.positions.push_back({seq.words()[i], seq.breaks()[i],
                                    seq.words()[i + 1],
                                    static_cast<int>(i)});
    }
    bundle.shot_blocks.push_back("Sequence: " + render(seq) + "\n" +
                                 render_verdict(gold));
  }
  return bundle;
}

std::string PromptBundle::to_text() const {
  std::ostringstream out;
  out << preamble;
  if (!shot_blocks.empty()) {
    out << "\nExamples:\n";
    for (const auto& block : shot_blocks) out << '\n' << block << '\n';
  }
  out << "\nSequence: " << query_text << "\n";
  return out.str();
}

std::vector<ChatMessage> PromptBundle::messages() const {
  return {{"user", to_text()}};
}

std::vector<LabeledUtterance> select_shots(
    const std::vector<LabeledUtterance>& train_split, std::size_t k,
    std::mt19937_64& rng) {
  if (train_split.size() < k)
    throw DataError("select_shots: pool of " +
                    std::to_string(train_split.size()) +
                    " is smaller than k=" + std::to_string(k));
  // Partial Fisher-Yates over an index vector.
  std::vector<std::size_t> idx(train_split.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<LabeledUtterance> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(train_split[idx[i]]);
  }
  return out;
}

// --- verdict parsing ---

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

// Value of the first line starting with `label:` (case-insensitive), if any.
std::optional<std::string> labeled_line(const std::string& text,
                                        const std::string& label) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    std::string lt = lower(t);
    if (lt.rfind(label, 0) == 0)
      return trim(t.substr(label.size()));
  }
  return std::nullopt;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(trim(part));
  return out;
}

}  // namespace

LlmVerdict parse_verdict(const std::string& text, const TokenSequence& query) {
  auto rank_text = labeled_line(text, "rank:");
  if (!rank_text)
    throw VerdictParseError(VerdictErrorKind::kMissingRank,
                            "verdict: no 'Rank:' line found");
  int rank_value = 0;
  {
    std::istringstream in(*rank_text);
    if (!(in >> rank_value))
      throw VerdictParseError(VerdictErrorKind::kMissingRank,
                              "verdict: 'Rank:' line has no number: '" +
                                  *rank_text + "'");
  }
  if (rank_value < Rank::kMin || rank_value > Rank::kMax)
    throw VerdictParseError(
        VerdictErrorKind::kRankOutOfRange,
        "verdict: rank " + std::to_string(rank_value) + " outside {1,2,3}");

  LlmVerdict verdict{Rank(rank_value), {}};
  auto pos_text = labeled_line(text, "inappropriate:");
  if (!pos_text || lower(*pos_text) == "none" || pos_text->empty())
    return verdict;

  std::vector<bool> consumed(query.break_count(), false);
  for (const std::string& item : split(*pos_text, ',')) {
    if (item.empty()) continue;
    std::istringstream in(item);
    std::string left, brk, right, extra;
    if (!(in >> left >> brk >> right) || (in >> extra))
      throw VerdictParseError(
          VerdictErrorKind::kMalformedPosition,
          "verdict: position item is not '<word> <br> <word>': '" + item +
              "'");
    // Resolve on the word pair; the break token recorded is the query's.
    int found = -1;
    for (std::size_t i = 0; i < query.break_count(); ++i) {
      if (consumed[i]) continue;
      if (query.words()[i] == left && query.words()[i + 1] == right) {
        found = static_cast<int>(i);
        break;
      }
    }
    if (found < 0)
      throw VerdictParseError(VerdictErrorKind::kUnknownPosition,
                              "verdict: word pair '" + left + " ... " + right +
                                  "' does not name an interval of the query");
    consumed[static_cast<std::size_t>(found)] = true;
    verdict.positions.push_back({left,
                                 query.breaks()[static_cast<std::size_t>(found)],
                                 right, found});
  }
  return verdict;
}

LlmVerdict assess_with_llm(ChatClient& client, const PromptBundle& bundle,
                           int retries) {
  if (retries < 0) throw ConfigError("assess_with_llm: retries must be >= 0");
  std::vector<std::string> raw;
  std::vector<ChatMessage> messages = bundle.messages();
  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string response = client.complete(messages, bundle.temperature);
    raw.push_back(response);
    try {
      return parse_verdict(response, bundle.query);
    } catch (const VerdictParseError&) {
      messages.push_back({"assistant", response});
      messages.push_back(
          {"user",
           "Your previous answer did not follow the required format. Reply "
           "with exactly:\nRank: <1|2|3>\nInappropriate: none | <word> "
           "<br_token> <word>[, ...]"});
    }
  }
  std::string msg = "LLM produced no parseable verdict after " +
                    std::to_string(retries + 1) + " attempts";
  throw LlmProtocolError(msg, std::move(raw));
}

std::string verdict_to_json_line(const std::string& utterance_id,
                                 const LlmVerdict& verdict) {
  json j;
  j["utterance_id"] = utterance_id;
  j["rank"] = verdict.rank.value();
  j["positions"] = json::array();
  for (const auto& p : verdict.positions) j["positions"].push_back(p.index);
  return j.dump();
}

}  // namespace pba

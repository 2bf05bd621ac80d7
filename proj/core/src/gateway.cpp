#include "rddg/gateway.hpp"

#include <fstream>

#include "json.hpp"
#include "rddg/error.hpp"

namespace rddg {

std::string chat_role_string(ChatRole role) {
  switch (role) {
    case ChatRole::system: return "system";
    case ChatRole::user: return "user";
    case ChatRole::assistant: return "assistant";
  }
  return "?";
}

namespace {

ChatRole chat_role_from_string(const std::string& s) {
  if (s == "system") return ChatRole::system;
  if (s == "user") return ChatRole::user;
  if (s == "assistant") return ChatRole::assistant;
  throw DataError("unknown chat role: " + s);
}

nlohmann::json messages_to_json(const std::vector<ChatMessage>& messages) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : messages)
    arr.push_back({{"role", chat_role_string(m.role)}, {"content", m.content}});
  return arr;
}

std::vector<ChatMessage> messages_from_json(const nlohmann::json& arr) {
  std::vector<ChatMessage> out;
  for (const auto& m : arr)
    out.push_back({chat_role_from_string(m.at("role").get<std::string>()),
                   m.at("content").get<std::string>()});
  return out;
}

}  // namespace

void TransportConfig::validate() const {
  if (max_attempts < 1) throw ConfigError("transport max_attempts must be >= 1");
  if (temperature < 0.0) throw ConfigError("transport temperature must be >= 0");
  if (backoff_base_seconds < 0.0) throw ConfigError("transport backoff base must be >= 0");
  if (endpoint.empty()) throw ConfigError("transport endpoint must not be empty");
  if (model.empty()) throw ConfigError("transport model must not be empty");
}

double request_cost(const UsageDelta& usage, const TransportConfig& cfg) {
  return static_cast<double>(usage.input_tokens) * cfg.price_per_million_input / 1e6 +
         static_cast<double>(usage.output_tokens) * cfg.price_per_million_output / 1e6;
}

std::string UsageLedger::to_json() const {
  nlohmann::json j = {{"input_tokens", input_tokens},   {"output_tokens", output_tokens},
                      {"requests", requests},           {"wall_seconds", wall_seconds},
                      {"cost", cost},                   {"any_estimated", any_estimated}};
  return j.dump();
}

UsageLedger UsageLedger::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  UsageLedger l;
  l.input_tokens = j.at("input_tokens").get<long>();
  l.output_tokens = j.at("output_tokens").get<long>();
  l.requests = j.at("requests").get<long>();
  l.wall_seconds = j.at("wall_seconds").get<double>();
  l.cost = j.at("cost").get<double>();
  l.any_estimated = j.at("any_estimated").get<bool>();
  return l;
}

void Gateway::record(const UsageDelta& delta, double cost) {
  ledger_.input_tokens += delta.input_tokens;
  ledger_.output_tokens += delta.output_tokens;
  ledger_.requests += 1;
  ledger_.wall_seconds += delta.seconds;
  ledger_.cost += cost;
  ledger_.any_estimated = ledger_.any_estimated || delta.estimated;
}

// ---- transcript ---------------------------------------------------------------

TranscriptWriter::TranscriptWriter(const std::string& path, const std::string& config_hash,
                                   std::uint64_t seed)
    : path_(path) {
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write transcript: " + path_);
  nlohmann::json meta = {{"kind", "meta"}, {"config_hash", config_hash}, {"seed", seed}};
  out << meta.dump() << "\n";
}

void TranscriptWriter::append(const std::string& phase, int batch,
                              const std::vector<ChatMessage>& messages,
                              const CompletionResult& result) {
  if (!enabled()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to transcript: " + path_);
  nlohmann::json entry = {{"kind", "exchange"},
                          {"phase", phase},
                          {"batch", batch},
                          {"messages", messages_to_json(messages)},
                          {"response", result.text},
                          {"usage",
                           {{"input_tokens", result.usage.input_tokens},
                            {"output_tokens", result.usage.output_tokens},
                            {"seconds", result.usage.seconds},
                            {"estimated", result.usage.estimated}}}};
  out << entry.dump() << "\n";
}

void TranscriptWriter::append_note(const std::string& kind, int batch,
                                   const std::string& payload_json) {
  if (!enabled()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to transcript: " + path_);
  nlohmann::json entry = {{"kind", kind},
                          {"batch", batch},
                          {"payload", nlohmann::json::parse(payload_json)}};
  out << entry.dump() << "\n";
}

// ---- replay --------------------------------------------------------------------

ReplayGateway::ReplayGateway(const std::string& transcript_path) {
  std::ifstream in(transcript_path, std::ios::binary);
  if (!in) throw DataError("cannot open transcript: " + transcript_path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.value("kind", "") != "exchange") continue;
    Entry e;
    e.messages = messages_from_json(j.at("messages"));
    e.response = j.at("response").get<std::string>();
    const auto& u = j.at("usage");
    e.usage.input_tokens = u.at("input_tokens").get<long>();
    e.usage.output_tokens = u.at("output_tokens").get<long>();
    e.usage.seconds = u.at("seconds").get<double>();
    e.usage.estimated = u.at("estimated").get<bool>();
    entries_.push_back(std::move(e));
  }
}

CompletionResult ReplayGateway::complete(const std::vector<ChatMessage>& messages) {
  if (next_ >= entries_.size())
    throw TransportError("replay transcript exhausted after " + std::to_string(entries_.size()) +
                         " exchanges");
  const Entry& e = entries_[next_];
  if (messages.size() != e.messages.size())
    throw TransportError("replay mismatch at exchange " + std::to_string(next_) +
                         ": different message count");
  for (std::size_t i = 0; i < messages.size(); ++i)
    if (messages[i].content != e.messages[i].content ||
        messages[i].role != e.messages[i].role)
      throw TransportError("replay mismatch at exchange " + std::to_string(next_) +
                           ": prompt differs from the recording");
  ++next_;
  record(e.usage, 0.0);
  return {e.response, e.usage};
}

}  // namespace rddg

// Copyright 2026 The Trilingua Authors
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

#include "trilingua/mockserve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"
#include "text_util.hpp"
#include "trilingua/preprocess.hpp"

namespace trilingua {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kEmbedSeed = 0x7472696c696e6775ULL;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

MockResponse error_response(int status, const std::string& message) {
  return {status, dump(ordered_json{{"error", message}})};
}

std::string_view fault_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::http_500: return "http_500";
    case FaultKind::http_503: return "http_503";
    case FaultKind::http_400: return "http_400";
    case FaultKind::timeout: return "timeout";
    case FaultKind::malformed: return "malformed";
    case FaultKind::length_mismatch: return "length_mismatch";
    case FaultKind::dim_mismatch: return "dim_mismatch";
  }
  return "unknown";
}

FaultKind parse_fault(std::string_view name) {
  for (auto kind : {FaultKind::http_500, FaultKind::http_503, FaultKind::http_400, FaultKind::timeout,
                    FaultKind::malformed, FaultKind::length_mismatch, FaultKind::dim_mismatch}) {
    if (fault_name(kind) == name) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown fault kind '" + std::string(name) + "'");
}

const Fault* fault_at(const MockBehavior& b, std::size_t call_index) {
  auto it = std::find_if(b.fault_plan.begin(), b.fault_plan.end(),
                         [&](const Fault& f) { return f.call_index == call_index; });
  return it == b.fault_plan.end() ? nullptr : &*it;
}

// Protocol validation of a POST body; returns the parsed object or an error.
std::optional<ordered_json> parse_body(std::string_view body, std::string& error) {
  auto j = ordered_json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    error = "request body must be a JSON object";
    return std::nullopt;
  }
  return j;
}

bool check_decoding(const ordered_json& j, std::string& error) {
  if (!j.contains("max_new_tokens") || !j["max_new_tokens"].is_number_unsigned()) {
    error = "max_new_tokens must be a non-negative integer";
    return false;
  }
  if (!j.contains("decoding") || j["decoding"] != "greedy") {
    error = "decoding must be \"greedy\"";
    return false;
  }
  return true;
}

bool string_array(const ordered_json& j, const char* key) {
  return j.contains(key) && j[key].is_array() &&
         std::all_of(j[key].begin(), j[key].end(), [](const auto& v) { return v.is_string(); });
}

std::string translate_one(const MockBehavior& b, std::string_view text, std::string_view src,
                          std::string_view tgt) {
  auto payload = strip_language_tag(text);
  switch (b.translator) {
    case MockTranslator::identity:
      return payload;
    case MockTranslator::tag_prefix:
      return "[" + std::string(src) + "\xE2\x86\x92" + std::string(tgt) + "] " + payload;
    case MockTranslator::dictionary: {
      auto it = b.dictionary.find(payload);
      return it == b.dictionary.end() ? payload : it->second;
    }
  }
  return payload;
}

std::string within(std::string text, std::size_t max_new_tokens) {
  if (approx_token_count(text) <= max_new_tokens) {
    return text;
  }
  return cut_to_budget(text, max_new_tokens);
}

MockResponse handle_translate(const MockBehavior& b, std::string_view body, const Fault* fault) {
  std::string error;
  auto j = parse_body(body, error);
  if (!j) {
    return error_response(400, error);
  }
  if (!j->contains("src") || !(*j)["src"].is_string() || !j->contains("tgt") || !(*j)["tgt"].is_string()) {
    return error_response(400, "src and tgt must be strings");
  }
  if (!string_array(*j, "texts")) {
    return error_response(400, "texts must be an array of strings");
  }
  if (!check_decoding(*j, error)) {
    return error_response(400, error);
  }
  const auto src = (*j)["src"].get<std::string>();
  const auto tgt = (*j)["tgt"].get<std::string>();
  const auto limit = (*j)["max_new_tokens"].get<std::size_t>();
  ordered_json out = ordered_json::array();
  for (const auto& t : (*j)["texts"]) {
    out.push_back(within(translate_one(b, t.get<std::string>(), src, tgt), limit));
  }
  if (fault && fault->kind == FaultKind::length_mismatch && !out.empty()) {
    out.erase(out.size() - 1);
  }
  return {200, dump(ordered_json{{"translations", out}})};
}

MockResponse handle_generate(const MockBehavior& b, std::string_view body) {
  std::string error;
  auto j = parse_body(body, error);
  if (!j) {
    return error_response(400, error);
  }
  if (!j->contains("prompt") || !(*j)["prompt"].is_string()) {
    return error_response(400, "prompt must be a string");
  }
  if (!check_decoding(*j, error)) {
    return error_response(400, error);
  }
  const auto prompt = (*j)["prompt"].get<std::string>();
  std::string completion;
  if (b.generator == MockGenerator::echo) {
    completion = prompt;
  } else if (auto it = b.fixed.find(prompt_hash(prompt)); it != b.fixed.end()) {
    completion = it->second;
  }
  completion = within(std::move(completion), (*j)["max_new_tokens"].get<std::size_t>());
  return {200, dump(ordered_json{{"completion", completion}})};
}

MockResponse handle_embed(const MockBehavior& b, std::string_view body, const Fault* fault) {
  std::string error;
  auto j = parse_body(body, error);
  if (!j) {
    return error_response(400, error);
  }
  if (!string_array(*j, "tokens")) {
    return error_response(400, "tokens must be an array of strings");
  }
  ordered_json vectors = ordered_json::array();
  for (const auto& t : (*j)["tokens"]) {
    vectors.push_back(hash_embedding(t.get<std::string>(), b.embed_dim));
  }
  if (fault && !vectors.empty()) {
    if (fault->kind == FaultKind::length_mismatch) {
      vectors.erase(vectors.size() - 1);
    } else if (fault->kind == FaultKind::dim_mismatch && !vectors.back().empty()) {
      vectors.back().erase(vectors.back().size() - 1);
    }
  }
  return {200, dump(ordered_json{{"vectors", vectors}})};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot read behavior file '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string prompt_hash(std::string_view prompt) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a64(prompt)));
  return buf;
}

std::string strip_language_tag(std::string_view text) {
  if (text.starts_with("<2")) {
    auto close = text.find('>');
    if (close != std::string_view::npos && close > 2) {
      auto code = text.substr(2, close - 2);
      const bool valid = std::all_of(code.begin(), code.end(), [](char c) {
        return detail::ascii_alnum(c) || c == '_' || c == '-';
      });
      if (valid) {
        text.remove_prefix(close + 1);
        while (!text.empty() && text.front() == ' ') {
          text.remove_prefix(1);
        }
      }
    }
  }
  return std::string(text);
}

std::vector<double> hash_embedding(std::string_view token, std::size_t dim) {
  std::vector<double> v(dim);
  std::uint64_t state = detail::fnv1a64(token) ^ kEmbedSeed;
  double sq = 0.0;
  for (auto& x : v) {
    const double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x = 2.0 * unit - 1.0;
    sq += x * x;
  }
  if (sq == 0.0) {
    if (dim > 0) {
      v[0] = 1.0;
    }
    return v;
  }
  const double n = std::sqrt(sq);
  for (auto& x : v) {
    x /= n;
  }
  return v;
}

MockBehavior behavior_from_json(std::string_view json_text) {
  auto j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::invalid_argument("mock behavior must be a JSON object");
  }
  static const std::set<std::string> known = {"translator", "dictionary", "generator", "fixed", "embed_dim",
                                              "faults", "delay_ms", "timeout_sleep_ms", "role"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("unknown mock behavior key '" + key + "'");
    }
  }
  MockBehavior b;
  try {
    if (j.contains("translator")) {
      const auto t = j["translator"].get<std::string>();
      if (t == "identity") {
        b.translator = MockTranslator::identity;
      } else if (t == "tag_prefix") {
        b.translator = MockTranslator::tag_prefix;
      } else if (t == "dictionary") {
        b.translator = MockTranslator::dictionary;
      } else {
        throw std::invalid_argument("unknown translator '" + t + "'");
      }
    }
    if (j.contains("dictionary")) {
      b.dictionary = j["dictionary"].get<std::map<std::string, std::string>>();
    }
    if (j.contains("generator")) {
      const auto g = j["generator"].get<std::string>();
      if (g == "echo") {
        b.generator = MockGenerator::echo;
      } else if (g == "fixed") {
        b.generator = MockGenerator::fixed;
      } else {
        throw std::invalid_argument("unknown generator '" + g + "'");
      }
    }
    if (j.contains("fixed")) {
      b.fixed = j["fixed"].get<std::map<std::string, std::string>>();
    }
    if (j.contains("embed_dim")) {
      b.embed_dim = j["embed_dim"].get<std::size_t>();
      if (b.embed_dim == 0) {
        throw std::invalid_argument("embed_dim must be positive");
      }
    }
    if (j.contains("faults")) {
      for (const auto& f : j["faults"]) {
        b.fault_plan.push_back({f.at("call").get<std::size_t>(), parse_fault(f.at("kind").get<std::string>())});
      }
    }
    if (j.contains("delay_ms")) {
      b.delay = std::chrono::milliseconds(j["delay_ms"].get<std::int64_t>());
    }
    if (j.contains("timeout_sleep_ms")) {
      b.timeout_sleep = std::chrono::milliseconds(j["timeout_sleep_ms"].get<std::int64_t>());
    }
    if (j.contains("role")) {
      b.role = j["role"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed mock behavior: ") + e.what());
  }
  return b;
}

MockBehavior resolve_behavior(std::string_view spec) {
  if (spec == "identity") {
    return MockBehavior{};
  }
  if (spec == "tag_prefix") {
    MockBehavior b;
    b.translator = MockTranslator::tag_prefix;
    return b;
  }
  auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && spec[first] == '{') {
    return behavior_from_json(spec);
  }
  return behavior_from_json(read_file(std::filesystem::path(std::string(spec))));
}

MockResponse handle_mock_request(const MockBehavior& behavior, std::string_view method,
                                 std::string_view path, std::string_view body, std::size_t call_index) {
  const Fault* fault = fault_at(behavior, call_index);
  if (fault) {
    switch (fault->kind) {
      case FaultKind::http_500:
      case FaultKind::http_503:
      case FaultKind::http_400: {
        const int status = fault->kind == FaultKind::http_500 ? 500 : fault->kind == FaultKind::http_503 ? 503 : 400;
        return error_response(status, "injected fault " + std::string(fault_name(fault->kind)) + " at call " +
                                          std::to_string(call_index));
      }
      case FaultKind::malformed:
        return {200, "this is not json"};
      case FaultKind::timeout:
        std::this_thread::sleep_for(behavior.timeout_sleep);
        break;
      case FaultKind::length_mismatch:
      case FaultKind::dim_mismatch:
        break;
    }
  }
  if (method == "GET" && path == "/v1/health") {
    return {200, dump(ordered_json{{"status", "ok"}, {"role", behavior.role}})};
  }
  if (method == "POST" && path == "/v1/translate") {
    return handle_translate(behavior, body, fault);
  }
  if (method == "POST" && path == "/v1/generate") {
    return handle_generate(behavior, body);
  }
  if (method == "POST" && path == "/v1/embed") {
    return handle_embed(behavior, body, fault);
  }
  return error_response(404, "no route for " + std::string(method) + " " + std::string(path));
}

MockServer::MockServer(MockBehavior behavior, int port, std::string host)
    : behavior_(std::move(behavior)), host_(std::move(host)), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::size_t index = 0;
    {
      std::lock_guard lock(log_mu_);
      index = log_.size();
      log_.push_back({req.method, req.path, req.body});
    }
    if (behavior_.delay.count() > 0) {
      std::this_thread::sleep_for(behavior_.delay);
    }
    auto out = handle_mock_request(behavior_, req.method, req.path, req.body, index);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which would let
  // a second server share a busy port instead of failing.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server_->Get(".*", handler);
  server_->Post(".*", handler);

  if (port == 0) {
    port_ = server_->bind_to_any_port(host_);
    if (port_ < 0) {
      throw std::runtime_error("mock server: cannot bind " + host_);
    }
  } else {
    if (!server_->bind_to_port(host_, port)) {
      throw std::runtime_error("mock server: port " + std::to_string(port) + " is in use");
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockServer::~MockServer() { stop(); }

std::string MockServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

std::vector<LoggedRequest> MockServer::call_log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

std::size_t MockServer::count(std::string_view path) const {
  std::lock_guard lock(log_mu_);
  return static_cast<std::size_t>(
      std::count_if(log_.begin(), log_.end(), [&](const LoggedRequest& r) { return r.path == path; }));
}

void MockServer::clear_log() {
  std::lock_guard lock(log_mu_);
  log_.clear();
}

void MockServer::stop() {
  if (server_ && server_->is_running()) {
    server_->stop();
  }
  if (thread_.joinable()) {
    thread_.join();
  }
}

}  // namespace trilingua

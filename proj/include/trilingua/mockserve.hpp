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

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace trilingua {

enum class MockTranslator { identity, tag_prefix, dictionary };
enum class MockGenerator { echo, fixed };

enum class FaultKind {
  http_500,         // 500 {"error": ...}
  http_503,         // 503 {"error": ...}
  http_400,         // 400 {"error": ...}
  timeout,          // sleeps `timeout_sleep` before answering normally
  malformed,        // 200 with a non-JSON body
  length_mismatch,  // translate: drops the last item; embed: drops the last vector
  dim_mismatch,     // embed: last vector one element short
};

struct Fault {
  std::size_t call_index = 0;  // 0-based position in the call log
  FaultKind kind = FaultKind::http_500;
};

// Deterministic backend behavior. Immutable once a server starts.
struct MockBehavior {
  MockTranslator translator = MockTranslator::identity;
  std::map<std::string, std::string> dictionary;  // tag-stripped input -> output
  MockGenerator generator = MockGenerator::echo;
  std::map<std::string, std::string> fixed;  // prompt_hash(prompt) -> completion
  std::size_t embed_dim = 16;
  std::vector<Fault> fault_plan;
  std::chrono::milliseconds delay{0};  // added to every request
  std::chrono::milliseconds timeout_sleep{1500};
  std::string role = "mock";
};

// Loads a behavior from JSON (inline text or file contents):
// {"translator": "identity"|"tag_prefix"|"dictionary", "dictionary": {...},
//  "generator": "echo"|"fixed", "fixed": {...}, "embed_dim": n,
//  "faults": [{"call": i, "kind": "http_500"|...}], "delay_ms": n,
//  "timeout_sleep_ms": n, "role": str}. Unknown keys are rejected.
MockBehavior behavior_from_json(std::string_view json_text);

// Resolves a --behavior argument: a preset name ("identity", "tag_prefix"),
// inline JSON, or a path to a JSON file.
MockBehavior resolve_behavior(std::string_view spec);

// 16 lowercase hex digits of the FNV-1a 64 hash of the prompt bytes; the key
// space of MockBehavior::fixed.
std::string prompt_hash(std::string_view prompt);

// Removes a leading "<2xx>" tag and the whitespace after it.
std::string strip_language_tag(std::string_view text);

// Unit vector for `token`, derived from a seeded hash of its bytes.
std::vector<double> hash_embedding(std::string_view token, std::size_t dim);

// Pure request handler shared by the HTTP server and tests. `call_index` is
// the request's position in the call log.
struct MockResponse {
  int status = 200;
  std::string body;
};
MockResponse handle_mock_request(const MockBehavior& behavior, std::string_view method,
                                 std::string_view path, std::string_view body, std::size_t call_index);

struct LoggedRequest {
  std::string method;
  std::string path;
  std::string body;
};

// HTTP server for the wire protocol backed by a MockBehavior. Every request is
// appended to the call log before it is answered.
class MockServer {
 public:
  // Port 0 binds any free port. Throws std::runtime_error when the port is
  // unavailable.
  explicit MockServer(MockBehavior behavior, int port = 0, std::string host = "127.0.0.1");
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  int port() const noexcept { return port_; }
  std::string base_url() const;

  std::vector<LoggedRequest> call_log() const;
  std::size_t count(std::string_view path) const;
  void clear_log();

  // Idempotent; also run by the destructor.
  void stop();

 private:
  MockBehavior behavior_;
  std::string host_;
  int port_ = 0;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  mutable std::mutex log_mu_;
  std::vector<LoggedRequest> log_;
};

}  // namespace trilingua

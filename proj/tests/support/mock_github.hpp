#pragma once

#include <atomic>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "botscan/http_transport.hpp"

namespace botscan::testing {

/// Minimal stand-in for the GitHub REST comment endpoints. Serves
/// /repos/{owner}/{name}/issues/comments and /pulls/comments from in-memory
/// payloads, honouring per_page, page and direction, and emits Link headers
/// like the real API (or omits them to exercise the page-number fallback).
class MockGithub {
 public:
  struct Options {
    std::string owner = "diem";
    std::string name = "diem";
    std::string token = "test-token";
    bool link_headers = true;
  };

  struct Scripted {
    int status = 200;
    HeaderMap headers;
    std::string body;
  };

  MockGithub(nlohmann::json issue_comments, nlohmann::json review_comments, Options options);
  MockGithub(nlohmann::json issue_comments, nlohmann::json review_comments)
      : MockGithub(std::move(issue_comments), std::move(review_comments), Options{}) {}
  ~MockGithub();

  MockGithub(const MockGithub&) = delete;
  MockGithub& operator=(const MockGithub&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::size_t request_count() const { return requests_.load(); }
  std::vector<std::string> request_log() const;

  /// Queues a canned response returned (in order) before normal handling.
  void script(Scripted response);

  static nlohmann::json load_payload(const std::filesystem::path& path);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace botscan::testing

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cfprobe/dataset.hpp"

namespace cfprobe {

struct VqaRequest {
  ImageRef image;
  std::string question;
};

struct VqaResponse {
  std::string answer;
  std::optional<double> confidence;
  std::int64_t latency_ms = 0;

  bool operator==(const VqaResponse&) const = default;
};

class ModelError : public std::runtime_error {
 public:
  enum class Kind { Timeout, MalformedResponse, TransportFailure };
  ModelError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

std::string_view model_error_name(ModelError::Kind kind);

/// A VQA model seen only through question/answer pairs. Implementations must
/// be callable from several threads at once.
class ModelEndpoint {
 public:
  virtual ~ModelEndpoint() = default;
  /// Throws ModelError.
  virtual VqaResponse answer(const VqaRequest& request) const = 0;
  /// Throws ModelError when the model is not ready to serve.
  virtual void check_health() const {}
};

/// Key used by the mock table: lowercase, punctuation dropped, single spaces.
std::string normalize_question(std::string_view question);

/// Deterministic table lookup keyed by (image_id, normalized question).
class MockModel final : public ModelEndpoint {
 public:
  explicit MockModel(std::string default_answer = "unknown");

  /// {"default": string, "entries": [{"image_id", "question", "answer"}]}
  static MockModel load(const std::filesystem::path& path);

  void set(const std::string& image_id, std::string_view question, std::string answer);
  VqaResponse answer(const VqaRequest& request) const override;

 private:
  std::string default_answer_;
  std::map<std::pair<std::string, std::string>, std::string> table_;
};

struct HttpModelOptions {
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  std::chrono::milliseconds backoff{200};  // doubled after every failed attempt
};

/// Client for the JSON protocol:
///   POST {base}/answer  {"image_id", "image_url"?, "question"} -> {"answer", "confidence"?}
///   GET  {base}/health  -> {"status": "ok"}
/// Timeouts, transport errors and 5xx replies are retried; malformed bodies
/// and 4xx replies are not.
class HttpModel final : public ModelEndpoint {
 public:
  explicit HttpModel(std::string base_url, HttpModelOptions options = {});

  VqaResponse answer(const VqaRequest& request) const override;
  void check_health() const override;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::string origin_;  // scheme://host:port
  std::string prefix_;  // path prefix without trailing slash
  HttpModelOptions options_;
};

/// Result slot of a batch item: exactly one of response / error is set.
struct BatchItem {
  std::optional<VqaResponse> response;
  std::optional<ModelError> error;

  bool ok() const { return response.has_value(); }
};

/// Answers every request with at most `parallelism` calls in flight. Output
/// order matches input order; item failures never abort the batch.
/// Throws std::invalid_argument if parallelism is 0.
std::vector<BatchItem> answer_batch(const ModelEndpoint& endpoint, std::span<const VqaRequest> requests,
                                    std::size_t parallelism);

}  // namespace cfprobe

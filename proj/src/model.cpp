#include "cfprobe/model.hpp"

#include <atomic>
#include <cctype>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cfprobe/strings.hpp"

namespace cfprobe {

using nlohmann::json;

std::string_view model_error_name(ModelError::Kind kind) {
  switch (kind) {
    case ModelError::Kind::Timeout: return "timeout";
    case ModelError::Kind::MalformedResponse: return "malformed-response";
    case ModelError::Kind::TransportFailure: return "transport-failure";
  }
  return "?";
}

std::string normalize_question(std::string_view question) {
  std::string cleaned;
  cleaned.reserve(question.size());
  for (char c : question) {
    if (std::ispunct(static_cast<unsigned char>(c)) && c != '\'' && c != '-') {
      cleaned.push_back(' ');
    } else {
      cleaned.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  std::string out;
  for (auto word : split_ws(cleaned)) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

MockModel::MockModel(std::string default_answer) : default_answer_(std::move(default_answer)) {}

MockModel MockModel::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("default") || !doc.at("default").is_string())
    throw std::runtime_error(path.string() + ": mock table needs a string 'default'");
  MockModel model(doc.at("default").get<std::string>());
  if (doc.contains("entries")) {
    for (const auto& e : doc.at("entries")) {
      if (!e.is_object() || !e.contains("image_id") || !e.contains("question") || !e.contains("answer"))
        throw std::runtime_error(path.string() + ": entries need image_id, question and answer");
      model.set(e.at("image_id").get<std::string>(), e.at("question").get<std::string>(),
                e.at("answer").get<std::string>());
    }
  }
  return model;
}

void MockModel::set(const std::string& image_id, std::string_view question, std::string answer) {
  table_[{image_id, normalize_question(question)}] = std::move(answer);
}

VqaResponse MockModel::answer(const VqaRequest& request) const {
  auto it = table_.find({request.image.image_id, normalize_question(request.question)});
  VqaResponse r;
  r.answer = it == table_.end() ? default_answer_ : it->second;
  return r;
}

namespace {

struct ParsedUrl {
  std::string origin;
  std::string prefix;
};

ParsedUrl parse_base_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0)
    throw std::invalid_argument("endpoint URL must start with http://, got '" + url + "'");
  auto slash = url.find('/', scheme.size());
  ParsedUrl p;
  p.origin = url.substr(0, slash);
  if (p.origin.size() == scheme.size()) throw std::invalid_argument("endpoint URL has no host: '" + url + "'");
  if (slash != std::string::npos) p.prefix = url.substr(slash);
  while (!p.prefix.empty() && p.prefix.back() == '/') p.prefix.pop_back();
  return p;
}

// Failures that retrying cannot fix: malformed bodies and 4xx replies.
class PermanentFailure : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace

HttpModel::HttpModel(std::string base_url, HttpModelOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  auto parsed = parse_base_url(base_url_);
  origin_ = std::move(parsed.origin);
  prefix_ = std::move(parsed.prefix);
}

namespace {

// One attempt. Clients are per call: httplib::Client is not thread-safe.
VqaResponse post_once(const std::string& origin, const std::string& path, const std::string& body,
                      std::chrono::milliseconds timeout) {
  httplib::Client client(origin);
  const auto secs = timeout.count() / 1000;
  const auto usecs = (timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path, body, "application/json");
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= timeout * 9 / 10);
    throw ModelError(timed_out ? ModelError::Kind::Timeout : ModelError::Kind::TransportFailure,
                     "POST " + origin + path + ": " + httplib::to_string(err));
  }
  if (res->status >= 400 && res->status < 500)
    throw PermanentFailure(ModelError::Kind::TransportFailure,
                           "POST " + origin + path + ": HTTP " + std::to_string(res->status));
  if (res->status != 200)
    throw ModelError(ModelError::Kind::TransportFailure,
                     "POST " + origin + path + ": HTTP " + std::to_string(res->status));

  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::exception&) {
    throw PermanentFailure(ModelError::Kind::MalformedResponse, "response body is not JSON");
  }
  if (!doc.is_object() || !doc.contains("answer") || !doc.at("answer").is_string() ||
      doc.at("answer").get<std::string>().empty())
    throw PermanentFailure(ModelError::Kind::MalformedResponse, "response lacks a non-empty string 'answer'");
  VqaResponse r;
  r.answer = doc.at("answer").get<std::string>();
  if (doc.contains("confidence") && doc.at("confidence").is_number()) {
    const double c = doc.at("confidence").get<double>();
    if (c < 0.0 || c > 1.0) throw PermanentFailure(ModelError::Kind::MalformedResponse, "confidence outside [0,1]");
    r.confidence = c;
  }
  r.latency_ms = elapsed.count();
  return r;
}

}  // namespace

VqaResponse HttpModel::answer(const VqaRequest& request) const {
  json body{{"image_id", request.image.image_id}, {"question", request.question}};
  if (!request.image.locator.empty()) body["image_url"] = request.image.locator;
  const std::string payload = body.dump();
  const std::string path = prefix_ + "/answer";

  auto backoff = options_.backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      return post_once(origin_, path, payload, options_.timeout);
    } catch (const PermanentFailure& e) {
      throw ModelError(e.kind(), e.what());
    } catch (const ModelError&) {
      if (attempt >= options_.max_retries) throw;
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

void HttpModel::check_health() const {
  httplib::Client client(origin_);
  const auto secs = options_.timeout.count() / 1000;
  const auto usecs = (options_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  auto res = client.Get(prefix_ + "/health");
  if (!res)
    throw ModelError(ModelError::Kind::TransportFailure,
                     "health check " + base_url_ + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ModelError(ModelError::Kind::TransportFailure,
                     "health check " + base_url_ + ": HTTP " + std::to_string(res->status));
  try {
    auto doc = json::parse(res->body);
    if (doc.value("status", "") != "ok") throw ModelError(ModelError::Kind::MalformedResponse, "status is not ok");
  } catch (const json::exception&) {
    throw ModelError(ModelError::Kind::MalformedResponse, "health response is not JSON");
  }
}

std::vector<BatchItem> answer_batch(const ModelEndpoint& endpoint, std::span<const VqaRequest> requests,
                                    std::size_t parallelism) {
  if (parallelism == 0) throw std::invalid_argument("parallelism must be at least 1");
  std::vector<BatchItem> results(requests.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      try {
        results[i].response = endpoint.answer(requests[i]);
      } catch (const ModelError& e) {
        results[i].error = e;
      } catch (const std::exception& e) {
        results[i].error = ModelError(ModelError::Kind::TransportFailure, e.what());
      }
    }
  };

  const std::size_t workers = std::min(parallelism, requests.size());
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();  // joins
  return results;
}

}  // namespace cfprobe

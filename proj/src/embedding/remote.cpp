#include "chatmpc/embedding/remote.hpp"

#include <httplib.h>

#include <json.hpp>

#include "chatmpc/error.hpp"

namespace chatmpc::embedding {
namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& sem_;
};

}  // namespace

RemoteEmbedder::RemoteEmbedder(RemoteConfig config) : config_(std::move(config)) {
  if (config_.max_in_flight < 1 || config_.max_in_flight > 1024) {
    throw ConfigError("remote embedder in-flight limit must be in [1, 1024]");
  }
  const auto scheme_end = config_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("remote embedder URL needs a scheme: " + config_.url);
  const auto path_start = config_.url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.url.substr(0, path_start);
  std::string base = path_start == std::string::npos ? "" : config_.url.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  path_ = base + "/embed";
  in_flight_ = std::make_unique<std::counting_semaphore<1024>>(config_.max_in_flight);
}

RemoteEmbedder::~RemoteEmbedder() = default;

Embedding RemoteEmbedder::raw_embed(std::string_view text) const {
  SlotGuard slot(*in_flight_);
  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const nlohmann::json body = {{"text", std::string(text)}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw RetriableError("embedding service unreachable at " + config_.url + ": " + httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw RetriableError("embedding service returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw ConfigError("embedding service rejected request with HTTP " + std::to_string(res->status));
  }

  Embedding e;
  try {
    const auto doc = nlohmann::json::parse(res->body);
    e.values = doc.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed embedding response: ") + ex.what());
  }
  if (e.values.empty()) throw ConfigError("embedding service returned an empty vector");

  std::size_t expected = 0;
  if (!dim_.compare_exchange_strong(expected, e.values.size()) && expected != e.values.size()) {
    throw ConfigError("embedding service changed dimension from " + std::to_string(expected) + " to " +
                      std::to_string(e.values.size()));
  }
  return e;
}

}  // namespace chatmpc::embedding

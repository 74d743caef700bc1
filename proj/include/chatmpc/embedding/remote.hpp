#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "chatmpc/embedding/embedding.hpp"

namespace chatmpc::embedding {

struct RemoteConfig {
  /// Base URL, e.g. "http://127.0.0.1:9000"; requests go to <base>/embed.
  std::string url;
  std::chrono::milliseconds timeout{10000};
  int max_in_flight = 4;
};

/// Client for an external embedding service.
///
///   POST <base>/embed   {"text": "..."}  ->  {"values": [ ... ]}
///
/// Transport failures and 5xx answers raise RetriableError; a malformed or
/// rejected exchange raises ConfigError. The dimension is learned from the
/// first response and enforced afterwards.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteConfig config);
  ~RemoteEmbedder() override;

  std::string name() const override { return "remote:" + config_.url; }
  std::size_t dim() const override { return dim_.load(); }
  Embedding raw_embed(std::string_view text) const override;

 private:
  RemoteConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  mutable std::atomic<std::size_t> dim_{0};
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace chatmpc::embedding

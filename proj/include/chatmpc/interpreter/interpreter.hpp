#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "chatmpc/embedding/embedding.hpp"
#include "chatmpc/params.hpp"

namespace chatmpc::interpreter {

/// Per-parameter direction, each component in {-1, 0, +1}: [vase, toy].
using Marker = std::array<int, 2>;

struct UpdateMarker {
  Marker s{0, 0};
  double confidence = 0.0;
  bool recognized = false;

  bool operator==(const UpdateMarker&) const = default;
};

struct TrainExample {
  std::string prompt;
  Marker marker;
};

enum class UpdateMode { Multiplicative, Additive };

struct UpdateConfig {
  std::array<double, 2> d{2.0, 2.0};
  UpdateMode mode = UpdateMode::Multiplicative;
  double similarity_threshold = 0.35;

  void validate() const;
};

/// The four intents of the shipped corpus, in declaration order:
/// away from vase, towards vase, away from toy, towards toy.
std::vector<Marker> default_classes();

bool is_valid_marker(const Marker& m);

/// Nearest-centroid classifier over prompt embeddings.
class IntentClassifier {
 public:
  IntentClassifier(std::shared_ptr<const embedding::EmbeddingProvider> provider, std::vector<Marker> classes,
                   std::vector<embedding::Embedding> centroids);

  const std::vector<Marker>& classes() const { return classes_; }
  const std::vector<embedding::Embedding>& centroids() const { return centroids_; }
  const embedding::EmbeddingProvider& provider() const { return *provider_; }

  /// Index of the most similar centroid (first on ties) and its similarity.
  std::pair<std::size_t, double> nearest(const embedding::Embedding& e) const;

 private:
  std::shared_ptr<const embedding::EmbeddingProvider> provider_;
  std::vector<Marker> classes_;
  std::vector<embedding::Embedding> centroids_;
};

/// Centroid of each class = normalized mean of its example embeddings.
/// Throws ConfigError when a class has no examples or an example carries a
/// marker outside `classes`.
IntentClassifier train_classifier(const std::vector<TrainExample>& examples,
                                  std::shared_ptr<const embedding::EmbeddingProvider> provider,
                                  std::vector<Marker> classes = default_classes());

/// Blank prompts and prompts whose best similarity is below `threshold`
/// produce a zero, unrecognized marker.
UpdateMarker extract_intent(const IntentClassifier& classifier, std::string_view prompt, double threshold = 0.35);

/// Multiplicative: theta' = d^s * theta (element-wise). Additive: theta' = theta + d * s.
/// The result is clamped to [ParamVector::kMin, ParamVector::kMax]; unrecognized
/// markers leave theta unchanged.
ParamVector update_parameters(const ParamVector& theta, const UpdateMarker& s, const UpdateConfig& cfg);

struct Interpretation {
  UpdateMarker marker;
  ParamVector theta_before;
  ParamVector theta_after;
};

/// Intent extractor followed by parameter updater.
class Interpreter {
 public:
  Interpreter(IntentClassifier classifier, UpdateConfig config);

  Interpretation interpret(std::string_view prompt, const ParamVector& theta) const;
  UpdateMarker extract(std::string_view prompt) const;

  const IntentClassifier& classifier() const { return classifier_; }
  const UpdateConfig& config() const { return config_; }

 private:
  IntentClassifier classifier_;
  UpdateConfig config_;
};

/// The shipped training corpus: five prompts for each of the four intents.
const std::vector<TrainExample>& builtin_corpus();

/// JSON Lines, one {"prompt": string, "marker": [int, int]} per line; blank lines ignored.
std::vector<TrainExample> parse_corpus(std::string_view text);
std::vector<TrainExample> load_corpus(const std::string& path);
std::string corpus_to_jsonl(const std::vector<TrainExample>& examples);

std::string marker_to_string(const Marker& m);

}  // namespace chatmpc::interpreter

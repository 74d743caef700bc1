#include "chatmpc/interpreter/interpreter.hpp"

#include <algorithm>
#include <cmath>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"

namespace chatmpc::interpreter {

void UpdateConfig::validate() const {
  for (double di : d) {
    if (!(di > 0.0) || !std::isfinite(di)) throw ConfigError("update constant components must be positive");
  }
  if (!std::isfinite(similarity_threshold)) throw ConfigError("similarity threshold must be finite");
}

std::vector<Marker> default_classes() { return {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}; }

bool is_valid_marker(const Marker& m) {
  return std::all_of(m.begin(), m.end(), [](int v) { return v >= -1 && v <= 1; });
}

IntentClassifier::IntentClassifier(std::shared_ptr<const embedding::EmbeddingProvider> provider,
                                   std::vector<Marker> classes, std::vector<embedding::Embedding> centroids)
    : provider_(std::move(provider)), classes_(std::move(classes)), centroids_(std::move(centroids)) {
  if (!provider_) throw ConfigError("classifier needs an embedding provider");
  if (classes_.size() != centroids_.size()) throw ConfigError("one centroid per class required");
}

std::pair<std::size_t, double> IntentClassifier::nearest(const embedding::Embedding& e) const {
  std::size_t best = 0;
  double best_sim = -2.0;
  for (std::size_t k = 0; k < centroids_.size(); ++k) {
    const double sim = embedding::cosine_similarity(e, centroids_[k]);
    if (sim > best_sim) {
      best = k;
      best_sim = sim;
    }
  }
  return {best, best_sim};
}

IntentClassifier train_classifier(const std::vector<TrainExample>& examples,
                                  std::shared_ptr<const embedding::EmbeddingProvider> provider,
                                  std::vector<Marker> classes) {
  if (!provider) throw ConfigError("classifier needs an embedding provider");
  if (classes.empty()) throw ConfigError("classifier needs at least one class");
  std::vector<std::vector<double>> sums(classes.size());
  std::vector<std::size_t> counts(classes.size(), 0);

  for (const auto& ex : examples) {
    const auto it = std::find(classes.begin(), classes.end(), ex.marker);
    if (it == classes.end()) {
      throw ConfigError("training example '" + ex.prompt + "' has marker " + marker_to_string(ex.marker) +
                        " outside the configured classes");
    }
    const auto k = static_cast<std::size_t>(it - classes.begin());
    const embedding::Embedding e = embedding::embed(*provider, ex.prompt);
    if (e.empty) throw ConfigError("training example '" + ex.prompt + "' has no features");
    if (sums[k].empty()) sums[k].assign(e.dim(), 0.0);
    kernels::axpy(1.0, e.values, sums[k]);
    ++counts[k];
  }

  std::vector<embedding::Embedding> centroids;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (counts[k] == 0) {
      throw ConfigError("class " + marker_to_string(classes[k]) + " has no training examples");
    }
    kernels::scale(1.0 / static_cast<double>(counts[k]), sums[k]);
    embedding::normalize(sums[k]);
    centroids.push_back({std::move(sums[k]), false});
  }
  return IntentClassifier(std::move(provider), std::move(classes), std::move(centroids));
}

UpdateMarker extract_intent(const IntentClassifier& classifier, std::string_view prompt, double threshold) {
  const embedding::Embedding e = embedding::embed(classifier.provider(), prompt);
  if (e.empty) return {};
  const auto [k, sim] = classifier.nearest(e);
  if (sim < threshold) return {{0, 0}, std::max(0.0, sim), false};
  return {classifier.classes()[k], sim, true};
}

ParamVector update_parameters(const ParamVector& theta, const UpdateMarker& s, const UpdateConfig& cfg) {
  if (!s.recognized) return theta;
  if (!is_valid_marker(s.s)) throw ContractViolation("marker components must be in {-1, 0, +1}");
  const std::array<double, 2> before{theta.gamma_vase, theta.gamma_toy};
  std::array<double, 2> after{};
  for (std::size_t i = 0; i < 2; ++i) {
    if (cfg.mode == UpdateMode::Multiplicative) {
      after[i] = std::pow(cfg.d[i], s.s[i]) * before[i];
    } else {
      after[i] = before[i] + cfg.d[i] * s.s[i];
    }
    after[i] = std::clamp(after[i], ParamVector::kMin, ParamVector::kMax);
  }
  return {after[0], after[1]};
}

Interpreter::Interpreter(IntentClassifier classifier, UpdateConfig config)
    : classifier_(std::move(classifier)), config_(config) {
  config_.validate();
}

UpdateMarker Interpreter::extract(std::string_view prompt) const {
  return extract_intent(classifier_, prompt, config_.similarity_threshold);
}

Interpretation Interpreter::interpret(std::string_view prompt, const ParamVector& theta) const {
  Interpretation out;
  out.marker = extract(prompt);
  out.theta_before = theta;
  out.theta_after = update_parameters(theta, out.marker, config_);
  return out;
}

std::string marker_to_string(const Marker& m) {
  auto one = [](int v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); };
  return "[" + one(m[0]) + ", " + one(m[1]) + "]";
}

}  // namespace chatmpc::interpreter

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace chatmpc::embedding {

/// Sentence embedding; unit L2 norm, or all zeros with `empty` set for text
/// that contains no features.
struct Embedding {
  std::vector<double> values;
  bool empty = false;

  std::size_t dim() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  /// 0 when the dimension is not known until the first response.
  virtual std::size_t dim() const = 0;
  /// Deterministic for a fixed provider configuration. Implementations may
  /// return unnormalized vectors; `embed` normalizes.
  virtual Embedding raw_embed(std::string_view text) const = 0;
};

/// Validates UTF-8, short-circuits blank text to an empty embedding and
/// L2-normalizes the provider output.
Embedding embed(const EmbeddingProvider& provider, std::string_view text);

/// Standard cosine; 0 if either vector is zero. Throws ContractViolation on
/// dimension mismatch.
double cosine_similarity(const Embedding& a, const Embedding& b);

/// L2-normalizes in place; leaves zero vectors untouched. Returns the norm.
double normalize(std::vector<double>& values);

bool is_valid_utf8(std::string_view text);
bool is_blank(std::string_view text);

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hashed bag of word unigrams and character 3-grams.
///
/// Text is lowercased (ASCII), ASCII punctuation is removed and the remainder
/// split on whitespace. Every token contributes the feature "w:<token>" and
/// each 3-byte window of the token contributes "c:<window>". A feature lands
/// in bucket fnv1a64(feature) % dim with sign + when the hash has even
/// popcount and - otherwise; bucket values are summed term frequencies.
class BuiltinEmbedder final : public EmbeddingProvider {
 public:
  explicit BuiltinEmbedder(std::size_t dim = 512);

  std::string name() const override { return "builtin"; }
  std::size_t dim() const override { return dim_; }
  Embedding raw_embed(std::string_view text) const override;

  static std::vector<std::string> tokenize(std::string_view text);
  static std::vector<std::string> features(std::string_view text);

 private:
  std::size_t dim_;
};

}  // namespace chatmpc::embedding

#include "chatmpc/embedding/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <string>

#include "chatmpc/error.hpp"
#include "chatmpc/kernels/kernels.hpp"

namespace chatmpc::embedding {

bool is_valid_utf8(std::string_view text) {
  std::size_t i = 0;
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char c = s[i];
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

bool is_blank(std::string_view text) {
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double normalize(std::vector<double>& values) {
  const double norm = std::sqrt(kernels::sum_squares(values));
  if (norm > 0.0) kernels::scale(1.0 / norm, values);
  return norm;
}

Embedding embed(const EmbeddingProvider& provider, std::string_view text) {
  if (!is_valid_utf8(text)) throw ContractViolation("embedding input is not valid UTF-8");
  if (is_blank(text)) return {std::vector<double>(provider.dim(), 0.0), true};
  Embedding e = provider.raw_embed(text);
  for (double v : e.values) {
    if (!std::isfinite(v)) throw ContractViolation("provider " + provider.name() + " returned a non-finite value");
  }
  if (normalize(e.values) == 0.0) e.empty = true;
  return e;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw ContractViolation("embedding dimensions differ: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  const double na = kernels::sum_squares(a.values);
  const double nb = kernels::sum_squares(b.values);
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = kernels::dot(a.values, b.values) / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

BuiltinEmbedder::BuiltinEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw ContractViolation("embedding dimension must be positive");
}

std::vector<std::string> BuiltinEmbedder::tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else if (c < 0x80 && std::ispunct(c)) {
      continue;
    } else {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::string> BuiltinEmbedder::features(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(text)) {
    out.push_back("w:" + tok);
    for (std::size_t i = 0; i + 3 <= tok.size(); ++i) out.push_back("c:" + tok.substr(i, 3));
  }
  return out;
}

Embedding BuiltinEmbedder::raw_embed(std::string_view text) const {
  Embedding e{std::vector<double>(dim_, 0.0), false};
  for (const auto& f : features(text)) {
    const std::uint64_t h = fnv1a64(f);
    const double sign = (std::popcount(h) % 2 == 0) ? 1.0 : -1.0;
    e.values[static_cast<std::size_t>(h % dim_)] += sign;
  }
  return e;
}

}  // namespace chatmpc::embedding

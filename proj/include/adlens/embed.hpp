#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "adlens/corpus.hpp"

namespace adlens::embed {

using Vector = std::vector<double>;

// Immutable-after-load mapping from keys (ad ids, "theme:<name>:<idx>",
// "<adid>#<pos>") to vectors of one shared dimension.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  // Throws on dimension mismatch or non-finite components.
  void insert(std::string key, Vector vector);
  const Vector* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  std::vector<std::string> sorted_keys() const;

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Vector> vectors_;
};

EmbeddingStore load_store(const std::filesystem::path& path);
EmbeddingStore parse_store(std::istream& in);
void write_store(std::ostream& out, const EmbeddingStore& store);

// Signed feature hashing over lowercased alphanumeric tokens, L2-normalised.
// Text without tokens maps to the zero vector.
Vector hashed_embedding(std::string_view text, std::size_t dim, std::uint64_t seed);

// Dense pseudo-random unit vector derived from the token's hash. Used for
// per-position token inputs when no stored token vector exists.
Vector hashed_token_vector(std::string_view token, std::size_t dim, std::uint64_t seed);

struct FallbackEncoder {
  std::size_t dim = 64;
  std::uint64_t seed = 0;
};

// Where vectors come from: a sidecar store (borrowed, must outlive this),
// a hashing fallback, or both (store first).
struct EmbeddingSource {
  const EmbeddingStore* store = nullptr;
  std::optional<FallbackEncoder> fallback;

  std::size_t dim() const;
};

// Stored vector under `key`, else hashed_embedding(text); throws kNotFound
// when neither is available.
Vector lookup_or_hash(std::string_view key, std::string_view text, const EmbeddingSource& source);

Vector doc_vector(const corpus::AdRecord& ad, const EmbeddingSource& source);

double l2_norm(std::span<const double> v);

// Clamped to [-1, 1]; throws kDegenerate ("undefined similarity") when
// either vector has zero norm.
double cosine_similarity(std::span<const double> u, std::span<const double> v);
inline double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return 1.0 - cosine_similarity(u, v);
}

struct TokenSequence {
  Eigen::MatrixXd tokens;  // dim x n, one column per position; pads are zero
  std::vector<bool> mask;  // true for real tokens; real tokens precede pads

  std::size_t size() const { return mask.size(); }
  std::size_t real_count() const;
  std::size_t dim() const { return static_cast<std::size_t>(tokens.rows()); }
};

TokenSequence token_sequence(std::string_view ad_id, std::string_view body, std::size_t n,
                             const EmbeddingSource& source);

}  // namespace adlens::embed

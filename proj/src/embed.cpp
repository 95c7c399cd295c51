#include "adlens/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "adlens/rng.hpp"
#include "adlens/text.hpp"

namespace adlens::embed {
namespace {

std::uint64_t token_hash(std::string_view token, std::uint64_t seed) {
  std::uint64_t s = seed;
  return text::fnv1a64(token, 0xcbf29ce484222325ULL ^ splitmix64(s));
}

// Lowercased runs of ASCII letters and digits.
std::vector<std::string> hash_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

void normalize(Vector& v) {
  const double n = l2_norm(v);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
}

void EmbeddingStore::insert(std::string key, Vector vector) {
  if (vector.size() != dim_) {
    throw Error(ErrorCode::kInvalidArgument, "vector for \"" + key + "\" has dim " +
                                                 std::to_string(vector.size()) + ", store dim is " +
                                                 std::to_string(dim_));
  }
  for (double x : vector) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNumeric, "vector for \"" + key + "\" has a non-finite component");
    }
  }
  vectors_[std::move(key)] = std::move(vector);
}

const Vector* EmbeddingStore::find(std::string_view key) const {
  auto it = vectors_.find(std::string(key));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<std::string> EmbeddingStore::sorted_keys() const {
  std::vector<std::string> keys;
  keys.reserve(vectors_.size());
  for (const auto& [k, v] : vectors_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

EmbeddingStore parse_store(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingStore> store;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (!store) {
      const auto header = text::trim(line);
      std::size_t dim = 0;
      if (header.rfind("dim=", 0) != 0 ||
          std::from_chars(header.data() + 4, header.data() + header.size(), dim).ec != std::errc() ||
          dim == 0) {
        throw Error(ErrorCode::kParse, where + "expected header \"dim=<D>\"");
      }
      store.emplace(dim);
      continue;
    }
    if (text::trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kParse, where + "expected <key>\\t<values>");
    std::string key = line.substr(0, tab);
    Vector values;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p >= end) break;
      double x = 0.0;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) {
        throw Error(ErrorCode::kParse, where + "unparseable component for key \"" + key + "\"");
      }
      values.push_back(x);
      p = next;
    }
    try {
      store->insert(std::move(key), std::move(values));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.what());
    }
  }
  if (!store) throw Error(ErrorCode::kParse, "embedding file lacks \"dim=<D>\" header");
  return std::move(*store);
}

EmbeddingStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open embedding file " + path.string());
  return parse_store(in);
}

void write_store(std::ostream& out, const EmbeddingStore& store) {
  out << "dim=" << store.dim() << '\n';
  char buf[32];
  for (const auto& key : store.sorted_keys()) {
    out << key << '\t';
    const Vector& v = *store.find(key);
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto res = std::to_chars(buf, buf + sizeof(buf), v[i]);
      if (i) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

Vector hashed_embedding(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
  Vector v(dim, 0.0);
  for (const auto& token : hash_tokens(text)) {
    const std::uint64_t h = token_hash(token, seed);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[(h & 0x7fffffffffffffffULL) % dim] += sign;
  }
  normalize(v);
  return v;
}

Vector hashed_token_vector(std::string_view token, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
  Vector v(dim, 0.0);
  if (token.empty()) return v;
  std::uint64_t state = token_hash(token, seed);
  for (double& x : v) {
    x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  normalize(v);
  return v;
}

std::size_t EmbeddingSource::dim() const {
  if (store) return store->dim();
  if (fallback) return fallback->dim;
  throw Error(ErrorCode::kInvalidArgument, "embedding source has neither store nor fallback");
}

Vector lookup_or_hash(std::string_view key, std::string_view text, const EmbeddingSource& source) {
  if (source.store) {
    if (const Vector* v = source.store->find(key)) return *v;
  }
  if (!source.fallback) {
    throw Error(ErrorCode::kNotFound,
                "no embedding for \"" + std::string(key) + "\" and no fallback encoder configured");
  }
  if (source.store && source.store->dim() != source.fallback->dim) {
    throw Error(ErrorCode::kInvalidArgument, "fallback dim differs from embedding store dim");
  }
  return hashed_embedding(text, source.fallback->dim, source.fallback->seed);
}

Vector doc_vector(const corpus::AdRecord& ad, const EmbeddingSource& source) {
  return lookup_or_hash(ad.id, ad.body, source);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine similarity needs equal dimensions");
  }
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kDegenerate, "undefined similarity: zero-norm vector");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

std::size_t TokenSequence::real_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

TokenSequence token_sequence(std::string_view ad_id, std::string_view body, std::size_t n,
                             const EmbeddingSource& source) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sequence length must be positive");
  const std::size_t dim = source.dim();
  TokenSequence seq;
  seq.tokens = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  seq.mask.assign(n, false);
  const auto tokens = text::whitespace_tokens(body);
  const std::size_t used = std::min(n, tokens.size());
  for (std::size_t pos = 0; pos < used; ++pos) {
    const Vector* stored = nullptr;
    if (source.store) {
      stored = source.store->find(std::string(ad_id) + "#" + std::to_string(pos));
    }
    Vector v;
    if (stored) {
      v = *stored;
    } else if (source.fallback) {
      v = hashed_token_vector(text::clean_token(tokens[pos]), dim, source.fallback->seed);
    } else {
      throw Error(ErrorCode::kNotFound, "no token vector for \"" + std::string(ad_id) + "#" +
                                            std::to_string(pos) + "\" and no fallback encoder");
    }
    for (std::size_t i = 0; i < dim; ++i) {
      seq.tokens(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pos)) = v[i];
    }
    seq.mask[pos] = true;
  }
  return seq;
}

}  // namespace adlens::embed

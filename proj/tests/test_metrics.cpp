#include <doctest.h>

#include <set>
#include <vector>

#include "adlens/error.hpp"
#include "adlens/metrics.hpp"
#include "adlens/rng.hpp"

using namespace adlens;

namespace {

// Confusion-matrix oracle over classes that occur in gold.
TaskMetrics oracle(const std::vector<int>& gold, const std::vector<int>& pred, int k) {
  std::vector<std::vector<int>> cm(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k) + 1, 0));
  int correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int p = pred[i] >= 0 && pred[i] < k ? pred[i] : k;
    ++cm[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(p)];
    correct += gold[i] == pred[i] ? 1 : 0;
  }
  TaskMetrics m;
  m.n = gold.size();
  m.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  double sum = 0;
  for (int c = 0; c < k; ++c) {
    int support = 0;
    int predicted = 0;
    for (int j = 0; j <= k; ++j) support += cm[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
    for (int g = 0; g < k; ++g) predicted += cm[static_cast<std::size_t>(g)][static_cast<std::size_t>(c)];
    if (support == 0) continue;
    const int tp = cm[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / static_cast<double>(support + predicted);
    m.per_class_f1.emplace_back(c, f1);
    sum += f1;
  }
  m.macro_f1 = sum / static_cast<double>(m.per_class_f1.size());
  return m;
}

}  // namespace

TEST_CASE("metrics agree with a confusion-matrix oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 14));
    const std::size_t n = 1 + uniform_index(rng, 60);
    std::vector<int> gold;
    std::vector<int> pred;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k))));
      // Occasionally an out-of-range prediction, like an unassigned weak label.
      pred.push_back(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k) + 1)));
    }
    const auto got = classification_metrics(gold, pred, k);
    const auto want = oracle(gold, pred, k);
    CHECK(got.n == want.n);
    CHECK(got.accuracy == doctest::Approx(want.accuracy).epsilon(1e-12));
    CHECK(got.macro_f1 == doctest::Approx(want.macro_f1).epsilon(1e-12));
    REQUIRE(got.per_class_f1.size() == want.per_class_f1.size());
    for (std::size_t i = 0; i < got.per_class_f1.size(); ++i) {
      CHECK(got.per_class_f1[i].first == want.per_class_f1[i].first);
      CHECK(got.per_class_f1[i].second == doctest::Approx(want.per_class_f1[i].second).epsilon(1e-12));
    }
  }
}

TEST_CASE("hand-computed anchors") {
  const std::vector<int> gold = {0, 0, 1, 1};
  const std::vector<int> perfect = {0, 0, 1, 1};
  const auto m = classification_metrics(gold, perfect, 2);
  CHECK(m.accuracy == 1.0);
  CHECK(m.macro_f1 == 1.0);
  const std::vector<int> all_zero = {0, 0, 0, 0};
  const auto z = classification_metrics(gold, all_zero, 2);
  CHECK(z.accuracy == doctest::Approx(0.5));
  // Class 0: P = 0.5, R = 1, F1 = 2/3. Class 1: F1 = 0.
  CHECK(z.macro_f1 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("invalid inputs") {
  const std::vector<int> a = {0, 1};
  const std::vector<int> b = {0};
  CHECK_THROWS_AS(classification_metrics(a, b, 2), Error);
  const std::vector<int> empty;
  CHECK_THROWS_AS(classification_metrics(empty, empty, 2), Error);
  const std::vector<int> bad_gold = {5};
  const std::vector<int> p = {0};
  CHECK_THROWS_AS(classification_metrics(bad_gold, p, 2), Error);
}

#include "adlens/metrics.hpp"

#include "adlens/error.hpp"

namespace adlens {

TaskMetrics classification_metrics(std::span<const int> gold, std::span<const int> predicted,
                                   int num_classes) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gold and predicted lengths differ");
  }
  if (gold.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot score an empty label set");
  const auto k = static_cast<std::size_t>(num_classes);
  std::vector<double> tp(k, 0.0), gold_count(k, 0.0), pred_count(k, 0.0);
  double correct = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = gold[i];
    const int p = predicted[i];
    if (g < 0 || g >= num_classes) {
      throw Error(ErrorCode::kInvalidArgument, "gold label outside class range");
    }
    gold_count[static_cast<std::size_t>(g)] += 1.0;
    if (p >= 0 && p < num_classes) pred_count[static_cast<std::size_t>(p)] += 1.0;
    if (g == p) {
      tp[static_cast<std::size_t>(g)] += 1.0;
      correct += 1.0;
    }
  }
  TaskMetrics m;
  m.n = gold.size();
  m.accuracy = correct / static_cast<double>(gold.size());
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (gold_count[c] == 0.0) continue;
    const double denom = gold_count[c] + pred_count[c];
    const double f1 = denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
    m.per_class_f1.emplace_back(static_cast<int>(c), f1);
    f1_sum += f1;
  }
  m.macro_f1 = f1_sum / static_cast<double>(m.per_class_f1.size());
  return m;
}

}  // namespace adlens

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace adlens {

struct TaskMetrics {
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // (class index, F1) for every class present in the gold labels, ascending.
  std::vector<std::pair<int, double>> per_class_f1;
};

// Predictions outside [0, num_classes) count as wrong (e.g. an unassigned
// weak label). Macro-F1 averages over classes that occur in `gold`; a
// present class that is never predicted scores F1 = 0.
TaskMetrics classification_metrics(std::span<const int> gold, std::span<const int> predicted,
                                   int num_classes);

}  // namespace adlens

#include "adlens/weaklabel.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace adlens::weaklabel {

ThemeAssignment assign_theme(std::span<const double> doc, const PhraseBank& bank, double threshold) {
  if (bank.phrases.empty()) throw Error(ErrorCode::kInvalidArgument, "empty phrase bank");
  if (embed::l2_norm(doc) == 0.0) {
    throw Error(ErrorCode::kDegenerate, "zero-norm document vector cannot be assigned a theme");
  }
  ThemeAssignment best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bank.phrases.size(); ++i) {
    const double d = embed::cosine_distance(doc, bank.phrases[i].vector);
    if (d < best.distance) {
      best.distance = d;
      best.phrase_index = i;
    }
  }
  best.theme = best.distance <= threshold ? bank.phrases[best.phrase_index].theme : Theme::kUnassigned;
  return best;
}

double silhouette_score(std::span<const int> labels, std::span<const embed::Vector> points) {
  if (labels.size() != points.size()) {
    throw Error(ErrorCode::kInvalidArgument, "silhouette: labels and points differ in length");
  }
  std::map<int, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < labels.size(); ++i) clusters[labels[i]].push_back(i);
  if (clusters.size() < 2) {
    throw Error(ErrorCode::kDegenerate, "silhouette needs at least two non-empty clusters");
  }
  const std::size_t n = points.size();
  // Pairwise cosine distances, computed once from normalised copies.
  std::vector<embed::Vector> unit(points.begin(), points.end());
  for (auto& v : unit) {
    const double norm = embed::l2_norm(v);
    if (norm == 0.0) throw Error(ErrorCode::kDegenerate, "silhouette: zero-norm point");
    for (double& x : v) x /= norm;
  }
  const auto distance = [&](std::size_t i, std::size_t j) {
    double dot = 0.0;
    for (std::size_t k = 0; k < unit[i].size(); ++k) dot += unit[i][k] * unit[j][k];
    return 1.0 - std::clamp(dot, -1.0, 1.0);
  };
  double total = 0.0;
  std::vector<double> sums;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& own = clusters.at(labels[i]);
    if (own.size() == 1) continue;
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, members] : clusters) {
      double s = 0.0;
      for (std::size_t j : members) {
        if (j != i) s += distance(i, j);
      }
      if (label == labels[i]) {
        a = s / static_cast<double>(members.size() - 1);
      } else {
        b = std::min(b, s / static_cast<double>(members.size()));
      }
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

double silhouette(const std::map<std::string, Theme>& assignments,
                  const std::map<std::string, embed::Vector>& vectors) {
  std::vector<int> labels;
  std::vector<embed::Vector> points;
  for (const auto& [id, theme] : assignments) {
    if (theme == Theme::kUnassigned) continue;
    auto it = vectors.find(id);
    if (it == vectors.end()) {
      throw Error(ErrorCode::kNotFound, "silhouette: no vector for \"" + id + "\"");
    }
    labels.push_back(index_of(theme));
    points.push_back(it->second);
  }
  return silhouette_score(labels, points);
}

QualityReport weak_quality(const std::map<std::string, corpus::LabelPair>& weak,
                           const std::map<std::string, corpus::LabelPair>& gold) {
  std::vector<int> theme_gold, theme_pred, mf_gold, mf_pred;
  for (const auto& [id, g] : gold) {
    auto it = weak.find(id);
    if (it == weak.end()) continue;
    const corpus::LabelPair& w = it->second;
    if (g.theme != Theme::kUnassigned) {
      theme_gold.push_back(index_of(g.theme));
      theme_pred.push_back(index_of(w.theme));  // Unassigned = 15, always wrong
    }
    mf_gold.push_back(index_of(g.mf));
    mf_pred.push_back(index_of(w.mf));
  }
  if (mf_gold.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "weak and gold labels share no ad ids");
  }
  QualityReport report;
  if (!theme_gold.empty()) {
    report.theme = classification_metrics(theme_gold, theme_pred, static_cast<int>(kThemeCount));
  }
  report.mf = classification_metrics(mf_gold, mf_pred, static_cast<int>(kMfClassCount));
  return report;
}

WeakLabelRun generate_weak_labels(const corpus::Dataset& dataset, const Lexicon& lexicon,
                                  const PhraseBank& bank, const embed::EmbeddingSource& source,
                                  double threshold) {
  WeakLabelRun run;
  std::vector<int> cluster_labels;
  std::vector<embed::Vector> cluster_points;
  for (const corpus::AdRecord& ad : dataset.records) {
    embed::Vector doc = embed::doc_vector(ad, source);
    corpus::LabelPair label;
    label.ad_id = ad.id;
    label.source = LabelSource::kWeak;
    double distance = 1.0;
    if (embed::l2_norm(doc) > 0.0) {
      const ThemeAssignment a = assign_theme(doc, bank, threshold);
      label.theme = a.theme;
      distance = a.distance;
    }
    const MfCounts counts = score_mf(ad.body, lexicon);
    label.mf = assign_mf(counts, lexicon.liberty_min);
    if (label.theme != Theme::kUnassigned) {
      cluster_labels.push_back(index_of(label.theme));
      cluster_points.push_back(std::move(doc));
    }
    run.labels.push_back(std::move(label));
    run.distances.push_back(distance);
    run.mf_counts.push_back(counts);
  }
  std::set<int> distinct(cluster_labels.begin(), cluster_labels.end());
  if (distinct.size() >= 2) run.silhouette = silhouette_score(cluster_labels, cluster_points);
  return run;
}

}  // namespace adlens::weaklabel

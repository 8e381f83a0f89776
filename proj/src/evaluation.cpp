#include "stereocal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stereocal/montecarlo.hpp"
#include "stereocal/triangulation.hpp"

namespace stereocal {

CorrespondenceSet2D build_wrong_set(const Dataset& dataset, std::span<const int> images) {
  // Validate all indices first so the error does not depend on pair order.
  std::vector<const ImageRecord*> recs;
  recs.reserve(images.size());
  for (const int index : images) {
    if (index < 0 || index >= dataset.n_images()) {
      throw MissingTarget("image " + std::to_string(index) +
                          " not present in dataset of " +
                          std::to_string(dataset.n_images()) + " images");
    }
    recs.push_back(&dataset.images[static_cast<std::size_t>(index)]);
  }

  const std::size_t n = recs.size();
  CorrespondenceSet2D out;
  out.reserve(2 * n + 4 * n * (n - 1));

  // Same image, opposite targets.
  for (const ImageRecord* rec : recs) {
    out.push_back({rec->a.q1, rec->b.q2});
    out.push_back({rec->b.q1, rec->a.q2});
  }
  // Different images, opposite targets.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      out.push_back({recs[j]->a.q1, recs[k]->b.q2});
      out.push_back({recs[j]->b.q1, recs[k]->a.q2});
    }
  }
  // Different images, same target.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == k) continue;
      out.push_back({recs[j]->a.q1, recs[k]->a.q2});
      out.push_back({recs[j]->b.q1, recs[k]->b.q2});
    }
  }
  return out;
}

std::vector<double> score_correspondences(const CorrespondenceSet2D& corr,
                                          const EssentialMatrix& e, const Extrinsics& pose,
                                          const CameraIntrinsics& k1,
                                          const CameraIntrinsics& k2, ScoreKind kind) {
  std::vector<double> out;
  out.reserve(corr.size());
  for (const PixelPair& pair : corr) {
    if (kind == ScoreKind::residual) {
      out.push_back(std::abs(residual(e, normalize(k1, pair.q1), normalize(k2, pair.q2))));
      continue;
    }
    try {
      const ReprojectionErrors err = reprojection_error(k1, k2, pose, pair.q1, pair.q2);
      const Reconstruction rec = reconstruct_pair(k1, k2, pose, pair.q1, pair.q2);
      out.push_back(rec.in_front ? err.e1 + err.e2 : kDegeneratePenalty);
    } catch (const ParallelRays&) {
      out.push_back(kDegeneratePenalty);
    } catch (const PointAtInfinity&) {
      out.push_back(kDegeneratePenalty);
    }
  }
  return out;
}

double log10_clamped(double score) {
  return std::log10(std::max(score, 1e-15));
}

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

double fcp(const LabeledScores& scores) {
  if (scores.correct.empty() || scores.wrong.empty()) {
    throw ConfigError("overlap estimation needs samples in both lists");
  }

  std::vector<double> pooled;
  pooled.reserve(scores.correct.size() + scores.wrong.size());
  pooled.insert(pooled.end(), scores.correct.begin(), scores.correct.end());
  pooled.insert(pooled.end(), scores.wrong.begin(), scores.wrong.end());
  std::sort(pooled.begin(), pooled.end());

  const double lo = pooled.front();
  const double hi = pooled.back();
  if (hi == lo) return 1.0;  // every sample identical: full overlap

  const double n = static_cast<double>(pooled.size());
  double width = 2.0 * (quantile(pooled, 0.75) - quantile(pooled, 0.25)) / std::cbrt(n);
  if (width <= 0.0) {
    // Degenerate interquartile range; fall back to a sqrt(n) bin count.
    width = (hi - lo) / std::ceil(std::sqrt(n));
  }
  const std::size_t bins = static_cast<std::size_t>(
      std::clamp(std::ceil((hi - lo) / width), 1.0, 1e6));

  std::vector<std::size_t> correct_counts(bins, 0), wrong_counts(bins, 0);
  const auto bin_of = [&](double x) {
    const auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(b, bins - 1);
  };
  for (const double x : scores.correct) ++correct_counts[bin_of(x)];
  for (const double x : scores.wrong) ++wrong_counts[bin_of(x)];

  // Sum of min of the two normalized histograms; the bin width cancels.
  double overlap = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    overlap += std::min(
        static_cast<double>(correct_counts[b]) / static_cast<double>(scores.correct.size()),
        static_cast<double>(wrong_counts[b]) / static_cast<double>(scores.wrong.size()));
  }
  return overlap;
}

std::vector<double> percentage_errors(const CorrespondenceSet3D& corr, const Extrinsics& pose,
                                      const CameraIntrinsics& k1,
                                      const CameraIntrinsics& k2) {
  std::vector<double> out;
  out.reserve(corr.size());
  for (const TargetPairObservation& obs : corr) {
    out.push_back(
        distance_error(k1, k2, pose, obs.a.q1, obs.a.q2, obs.b.q1, obs.b.q2, obs.distance)
            .pct);
  }
  return out;
}

}  // namespace stereocal

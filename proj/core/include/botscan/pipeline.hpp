#pragma once

#include <cstddef>
#include <vector>

#include "botscan/classifier.hpp"
#include "botscan/corpus.hpp"
#include "botscan/features.hpp"
#include "botscan/store.hpp"

namespace botscan {

struct PredictOptions {
  double eps = kDefaultEps;
  std::size_t min_comments = kDefaultMinComments;
  std::size_t cap = kDefaultCommentCap;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Labels one contributor. Profiles under the min-comment threshold come
/// back unknown with zero confidence; reals are quantized for persistence.
PredictionRecord classify_profile(const ContributorProfile& profile, const TrainedModel& model,
                                  const PredictOptions& options);

/// Builds profiles from the activity records, extracts features in parallel
/// and classifies every contributor. Output is ordered by repository then
/// login and does not depend on the thread count.
Records predict_contributors(const std::vector<ActivityComment>& activity,
                             const FetchWindow& window, const TrainedModel& model,
                             const PredictOptions& options = {});

}  // namespace botscan

#include "botscan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace botscan {

PredictionRecord classify_profile(const ContributorProfile& profile, const TrainedModel& model,
                                  const PredictOptions& options) {
  PredictionRecord r;
  r.repo = profile.repo;
  r.login = profile.login;
  r.features = extract_features(profile, options.eps);
  r.features.gini = quantize(r.features.gini);
  r.features.pattern_ratio = quantize(r.features.pattern_ratio);
  if (r.features.num_comments < options.min_comments) {
    r.predicted = Label::unknown;
    r.confidence = 0.0;
  } else {
    const auto p = predict(model, r.features);
    r.predicted = p.label;
    r.confidence = quantize(p.confidence);
  }
  r.effective = r.predicted;
  return r;
}

Records predict_contributors(const std::vector<ActivityComment>& activity,
                             const FetchWindow& window, const TrainedModel& model,
                             const PredictOptions& options) {
  const auto profiles = build_profiles(activity, window, options.cap);
  Records records(profiles.size());

  unsigned workers = options.threads ? options.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(1, profiles.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t i = next++; i < profiles.size(); i = next++) {
      try {
        records[i] = classify_profile(profiles[i], model, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

}  // namespace botscan

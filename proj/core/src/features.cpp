#include "botscan/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "botscan/error.hpp"

namespace botscan {

std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return std::nullopt;
}

double FeatureVector::value(std::size_t index) const {
  switch (index) {
    case 0: return static_cast<double>(num_comments);
    case 1: return static_cast<double>(num_empty);
    case 2: return static_cast<double>(num_patterns);
    case 3: return gini;
    case 4: return pattern_ratio;
    default:
      throw Error(ErrorCode::invalid_argument,
                  "feature index " + std::to_string(index) + " out of range");
  }
}

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 < 0x80) {
      len = 1, cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (ok && len > 1 && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double comment_distance(std::string_view a, std::string_view b) {
  const auto ca = decode_utf8(a);
  const auto cb = decode_utf8(b);
  const auto longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(edit_distance(ca, cb)) / static_cast<double>(longest);
}

namespace {

// Largest edit count e with e / longest <= eps, evaluated with the same
// floating-point division comment_distance uses.
std::size_t edit_budget(std::size_t longest, double eps) {
  const double m = static_cast<double>(longest);
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor(eps * m)));
  k = std::min(k, longest);
  while (k < longest && static_cast<double>(k + 1) / m <= eps) ++k;
  while (k > 0 && static_cast<double>(k) / m > eps) --k;
  return k;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

bool within_distance(std::u32string_view a, std::u32string_view b, double eps) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return true;
  const std::size_t k = edit_budget(n, eps);
  if (n - m > k) return false;

  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
  std::vector<std::size_t> prev(m + 1, inf), cur(m + 1, inf);
  for (std::size_t j = 0; j <= std::min(m, k); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(m, i + k);
    std::fill(cur.begin(), cur.end(), inf);
    std::size_t row_min = inf;
    if (lo == 0) {
      cur[0] = i;
      row_min = i;
    }
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > k) return false;
    std::swap(prev, cur);
  }
  return prev[m] <= k;
}

PatternPartition cluster_patterns(std::span<const std::string> comments, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "eps must lie in (0, 1]");
  }

  // Identical comments are at distance 0, so only distinct texts need pairwise work.
  std::unordered_map<std::string_view, std::size_t> distinct_index;
  std::vector<std::u32string> distinct;
  std::vector<std::size_t> owner(comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    auto [it, inserted] = distinct_index.try_emplace(comments[i], distinct.size());
    if (inserted) distinct.push_back(decode_utf8(comments[i]));
    owner[i] = it->second;
  }

  DisjointSets sets(distinct.size());
  for (std::size_t u = 0; u < distinct.size(); ++u) {
    for (std::size_t v = u + 1; v < distinct.size(); ++v) {
      if (sets.find(u) == sets.find(v)) continue;
      if (within_distance(distinct[u], distinct[v], eps)) sets.unite(u, v);
    }
  }

  PatternPartition partition;
  std::unordered_map<std::size_t, std::size_t> cluster_of_root;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    const std::size_t root = sets.find(owner[i]);
    auto [it, inserted] = cluster_of_root.try_emplace(root, partition.clusters.size());
    if (inserted) partition.clusters.emplace_back();
    partition.clusters[it->second].push_back(i);
  }
  return partition;
}

double gini_inequality(std::span<const std::size_t> sizes) {
  if (std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end()) {
    throw Error(ErrorCode::invalid_argument, "pattern sizes must be positive");
  }
  const std::size_t n = sizes.size();
  if (n <= 1) return 0.0;

  std::vector<std::size_t> sorted(sizes.begin(), sizes.end());
  std::sort(sorted.begin(), sorted.end());
  // sum_i sum_j |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i), 1-based over sorted values.
  std::int64_t weighted = 0;
  std::int64_t total = 0;
  const auto count = static_cast<std::int64_t>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto rank = static_cast<std::int64_t>(i + 1);
    const auto x = static_cast<std::int64_t>(sorted[i]);
    weighted += (2 * rank - count - 1) * x;
    total += x;
  }
  return static_cast<double>(2 * weighted) / static_cast<double>(2 * count * total);
}

FeatureVector extract_features(const ContributorProfile& profile, double eps) {
  FeatureVector fv;
  fv.num_comments = profile.comments.size();
  fv.num_empty = static_cast<std::size_t>(
      std::count_if(profile.comments.begin(), profile.comments.end(),
                    [](const std::string& c) { return c.empty(); }));
  if (fv.num_comments == 0) {
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw Error(ErrorCode::invalid_argument, "eps must lie in (0, 1]");
    }
    return fv;
  }
  const auto partition = cluster_patterns(profile.comments, eps);
  std::vector<std::size_t> sizes;
  sizes.reserve(partition.clusters.size());
  for (const auto& c : partition.clusters) sizes.push_back(c.size());
  fv.num_patterns = sizes.size();
  fv.gini = gini_inequality(sizes);
  fv.pattern_ratio = static_cast<double>(fv.num_patterns) / static_cast<double>(fv.num_comments);
  return fv;
}

}  // namespace botscan

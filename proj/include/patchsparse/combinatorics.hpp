#pragma once

#include <functional>
#include <vector>

namespace patchsparse {

/// Binomial coefficient as a double (exact for the guarded ranges used here).
inline double binomial(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (m - k + i) / i;
  return c;
}

/// Calls fn on every k-subset of {0..m-1} in lexicographic order; fn returns
/// false to stop early. Returns false when stopped.
inline bool for_each_subset(int m, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  if (k < 0 || k > m) return true;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!fn(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace patchsparse

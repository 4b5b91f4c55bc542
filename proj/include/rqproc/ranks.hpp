#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

namespace rqproc {

// Ranks 1..n of v, ties broken by original index (stable).
inline std::vector<int> ranks_of(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return v[a] < v[b]; });
  std::vector<int> ranks(n);
  for (int r = 0; r < n; ++r) ranks[order[r]] = r + 1;
  return ranks;
}

}  // namespace rqproc

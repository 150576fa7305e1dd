#include "gapmeans/numeric.hpp"

#include <algorithm>
#include <functional>

namespace gapmeans {

double logsumexp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double top = sorted.front();
  if (top == kNegInf) return kNegInf;
  if (top == kInf) return kInf;
  double acc = 0.0;
  for (double x : sorted) acc += std::exp(x - top);
  return top + std::log(acc);
}

std::vector<std::size_t> lower_hull(std::span<const double> xs,
                                    std::span<const double> ys) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2];
      const std::size_t b = hull.back();
      // drop b if it lies on or above the segment a -> i
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) -
                           (ys[b] - ys[a]) * (xs[i] - xs[a]);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  return hull;
}

}  // namespace gapmeans

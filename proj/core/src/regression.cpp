#include "confine/harness/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confine/error.hpp"

namespace confine::harness {
namespace {

struct Line {
  double intercept;
  double slope;
  double r2;
};

// Centered least squares; more stable than the raw normal equations.
Line least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error(Errc::kDegenerateInput, "all x values are equal");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  const double r2 = syy == 0.0 ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return {intercept, slope, r2};
}

}  // namespace

RegressionStats fit_stats(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw Error(Errc::kDegenerateInput, std::to_string(xs.size()) + " xs but " + std::to_string(ys.size()) + " ys");
  if (xs.size() < 3) throw Error(Errc::kDegenerateInput, "need at least 3 points");
  std::vector<double> lx;
  lx.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0)) throw Error(Errc::kDegenerateInput, "the log fit needs positive x values");
    lx.push_back(std::log(x));
  }
  const auto lin = least_squares(xs, ys);
  const auto log = least_squares(lx, ys);
  return {lin.r2, log.r2, lin.slope, lin.intercept, log.slope, log.intercept};
}

}  // namespace confine::harness

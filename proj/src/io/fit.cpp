#include "teamsim/io/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::io {

FitResult fit_rate(std::span<const double> gaps) {
  if (gaps.size() < 2) {
    throw DataError(
        fmt::format("fit_rate needs at least 2 gaps, got {}", gaps.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0) || !std::isfinite(gaps[i])) {
      throw DataError(fmt::format("gap {} is {}; gaps must be > 0", i, gaps[i]));
    }
    sum += gaps[i];
  }
  FitResult r;
  r.n = gaps.size();
  r.rate = static_cast<double>(r.n) / sum;

  std::vector<double> sorted(gaps.begin(), gaps.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(r.n);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = -std::expm1(-r.rate * sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f,
                  f - static_cast<double>(i) / n});
  }
  r.ks_distance = d;
  return r;
}

}  // namespace teamsim::io

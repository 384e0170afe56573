#pragma once

#include <cstddef>
#include <span>

namespace teamsim::io {

struct FitResult {
  double rate = 0.0;  // events per unit of the gap scale
  std::size_t n = 0;
  double ks_distance = 0.0;  // sup |F_empirical - F_exponential(rate)|
};

// Exponential maximum-likelihood fit, rate = 1 / mean(gaps). Throws
// DataError for fewer than two gaps or a gap that is not > 0 (the message
// names the index).
FitResult fit_rate(std::span<const double> gaps);

}  // namespace teamsim::io

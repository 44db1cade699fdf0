// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/scorer.hpp"

#include <cmath>
#include <limits>

namespace logicbeam {

ScoreRows UniformScorer::score_batch(std::span<const std::vector<TokenId>> prefixes) const {
  ScoreRow row(vocab_.size(), -std::log(static_cast<double>(vocab_.size())));
  return ScoreRows(prefixes.size(), row);
}

double log_sum_exp(std::span<const double> row) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : row) max = std::max(max, v);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : row) sum += std::exp(v - max);
  return max + std::log(sum);
}

}  // namespace logicbeam

// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logicbeam/decode.hpp"
#include "logicbeam/formula.hpp"
#include "logicbeam/scorer.hpp"

namespace logicbeam {

struct CoverageReport {
  std::vector<double> per_instance;  // covered-concept fraction, in [0, 1]
  double mean_percent = 0.0;
};

/// A concept counts as covered when any of its variant phrases occurs as a
/// contiguous subsequence of the output. An empty concept list is vacuously
/// covered (fraction 1.0).
CoverageReport coverage(const std::vector<std::vector<TokenId>>& outputs,
                        const std::vector<std::vector<std::vector<Phrase>>>& concept_sets);

struct ExtraReport {
  std::vector<double> per_instance;  // forbidden phrases present / given sets
  double mean = 0.0;
};

/// Counts forbidden phrases present in each output (presence, not
/// multiplicity) over the number of given include sets. An instance with no
/// include sets uses a denominator of 1.
ExtraReport extra_rate(const std::vector<std::vector<TokenId>>& outputs,
                       const std::vector<std::vector<std::vector<Phrase>>>& include_sets,
                       const std::vector<std::vector<Phrase>>& forbidden_sets);

struct BenchRecord {
  std::string decoder;
  int constraint_count = 0;  // C (or L)
  int beam_size = 0;
  std::uint64_t scorer_calls = 0;
  std::uint64_t scored_rows = 0;
  double wall_ms = 0.0;
};

struct BenchOptions {
  std::vector<std::string> decoders{"neurologic", "gbs", "cbs", "beam"};
  int c_min = 1;
  int c_max = 6;
  int beam_size = 10;
  int max_len = 48;
  std::uint64_t seed = 0;
};

struct BenchRun {
  std::vector<BenchRecord> records;
  std::vector<std::string> errors;  // incompatibilities, recorded not fatal
};

/// Sweeps the constraint count with everything else fixed, decoding a
/// synthetic instance (single-token positive constraints w1..wC) and
/// recording the scorer instrumentation per run. Records are cross-checked
/// against the scorer's own counters.
BenchRun bench_scaling(const Scorer& scorer, const BenchOptions& options);

std::string bench_csv(const std::vector<BenchRecord>& records);

}  // namespace logicbeam

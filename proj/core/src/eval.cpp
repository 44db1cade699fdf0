// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/eval.hpp"

#include <numeric>
#include <sstream>

#include "logicbeam/error.hpp"
#include "logicbeam/matcher.hpp"

namespace logicbeam {

CoverageReport coverage(const std::vector<std::vector<TokenId>>& outputs,
                        const std::vector<std::vector<std::vector<Phrase>>>& concept_sets) {
  if (outputs.size() != concept_sets.size())
    throw Error(ErrorKind::kValidation, "outputs and instances differ in length");
  CoverageReport report;
  report.per_instance.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& concepts = concept_sets[i];
    if (concepts.empty()) {
      report.per_instance.push_back(1.0);  // vacuous
      continue;
    }
    std::size_t covered = 0;
    for (const auto& variants : concepts) {
      for (const Phrase& p : variants) {
        if (contains_phrase(outputs[i], p)) {
          ++covered;
          break;
        }
      }
    }
    report.per_instance.push_back(static_cast<double>(covered) /
                                  static_cast<double>(concepts.size()));
  }
  if (!report.per_instance.empty()) {
    double sum = std::accumulate(report.per_instance.begin(), report.per_instance.end(), 0.0);
    report.mean_percent = 100.0 * sum / static_cast<double>(report.per_instance.size());
  }
  return report;
}

ExtraReport extra_rate(const std::vector<std::vector<TokenId>>& outputs,
                       const std::vector<std::vector<std::vector<Phrase>>>& include_sets,
                       const std::vector<std::vector<Phrase>>& forbidden_sets) {
  if (outputs.size() != include_sets.size() || outputs.size() != forbidden_sets.size())
    throw Error(ErrorKind::kValidation, "outputs and instances differ in length");
  ExtraReport report;
  report.per_instance.reserve(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    std::size_t present = 0;
    for (const Phrase& p : forbidden_sets[i])
      if (contains_phrase(outputs[i], p)) ++present;
    const std::size_t given = std::max<std::size_t>(include_sets[i].size(), 1);
    report.per_instance.push_back(static_cast<double>(present) /
                                  static_cast<double>(given));
  }
  if (!report.per_instance.empty()) {
    double sum = std::accumulate(report.per_instance.begin(), report.per_instance.end(), 0.0);
    report.mean = sum / static_cast<double>(report.per_instance.size());
  }
  return report;
}

BenchRun bench_scaling(const Scorer& scorer, const BenchOptions& options) {
  if (options.c_min < 0 || options.c_max < options.c_min)
    throw Error(ErrorKind::kValidation, "invalid constraint-count sweep");
  const std::size_t content =
      scorer.vocab_size() > Vocab::kNumReserved
          ? scorer.vocab_size() - Vocab::kNumReserved
          : 0;
  if (static_cast<std::size_t>(options.c_max) > content)
    throw Error(ErrorKind::kValidation, "not enough vocabulary words for the sweep");

  BenchRun run;
  for (int c = options.c_min; c <= options.c_max; ++c) {
    std::vector<std::vector<Phrase>> sets;
    for (int i = 0; i < c; ++i)
      sets.push_back({Phrase{{static_cast<TokenId>(Vocab::kNumReserved + i)}}});
    const Cnf cnf = build_cover_all(sets);
    const CompiledConstraints cc = CompiledConstraints::compile(cnf, scorer.vocab());

    DecoderConfig cfg;
    cfg.beam_size = options.beam_size;
    cfg.max_len = options.max_len;
    cfg.seed = options.seed;

    for (const std::string& name : options.decoders) {
      try {
        scorer.reset_stats();
        DecodeResult result;
        if (name == "neurologic") {
          result = neurologic_decode(scorer, {}, cc, cfg);
        } else if (name == "gbs") {
          result = gbs_decode(scorer, {}, cc, cfg);
        } else if (name == "cbs") {
          result = cbs_decode(scorer, {}, cc, cfg);
        } else if (name == "beam") {
          result = beam_search(scorer, {}, cfg, &cc);
        } else if (name == "greedy") {
          result = greedy_decode(scorer, {}, cfg, &cc);
        } else {
          throw Error(ErrorKind::kValidation, "unknown decoder: " + name);
        }
        const ScorerStats observed = scorer.stats();
        if (observed.calls != result.stats.scorer_calls ||
            observed.rows != result.stats.scored_rows)
          throw Error(ErrorKind::kValidation,
                      "decode stats disagree with scorer instrumentation");
        run.records.push_back(BenchRecord{name, c, options.beam_size,
                                          result.stats.scorer_calls,
                                          result.stats.scored_rows,
                                          result.stats.wall_ms});
      } catch (const Error& e) {
        run.errors.push_back(name + " @ C=" + std::to_string(c) + ": " + e.what());
      }
    }
  }
  return run;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "decoder,C,k,calls,rows,wall_ms\n";
  for (const BenchRecord& r : records) {
    out << r.decoder << ',' << r.constraint_count << ',' << r.beam_size << ','
        << r.scorer_calls << ',' << r.scored_rows << ',' << r.wall_ms << '\n';
  }
  return out.str();
}

}  // namespace logicbeam

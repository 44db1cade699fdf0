// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/decode.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include <json.hpp>

#include "logicbeam/error.hpp"
#include "logicbeam/formula.hpp"

namespace logicbeam {

namespace {

class Timer {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_ = Clock::now();
};

struct Hyp {
  std::vector<TokenId> tokens;
  double score = 0.0;
  ConstraintState state;
};

struct Candidate {
  int parent = 0;
  TokenId token = 0;
  double score = 0.0;
  ConstraintState state;
};

struct Finished {
  std::vector<TokenId> tokens;
  double score = 0.0;
  std::int32_t satisfied_count = 0;
  ConstraintState state;
};

// Tie-breaking everywhere: higher score, then lower token id, then lower
// parent beam index.
bool candidate_better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.token != b.token) return a.token < b.token;
  return a.parent < b.parent;
}

double selection_score(double score, std::size_t len, bool length_normalize) {
  if (!length_normalize || len == 0) return score;
  return score / static_cast<double>(len);
}

bool finished_better(const Finished& a, const Finished& b, bool length_normalize) {
  if (a.satisfied_count != b.satisfied_count) return a.satisfied_count > b.satisfied_count;
  double sa = selection_score(a.score, a.tokens.size(), length_normalize);
  double sb = selection_score(b.score, b.tokens.size(), length_normalize);
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

void validate_config(const DecoderConfig& cfg) {
  if (cfg.beam_size < 1) throw Error(ErrorKind::kValidation, "beam size must be >= 1");
  if (cfg.max_len < 1) throw Error(ErrorKind::kValidation, "max_len must be >= 1");
  if (cfg.alpha && *cfg.alpha < 1) throw Error(ErrorKind::kValidation, "alpha must be >= 1");
  if (cfg.beta && *cfg.beta < 1) throw Error(ErrorKind::kValidation, "beta must be >= 1");
}

// Extension tokens considered at each step: everything except BOS and UNK.
std::vector<TokenId> generable_tokens(std::size_t vocab_size) {
  std::vector<TokenId> out;
  out.reserve(vocab_size);
  for (std::size_t v = 0; v < vocab_size; ++v) {
    TokenId t = static_cast<TokenId>(v);
    if (t == Vocab::kBos || t == Vocab::kUnk) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<std::vector<TokenId>> build_prefixes(std::span<const TokenId> context,
                                                 const std::vector<Hyp>& beam) {
  std::vector<std::vector<TokenId>> prefixes;
  prefixes.reserve(beam.size());
  for (const Hyp& hyp : beam) {
    std::vector<TokenId> p;
    p.reserve(context.size() + hyp.tokens.size());
    p.insert(p.end(), context.begin(), context.end());
    p.insert(p.end(), hyp.tokens.begin(), hyp.tokens.end());
    prefixes.push_back(std::move(p));
  }
  return prefixes;
}

std::vector<TokenId> extend(const std::vector<TokenId>& tokens, TokenId t) {
  std::vector<TokenId> out;
  out.reserve(tokens.size() + 1);
  out = tokens;
  out.push_back(t);
  return out;
}

ConstraintState initial_state(const CompiledConstraints& cc,
                              std::span<const TokenId> context,
                              const DecoderConfig& cfg) {
  ConstraintState s = init_state(cc);
  if (cfg.match_in_prompt)
    for (TokenId t : context) s = advance(s, cc, t);
  return s;
}

const Finished& pick_final(const std::vector<Finished>& finished,
                           const DecoderConfig& cfg) {
  if (finished.empty())
    throw Error(ErrorKind::kInfeasible, "no finishable hypothesis at the horizon");
  const Finished* best = &finished.front();
  for (const Finished& f : finished)
    if (finished_better(f, *best, cfg.length_normalize)) best = &f;
  return *best;
}

DecodeResult assemble_result(const Finished& best, std::size_t num_clauses,
                             const std::vector<Finished>& finished,
                             const DecoderConfig& cfg, DecodeStats stats,
                             const Timer& timer, const std::vector<bool>& clause_truth) {
  DecodeResult result;
  result.tokens = best.tokens;
  result.score = best.score;
  result.clause_truth = clause_truth;
  result.satisfied_count = best.satisfied_count;
  result.all_clauses_satisfied =
      best.satisfied_count == static_cast<std::int32_t>(num_clauses);
  stats.wall_ms = timer.elapsed_ms();
  result.stats = stats;
  if (cfg.keep_finished) {
    result.finished.reserve(finished.size());
    for (const Finished& f : finished)
      result.finished.push_back({f.tokens, f.score, f.satisfied_count});
  }
  return result;
}

// Post-hoc clause evaluation for decoders that do not track constraints
// during the search.
std::vector<bool> report_truth(const CompiledConstraints* report,
                               std::span<const TokenId> context,
                               const std::vector<TokenId>& tokens,
                               const DecoderConfig& cfg, std::int32_t& count_out) {
  if (report == nullptr) {
    count_out = 0;
    return {};
  }
  std::vector<TokenId> y;
  if (cfg.match_in_prompt) y.insert(y.end(), context.begin(), context.end());
  y.insert(y.end(), tokens.begin(), tokens.end());
  std::vector<bool> truth = clause_values(report->cnf(), y);
  count_out = static_cast<std::int32_t>(std::count(truth.begin(), truth.end(), true));
  return truth;
}

void require_positive_conjunction(const CompiledConstraints& cc) {
  for (const auto& clause : cc.clauses()) {
    if (clause.size() != 1 ||
        cc.literals()[static_cast<std::size_t>(clause.front())].polarity !=
            Polarity::kPositive)
      throw Error(ErrorKind::kUnsupportedConstraint,
                  "decoder only supports conjunctions of positive literals");
  }
}

// Shared grouped-beam step: keeps the per-group top-k of a sorted candidate
// pool, groups ordered by key. Used by GBS (key = satisfied count) and CBS
// (key = satisfied set).
template <typename Key, typename KeyFn>
std::vector<Hyp> select_grouped(const std::vector<Candidate>& pool_sorted,
                                const std::vector<Hyp>& beam, int k, KeyFn key_fn) {
  std::map<Key, int> taken;
  std::vector<Hyp> next;
  for (const Candidate& c : pool_sorted) {
    int& n = taken[key_fn(c)];
    if (n >= k) continue;
    ++n;
    next.push_back(Hyp{extend(beam[static_cast<std::size_t>(c.parent)].tokens, c.token),
                       c.score, c.state});
  }
  return next;
}

}  // namespace

// ---------------------------------------------------------------------------

DecodeResult neurologic_decode(const Scorer& scorer, std::span<const TokenId> context,
                               const CompiledConstraints& cc, const DecoderConfig& cfg) {
  validate_config(cfg);
  if (cc.vocab_size() != scorer.vocab_size())
    throw Error(ErrorKind::kVocabMismatch, "constraints compiled against a different vocabulary");
  Timer timer;
  DecodeStats stats;

  std::vector<Hyp> beam;
  beam.push_back(Hyp{{}, 0.0, initial_state(cc, context, cfg)});
  std::vector<Finished> finished;
  const std::vector<TokenId> allowed = generable_tokens(scorer.vocab_size());

  for (int step = 1; step <= cfg.max_len && !beam.empty(); ++step) {
    const auto prefixes = build_prefixes(context, beam);
    const ScoreRows rows = scorer.score_next(prefixes);
    stats.scorer_calls += 1;
    stats.scored_rows += beam.size();

    std::vector<Candidate> pool;
    pool.reserve(beam.size() * allowed.size());
    for (std::size_t i = 0; i < beam.size(); ++i) {
      for (TokenId v : allowed) {
        double s = beam[i].score + rows[i][static_cast<std::size_t>(v)];
        ConstraintState st = advance(beam[i].state, cc, v);
        if (v == Vocab::kEos) {
          finished.push_back(Finished{extend(beam[i].tokens, v), s, st.satisfied_count,
                                      std::move(st)});
          continue;
        }
        if (is_unsatisfiable(st)) {
          stats.discarded_unsatisfiable += 1;
          continue;
        }
        pool.push_back(Candidate{static_cast<int>(i), v, s, std::move(st)});
      }
    }

    std::sort(pool.begin(), pool.end(), candidate_better);

    // Filter to the top tier of both score and satisfied count: the
    // intersection of (rank <= alpha by score) and (satisfied count among the
    // top-beta distinct values present). Both predicates are evaluated on the
    // full pool before either prune.
    std::optional<std::int32_t> min_kept_count;
    if (cfg.beta && !pool.empty()) {
      std::vector<std::int32_t> counts;
      counts.reserve(pool.size());
      for (const Candidate& c : pool) counts.push_back(c.state.satisfied_count);
      std::sort(counts.begin(), counts.end(), std::greater<>());
      counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
      if (counts.size() > static_cast<std::size_t>(*cfg.beta))
        counts.resize(static_cast<std::size_t>(*cfg.beta));
      min_kept_count = counts.back();
    }
    if (cfg.alpha && pool.size() > *cfg.alpha) pool.resize(*cfg.alpha);
    if (min_kept_count) {
      std::erase_if(pool, [&](const Candidate& c) {
        return c.state.satisfied_count < *min_kept_count;
      });
    }

    // Bin by the set of satisfied clauses, then fill the beam in rounds:
    // round j takes each bin's j-th best, and the round's picks are appended
    // in score order until k slots are used.
    std::map<ClauseBitset, std::vector<const Candidate*>> bins;
    for (const Candidate& c : pool) bins[c.state.satisfied_set].push_back(&c);

    std::vector<const Candidate*> chosen;
    for (std::size_t round = 0;
         chosen.size() < static_cast<std::size_t>(cfg.beam_size); ++round) {
      std::vector<const Candidate*> picks;
      for (const auto& [set, list] : bins)
        if (round < list.size()) picks.push_back(list[round]);
      if (picks.empty()) break;
      std::sort(picks.begin(), picks.end(),
                [](const Candidate* a, const Candidate* b) {
                  return candidate_better(*a, *b);
                });
      for (const Candidate* c : picks) {
        chosen.push_back(c);
        if (chosen.size() == static_cast<std::size_t>(cfg.beam_size)) break;
      }
    }

    std::vector<Hyp> next;
    next.reserve(chosen.size());
    for (const Candidate* c : chosen)
      next.push_back(Hyp{extend(beam[static_cast<std::size_t>(c->parent)].tokens, c->token),
                         c->score, c->state});
    beam = std::move(next);
  }

  for (Hyp& hyp : beam)
    finished.push_back(Finished{std::move(hyp.tokens), hyp.score,
                                hyp.state.satisfied_count, std::move(hyp.state)});

  const Finished& best = pick_final(finished, cfg);
  return assemble_result(best, cc.num_clauses(), finished, cfg, stats, timer,
                         finalize(best.state).clause_truth);
}

// ---------------------------------------------------------------------------

DecodeResult beam_search(const Scorer& scorer, std::span<const TokenId> context,
                         const DecoderConfig& cfg, const CompiledConstraints* report) {
  validate_config(cfg);
  if (report != nullptr && report->vocab_size() != scorer.vocab_size())
    throw Error(ErrorKind::kVocabMismatch, "constraints compiled against a different vocabulary");
  Timer timer;
  DecodeStats stats;

  std::vector<Hyp> beam(1);
  std::vector<Finished> finished;
  const std::vector<TokenId> allowed = generable_tokens(scorer.vocab_size());

  for (int step = 1; step <= cfg.max_len && !beam.empty(); ++step) {
    const auto prefixes = build_prefixes(context, beam);
    const ScoreRows rows = scorer.score_next(prefixes);
    stats.scorer_calls += 1;
    stats.scored_rows += beam.size();

    std::vector<Candidate> pool;
    pool.reserve(beam.size() * allowed.size());
    for (std::size_t i = 0; i < beam.size(); ++i) {
      for (TokenId v : allowed) {
        double s = beam[i].score + rows[i][static_cast<std::size_t>(v)];
        if (v == Vocab::kEos) {
          finished.push_back(Finished{extend(beam[i].tokens, v), s, 0, {}});
          continue;
        }
        pool.push_back(Candidate{static_cast<int>(i), v, s, {}});
      }
    }

    std::sort(pool.begin(), pool.end(), candidate_better);
    if (pool.size() > static_cast<std::size_t>(cfg.beam_size))
      pool.resize(static_cast<std::size_t>(cfg.beam_size));

    std::vector<Hyp> next;
    next.reserve(pool.size());
    for (const Candidate& c : pool)
      next.push_back(Hyp{extend(beam[static_cast<std::size_t>(c.parent)].tokens, c.token),
                         c.score, {}});
    beam = std::move(next);
  }

  for (Hyp& hyp : beam)
    finished.push_back(Finished{std::move(hyp.tokens), hyp.score, 0, {}});

  const Finished& best = pick_final(finished, cfg);
  std::int32_t count = 0;
  std::vector<bool> truth = report_truth(report, context, best.tokens, cfg, count);
  Finished reported = best;
  reported.satisfied_count = count;
  return assemble_result(reported, report ? report->num_clauses() : 0, finished, cfg,
                         stats, timer, truth);
}

DecodeResult greedy_decode(const Scorer& scorer, std::span<const TokenId> context,
                           const DecoderConfig& cfg, const CompiledConstraints* report) {
  DecoderConfig greedy_cfg = cfg;
  greedy_cfg.beam_size = 1;
  return beam_search(scorer, context, greedy_cfg, report);
}

// ---------------------------------------------------------------------------

DecodeResult sample_decode(const Scorer& scorer, std::span<const TokenId> context,
                           const DecoderConfig& cfg, const SamplingParams& params,
                           const CompiledConstraints* report) {
  validate_config(cfg);
  if (params.top_k.has_value() == params.top_p.has_value())
    throw Error(ErrorKind::kValidation, "set exactly one of top_k / top_p");
  if (params.top_k &&
      (*params.top_k < 1 || static_cast<std::size_t>(*params.top_k) > scorer.vocab_size()))
    throw Error(ErrorKind::kValidation, "top_k must be in [1, |V|]");
  if (params.top_p && !(*params.top_p > 0.0 && *params.top_p <= 1.0))
    throw Error(ErrorKind::kValidation, "top_p must be in (0, 1]");

  Timer timer;
  DecodeStats stats;
  std::mt19937_64 rng(cfg.seed);
  const std::vector<TokenId> allowed = generable_tokens(scorer.vocab_size());

  std::vector<TokenId> tokens;
  double score = 0.0;
  for (int step = 1; step <= cfg.max_len; ++step) {
    std::vector<TokenId> prefix(context.begin(), context.end());
    prefix.insert(prefix.end(), tokens.begin(), tokens.end());
    const std::vector<std::vector<TokenId>> batch{prefix};
    const ScoreRows rows = scorer.score_next(batch);
    stats.scorer_calls += 1;
    stats.scored_rows += 1;

    std::vector<std::pair<TokenId, double>> weighted;  // (token, probability)
    weighted.reserve(allowed.size());
    for (TokenId v : allowed)
      weighted.emplace_back(v, std::exp(rows[0][static_cast<std::size_t>(v)]));
    std::sort(weighted.begin(), weighted.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    std::size_t cut = weighted.size();
    if (params.top_k) {
      cut = std::min<std::size_t>(cut, static_cast<std::size_t>(*params.top_k));
    } else {
      double total = 0.0;
      for (const auto& [t, w] : weighted) total += w;
      double target = *params.top_p * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < weighted.size(); ++i) {
        cum += weighted[i].second;
        if (cum >= target) {
          cut = i + 1;
          break;
        }
      }
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < cut; ++i) mass += weighted[i].second;
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    double threshold = u * mass;
    std::size_t pick = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < cut; ++i) {
      cum += weighted[i].second;
      if (threshold < cum) {
        pick = i;
        break;
      }
    }

    TokenId t = weighted[pick].first;
    tokens.push_back(t);
    score += rows[0][static_cast<std::size_t>(t)];
    if (t == Vocab::kEos) break;
  }

  Finished only{std::move(tokens), score, 0, {}};
  std::int32_t count = 0;
  std::vector<bool> truth = report_truth(report, context, only.tokens, cfg, count);
  only.satisfied_count = count;
  std::vector<Finished> finished{only};
  return assemble_result(only, report ? report->num_clauses() : 0, finished, cfg, stats,
                         timer, truth);
}

// ---------------------------------------------------------------------------

namespace {

DecodeResult grouped_beam_decode(const Scorer& scorer, std::span<const TokenId> context,
                                 const CompiledConstraints& cc, const DecoderConfig& cfg,
                                 bool group_by_set) {
  validate_config(cfg);
  require_positive_conjunction(cc);
  if (cc.vocab_size() != scorer.vocab_size())
    throw Error(ErrorKind::kVocabMismatch, "constraints compiled against a different vocabulary");
  if (group_by_set && cc.num_clauses() > 16)
    throw Error(ErrorKind::kInstanceTooLarge,
                "state machine would need 2^C states with C > 16");

  Timer timer;
  DecodeStats stats;
  std::vector<Hyp> beam;
  beam.push_back(Hyp{{}, 0.0, initial_state(cc, context, cfg)});
  std::vector<Finished> finished;
  const std::vector<TokenId> allowed = generable_tokens(scorer.vocab_size());

  for (int step = 1; step <= cfg.max_len && !beam.empty(); ++step) {
    const auto prefixes = build_prefixes(context, beam);
    const ScoreRows rows = scorer.score_next(prefixes);
    stats.scorer_calls += 1;
    stats.scored_rows += beam.size();

    std::vector<Candidate> pool;
    pool.reserve(beam.size() * allowed.size());
    for (std::size_t i = 0; i < beam.size(); ++i) {
      for (TokenId v : allowed) {
        double s = beam[i].score + rows[i][static_cast<std::size_t>(v)];
        ConstraintState st = advance(beam[i].state, cc, v);
        if (v == Vocab::kEos) {
          finished.push_back(Finished{extend(beam[i].tokens, v), s, st.satisfied_count,
                                      std::move(st)});
          continue;
        }
        pool.push_back(Candidate{static_cast<int>(i), v, s, std::move(st)});
      }
    }

    std::sort(pool.begin(), pool.end(), candidate_better);
    std::vector<Hyp> next;
    if (group_by_set) {
      next = select_grouped<ClauseBitset>(
          pool, beam, cfg.beam_size,
          [](const Candidate& c) { return c.state.satisfied_set; });
    } else {
      next = select_grouped<std::int32_t>(
          pool, beam, cfg.beam_size,
          [](const Candidate& c) { return c.state.satisfied_count; });
    }
    beam = std::move(next);
  }

  for (Hyp& hyp : beam)
    finished.push_back(Finished{std::move(hyp.tokens), hyp.score,
                                hyp.state.satisfied_count, std::move(hyp.state)});

  const Finished& best = pick_final(finished, cfg);
  return assemble_result(best, cc.num_clauses(), finished, cfg, stats, timer,
                         finalize(best.state).clause_truth);
}

}  // namespace

DecodeResult gbs_decode(const Scorer& scorer, std::span<const TokenId> context,
                        const CompiledConstraints& cc, const DecoderConfig& cfg) {
  return grouped_beam_decode(scorer, context, cc, cfg, /*group_by_set=*/false);
}

DecodeResult cbs_decode(const Scorer& scorer, std::span<const TokenId> context,
                        const CompiledConstraints& cc, const DecoderConfig& cfg) {
  return grouped_beam_decode(scorer, context, cc, cfg, /*group_by_set=*/true);
}

// ---------------------------------------------------------------------------

namespace {

struct OracleBest {
  std::vector<TokenId> tokens;
  double score = 0.0;
  std::int32_t count = -1;
  std::uint64_t scored = 0;
};

void oracle_leaf(const Cnf& cnf, const std::vector<TokenId>& y, double score,
                 OracleBest& best) {
  const auto truth = clause_values(cnf, y);
  const auto count = static_cast<std::int32_t>(std::count(truth.begin(), truth.end(), true));
  best.scored += 1;
  if (count > best.count || (count == best.count && score > best.score) ||
      (count == best.count && score == best.score && y < best.tokens)) {
    best.tokens = y;
    best.score = score;
    best.count = count;
  }
}

void oracle_dfs(const Scorer& scorer, std::span<const TokenId> context, const Cnf& cnf,
                int max_len, std::vector<TokenId>& y, double score,
                const std::vector<TokenId>& allowed, OracleBest& best) {
  std::vector<TokenId> prefix(context.begin(), context.end());
  prefix.insert(prefix.end(), y.begin(), y.end());
  const std::vector<std::vector<TokenId>> batch{std::move(prefix)};
  const ScoreRows rows = scorer.score_next(batch);
  for (TokenId v : allowed) {
    double s = score + rows[0][static_cast<std::size_t>(v)];
    y.push_back(v);
    if (v == Vocab::kEos || static_cast<int>(y.size()) == max_len)
      oracle_leaf(cnf, y, s, best);
    else
      oracle_dfs(scorer, context, cnf, max_len, y, s, allowed, best);
    y.pop_back();
  }
}

}  // namespace

OracleResult brute_force_oracle(const Scorer& scorer, std::span<const TokenId> context,
                                const Cnf& cnf, int max_len) {
  if (max_len < 1) throw Error(ErrorKind::kValidation, "max_len must be >= 1");
  const double v = static_cast<double>(scorer.vocab_size());
  if (static_cast<double>(max_len + 1) * std::log2(v) > 22.0)
    throw Error(ErrorKind::kInstanceTooLarge,
                "|V|^(max_len+1) exceeds the enumeration guard");
  for (const Clause& clause : cnf.clauses)
    for (const Literal& lit : clause.literals)
      for (TokenId t : lit.phrase.tokens)
        if (t < 0 || static_cast<std::size_t>(t) >= scorer.vocab_size())
          throw Error(ErrorKind::kValidation, "phrase token id out of vocabulary");

  OracleBest best;
  std::vector<TokenId> y;
  oracle_dfs(scorer, context, cnf, max_len, y, 0.0,
             generable_tokens(scorer.vocab_size()), best);

  OracleResult result;
  result.tokens = std::move(best.tokens);
  result.score = best.score;
  result.max_satisfied_count = best.count;
  result.sequences_scored = best.scored;
  return result;
}

// ---------------------------------------------------------------------------

std::string canonical_json(const DecodeResult& result) {
  nlohmann::ordered_json j;
  j["tokens"] = result.tokens;
  j["score"] = result.score;
  j["satisfied_count"] = result.satisfied_count;
  j["all_clauses_satisfied"] = result.all_clauses_satisfied;
  j["clause_truth"] = result.clause_truth;
  j["stats"] = {{"calls", result.stats.scorer_calls},
                {"rows", result.stats.scored_rows},
                {"discarded", result.stats.discarded_unsatisfiable}};
  return j.dump();
}

}  // namespace logicbeam

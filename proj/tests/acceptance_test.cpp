// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
//
// Release gate: one check per shipped guarantee, each with a hard runtime
// budget, printed as a single PASS/FAIL line. Exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "logicbeam/decode.hpp"
#include "logicbeam/error.hpp"
#include "logicbeam/eval.hpp"
#include "logicbeam/external_scorer.hpp"
#include "logicbeam/formula.hpp"
#include "logicbeam/matcher.hpp"
#include "logicbeam/ngram.hpp"
#include "logicbeam/verify.hpp"

#ifndef LOGICBEAM_CLI
#error "LOGICBEAM_CLI must point at the logicbeam binary"
#endif
#ifndef LOGICBEAM_REF_SCORER
#error "LOGICBEAM_REF_SCORER must point at the ref_scorer binary"
#endif
#ifndef LOGICBEAM_DATA_DIR
#error "LOGICBEAM_DATA_DIR must point at the bundled data directory"
#endif

namespace fs = std::filesystem;
using namespace logicbeam;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void report(int number, const std::string& name, double budget_s,
            const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_budget = elapsed < budget_s;
  bool pass = outcome.pass && in_budget;
  if (!pass) ++g_failures;
  std::ostringstream line;
  line << (pass ? "PASS" : "FAIL") << "  criterion " << number << ": " << name << "  ["
       << outcome.detail;
  if (!in_budget) line << "; over budget";
  line << "; " << std::fixed << elapsed << "s / " << budget_s << "s]";
  std::cout << line.str() << std::endl;
}

// --- shared fixtures --------------------------------------------------------

std::string data_file(const std::string& name) {
  return (fs::path(LOGICBEAM_DATA_DIR) / name).string();
}

NgramLm train_toy_trigram() {
  std::ifstream in(data_file("toy_corpus.txt"));
  if (!in) throw Error(ErrorKind::kIo, "bundled corpus missing");
  Vocab vocab;
  auto corpus = load_corpus(in, vocab);
  return NgramLm::train(std::move(vocab), corpus, {.order = 3, .add_k = 0.1, .lambda = {}});
}

struct ConceptPool {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> variants;
};

ConceptPool toy_concepts() {
  ConceptPool pool;
  auto add = [&](const std::string& name, std::vector<std::string> forms) {
    pool.names.push_back(name);
    pool.variants.push_back(std::move(forms));
  };
  add("dog", {"dog", "dogs"});
  add("cat", {"cat", "cats"});
  add("horse", {"horse", "horses"});
  add("bird", {"bird", "birds"});
  add("boy", {"boy"});
  add("girl", {"girl"});
  add("man", {"man"});
  add("woman", {"woman"});
  add("ball", {"ball"});
  add("stick", {"stick"});
  add("apple", {"apple"});
  add("book", {"book"});
  add("frisbee", {"frisbee"});
  add("run", {"runs", "ran", "run"});
  add("walk", {"walks", "walked", "walk"});
  add("play", {"plays", "played", "play"});
  add("jump", {"jumps", "jumped", "jump"});
  add("sit", {"sits", "sat", "sit"});
  add("swim", {"swims", "swam", "swim"});
  add("throw", {"throws", "threw", "throw"});
  add("catch", {"catches", "caught", "catch"});
  add("eat", {"eats", "ate", "eat"});
  add("hold", {"holds", "held", "hold"});
  add("read", {"reads", "read"});
  add("watch", {"watches", "watched", "watch"});
  add("climb", {"climbs", "climbed", "climb"});
  return pool;
}

std::vector<std::vector<Phrase>> variant_phrases(const Vocab& vocab,
                                                 const ConceptPool& pool,
                                                 const std::vector<int>& picks) {
  std::vector<std::vector<Phrase>> sets;
  for (int c : picks) {
    std::vector<Phrase> variants;
    for (const std::string& w : pool.variants[static_cast<std::size_t>(c)]) {
      auto id = vocab.find(w);
      if (!id) throw Error(ErrorKind::kValidation, "concept word missing from corpus: " + w);
      variants.push_back(Phrase{{*id}});
    }
    sets.push_back(std::move(variants));
  }
  return sets;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(LOGICBEAM_CLI) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// --- criteria ---------------------------------------------------------------

Outcome criterion_matcher_equivalence() {
  VerifyOptions options;
  options.matcher_trials = 1000;
  VerifyCheck check = verify_matcher_equivalence(options);
  return {check.pass, check.detail};
}

Outcome criterion_cnf_equivalence() {
  VerifyOptions options;
  options.formula_trials = 300;
  options.sequences_per_formula = 50;
  VerifyCheck check = verify_cnf_equivalence(options);
  return {check.pass, check.detail};
}

Outcome criterion_reduction_to_beam() {
  std::mt19937_64 rng(30031);
  Vocab vocab = RandomCase::small_vocab(5);
  CompiledConstraints empty = CompiledConstraints::compile(Cnf{}, vocab);
  int identical = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::vector<TokenId>> corpus;
    for (int s = 0; s < 20; ++s) {
      std::vector<TokenId> sentence;
      int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i)
        sentence.push_back(Vocab::kNumReserved + static_cast<TokenId>(rng() % 5));
      corpus.push_back(std::move(sentence));
    }
    NgramLm lm = NgramLm::train(vocab, corpus, {.order = 2, .add_k = 0.1, .lambda = {}});
    DecoderConfig cfg;
    cfg.beam_size = 1 + static_cast<int>(rng() % 8);
    cfg.max_len = 2 + static_cast<int>(rng() % 9);
    if (canonical_json(neurologic_decode(lm, {}, empty, cfg)) ==
        canonical_json(beam_search(lm, {}, cfg)))
      ++identical;
  }
  std::ostringstream detail;
  detail << identical << "/" << trials << " byte-identical";
  return {identical == trials, detail.str()};
}

Outcome criterion_oracle_match() {
  VerifyOptions options;
  options.oracle_trials = 200;
  VerifyCheck check = verify_decode_vs_oracle(options);
  return {check.pass, check.detail};
}

Outcome criterion_row_scaling() {
  Vocab vocab;
  for (int i = 0; i < 20; ++i) vocab.add_word("w" + std::to_string(i));
  UniformScorer scorer(std::move(vocab));

  BenchOptions options;
  options.decoders = {"neurologic", "gbs", "cbs"};
  options.c_min = 1;
  options.c_max = 6;
  options.beam_size = 10;
  options.max_len = 56;
  BenchRun run = bench_scaling(scorer, options);
  if (!run.errors.empty()) return {false, "sweep errors: " + run.errors.front()};

  std::vector<double> neurologic_rows_per_step;
  std::vector<double> gbs_rows;
  double cbs_c1 = 0, cbs_c4 = 0;
  for (const BenchRecord& r : run.records) {
    if (r.decoder == "neurologic")
      neurologic_rows_per_step.push_back(static_cast<double>(r.scored_rows) /
                                         static_cast<double>(r.scorer_calls));
    if (r.decoder == "gbs") gbs_rows.push_back(static_cast<double>(r.scored_rows));
    if (r.decoder == "cbs" && r.constraint_count == 1)
      cbs_c1 = static_cast<double>(r.scored_rows);
    if (r.decoder == "cbs" && r.constraint_count == 4)
      cbs_c4 = static_cast<double>(r.scored_rows);
  }

  auto [mn, mx] = std::minmax_element(neurologic_rows_per_step.begin(),
                                      neurologic_rows_per_step.end());
  double flat_ratio = *mx / *mn;

  double cbs_ratio = cbs_c4 / cbs_c1;

  // Least-squares fit of total GBS rows against C.
  double n = static_cast<double>(gbs_rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < gbs_rows.size(); ++i) {
    double x = static_cast<double>(options.c_min + static_cast<int>(i));
    sx += x;
    sy += gbs_rows[i];
    sxx += x * x;
    sxy += x * gbs_rows[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < gbs_rows.size(); ++i) {
    double x = static_cast<double>(options.c_min + static_cast<int>(i));
    double fit = slope * x + intercept;
    ss_res += (gbs_rows[i] - fit) * (gbs_rows[i] - fit);
    ss_tot += (gbs_rows[i] - sy / n) * (gbs_rows[i] - sy / n);
  }
  double r2 = 1.0 - ss_res / ss_tot;

  bool pass = flat_ratio <= 1.05 && cbs_ratio >= 8.0 * 0.9 && cbs_ratio <= 8.0 * 1.1 &&
              r2 >= 0.99;
  std::ostringstream detail;
  detail << "neurologic rows/step max/min = " << flat_ratio << ", cbs C4/C1 = "
         << cbs_ratio << ", gbs R^2 = " << r2;
  return {pass, detail.str()};
}

Outcome criterion_coverage_direction() {
  NgramLm lm = train_toy_trigram();
  const Vocab& vocab = lm.vocab();
  ConceptPool pool = toy_concepts();
  std::mt19937_64 rng(20260806);

  const int instances = 50;
  std::vector<std::vector<std::vector<Phrase>>> concept_sets;
  std::vector<std::vector<TokenId>> neurologic_out;
  std::vector<std::vector<TokenId>> beam_out;
  int neurologic_all_satisfied = 0;
  int witnesses_checked = 0;

  for (int i = 0; i < instances; ++i) {
    int how_many = 2 + static_cast<int>(rng() % 3);
    std::vector<int> picks;
    while (static_cast<int>(picks.size()) < how_many) {
      int c = static_cast<int>(rng() % pool.names.size());
      if (std::find(picks.begin(), picks.end(), c) == picks.end()) picks.push_back(c);
    }
    auto sets = variant_phrases(vocab, pool, picks);
    Cnf cnf = build_cover_all(sets);
    CompiledConstraints cc = CompiledConstraints::compile(cnf, vocab);

    DecoderConfig cfg;
    cfg.beam_size = 10;
    cfg.max_len = 15;
    cfg.beta = 2;  // keep beam slots for the most-satisfied bins

    DecodeResult constrained = neurologic_decode(lm, {}, cc, cfg);
    if (constrained.all_clauses_satisfied) ++neurologic_all_satisfied;

    DecoderConfig plain;
    plain.beam_size = 10;
    plain.max_len = 15;
    DecodeResult unconstrained = beam_search(lm, {}, plain, &cc);

    concept_sets.push_back(sets);
    neurologic_out.push_back(constrained.tokens);
    beam_out.push_back(unconstrained.tokens);

    // Spot-check feasibility: one variant per concept concatenated is a
    // witness sequence within the horizon.
    if (i % 5 == 0) {
      std::vector<TokenId> witness;
      for (const auto& variants : sets)
        witness.insert(witness.end(), variants.front().tokens.begin(),
                       variants.front().tokens.end());
      if (witness.size() <= 15 && evaluate(cnf, witness)) ++witnesses_checked;
    }
  }

  CoverageReport with = coverage(neurologic_out, concept_sets);
  CoverageReport without = coverage(beam_out, concept_sets);
  double gap = with.mean_percent - without.mean_percent;

  bool pass = with.mean_percent == 100.0 && neurologic_all_satisfied == instances &&
              without.mean_percent < with.mean_percent && gap >= 20.0 &&
              witnesses_checked == 10;
  std::ostringstream detail;
  detail << "neurologic " << with.mean_percent << "%, beam " << without.mean_percent
         << "%, gap " << gap << "pp, witnesses " << witnesses_checked << "/10";
  return {pass, detail.str()};
}

Outcome criterion_exclusion() {
  NgramLm lm = train_toy_trigram();
  const Vocab& vocab = lm.vocab();
  ConceptPool pool = toy_concepts();
  std::vector<std::string> forbidden_pool = {"park",  "river", "water", "garden",
                                             "tree",  "game",  "ball",  "stick",
                                             "apple", "book"};
  std::mt19937_64 rng(20260807);

  const int instances = 50;
  std::vector<std::vector<std::vector<Phrase>>> include_sets;
  std::vector<std::vector<Phrase>> forbidden_sets;
  std::vector<std::vector<TokenId>> outputs;
  int exclusion_clauses_satisfied = 0;
  int leaked = 0;

  for (int i = 0; i < instances; ++i) {
    int how_many = 1 + static_cast<int>(rng() % 2);
    std::vector<int> picks;
    while (static_cast<int>(picks.size()) < how_many) {
      int c = static_cast<int>(rng() % pool.names.size());
      if (std::find(picks.begin(), picks.end(), c) == picks.end()) picks.push_back(c);
    }
    auto include = variant_phrases(vocab, pool, picks);

    std::vector<Phrase> exclude;
    int forbidden = 2 + static_cast<int>(rng() % 3);
    while (static_cast<int>(exclude.size()) < forbidden) {
      const std::string& w =
          forbidden_pool[static_cast<std::size_t>(rng() % forbidden_pool.size())];
      Phrase p{{*vocab.find(w)}};
      bool overlaps = false;
      for (const auto& set : include)
        if (std::find(set.begin(), set.end(), p) != set.end()) overlaps = true;
      if (!overlaps && std::find(exclude.begin(), exclude.end(), p) == exclude.end())
        exclude.push_back(std::move(p));
    }

    Cnf cnf = build_include_exclude(include, exclude);
    CompiledConstraints cc = CompiledConstraints::compile(cnf, vocab);
    DecoderConfig cfg;
    cfg.beam_size = 10;
    cfg.max_len = 12;
    cfg.beta = 2;
    DecodeResult r = neurologic_decode(lm, {}, cc, cfg);

    // The trailing clauses are the singleton exclusions.
    bool exclusions_ok = true;
    for (std::size_t c = include.size(); c < cnf.clauses.size(); ++c)
      if (!r.clause_truth[c]) exclusions_ok = false;
    if (exclusions_ok) {
      ++exclusion_clauses_satisfied;
      for (const Phrase& p : exclude)
        if (contains_phrase(r.tokens, p)) ++leaked;
    }

    include_sets.push_back(include);
    forbidden_sets.push_back(exclude);
    outputs.push_back(r.tokens);
  }

  ExtraReport extra = extra_rate(outputs, include_sets, forbidden_sets);
  bool pass = exclusion_clauses_satisfied == instances && leaked == 0 && extra.mean == 0.0;
  std::ostringstream detail;
  detail << "exclusions satisfied " << exclusion_clauses_satisfied << "/" << instances
         << ", forbidden phrases leaked " << leaked << ", extra rate " << extra.mean;
  return {pass, detail.str()};
}

Outcome criterion_replay() {
  fs::path tmp = fs::temp_directory_path() /
                 ("logicbeam-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  auto file = [&](const std::string& name) { return (tmp / name).string(); };

  std::string model = file("model.nllm");
  if (run_cli("train-lm --corpus " + data_file("toy_corpus.txt") + " --out " + model) != 0)
    return {false, "train-lm failed"};

  std::ofstream inst(file("instances.jsonl"));
  inst << R"({"id":"r1","context":"","formula":"(\"dog\" | \"dogs\") & \"ball\""})" << "\n"
       << R"({"id":"r2","context":"the man","formula":"\"river\" & !\"park\""})" << "\n"
       << R"({"id":"r3","context":"","formula":""})" << "\n"
       << R"({"id":"r4","context":"","formula":"\"cat\" & \"apple\" & !\"ball\""})" << "\n";
  inst.close();

  std::string args = "decode --model " + model + " --instances " + file("instances.jsonl") +
                     " --decoder neurologic --k 8 --max-len 12 --seed 5 --jobs 2 --out " +
                     file("out.jsonl") + " --manifest " + file("manifest.json");
  if (run_cli(args) != 0) return {false, "decode failed"};
  if (run_cli("replay --manifest " + file("manifest.json") + " --out " +
              file("replayed.jsonl")) != 0)
    return {false, "replay failed"};

  bool identical = slurp(file("out.jsonl")) == slurp(file("replayed.jsonl"));
  bool nonempty = !slurp(file("out.jsonl")).empty();
  std::error_code ec;
  fs::remove_all(tmp, ec);
  return {identical && nonempty,
          identical ? "replayed output byte-identical" : "replay differs"};
}

Outcome criterion_scorer_validity() {
  NgramLm lm = train_toy_trigram();
  std::mt19937_64 rng(90901);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenId> prefix;
    int len = static_cast<int>(rng() % 7);
    for (int i = 0; i < len; ++i)
      prefix.push_back(static_cast<TokenId>(rng() % lm.vocab().size()));
    worst = std::max(worst, std::abs(log_sum_exp(lm.score_prefix(prefix))));
  }
  UniformScorer uniform(lm.vocab());
  std::vector<std::vector<TokenId>> batch{{}};
  worst = std::max(worst, std::abs(log_sum_exp(uniform.score_next(batch)[0])));
  if (worst >= 1e-9)
    return {false, "logsumexp drift " + std::to_string(worst)};

  // Reference subprocess round trip.
  Vocab small;
  for (int i = 0; i < 5; ++i) small.add_word(std::string(1, static_cast<char>('a' + i)));
  double expected = -std::log(static_cast<double>(small.size()));
  double external_worst = 0.0;
  {
    ExternalScorer scorer(small, std::string(LOGICBEAM_REF_SCORER) + " --vocab-size " +
                                     std::to_string(small.size()));
    std::vector<std::vector<TokenId>> prefixes{{}, {3, 4}, {5}};
    ScoreRows rows = scorer.score_next(prefixes);
    for (const auto& row : rows)
      for (double lp : row) external_worst = std::max(external_worst, std::abs(lp - expected));
  }
  {
    ExternalScorer scorer(small, std::string(LOGICBEAM_REF_SCORER) + " --vocab-size " +
                                     std::to_string(small.size()) + " --mode ramp");
    std::vector<std::vector<TokenId>> prefixes{{}};
    ScoreRows rows = scorer.score_next(prefixes);
    double total = static_cast<double>(small.size()) * (small.size() + 1) / 2.0;
    for (std::size_t i = 0; i < small.size(); ++i)
      external_worst = std::max(
          external_worst, std::abs(rows[0][i] - std::log((i + 1) / total)));
  }
  std::ostringstream detail;
  detail << "model logsumexp <= " << worst << ", external round-trip error <= "
         << external_worst;
  return {worst < 1e-9 && external_worst < 1e-6, detail.str()};
}

}  // namespace

int main() {
  std::cout << "logicbeam acceptance suite\n";
  report(1, "incremental matcher equals substring recomputation", 5.0,
         criterion_matcher_equivalence);
  report(2, "formula and CNF evaluate identically", 5.0, criterion_cnf_equivalence);
  report(3, "empty CNF reduces to plain beam search", 10.0, criterion_reduction_to_beam);
  report(4, "constrained search matches the brute-force optimum", 60.0,
         criterion_oracle_match);
  report(5, "scorer rows scale as O(Nk), O(NkC), O(Nk 2^C)", 30.0, criterion_row_scaling);
  report(6, "constraint coverage reaches 100% where beam search falls short", 30.0,
         criterion_coverage_direction);
  report(7, "exclusion constraints keep forbidden phrases out", 30.0, criterion_exclusion);
  report(8, "decode runs replay byte-identically from their manifest", 60.0,
         criterion_replay);
  report(9, "scorer rows are normalized log-distributions", 30.0,
         criterion_scorer_validity);

  if (g_failures == 0) {
    std::cout << "all criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria failed\n";
  return 1;
}

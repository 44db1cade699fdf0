// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: pointer advancement, n-gram scoring and
// the full constrained decode loop at several clause counts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "logicbeam/decode.hpp"
#include "logicbeam/matcher.hpp"
#include "logicbeam/ngram.hpp"
#include "logicbeam/verify.hpp"

namespace {

using namespace logicbeam;

Vocab bench_vocab(int content_words) {
  Vocab v;
  for (int i = 0; i < content_words; ++i) v.add_word("w" + std::to_string(i));
  return v;
}

NgramLm bench_model(const Vocab& vocab, int sentences) {
  std::mt19937_64 rng(1);
  std::vector<std::vector<TokenId>> corpus;
  const auto content = static_cast<TokenId>(vocab.size()) - Vocab::kNumReserved;
  for (int s = 0; s < sentences; ++s) {
    std::vector<TokenId> sentence;
    int len = 3 + static_cast<int>(rng() % 8);
    for (int i = 0; i < len; ++i)
      sentence.push_back(Vocab::kNumReserved + static_cast<TokenId>(rng() % content));
    corpus.push_back(std::move(sentence));
  }
  return NgramLm::train(vocab, corpus, {.order = 3, .add_k = 0.1, .lambda = {}});
}

void BM_MatcherAdvance(benchmark::State& state) {
  std::mt19937_64 rng(2);
  Vocab vocab = bench_vocab(24);
  Cnf cnf = RandomCase::cnf(rng, vocab, static_cast<int>(state.range(0)), 3, 3);
  CompiledConstraints cc = CompiledConstraints::compile(cnf, vocab);
  std::vector<TokenId> stream = RandomCase::stream(rng, vocab, 64);
  for (auto _ : state) {
    ConstraintState s = init_state(cc);
    for (TokenId t : stream) s = advance(s, cc, t);
    benchmark::DoNotOptimize(s.satisfied_count);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_MatcherAdvance)->Arg(2)->Arg(4)->Arg(8);

void BM_NgramScoreRow(benchmark::State& state) {
  Vocab vocab = bench_vocab(static_cast<int>(state.range(0)));
  NgramLm lm = bench_model(vocab, 200);
  std::vector<TokenId> prefix{Vocab::kNumReserved, Vocab::kNumReserved + 1,
                              Vocab::kNumReserved + 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lm.score_prefix(prefix));
  }
}
BENCHMARK(BM_NgramScoreRow)->Arg(32)->Arg(128)->Arg(512);

void BM_NeurologicDecode(benchmark::State& state) {
  Vocab vocab = bench_vocab(24);
  NgramLm lm = bench_model(vocab, 200);
  std::vector<std::vector<Phrase>> sets;
  for (int i = 0; i < state.range(0); ++i)
    sets.push_back({Phrase{{static_cast<TokenId>(Vocab::kNumReserved + 2 * i)}}});
  CompiledConstraints cc = CompiledConstraints::compile(build_cover_all(sets), vocab);
  DecoderConfig cfg;
  cfg.beam_size = 10;
  cfg.max_len = 24;
  for (auto _ : state) {
    benchmark::DoNotOptimize(neurologic_decode(lm, {}, cc, cfg));
  }
}
BENCHMARK(BM_NeurologicDecode)->Arg(1)->Arg(3)->Arg(6);

void BM_BeamSearch(benchmark::State& state) {
  Vocab vocab = bench_vocab(24);
  NgramLm lm = bench_model(vocab, 200);
  DecoderConfig cfg;
  cfg.beam_size = 10;
  cfg.max_len = 24;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beam_search(lm, {}, cfg));
  }
}
BENCHMARK(BM_BeamSearch);

}  // namespace

BENCHMARK_MAIN();

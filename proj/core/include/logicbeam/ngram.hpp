// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "logicbeam/scorer.hpp"
#include "logicbeam/vocab.hpp"

namespace logicbeam {

/// Interpolated add-k n-gram language model. Every training sentence is
/// terminated by EOS; contexts shorter than n-1 tokens are padded with BOS.
/// For each order the estimate is (count + k) / (total + k*|V|); an unseen
/// context falls back to the uniform distribution. Orders are mixed with the
/// interpolation weights, which must sum to 1.
class NgramLm : public Scorer {
 public:
  struct Options {
    int order = 3;
    double add_k = 0.1;
    std::vector<double> lambda;  // empty = uniform weights
  };

  static NgramLm train(Vocab vocab, const std::vector<std::vector<TokenId>>& corpus,
                       const Options& options);

  int order() const { return order_; }
  double add_k() const { return add_k_; }
  const std::vector<double>& lambda() const { return lambda_; }

  /// Single-row convenience used by tests and the brute-force search.
  ScoreRow score_prefix(const std::vector<TokenId>& prefix) const;

  // Versioned binary persistence; load(save(m)) scores bit-identically.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static NgramLm load(std::istream& in);
  static NgramLm load_file(const std::string& path);

 protected:
  ScoreRows score_batch(std::span<const std::vector<TokenId>> prefixes) const override;

 private:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::map<TokenId, std::uint64_t> counts;
  };
  using Table = std::map<std::vector<TokenId>, ContextCounts>;

  explicit NgramLm(Vocab vocab) : Scorer(std::move(vocab)) {}

  int order_ = 1;
  double add_k_ = 0.0;
  std::vector<double> lambda_;
  std::vector<Table> tables_;  // tables_[o-1] holds order-o counts
};

/// Reads a whitespace-tokenized corpus (one sentence per line), growing
/// `vocab` with every word seen. Blank lines are skipped.
std::vector<std::vector<TokenId>> load_corpus(std::istream& in, Vocab& vocab);

}  // namespace logicbeam

// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace logicbeam {

using TokenId = std::int32_t;

/// Word <-> id bijection with dense ids. Ids 0..2 are reserved for the
/// begin-of-sequence, end-of-sequence and unknown-word tokens; regular words
/// start at id 3.
class Vocab {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kUnk = 2;
  static constexpr TokenId kNumReserved = 3;

  Vocab();
  explicit Vocab(const std::vector<std::string>& words);

  /// Adds a word if absent; returns its id either way. Reserved surface
  /// forms map onto the reserved ids.
  TokenId add_word(std::string_view word);
  std::optional<TokenId> find(std::string_view word) const;
  const std::string& word(TokenId id) const;

  std::size_t size() const { return words_.size(); }
  static bool is_reserved(TokenId id) { return id >= 0 && id < kNumReserved; }

  /// Whitespace-tokenizes `text`; unknown words become kUnk.
  std::vector<TokenId> encode(std::string_view text) const;
  /// Joins word forms with single spaces, skipping BOS and a trailing EOS.
  std::string decode(const std::vector<TokenId>& tokens) const;

  void save(std::ostream& out) const;
  static Vocab load(std::istream& in);

  bool operator==(const Vocab& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace logicbeam

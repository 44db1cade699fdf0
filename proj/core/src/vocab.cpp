// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/vocab.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "logicbeam/error.hpp"

namespace logicbeam {

namespace {
const char* kReservedForms[Vocab::kNumReserved] = {"<s>", "</s>", "<unk>"};
}

Vocab::Vocab() {
  for (TokenId id = 0; id < kNumReserved; ++id) {
    words_.emplace_back(kReservedForms[id]);
    index_.emplace(words_.back(), id);
  }
}

Vocab::Vocab(const std::vector<std::string>& words) : Vocab() {
  for (const auto& w : words) add_word(w);
}

TokenId Vocab::add_word(std::string_view word) {
  if (word.empty()) throw Error(ErrorKind::kValidation, "empty word");
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  TokenId id = static_cast<TokenId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

std::optional<TokenId> Vocab::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::word(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size())
    throw Error(ErrorKind::kValidation, "token id out of range: " + std::to_string(id));
  return words_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocab::encode(std::string_view text) const {
  std::vector<TokenId> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) {
    auto id = find(w);
    out.push_back(id ? *id : kUnk);
  }
  return out;
}

std::string Vocab::decode(const std::vector<TokenId>& tokens) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    TokenId t = tokens[i];
    if (t == kBos) continue;
    if (t == kEos && i + 1 == tokens.size()) continue;
    if (!out.empty()) out += ' ';
    out += word(t);
  }
  return out;
}

void Vocab::save(std::ostream& out) const {
  for (std::size_t i = kNumReserved; i < words_.size(); ++i) out << words_[i] << '\n';
}

Vocab Vocab::load(std::istream& in) {
  Vocab v;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) v.add_word(line);
  }
  return v;
}

}  // namespace logicbeam

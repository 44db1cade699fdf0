// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/ngram.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "logicbeam/error.hpp"

namespace logicbeam {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'L', 'M'};
constexpr std::uint16_t kFormatVersion = 1;

void write_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_uint(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  write_bytes(out, buf, sizeof(T));
}

void write_f64(std::ostream& out, double value) {
  write_uint<std::uint64_t>(out, std::bit_cast<std::uint64_t>(value));
}

void write_string(std::ostream& out, const std::string& s) {
  write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  write_bytes(out, s.data(), s.size());
}

void read_bytes(std::istream& in, void* data, std::size_t n) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n))
    throw Error(ErrorKind::kCorruptFile, "unexpected end of model file");
}

template <typename T>
T read_uint(std::istream& in) {
  unsigned char buf[sizeof(T)];
  read_bytes(in, buf, sizeof(T));
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(buf[i]) << (8 * i);
  return value;
}

double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_uint<std::uint64_t>(in));
}

std::string read_string(std::istream& in) {
  auto n = read_uint<std::uint32_t>(in);
  std::string s(n, '\0');
  read_bytes(in, s.data(), n);
  return s;
}

}  // namespace

NgramLm NgramLm::train(Vocab vocab, const std::vector<std::vector<TokenId>>& corpus,
                       const Options& options) {
  if (corpus.empty()) throw Error(ErrorKind::kValidation, "empty corpus");
  if (options.order < 1) throw Error(ErrorKind::kValidation, "order must be >= 1");
  if (options.add_k < 0) throw Error(ErrorKind::kValidation, "add-k must be >= 0");

  std::vector<double> lambda = options.lambda;
  if (lambda.empty())
    lambda.assign(static_cast<std::size_t>(options.order), 1.0 / options.order);
  if (lambda.size() != static_cast<std::size_t>(options.order))
    throw Error(ErrorKind::kValidation, "need one interpolation weight per order");
  double sum = 0.0;
  for (double w : lambda) {
    if (w < 0) throw Error(ErrorKind::kValidation, "interpolation weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorKind::kValidation, "interpolation weights must sum to 1");

  NgramLm lm(std::move(vocab));
  lm.order_ = options.order;
  lm.add_k_ = options.add_k;
  lm.lambda_ = std::move(lambda);
  lm.tables_.resize(static_cast<std::size_t>(options.order));

  for (const auto& sentence : corpus) {
    std::vector<TokenId> seq = sentence;
    seq.push_back(Vocab::kEos);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      for (int o = 1; o <= options.order; ++o) {
        std::vector<TokenId> ctx(static_cast<std::size_t>(o - 1));
        for (int j = 0; j < o - 1; ++j) {
          std::ptrdiff_t src = static_cast<std::ptrdiff_t>(i) - (o - 1) + j;
          ctx[static_cast<std::size_t>(j)] =
              src < 0 ? Vocab::kBos : seq[static_cast<std::size_t>(src)];
        }
        ContextCounts& cc = lm.tables_[static_cast<std::size_t>(o - 1)][ctx];
        cc.total += 1;
        cc.counts[seq[i]] += 1;
      }
    }
  }
  return lm;
}

ScoreRow NgramLm::score_prefix(const std::vector<TokenId>& prefix) const {
  const std::size_t v = vocab_.size();
  std::vector<double> mix(v, 0.0);
  for (int o = 1; o <= order_; ++o) {
    std::vector<TokenId> ctx(static_cast<std::size_t>(o - 1));
    for (int j = 0; j < o - 1; ++j) {
      std::ptrdiff_t src = static_cast<std::ptrdiff_t>(prefix.size()) - (o - 1) + j;
      ctx[static_cast<std::size_t>(j)] =
          src < 0 ? Vocab::kBos : prefix[static_cast<std::size_t>(src)];
    }
    const double w = lambda_[static_cast<std::size_t>(o - 1)];
    if (w == 0.0) continue;
    const Table& table = tables_[static_cast<std::size_t>(o - 1)];
    auto it = table.find(ctx);
    if (it == table.end()) {
      const double uniform = 1.0 / static_cast<double>(v);
      for (std::size_t t = 0; t < v; ++t) mix[t] += w * uniform;
      continue;
    }
    const ContextCounts& cc = it->second;
    const double denom =
        static_cast<double>(cc.total) + add_k_ * static_cast<double>(v);
    if (denom == 0.0) {
      const double uniform = 1.0 / static_cast<double>(v);
      for (std::size_t t = 0; t < v; ++t) mix[t] += w * uniform;
      continue;
    }
    const double floor = add_k_ / denom;
    for (std::size_t t = 0; t < v; ++t) mix[t] += w * floor;
    for (const auto& [token, count] : cc.counts)
      mix[static_cast<std::size_t>(token)] += w * static_cast<double>(count) / denom;
  }
  ScoreRow row(v);
  for (std::size_t t = 0; t < v; ++t) row[t] = std::log(mix[t]);
  return row;
}

ScoreRows NgramLm::score_batch(std::span<const std::vector<TokenId>> prefixes) const {
  ScoreRows rows;
  rows.reserve(prefixes.size());
  for (const auto& prefix : prefixes) rows.push_back(score_prefix(prefix));
  return rows;
}

void NgramLm::save(std::ostream& out) const {
  write_bytes(out, kMagic, sizeof(kMagic));
  write_uint<std::uint16_t>(out, kFormatVersion);
  write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(order_));
  write_f64(out, add_k_);
  for (double w : lambda_) write_f64(out, w);

  write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(vocab_.size()));
  for (std::size_t id = Vocab::kNumReserved; id < vocab_.size(); ++id)
    write_string(out, vocab_.word(static_cast<TokenId>(id)));

  for (const Table& table : tables_) {
    write_uint<std::uint64_t>(out, table.size());
    for (const auto& [ctx, cc] : table) {
      for (TokenId t : ctx) write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(t));
      write_uint<std::uint64_t>(out, cc.total);
      write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(cc.counts.size()));
      for (const auto& [token, count] : cc.counts) {
        write_uint<std::uint32_t>(out, static_cast<std::uint32_t>(token));
        write_uint<std::uint64_t>(out, count);
      }
    }
  }
  if (!out) throw Error(ErrorKind::kIo, "failed to write model");
}

NgramLm NgramLm::load(std::istream& in) {
  char magic[4];
  read_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorKind::kVersionMismatch, "not a model file (bad magic)");
  auto version = read_uint<std::uint16_t>(in);
  if (version != kFormatVersion)
    throw Error(ErrorKind::kVersionMismatch,
                "unsupported model format version " + std::to_string(version));

  auto order = static_cast<int>(read_uint<std::uint32_t>(in));
  if (order < 1 || order > 16)
    throw Error(ErrorKind::kCorruptFile, "implausible model order");
  double add_k = read_f64(in);
  std::vector<double> lambda(static_cast<std::size_t>(order));
  for (double& w : lambda) w = read_f64(in);

  auto vocab_size = read_uint<std::uint32_t>(in);
  if (vocab_size < Vocab::kNumReserved)
    throw Error(ErrorKind::kCorruptFile, "implausible vocabulary size");
  Vocab vocab;
  for (std::uint32_t i = Vocab::kNumReserved; i < vocab_size; ++i)
    vocab.add_word(read_string(in));

  NgramLm lm(std::move(vocab));
  lm.order_ = order;
  lm.add_k_ = add_k;
  lm.lambda_ = std::move(lambda);
  lm.tables_.resize(static_cast<std::size_t>(order));
  for (int o = 1; o <= order; ++o) {
    Table& table = lm.tables_[static_cast<std::size_t>(o - 1)];
    auto num_contexts = read_uint<std::uint64_t>(in);
    for (std::uint64_t c = 0; c < num_contexts; ++c) {
      std::vector<TokenId> ctx(static_cast<std::size_t>(o - 1));
      for (auto& t : ctx) t = static_cast<TokenId>(read_uint<std::uint32_t>(in));
      ContextCounts cc;
      cc.total = read_uint<std::uint64_t>(in);
      auto entries = read_uint<std::uint32_t>(in);
      for (std::uint32_t e = 0; e < entries; ++e) {
        auto token = static_cast<TokenId>(read_uint<std::uint32_t>(in));
        cc.counts[token] = read_uint<std::uint64_t>(in);
      }
      table.emplace(std::move(ctx), std::move(cc));
    }
  }
  return lm;
}

void NgramLm::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
  save(out);
}

NgramLm NgramLm::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model: " + path);
  return load(in);
}

std::vector<std::vector<TokenId>> load_corpus(std::istream& in, Vocab& vocab) {
  std::vector<std::vector<TokenId>> corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<TokenId> sentence;
    std::string w;
    while (words >> w) sentence.push_back(vocab.add_word(w));
    if (!sentence.empty()) corpus.push_back(std::move(sentence));
  }
  return corpus;
}

}  // namespace logicbeam

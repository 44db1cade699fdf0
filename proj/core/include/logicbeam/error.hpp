// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace logicbeam {

enum class ErrorKind {
  kSyntax,
  kUnknownWord,
  kSizeGuard,
  kValidation,
  kIo,
  kCorruptFile,
  kVersionMismatch,
  kProtocol,
  kNormalization,
  kTimeout,
  kUnsupportedConstraint,
  kInstanceTooLarge,
  kVocabMismatch,
  kInfeasible,
};

/// Single exception type for the whole library; `kind` lets callers map
/// failures onto exit codes or in-band error records.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Error(ErrorKind kind, const std::string& message, std::size_t byte_offset)
      : std::runtime_error(message), kind_(kind), offset_(byte_offset) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Byte offset into the source text, for parse errors.
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> offset_;
};

}  // namespace logicbeam

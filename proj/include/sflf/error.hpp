// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_ERROR_HPP
#define SFLF_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sflf {

// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input file. `offset` is the byte position where parsing failed
// (for text formats: the 1-based line number).
class ParseError : public std::runtime_error {
  public:
    ParseError(std::uint64_t offset, const std::string &what)
        : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

  private:
    std::uint64_t offset_;
};

#define SFLF_REQUIRE(cond, msg)                                                \
    do {                                                                       \
        if (!(cond)) throw ::sflf::ContractViolation(msg);                     \
    } while (false)

}  // namespace sflf

#endif  // SFLF_ERROR_HPP

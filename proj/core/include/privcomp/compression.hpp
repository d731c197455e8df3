// Copyright 2026 The privcomp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Fixed-length near-lossless source code for length-L segments. A codeword
// is a type header (per-symbol counts, fixed width) followed by the
// sequence's lexicographic rank inside its type class, both written as
// F_q digits. Every codeword of one FixedCode has the same length, so
// codewords can be added componentwise in F_q.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace privcomp {

using BigInt = boost::multiprecision::mpz_int;

// Most symbols a single code may use.
inline constexpr std::uint32_t kMaxCodeAlphabet = 32;

struct TypeVector {
  std::vector<std::uint64_t> counts;  // one entry per alphabet symbol

  std::uint64_t length() const noexcept;
  std::uint32_t alphabet_size() const noexcept { return static_cast<std::uint32_t>(counts.size()); }

  friend bool operator==(const TypeVector&, const TypeVector&) = default;
};

TypeVector type_of(std::span<const std::uint32_t> seq, std::uint32_t alphabet);

// Size of the type class: L! / prod_s counts[s]!.
BigInt multinomial(const TypeVector& type);

// Lexicographic rank of seq among all sequences sharing its type.
BigInt rank_in_type(std::span<const std::uint32_t> seq, std::uint32_t alphabet);

// Inverse of rank_in_type. Throws UsageError if rank >= multinomial(type).
std::vector<std::uint32_t> unrank_in_type(const BigInt& rank, const TypeVector& type);

class FixedCode {
 public:
  // budget: payload symbols per source symbol, in q-ary units.
  FixedCode(std::uint32_t q, std::uint32_t alphabet, std::size_t length, double budget);

  // Budget h + epsilon, clamped to log_q(alphabet) where every sequence fits.
  static FixedCode for_entropy(std::uint32_t q, std::uint32_t alphabet, std::size_t length,
                               double entropy, double epsilon);

  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t alphabet() const noexcept { return alphabet_; }
  std::size_t length() const noexcept { return length_; }
  double budget() const noexcept { return budget_; }
  // F_q digits per count: ceil(log_q(L + 1)).
  std::size_t count_width() const noexcept { return count_width_; }
  std::size_t header_len() const noexcept { return alphabet_ * count_width_; }
  // floor(L * budget); never exceeds the budget.
  std::size_t payload_len() const noexcept { return payload_len_; }
  std::size_t codeword_len() const noexcept { return header_len() + payload_len_; }

  friend bool operator==(const FixedCode&, const FixedCode&) = default;

 private:
  std::uint32_t q_;
  std::uint32_t alphabet_;
  std::size_t length_;
  double budget_;
  std::size_t count_width_;
  std::size_t payload_len_;
};

struct Codeword {
  std::vector<std::uint32_t> symbols;

  friend bool operator==(const Codeword&, const Codeword&) = default;
};

// Empty when the type class does not fit in the payload (atypical input).
std::optional<Codeword> encode_fixed(std::span<const std::uint32_t> seq, const FixedCode& code);

// Throws CorruptionError on a malformed codeword.
std::vector<std::uint32_t> decode_fixed(const Codeword& codeword, const FixedCode& code);

// Componentwise F_q sum; all codewords must have equal length.
Codeword sum_codewords(std::span<const Codeword> codewords, std::uint32_t q);
// a - b componentwise.
Codeword subtract_codewords(const Codeword& a, const Codeword& b, std::uint32_t q);
// Appends zeros up to length.
Codeword zero_pad(Codeword c, std::size_t length);
Codeword zero_codeword(std::size_t length);

// Plug-in entropy of the sample histogram in base-q units.
double empirical_entropy(std::span<const std::uint32_t> samples, std::uint32_t q);

}  // namespace privcomp

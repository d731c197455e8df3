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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privcomp/finite_field.hpp"

namespace privcomp {

// Inputs per table are capped so every joint-entropy scan stays cheap.
inline constexpr std::uint64_t kMaxTableSize = 10'000'000;

// Exponents of a monomial in f variables.
struct ExponentVector {
  std::vector<std::uint32_t> e;

  std::uint64_t weight() const noexcept;
  std::size_t arity() const noexcept { return e.size(); }

  // "1,0,2"
  std::string to_string() const;

  friend bool operator==(const ExponentVector&, const ExponentVector&) = default;
};

// Graded-lex order: lower total degree first, then lexicographically
// larger exponent vectors first, so (1,0) precedes (0,1).
bool graded_lex_less(const ExponentVector& a, const ExponentVector& b) noexcept;

// Function (F_q)^f -> F_q given by its value at every input. Inputs are
// enumerated in base-q lexicographic order (w_1 is the most significant digit).
class FunctionTable {
 public:
  FunctionTable(std::uint32_t q, std::uint32_t f, std::vector<std::uint32_t> values);

  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t f() const noexcept { return f_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const std::uint32_t> values() const noexcept { return values_; }

  std::uint32_t at(std::size_t input_index) const { return values_.at(input_index); }
  std::uint32_t at(std::span<const std::uint32_t> inputs) const;

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;

 private:
  std::uint32_t q_;
  std::uint32_t f_;
  std::vector<std::uint32_t> values_;
};

// q^f, throwing ResourceError beyond kMaxTableSize.
std::uint64_t table_size(std::uint32_t q, std::uint32_t f);

// Index of an input tuple in base-q lexicographic order.
std::uint64_t input_index(std::span<const std::uint32_t> inputs, std::uint32_t q);

FunctionTable build_monomial(const ExponentVector& e, std::uint32_t q, std::uint32_t f);

// Fermat reduction x^q = x: each nonzero exponent maps into [1, q-1].
ExponentVector reduce_exponent_vector(const ExponentVector& e, std::uint32_t q);

// Reduced monomials of degree 1..g in f variables, with every vector that is
// a reduced k-th power (2 <= k <= q-1) of an earlier kept vector removed.
// Graded-lex order. The length is the count of nonparallel monomials.
std::vector<ExponentVector> generate_nonparallel_monomials(std::uint32_t f, std::uint32_t g,
                                                           std::uint32_t q);

// Number of monomials in m variables of degree 1..g: C(g+m, g) - 1.
std::uint64_t count_all_monomials(std::uint32_t m, std::uint32_t g);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Exact distribution of a function's value under uniform inputs.
class Pmf {
 public:
  Pmf(std::uint32_t q, std::vector<std::uint64_t> counts);

  std::uint32_t q() const noexcept { return q_; }
  std::uint64_t denominator() const noexcept { return total_; }
  std::uint64_t numerator(std::uint32_t value) const { return counts_.at(value); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  // numerator/denominator reduced to lowest terms.
  std::pair<std::uint64_t, std::uint64_t> reduced(std::uint32_t value) const;
  double probability(std::uint32_t value) const;

 private:
  std::uint32_t q_;
  std::uint64_t total_;
  std::vector<std::uint64_t> counts_;
};

Pmf pmf_of(const FunctionTable& fn);

// Entropy in base-q units of a distribution given by integer counts.
// Counts are summed in sorted order so equal multisets of counts give
// bit-identical results.
double entropy_from_counts(std::span<const std::uint64_t> counts, double base);

double entropy_qary(const Pmf& p);

struct Candidate {
  FunctionTable table;
  std::optional<ExponentVector> exponents;
  double entropy = 0.0;
  // Position in the caller's list; tie-break for raw tables.
  std::size_t input_position = 0;

  std::string label() const;
};

// H(X^(1)) >= ... >= H(X^(mu)) with prefix joints H(X^[v]), v = 1..mu.
struct EntropyProfile {
  std::vector<double> h;
  std::vector<double> prefix_joint;
  double h_min = 0.0;
  double h_max = 0.0;

  std::size_t mu() const noexcept { return h.size(); }
  // H(X^[v]) for v in [0, mu]; joint(0) = 0.
  double joint(std::size_t v) const;

  // Throws UsageError when a structural invariant does not hold.
  void validate(double tolerance = 1e-12) const;
};

class CandidateSet {
 public:
  CandidateSet(std::uint32_t q, std::uint32_t f, std::vector<Candidate> ordered);

  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t f() const noexcept { return f_; }
  std::size_t mu() const noexcept { return candidates_.size(); }
  const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
  const Candidate& operator[](std::size_t i) const { return candidates_.at(i); }
  const EntropyProfile& profile() const noexcept { return profile_; }

  // True when the first f candidates are exactly the projections w_1..w_f
  // (in some order).
  bool includes_messages() const;

 private:
  std::uint32_t q_;
  std::uint32_t f_;
  std::vector<Candidate> candidates_;
  EntropyProfile profile_;
};

// Joint entropies H(X^[v]) of the first v tables for v = 1..tables.size(),
// by successive partition refinement over all q^f inputs.
std::vector<double> prefix_joint_entropies(std::span<const FunctionTable> tables);

// H(X^[v]); v = 0 gives 0.
double joint_entropy_prefix(const CandidateSet& set, std::size_t v);

// Stable sort by descending entropy. Ties go to graded-lex order of the
// exponent vectors, then to input position.
CandidateSet order_by_entropy(std::vector<Candidate> functions);

Candidate make_candidate(FunctionTable table, std::optional<ExponentVector> exponents = {},
                         std::size_t input_position = 0);

CandidateSet monomial_candidate_set(std::span<const ExponentVector> monomials, std::uint32_t q,
                                    std::uint32_t f);

// "1,0;0,1;1,1" -> three exponent vectors. All entries must share one arity.
// Errors name the offending character offset.
std::vector<ExponentVector> parse_monomials(std::string_view text);

// "0,1,2,..." -> function values.
std::vector<std::uint32_t> parse_table_values(std::string_view text);

}  // namespace privcomp

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
#include "privcomp/candidates.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "privcomp/errors.hpp"

namespace privcomp {

std::uint64_t ExponentVector::weight() const noexcept {
  return std::accumulate(e.begin(), e.end(), std::uint64_t{0});
}

std::string ExponentVector::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(e[i]);
  }
  return out;
}

bool graded_lex_less(const ExponentVector& a, const ExponentVector& b) noexcept {
  const auto wa = a.weight();
  const auto wb = b.weight();
  if (wa != wb) return wa < wb;
  // Lexicographically larger first.
  return std::lexicographical_compare(b.e.begin(), b.e.end(), a.e.begin(), a.e.end());
}

std::uint64_t table_size(std::uint32_t q, std::uint32_t f) {
  std::uint64_t size = 1;
  for (std::uint32_t i = 0; i < f; ++i) {
    size *= q;
    if (size > kMaxTableSize) {
      throw ResourceError("q^f = " + std::to_string(q) + "^" + std::to_string(f) +
                          " exceeds the enumeration cap of " + std::to_string(kMaxTableSize));
    }
  }
  return size;
}

std::uint64_t input_index(std::span<const std::uint32_t> inputs, std::uint32_t q) {
  std::uint64_t index = 0;
  for (auto w : inputs) {
    if (w >= q) throw UsageError("input symbol " + std::to_string(w) + " not in F_" + std::to_string(q));
    index = index * q + w;
  }
  return index;
}

FunctionTable::FunctionTable(std::uint32_t q, std::uint32_t f, std::vector<std::uint32_t> values)
    : q_(q), f_(f), values_(std::move(values)) {
  if (f == 0) throw UsageError("function tables need at least one variable");
  const auto expected = table_size(q, f);
  if (values_.size() != expected) {
    throw UsageError("function table has " + std::to_string(values_.size()) +
                     " entries, expected q^f = " + std::to_string(expected));
  }
  for (auto v : values_) {
    if (v >= q) throw UsageError("table value " + std::to_string(v) + " not in F_" + std::to_string(q));
  }
}

std::uint32_t FunctionTable::at(std::span<const std::uint32_t> inputs) const {
  if (inputs.size() != f_) throw UsageError("input tuple arity does not match f");
  return values_[input_index(inputs, q_)];
}

FunctionTable build_monomial(const ExponentVector& e, std::uint32_t q, std::uint32_t f) {
  if (e.arity() != f) {
    throw UsageError("exponent vector " + e.to_string() + " has arity " +
                     std::to_string(e.arity()) + ", expected " + std::to_string(f));
  }
  if (e.weight() == 0) throw UsageError("invalid candidate: monomial of degree 0");
  const PrimeField field(q);
  const auto size = table_size(q, f);

  // powers[j][w] = w^{e_j}
  std::vector<std::vector<std::uint32_t>> powers(f, std::vector<std::uint32_t>(q));
  for (std::uint32_t j = 0; j < f; ++j) {
    for (std::uint32_t w = 0; w < q; ++w) powers[j][w] = field.pow(w, e.e[j]);
  }

  std::vector<std::uint32_t> values(size);
  std::vector<std::uint32_t> digits(f, 0);
  for (std::uint64_t idx = 0; idx < size; ++idx) {
    std::uint32_t value = 1;
    for (std::uint32_t j = 0; j < f; ++j) value = field.mul(value, powers[j][digits[j]]);
    values[idx] = value;
    for (std::uint32_t j = f; j-- > 0;) {
      if (++digits[j] < q) break;
      digits[j] = 0;
    }
  }
  return FunctionTable(q, f, std::move(values));
}

ExponentVector reduce_exponent_vector(const ExponentVector& e, std::uint32_t q) {
  if (q < 2) throw UsageError("field size must be at least 2");
  ExponentVector out = e;
  for (auto& x : out.e) {
    if (x > 0) x = (x - 1) % (q - 1) + 1;
  }
  return out;
}

namespace {

struct ExponentHash {
  std::size_t operator()(const ExponentVector& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : v.e) h = (h ^ x) * 1099511628211ULL;
    return h;
  }
};

// All vectors with entries in [0, cap] summing to weight, lexicographically
// descending.
void compositions(std::uint32_t f, std::uint32_t weight, std::uint32_t cap,
                  std::vector<ExponentVector>& out) {
  std::vector<std::uint32_t> current(f, 0);
  auto recurse = [&](auto& self, std::uint32_t pos, std::uint32_t remaining) -> void {
    if (pos + 1 == f) {
      if (remaining <= cap) {
        current[pos] = remaining;
        out.push_back(ExponentVector{current});
      }
      return;
    }
    for (std::uint32_t x = std::min(remaining, cap) + 1; x-- > 0;) {
      current[pos] = x;
      self(self, pos + 1, remaining - x);
    }
  };
  recurse(recurse, 0, weight);
}

}  // namespace

std::vector<ExponentVector> generate_nonparallel_monomials(std::uint32_t f, std::uint32_t g,
                                                           std::uint32_t q) {
  if (f == 0 || g == 0) throw UsageError("nonparallel monomials need f >= 1 and g >= 1");
  (void)PrimeField(q);

  std::vector<ExponentVector> range;
  for (std::uint32_t w = 1; w <= g; ++w) compositions(f, w, q - 1, range);

  std::vector<ExponentVector> kept;
  std::unordered_set<ExponentVector, ExponentHash> powers_of_kept;
  for (auto& v : range) {
    if (powers_of_kept.contains(v)) continue;
    for (std::uint32_t k = 2; k + 1 <= q; ++k) {
      ExponentVector p = v;
      for (auto& x : p.e) x *= k;
      auto reduced = reduce_exponent_vector(p, q);
      if (!(reduced == v)) powers_of_kept.insert(std::move(reduced));
    }
    kept.push_back(std::move(v));
  }
  return kept;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using U128 = unsigned __int128;
  U128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      throw ResourceError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                          ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t count_all_monomials(std::uint32_t m, std::uint32_t g) {
  if (m == 0 || g == 0) throw UsageError("count_all_monomials needs m >= 1 and g >= 1");
  return binomial(static_cast<std::uint64_t>(g) + m, g) - 1;
}

Pmf::Pmf(std::uint32_t q, std::vector<std::uint64_t> counts) : q_(q), counts_(std::move(counts)) {
  if (counts_.size() != q_) throw UsageError("pmf needs one count per field element");
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  if (total_ == 0) throw UsageError("pmf with no mass");
}

std::pair<std::uint64_t, std::uint64_t> Pmf::reduced(std::uint32_t value) const {
  const auto num = numerator(value);
  if (num == 0) return {0, 1};
  const auto g = std::gcd(num, total_);
  return {num / g, total_ / g};
}

double Pmf::probability(std::uint32_t value) const {
  return static_cast<double>(numerator(value)) / static_cast<double>(total_);
}

Pmf pmf_of(const FunctionTable& fn) {
  std::vector<std::uint64_t> counts(fn.q(), 0);
  for (auto v : fn.values()) ++counts[v];
  return Pmf(fn.q(), std::move(counts));
}

double entropy_from_counts(std::span<const std::uint64_t> counts, double base) {
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const double total =
      static_cast<double>(std::accumulate(sorted.begin(), sorted.end(), std::uint64_t{0}));
  if (total == 0) throw UsageError("entropy of an empty distribution");
  double h = 0.0;
  for (auto c : sorted) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  h /= std::log(base);
  return h == 0.0 ? 0.0 : h;  // no -0.0
}

double entropy_qary(const Pmf& p) { return entropy_from_counts(p.counts(), p.q()); }

std::string Candidate::label() const {
  if (exponents) return exponents->to_string();
  return "table#" + std::to_string(input_position + 1);
}

double EntropyProfile::joint(std::size_t v) const {
  if (v == 0) return 0.0;
  if (v > prefix_joint.size()) {
    throw UsageError("joint entropy prefix " + std::to_string(v) + " out of range [0, " +
                     std::to_string(prefix_joint.size()) + "]");
  }
  return prefix_joint[v - 1];
}

void EntropyProfile::validate(double tolerance) const {
  if (h.empty()) throw UsageError("entropy profile is empty");
  if (prefix_joint.size() != h.size()) throw UsageError("prefix joint length differs from mu");
  if (h_max != h.front() || h_min != h.back()) throw UsageError("h_max/h_min do not match h");
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (h[v] < -tolerance || h[v] > 1.0 + tolerance) {
      throw UsageError("entropy " + std::to_string(h[v]) + " outside [0, 1] q-ary units");
    }
    if (v > 0 && h[v] > h[v - 1] + tolerance) throw UsageError("entropies are not nonincreasing");
    const double inc = prefix_joint[v] - joint(v);
    if (inc < -tolerance) throw UsageError("prefix joint entropy decreases");
    if (inc > h[v] + tolerance) throw UsageError("prefix joint increment exceeds marginal entropy");
  }
}

std::vector<double> prefix_joint_entropies(std::span<const FunctionTable> tables) {
  std::vector<double> out;
  if (tables.empty()) return out;
  const auto q = tables.front().q();
  const auto size = tables.front().size();
  std::vector<std::uint32_t> cls(size, 0);
  std::uint64_t classes = 1;
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  std::vector<std::uint64_t> counts;
  for (const auto& t : tables) {
    if (t.q() != q || t.size() != size) throw UsageError("candidate tables differ in q or f");
    ids.clear();
    ids.reserve(std::min<std::uint64_t>(classes * q, size));
    counts.clear();
    const auto values = t.values();
    for (std::size_t i = 0; i < size; ++i) {
      const std::uint64_t key = static_cast<std::uint64_t>(cls[i]) * q + values[i];
      auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
      if (inserted) counts.push_back(0);
      ++counts[it->second];
      cls[i] = it->second;
    }
    classes = ids.size();
    out.push_back(entropy_from_counts(counts, q));
  }
  return out;
}

CandidateSet::CandidateSet(std::uint32_t q, std::uint32_t f, std::vector<Candidate> ordered)
    : q_(q), f_(f), candidates_(std::move(ordered)) {
  if (candidates_.empty()) throw UsageError("candidate set is empty");
  std::vector<FunctionTable> tables;
  tables.reserve(candidates_.size());
  for (const auto& c : candidates_) {
    if (c.table.q() != q || c.table.f() != f) throw UsageError("candidate tables differ in q or f");
    tables.push_back(c.table);
    profile_.h.push_back(c.entropy);
  }
  for (std::size_t v = 1; v < profile_.h.size(); ++v) {
    if (profile_.h[v] > profile_.h[v - 1]) {
      throw UsageError("candidate set must be ordered by descending entropy");
    }
  }
  profile_.prefix_joint = prefix_joint_entropies(tables);
  profile_.h_max = profile_.h.front();
  profile_.h_min = profile_.h.back();
}

bool CandidateSet::includes_messages() const {
  for (std::uint32_t m = 0; m < f_; ++m) {
    ExponentVector proj{std::vector<std::uint32_t>(f_, 0)};
    proj.e[m] = 1;
    const auto table = build_monomial(proj, q_, f_);
    const bool found = std::any_of(candidates_.begin(), candidates_.end(),
                                   [&](const Candidate& c) { return c.table == table; });
    if (!found) return false;
  }
  return true;
}

double joint_entropy_prefix(const CandidateSet& set, std::size_t v) {
  return set.profile().joint(v);
}

Candidate make_candidate(FunctionTable table, std::optional<ExponentVector> exponents,
                         std::size_t input_position) {
  const double h = entropy_qary(pmf_of(table));
  return Candidate{std::move(table), std::move(exponents), h, input_position};
}

CandidateSet order_by_entropy(std::vector<Candidate> functions) {
  if (functions.empty()) throw UsageError("order_by_entropy needs at least one candidate");
  const auto q = functions.front().table.q();
  const auto f = functions.front().table.f();
  std::stable_sort(functions.begin(), functions.end(), [](const Candidate& a, const Candidate& b) {
    if (a.entropy != b.entropy) return a.entropy > b.entropy;
    if (a.exponents && b.exponents) {
      if (graded_lex_less(*a.exponents, *b.exponents)) return true;
      if (graded_lex_less(*b.exponents, *a.exponents)) return false;
    } else if (a.exponents.has_value() != b.exponents.has_value()) {
      return a.exponents.has_value();
    }
    return a.input_position < b.input_position;
  });
  return CandidateSet(q, f, std::move(functions));
}

CandidateSet monomial_candidate_set(std::span<const ExponentVector> monomials, std::uint32_t q,
                                    std::uint32_t f) {
  std::vector<Candidate> cands;
  cands.reserve(monomials.size());
  for (std::size_t i = 0; i < monomials.size(); ++i) {
    cands.push_back(make_candidate(build_monomial(monomials[i], q, f), monomials[i], i));
  }
  return order_by_entropy(std::move(cands));
}

namespace {

std::uint32_t parse_uint(std::string_view whole, std::size_t begin, std::size_t end) {
  while (begin < end && whole[begin] == ' ') ++begin;
  while (end > begin && whole[end - 1] == ' ') --end;
  std::uint32_t value = 0;
  const char* first = whole.data() + begin;
  const char* last = whole.data() + end;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (begin == end || ec != std::errc() || ptr != last) {
    throw UsageError("invalid integer '" + std::string(whole.substr(begin, end - begin)) +
                     "' at position " + std::to_string(begin));
  }
  return value;
}

}  // namespace

std::vector<ExponentVector> parse_monomials(std::string_view text) {
  std::vector<ExponentVector> out;
  if (text.empty()) throw UsageError("empty candidate list");
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find(';', start);
    if (stop == std::string_view::npos) stop = text.size();
    ExponentVector ev;
    std::size_t a = start;
    while (a <= stop) {
      auto b = text.find(',', a);
      if (b == std::string_view::npos || b > stop) b = stop;
      ev.e.push_back(parse_uint(text, a, b));
      a = b + 1;
    }
    if (!out.empty() && ev.arity() != out.front().arity()) {
      throw UsageError("candidate at position " + std::to_string(start) + " has " +
                       std::to_string(ev.arity()) + " exponents, expected " +
                       std::to_string(out.front().arity()));
    }
    if (ev.weight() == 0) {
      throw UsageError("invalid candidate: degree-0 monomial at position " + std::to_string(start));
    }
    out.push_back(std::move(ev));
    start = stop + 1;
  }
  return out;
}

std::vector<std::uint32_t> parse_table_values(std::string_view text) {
  std::vector<std::uint32_t> out;
  if (text.empty()) throw UsageError("empty function table");
  std::size_t a = 0;
  while (a <= text.size()) {
    auto b = text.find(',', a);
    if (b == std::string_view::npos) b = text.size();
    out.push_back(parse_uint(text, a, b));
    a = b + 1;
  }
  return out;
}

}  // namespace privcomp

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
#include "privcomp/compression.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "privcomp/candidates.hpp"
#include "privcomp/errors.hpp"
#include "privcomp/finite_field.hpp"

namespace privcomp {

std::uint64_t TypeVector::length() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

TypeVector type_of(std::span<const std::uint32_t> seq, std::uint32_t alphabet) {
  TypeVector t{std::vector<std::uint64_t>(alphabet, 0)};
  for (auto s : seq) {
    if (s >= alphabet) {
      throw UsageError("symbol " + std::to_string(s) + " outside alphabet of size " +
                       std::to_string(alphabet));
    }
    ++t.counts[s];
  }
  return t;
}

BigInt multinomial(const TypeVector& type) {
  BigInt m = 1;
  std::uint64_t placed = 0;
  for (auto c : type.counts) {
    // Multiply by C(placed + c, c) one factor at a time; each prefix is exact.
    for (std::uint64_t i = 1; i <= c; ++i) {
      ++placed;
      m *= placed;
      m /= i;
    }
  }
  return m;
}

BigInt rank_in_type(std::span<const std::uint32_t> seq, std::uint32_t alphabet) {
  TypeVector type = type_of(seq, alphabet);
  BigInt classes = multinomial(type);  // sequences with the remaining counts
  BigInt rank = 0;
  BigInt scratch;
  std::uint64_t remaining = seq.size();
  for (auto s : seq) {
    std::uint64_t below = 0;
    for (std::uint32_t a = 0; a < s; ++a) below += type.counts[a];
    if (below > 0) {
      scratch = classes * below;
      scratch /= remaining;
      rank += scratch;
    }
    classes *= type.counts[s];
    classes /= remaining;
    --type.counts[s];
    --remaining;
  }
  return rank;
}

std::vector<std::uint32_t> unrank_in_type(const BigInt& rank, const TypeVector& type) {
  BigInt classes = multinomial(type);
  if (rank < 0 || rank >= classes) throw UsageError("rank out of range for this type class");
  TypeVector counts = type;
  std::uint64_t remaining = type.length();
  std::vector<std::uint32_t> out;
  out.reserve(remaining);
  BigInt r = rank;
  BigInt block;
  while (remaining > 0) {
    for (std::uint32_t a = 0; a < counts.alphabet_size(); ++a) {
      if (counts.counts[a] == 0) continue;
      block = classes * counts.counts[a];
      block /= remaining;
      if (r < block) {
        out.push_back(a);
        classes = block;
        --counts.counts[a];
        break;
      }
      r -= block;
    }
    --remaining;
  }
  return out;
}

namespace {

std::size_t digits_for(std::uint64_t max_value, std::uint32_t q) {
  // Smallest w with q^w > max_value.
  std::size_t w = 0;
  __extension__ using U128 = unsigned __int128;
  U128 reach = 1;
  while (reach <= max_value) {
    reach *= q;
    ++w;
  }
  return w;
}

}  // namespace

FixedCode::FixedCode(std::uint32_t q, std::uint32_t alphabet, std::size_t length, double budget)
    : q_(q), alphabet_(alphabet), length_(length), budget_(budget) {
  (void)PrimeField(q);
  if (alphabet == 0 || alphabet > kMaxCodeAlphabet) {
    throw UsageError("code alphabet size " + std::to_string(alphabet) + " outside [1, " +
                     std::to_string(kMaxCodeAlphabet) + "]");
  }
  if (!(budget >= 0.0) || !std::isfinite(budget)) throw UsageError("code budget must be >= 0");
  count_width_ = digits_for(length, q);
  payload_len_ = static_cast<std::size_t>(std::floor(static_cast<double>(length) * budget + 1e-9));
}

FixedCode FixedCode::for_entropy(std::uint32_t q, std::uint32_t alphabet, std::size_t length,
                                 double entropy, double epsilon) {
  const double cap = std::log(static_cast<double>(alphabet)) / std::log(static_cast<double>(q));
  return FixedCode(q, alphabet, length, std::min(entropy + epsilon, cap));
}

std::optional<Codeword> encode_fixed(std::span<const std::uint32_t> seq, const FixedCode& code) {
  if (seq.size() != code.length()) {
    throw UsageError("segment length " + std::to_string(seq.size()) + " differs from code length " +
                     std::to_string(code.length()));
  }
  const auto type = type_of(seq, code.alphabet());
  const BigInt classes = multinomial(type);
  const BigInt capacity = boost::multiprecision::pow(BigInt(code.q()), static_cast<unsigned>(code.payload_len()));
  if (classes > capacity) return std::nullopt;

  Codeword cw;
  cw.symbols.reserve(code.codeword_len());
  for (auto c : type.counts) {
    // Most significant digit first.
    std::vector<std::uint32_t> digits(code.count_width());
    for (std::size_t i = code.count_width(); i-- > 0;) {
      digits[i] = static_cast<std::uint32_t>(c % code.q());
      c /= code.q();
    }
    cw.symbols.insert(cw.symbols.end(), digits.begin(), digits.end());
  }
  BigInt rank = rank_in_type(seq, code.alphabet());
  std::vector<std::uint32_t> payload(code.payload_len(), 0);
  for (std::size_t i = code.payload_len(); i-- > 0 && rank > 0;) {
    payload[i] = static_cast<std::uint32_t>(rank % code.q());
    rank /= code.q();
  }
  cw.symbols.insert(cw.symbols.end(), payload.begin(), payload.end());
  return cw;
}

std::vector<std::uint32_t> decode_fixed(const Codeword& codeword, const FixedCode& code) {
  if (codeword.symbols.size() != code.codeword_len()) {
    throw CorruptionError("codeword has " + std::to_string(codeword.symbols.size()) +
                          " symbols, expected " + std::to_string(code.codeword_len()));
  }
  TypeVector type{std::vector<std::uint64_t>(code.alphabet(), 0)};
  std::size_t pos = 0;
  for (auto& c : type.counts) {
    for (std::size_t i = 0; i < code.count_width(); ++i) {
      const auto d = codeword.symbols[pos++];
      if (d >= code.q()) throw CorruptionError("codeword symbol outside F_q");
      c = c * code.q() + d;
    }
  }
  if (type.length() != code.length()) {
    throw CorruptionError("type header counts sum to " + std::to_string(type.length()) +
                          ", expected " + std::to_string(code.length()));
  }
  BigInt rank = 0;
  for (; pos < codeword.symbols.size(); ++pos) {
    const auto d = codeword.symbols[pos];
    if (d >= code.q()) throw CorruptionError("codeword symbol outside F_q");
    rank = rank * code.q() + d;
  }
  if (rank >= multinomial(type)) throw CorruptionError("payload rank exceeds the type class size");
  return unrank_in_type(rank, type);
}

Codeword sum_codewords(std::span<const Codeword> codewords, std::uint32_t q) {
  if (codewords.empty()) throw UsageError("sum of no codewords");
  const PrimeField field(q);
  Codeword out = codewords.front();
  for (std::size_t k = 1; k < codewords.size(); ++k) {
    const auto& c = codewords[k];
    if (c.symbols.size() != out.symbols.size()) throw UsageError("codeword length mismatch in sum");
    for (std::size_t i = 0; i < c.symbols.size(); ++i) {
      out.symbols[i] = field.add(out.symbols[i], c.symbols[i]);
    }
  }
  return out;
}

Codeword subtract_codewords(const Codeword& a, const Codeword& b, std::uint32_t q) {
  if (a.symbols.size() != b.symbols.size()) throw UsageError("codeword length mismatch");
  const PrimeField field(q);
  Codeword out = a;
  for (std::size_t i = 0; i < a.symbols.size(); ++i) out.symbols[i] = field.sub(a.symbols[i], b.symbols[i]);
  return out;
}

Codeword zero_pad(Codeword c, std::size_t length) {
  if (c.symbols.size() > length) throw UsageError("cannot pad a codeword to a shorter length");
  c.symbols.resize(length, 0);
  return c;
}

Codeword zero_codeword(std::size_t length) { return Codeword{std::vector<std::uint32_t>(length, 0)}; }

double empirical_entropy(std::span<const std::uint32_t> samples, std::uint32_t q) {
  if (samples.empty()) throw UsageError("empirical entropy of no samples");
  std::map<std::uint32_t, std::uint64_t> hist;
  for (auto s : samples) ++hist[s];
  std::vector<std::uint64_t> counts;
  counts.reserve(hist.size());
  for (const auto& [value, count] : hist) counts.push_back(count);
  return entropy_from_counts(counts, q);
}

}  // namespace privcomp

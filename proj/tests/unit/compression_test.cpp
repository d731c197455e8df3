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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "privcomp/compression.hpp"
#include "privcomp/errors.hpp"

namespace privcomp {
namespace {

using Seq = std::vector<std::uint32_t>;

Seq sample_skewed(std::mt19937_64& rng, std::size_t length) {
  // {5/9, 2/9, 2/9} over F_3.
  Seq s(length);
  for (auto& x : s) {
    const auto r = rng() % 9;
    x = r < 5 ? 0 : (r < 7 ? 1 : 2);
  }
  return s;
}

TEST(TypeTest, Counts) {
  EXPECT_EQ(type_of(Seq{0, 0, 1, 2}, 3).counts, (std::vector<std::uint64_t>{2, 1, 1}));
  EXPECT_EQ(type_of(Seq{1, 1, 1}, 3).counts, (std::vector<std::uint64_t>{0, 3, 0}));
  EXPECT_EQ(type_of(Seq{}, 3).counts, (std::vector<std::uint64_t>{0, 0, 0}));
  EXPECT_THROW(type_of(Seq{3}, 3), UsageError);
}

TEST(MultinomialTest, Values) {
  EXPECT_EQ(multinomial(TypeVector{{1, 1, 1}}), 6);
  EXPECT_EQ(multinomial(TypeVector{{2, 1, 1}}), 12);
  EXPECT_EQ(multinomial(TypeVector{{0, 0, 0}}), 1);
  EXPECT_EQ(multinomial(TypeVector{{50, 50}}), BigInt("100891344545564193334812497256"));
}

TEST(RankTest, PermutationsOfThree) {
  const auto cls = oracle::type_class({0, 1, 2});
  ASSERT_EQ(cls.size(), 6U);
  for (std::size_t i = 0; i < cls.size(); ++i) {
    EXPECT_EQ(rank_in_type(cls[i], 3), BigInt(i));
    EXPECT_EQ(unrank_in_type(BigInt(i), TypeVector{{1, 1, 1}}), cls[i]);
  }
  EXPECT_THROW(unrank_in_type(BigInt(6), TypeVector{{1, 1, 1}}), UsageError);
}

TEST(RankTest, ExhaustiveLengthEightTernary) {
  // Every sequence, checked against its position in the lexicographic
  // enumeration of its own type class.
  std::map<std::vector<std::uint64_t>, std::vector<Seq>> classes;
  Seq s(8, 0);
  for (int idx = 0; idx < 6561; ++idx) {
    int x = idx;
    for (int i = 7; i >= 0; --i, x /= 3) s[i] = static_cast<std::uint32_t>(x % 3);
    const auto t = type_of(s, 3);
    auto [it, fresh] = classes.try_emplace(t.counts);
    if (fresh) it->second = oracle::type_class(s);
    const auto r = rank_in_type(s, 3);
    const auto pos = std::find(it->second.begin(), it->second.end(), s) - it->second.begin();
    ASSERT_EQ(r, BigInt(pos));
    ASSERT_EQ(unrank_in_type(r, t), s);
  }
  EXPECT_EQ(classes.size(), 45U);
}

TEST(RankTest, SampledLargeAlphabet) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Seq s(256);
    for (auto& x : s) x = static_cast<std::uint32_t>(rng() % 27);
    const auto t = type_of(s, 27);
    const auto r = rank_in_type(s, 27);
    EXPECT_LT(r, multinomial(t));
    EXPECT_EQ(unrank_in_type(r, t), s);
  }
}

TEST(FixedCodeTest, Layout) {
  const FixedCode c(3, 3, 1024, 0.905712598 + 0.05);
  EXPECT_EQ(c.count_width(), 7U);  // 3^7 = 2187 > 1024 >= 3^6
  EXPECT_EQ(c.header_len(), 21U);
  EXPECT_EQ(c.payload_len(), static_cast<std::size_t>(std::floor(1024 * (0.905712598 + 0.05))));
  EXPECT_LE(static_cast<double>(c.codeword_len()), 1024 * (0.905712598 + 0.05) + 3 * 7);
  EXPECT_LT(static_cast<double>(c.header_len()) / 1024, 0.03);
  EXPECT_EQ(FixedCode(3, 3, 8, 1.0).count_width(), 2U);
  EXPECT_EQ(FixedCode(2, 2, 1, 1.0).count_width(), 1U);
  EXPECT_EQ(FixedCode::for_entropy(3, 3, 64, 1.0, 0.05).payload_len(), 64U);
  EXPECT_THROW(FixedCode(3, 33, 8, 1.0), UsageError);
  EXPECT_THROW(FixedCode(3, 3, 8, -1.0), UsageError);
}

TEST(FixedCodeTest, ConstantAndUniformAlwaysFit) {
  const auto zero_budget = FixedCode(3, 3, 64, 0.0);
  const auto cw = encode_fixed(Seq(64, 2), zero_budget);
  ASSERT_TRUE(cw.has_value());
  EXPECT_EQ(cw->symbols.size(), zero_budget.codeword_len());
  EXPECT_EQ(decode_fixed(*cw, zero_budget), Seq(64, 2));

  std::mt19937_64 rng(3);
  const auto full = FixedCode(3, 3, 128, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Seq s(128);
    for (auto& x : s) x = static_cast<std::uint32_t>(rng() % 3);
    const auto c = encode_fixed(s, full);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(decode_fixed(*c, full), s);
  }
}

TEST(FixedCodeTest, SkewedSourceRarelyAtypical) {
  std::mt19937_64 rng(17);
  const auto code = FixedCode::for_entropy(3, 3, 512, 0.905712598, 0.05);
  int atypical = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto s = sample_skewed(rng, 512);
    const auto c = encode_fixed(s, code);
    if (!c) {
      ++atypical;
      continue;
    }
    ASSERT_EQ(decode_fixed(*c, code), s);
  }
  EXPECT_LT(atypical, 100);
}

TEST(FixedCodeTest, DeterministicEncoding) {
  std::mt19937_64 rng(23);
  const auto code = FixedCode::for_entropy(3, 3, 256, 0.905712598, 0.05);
  const auto s = sample_skewed(rng, 256);
  EXPECT_EQ(encode_fixed(s, code), encode_fixed(s, code));
}

TEST(FixedCodeTest, CorruptHeadersRejected) {
  const auto code = FixedCode(3, 3, 16, 1.0);
  auto cw = *encode_fixed(Seq(16, 1), code);
  auto bad = cw;
  bad.symbols[0] = (bad.symbols[0] + 1) % 3;
  EXPECT_THROW(decode_fixed(bad, code), CorruptionError);
  bad = cw;
  bad.symbols.pop_back();
  EXPECT_THROW(decode_fixed(bad, code), CorruptionError);
  bad = cw;
  bad.symbols.back() = 7;
  EXPECT_THROW(decode_fixed(bad, code), CorruptionError);
  // A rank beyond the class size.
  bad = cw;
  for (std::size_t i = code.header_len(); i < bad.symbols.size(); ++i) bad.symbols[i] = 2;
  EXPECT_THROW(decode_fixed(bad, code), CorruptionError);
}

TEST(CodewordSumTest, Cancellation) {
  std::mt19937_64 rng(29);
  const auto code = FixedCode::for_entropy(3, 3, 128, 0.905712598, 0.05);
  std::vector<Seq> seqs;
  std::vector<Codeword> cws;
  while (cws.size() < 3) {
    auto s = sample_skewed(rng, 128);
    if (auto c = encode_fixed(s, code)) {
      seqs.push_back(std::move(s));
      cws.push_back(*c);
    }
  }
  const Codeword pair[] = {cws[0], cws[1]};
  const auto sum2 = sum_codewords(pair, 3);
  EXPECT_EQ(decode_fixed(subtract_codewords(sum2, cws[1], 3), code), seqs[0]);
  EXPECT_EQ(sum_codewords(std::vector{cws[0], zero_codeword(code.codeword_len())}, 3), cws[0]);

  const auto sum3 = sum_codewords(cws, 3);
  const auto known = sum_codewords(std::vector{cws[0], cws[2]}, 3);
  EXPECT_EQ(decode_fixed(subtract_codewords(sum3, known, 3), code), seqs[1]);
}

TEST(CodewordSumTest, PaddingAndMismatch) {
  EXPECT_EQ(zero_pad(Codeword{{1, 2}}, 4), (Codeword{{1, 2, 0, 0}}));
  EXPECT_THROW(zero_pad(Codeword{{1, 2}}, 1), UsageError);
  EXPECT_THROW(subtract_codewords(Codeword{{1}}, Codeword{{1, 2}}, 3), UsageError);
  EXPECT_EQ(sum_codewords(std::vector{Codeword{{1, 2, 0}}, Codeword{{2, 2, 1}}}, 3), (Codeword{{0, 1, 1}}));
}

TEST(EmpiricalEntropyTest, Values) {
  std::mt19937_64 rng(31);
  Seq prod(100000);
  for (auto& x : prod) x = static_cast<std::uint32_t>((rng() % 3) * (rng() % 3) % 3);
  EXPECT_NEAR(empirical_entropy(prod, 3), 0.9057, 0.01);
  EXPECT_EQ(empirical_entropy(Seq(50, 1), 3), 0.0);
  Seq uni(30000);
  for (auto& x : uni) x = static_cast<std::uint32_t>(rng() % 3);
  EXPECT_NEAR(empirical_entropy(uni, 3), 1.0, 1e-3);
}

}  // namespace
}  // namespace privcomp

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

#include <random>

#include "oracles.hpp"
#include "privcomp/candidates.hpp"
#include "privcomp/errors.hpp"

namespace privcomp {
namespace {

ExponentVector ev(std::vector<std::uint32_t> e) { return ExponentVector{std::move(e)}; }

TEST(MonomialTest, TableValues) {
  const auto t11 = build_monomial(ev({1, 1}), 3, 2);
  const std::uint32_t at22[] = {2, 2};
  EXPECT_EQ(t11.at(at22), 1U);
  EXPECT_EQ(build_monomial(ev({2, 1}), 3, 2).at(at22), 2U);
  const std::uint32_t at00[] = {0, 0};
  EXPECT_EQ(t11.at(at00), 0U);
  EXPECT_THROW(build_monomial(ev({0, 0}), 3, 2), UsageError);
  EXPECT_THROW(build_monomial(ev({1}), 3, 2), UsageError);
}

TEST(MonomialTest, TablesMatchOracleEvaluation) {
  for (std::uint32_t q : {2U, 3U, 5U}) {
    for (const auto& e : {ev({1, 0, 2}), ev({3, 1, 1}), ev({0, 4, 1})}) {
      const auto table = build_monomial(e, q, 3);
      const auto inputs = oracle::all_inputs(q, 3);
      ASSERT_EQ(table.size(), inputs.size());
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        EXPECT_EQ(table.at(i), oracle::monomial_value(inputs[i], e.e, q));
      }
    }
  }
}

TEST(MonomialTest, Reduction) {
  EXPECT_EQ(reduce_exponent_vector(ev({3, 0}), 3), ev({1, 0}));
  EXPECT_EQ(reduce_exponent_vector(ev({4, 1}), 3), ev({2, 1}));
  EXPECT_EQ(reduce_exponent_vector(ev({1, 2}), 3), ev({1, 2}));
}

TEST(MonomialTest, ReductionPreservesTables) {
  for (std::uint32_t q : {3U, 5U}) {
    for (std::uint32_t f = 1; f <= 3; ++f) {
      for (const auto& m : generate_nonparallel_monomials(f, 4, q)) {
        EXPECT_EQ(reduce_exponent_vector(m, q), m);
        auto raised = m;
        for (auto& x : raised.e) {
          if (x) x += q - 1;
        }
        EXPECT_EQ(build_monomial(raised, q, f), build_monomial(m, q, f));
      }
    }
  }
}

TEST(MonomialTest, CountAll) {
  EXPECT_EQ(count_all_monomials(2, 2), 5U);
  EXPECT_EQ(count_all_monomials(1, 1), 1U);
  EXPECT_EQ(count_all_monomials(3, 3), 19U);
}

TEST(NonparallelTest, SmallSets) {
  const auto m22 = generate_nonparallel_monomials(2, 2, 3);
  ASSERT_EQ(m22.size(), 3U);
  EXPECT_EQ(m22[0], ev({1, 0}));
  EXPECT_EQ(m22[1], ev({0, 1}));
  EXPECT_EQ(m22[2], ev({1, 1}));

  const auto m12 = generate_nonparallel_monomials(1, 2, 3);
  ASSERT_EQ(m12.size(), 1U);
  EXPECT_EQ(m12[0], ev({1}));
  EXPECT_EQ(generate_nonparallel_monomials(1, 3, 3).size(), 1U);

  const auto m33 = generate_nonparallel_monomials(3, 3, 3);
  ASSERT_EQ(m33.size(), 13U);
  std::size_t singles = 0, pairs = 0, squares = 0, triples = 0;
  for (const auto& m : m33) {
    std::uint32_t nz = 0, twos = 0;
    for (auto x : m.e) {
      nz += x != 0;
      twos += x == 2;
    }
    if (nz == 1) ++singles;
    if (nz == 2 && twos == 0) ++pairs;
    if (nz == 2 && twos == 1) ++squares;
    if (nz == 3) ++triples;
  }
  EXPECT_EQ(singles, 3U);
  EXPECT_EQ(pairs, 3U);
  EXPECT_EQ(squares, 6U);
  EXPECT_EQ(triples, 1U);
}

TEST(NonparallelTest, ClosedFormCountsForTernary) {
  for (std::uint32_t f = 1; f <= 7; ++f) {
    EXPECT_EQ(generate_nonparallel_monomials(f, 2, 3).size(), f + binomial(f, 2)) << f;
    EXPECT_EQ(generate_nonparallel_monomials(f, 3, 3).size(),
              f + binomial(f, 2) + binomial(f, 3) + f * (f - 1))
        << f;
  }
}

TEST(NonparallelTest, GradedLexAndNoPowerOfKept) {
  for (std::uint32_t q : {2U, 3U, 5U, 7U}) {
    const auto ms = generate_nonparallel_monomials(3, 4, q);
    for (std::size_t i = 1; i < ms.size(); ++i) EXPECT_TRUE(graded_lex_less(ms[i - 1], ms[i]));
    for (std::size_t i = 0; i < ms.size(); ++i) {
      for (std::size_t j = 0; j < ms.size(); ++j) {
        if (i == j) continue;
        for (std::uint32_t k = 2; k + 1 <= q; ++k) {
          auto p = ms[j];
          for (auto& x : p.e) x *= k;
          // A kept vector is never a power of an earlier kept one.
          if (j < i) EXPECT_NE(reduce_exponent_vector(p, q), ms[i]);
        }
      }
    }
  }
}

TEST(PmfTest, ExactCounts) {
  const auto p11 = pmf_of(build_monomial(ev({1, 1}), 3, 2));
  EXPECT_EQ(p11.denominator(), 9U);
  EXPECT_EQ(p11.reduced(0), (std::pair<std::uint64_t, std::uint64_t>{5, 9}));
  EXPECT_EQ(p11.reduced(1), (std::pair<std::uint64_t, std::uint64_t>{2, 9}));
  EXPECT_EQ(p11.reduced(2), (std::pair<std::uint64_t, std::uint64_t>{2, 9}));

  const auto p10 = pmf_of(build_monomial(ev({1, 0}), 3, 2));
  for (std::uint32_t x = 0; x < 3; ++x) EXPECT_EQ(p10.reduced(x), (std::pair<std::uint64_t, std::uint64_t>{1, 3}));

  const auto p20 = pmf_of(build_monomial(ev({2}), 3, 1));
  EXPECT_EQ(p20.reduced(0), (std::pair<std::uint64_t, std::uint64_t>{1, 3}));
  EXPECT_EQ(p20.reduced(1), (std::pair<std::uint64_t, std::uint64_t>{2, 3}));
  EXPECT_EQ(p20.numerator(2), 0U);
}

TEST(EntropyTest, KnownValues) {
  EXPECT_NEAR(entropy_qary(pmf_of(build_monomial(ev({1, 0}), 3, 2))), 1.0, 1e-15);
  const double h11 = entropy_qary(pmf_of(build_monomial(ev({1, 1}), 3, 2)));
  EXPECT_NEAR(h11, 0.905712598, 1e-9);
  EXPECT_NEAR(h11, oracle::joint_entropy({{1, 1}}, 3, 2), 1e-14);
  const double h20 = entropy_qary(pmf_of(build_monomial(ev({2, 0}), 3, 2)));
  EXPECT_NEAR(h20, 0.579380164, 1e-9);
  EXPECT_NEAR(h20, 1.0 - (2.0 / 3.0) * std::log(2.0) / std::log(3.0), 1e-14);
}

TEST(EntropyTest, EqualCountMultisetsAreBitIdentical) {
  const std::uint64_t a[] = {5, 2, 2};
  const std::uint64_t b[] = {2, 5, 2};
  EXPECT_EQ(entropy_from_counts(a, 3), entropy_from_counts(b, 3));
  const std::uint64_t z[] = {0, 0, 7};
  EXPECT_EQ(entropy_from_counts(z, 3), 0.0);
  EXPECT_FALSE(std::signbit(entropy_from_counts(z, 3)));
}

TEST(JointEntropyTest, SmallSets) {
  const auto w1 = build_monomial(ev({1, 0}), 3, 2);
  const auto w2 = build_monomial(ev({0, 1}), 3, 2);
  const auto w12 = build_monomial(ev({1, 1}), 3, 2);
  {
    const FunctionTable t[] = {w1, w12};
    const auto j = prefix_joint_entropies(t);
    EXPECT_NEAR(j[1], 5.0 / 3.0, 1e-14);
  }
  {
    const FunctionTable t[] = {w1, w2};
    EXPECT_NEAR(prefix_joint_entropies(t)[1], 2.0, 1e-14);
  }
  {
    const FunctionTable t[] = {w1, w1};
    EXPECT_NEAR(prefix_joint_entropies(t)[1], 1.0, 1e-14);
  }
}

TEST(JointEntropyTest, MatchesOracleOnNonparallelSets) {
  for (std::uint32_t q : {2U, 3U, 5U}) {
    for (std::uint32_t f = 1; f <= 3; ++f) {
      const auto ms = generate_nonparallel_monomials(f, 3, q);
      const auto set = monomial_candidate_set(ms, q, f);
      std::vector<std::vector<std::uint32_t>> prefix;
      for (std::size_t v = 0; v < set.mu(); ++v) {
        prefix.push_back(set[v].exponents->e);
        EXPECT_NEAR(joint_entropy_prefix(set, v + 1), oracle::joint_entropy(prefix, q, f), 1e-12);
        EXPECT_NEAR(set[v].entropy, oracle::joint_entropy({set[v].exponents->e}, q, f), 1e-12);
      }
    }
  }
}

TEST(OrderTest, SortsByEntropyWithGradedLexTies) {
  std::vector<Candidate> c;
  c.push_back(make_candidate(build_monomial(ev({1, 1}), 3, 2), ev({1, 1}), 0));
  c.push_back(make_candidate(build_monomial(ev({0, 1}), 3, 2), ev({0, 1}), 1));
  c.push_back(make_candidate(build_monomial(ev({1, 0}), 3, 2), ev({1, 0}), 2));
  const auto set = order_by_entropy(c);
  EXPECT_EQ(*set[0].exponents, ev({1, 0}));
  EXPECT_EQ(*set[1].exponents, ev({0, 1}));
  EXPECT_EQ(*set[2].exponents, ev({1, 1}));
  EXPECT_TRUE(set.includes_messages());

  const auto np = monomial_candidate_set(generate_nonparallel_monomials(2, 3, 3), 3, 2);
  ASSERT_EQ(np.mu(), 5U);
  const double expected[] = {1, 1, 0.9057126, 0.9057126, 0.9057126};
  for (std::size_t v = 0; v < 5; ++v) EXPECT_NEAR(np.profile().h[v], expected[v], 1e-7);
}

TEST(OrderTest, SingletonAndInvalidOrder) {
  const auto one = monomial_candidate_set(std::vector{ev({1, 1})}, 3, 2);
  EXPECT_EQ(one.profile().h_min, one.profile().h_max);
  std::vector<Candidate> bad;
  bad.push_back(make_candidate(build_monomial(ev({1, 1}), 3, 2), ev({1, 1})));
  bad.push_back(make_candidate(build_monomial(ev({1, 0}), 3, 2), ev({1, 0})));
  EXPECT_THROW(CandidateSet(3, 2, bad), UsageError);
}

TEST(ProfileTest, RandomSetsSatisfyChainBounds) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t q = std::array<std::uint32_t, 3>{2, 3, 5}[rng() % 3];
    const std::uint32_t f = 1 + rng() % 3;
    const auto size = table_size(q, f);
    std::vector<Candidate> cands;
    const std::size_t mu = 1 + rng() % 6;
    for (std::size_t v = 0; v < mu; ++v) {
      std::vector<std::uint32_t> vals(size);
      for (auto& x : vals) x = static_cast<std::uint32_t>(rng() % q);
      cands.push_back(make_candidate(FunctionTable(q, f, vals), std::nullopt, v));
    }
    const auto set = order_by_entropy(cands);
    const auto& p = set.profile();
    double sum = 0.0;
    for (std::size_t v = 0; v < mu; ++v) {
      EXPECT_GE(p.h[v], -1e-15);
      EXPECT_LE(p.h[v], 1.0 + 1e-12);
      sum += p.h[v];
      const double inc = p.joint(v + 1) - p.joint(v);
      EXPECT_GE(inc, -1e-12);
      EXPECT_LE(inc, p.h[v] + 1e-12);
    }
    EXPECT_LE(p.joint(mu), std::min<double>(f, sum) + 1e-12);
    EXPECT_NO_THROW(p.validate());
  }
}

TEST(ParseTest, Monomials) {
  const auto ms = parse_monomials("1,0;0,1;1,1");
  ASSERT_EQ(ms.size(), 3U);
  EXPECT_EQ(ms[2], ev({1, 1}));
  EXPECT_EQ(parse_monomials(" 2 , 1 ")[0], ev({2, 1}));
  EXPECT_THROW(parse_monomials("1,0;1"), UsageError);
  EXPECT_THROW(parse_monomials("1,x"), UsageError);
  EXPECT_THROW(parse_monomials("0,0"), UsageError);
  EXPECT_THROW(parse_monomials(""), UsageError);
  try {
    parse_monomials("1,0;0,z");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find('6'), std::string::npos) << e.what();
  }
}

TEST(ParseTest, TableValues) {
  EXPECT_EQ(parse_table_values("0,1,2"), (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_THROW(parse_table_values("0,,1"), UsageError);
}

TEST(TableTest, Validation) {
  EXPECT_THROW(FunctionTable(3, 1, {0, 1}), UsageError);
  EXPECT_THROW(FunctionTable(3, 1, {0, 1, 3}), UsageError);
  EXPECT_THROW(table_size(3, 20), ResourceError);
}

}  // namespace
}  // namespace privcomp

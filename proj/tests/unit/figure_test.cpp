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

#include "privcomp/errors.hpp"
#include "privcomp/figure.hpp"
#include "privcomp/rates.hpp"

namespace privcomp {
namespace {

TEST(ReferenceTest, FixtureShape) {
  const auto& pts = reference_points();
  EXPECT_EQ(pts.size(), 28U);
  for (const auto& p : pts) {
    EXPECT_LE(p.achievable, p.converse + 1e-12);
    if (p.f == 1) {
      EXPECT_EQ(p.achievable, 1.0);
      EXPECT_EQ(p.converse, 1.0);
    }
  }
  ASSERT_TRUE(find_reference(5, 2, 4).has_value());
  EXPECT_EQ(find_reference(5, 2, 4)->achievable, 0.724681083948884);
  EXPECT_EQ(find_reference(3, 3, 5)->converse, 0.495431172326667);
  EXPECT_FALSE(find_reference(4, 2, 2).has_value());
}

TEST(ReferenceTest, ParserRejectsMalformedText) {
  EXPECT_THROW(parse_reference("n,g,f,achievable,converse\n1,2,3\n"), UsageError);
  EXPECT_THROW(parse_reference("a,b\n"), UsageError);
  EXPECT_THROW(parse_reference("n,g,f,achievable,converse\n1,2,x,0.5,0.5\n"), UsageError);
  EXPECT_EQ(parse_reference("# c\nn,g,f,achievable,converse\r\n3,2,1,1,1\r\n").size(), 1U);
}

TEST(FigureTest, SelectedRows) {
  const auto r = figure_row(3, 5, 2, 4);
  EXPECT_NEAR(r.achievable, 0.724681083948884, 1e-12);
  EXPECT_NEAR(figure_row(3, 3, 3, 5).converse, 0.495431172326667, 1e-12);
  const auto one = figure_row(3, 3, 2, 1);
  EXPECT_TRUE(one.degenerate);
  EXPECT_EQ(one.achievable, 1.0);
  EXPECT_EQ(one.converse, 1.0);
}

TEST(FigureTest, ConverseMatchesHminTimesCapacity) {
  // Converse = H_min * C_PIR; the g=3, n=3, f=3 point gives H_min.
  const auto r = figure_row(3, 3, 3, 3);
  EXPECT_NEAR(r.h_min, 0.740088, 1e-6);
  EXPECT_NEAR(r.converse, r.h_min * pir_capacity(3, 3), 1e-15);
}

TEST(FigureTest, FullSweepMatchesReference) {
  const std::uint32_t ns[] = {3, 5};
  const std::uint32_t gs[] = {2, 3};
  const auto rows = figure_rows(3, ns, gs, 7);
  ASSERT_EQ(rows.size(), 28U);
  for (const auto& r : rows) EXPECT_LE(r.achievable, r.converse + 1e-12);
  const auto cmp = compare_to_reference(rows, 3);
  EXPECT_EQ(cmp.compared, 56U);
  EXPECT_TRUE(cmp.ok()) << (cmp.mismatches.empty() ? "" : cmp.mismatches.front());
  EXPECT_LE(cmp.max_deviation, 1e-9);
}

TEST(FigureTest, DeviationIsReported) {
  auto row = figure_row(3, 3, 2, 2);
  row.achievable += 1e-6;
  const FigureRow rows[] = {row};
  const auto cmp = compare_to_reference(rows, 3);
  EXPECT_FALSE(cmp.ok());
  EXPECT_EQ(cmp.compared, 2U);
}

TEST(FigureTest, CsvFormat) {
  const FigureRow rows[] = {figure_row(3, 3, 2, 2)};
  EXPECT_EQ(figure_csv(rows), "n,g,f,mu,h_min,achievable,converse\n3,2,2,3,0.905712598014,0.67928444851,0.67928444851\n");
}

}  // namespace
}  // namespace privcomp

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

// Rate curves for retrieving nonparallel monomials of bounded degree, and
// the shipped reference values they are checked against.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privcomp {

struct FigureRow {
  std::uint32_t n = 0;
  std::uint32_t g = 0;
  std::uint32_t f = 0;
  std::size_t mu = 0;
  double h_min = 0.0;
  double achievable = 0.0;
  double converse = 0.0;
  bool degenerate = false;  // mu == 1
};

// Nonparallel monomials of degree <= g in f variables over F_q, with the
// messages-included closed forms for both curves.
FigureRow figure_row(std::uint32_t q, std::uint32_t n, std::uint32_t g, std::uint32_t f);

// Rows in (n, g, f) order; cells are computed concurrently.
std::vector<FigureRow> figure_rows(std::uint32_t q, std::span<const std::uint32_t> ns,
                                   std::span<const std::uint32_t> gs, std::uint32_t f_max);

struct ReferencePoint {
  std::uint32_t n = 0;
  std::uint32_t g = 0;
  std::uint32_t f = 0;
  double achievable = 0.0;
  double converse = 0.0;
};

// CSV text of the embedded fixture (q = 3).
std::string_view reference_csv();
inline constexpr std::uint32_t kReferenceField = 3;

// Parses "n,g,f,achievable,converse" rows; '#' lines are comments.
std::vector<ReferencePoint> parse_reference(std::string_view csv);
const std::vector<ReferencePoint>& reference_points();
std::optional<ReferencePoint> find_reference(std::uint32_t n, std::uint32_t g, std::uint32_t f);

struct FigureComparison {
  std::size_t compared = 0;  // values, two per matched row
  double max_deviation = 0.0;
  std::vector<std::string> mismatches;
  bool ok() const noexcept { return mismatches.empty(); }
};

inline constexpr double kFigureTolerance = 1e-9;

// Compares rows that have a reference point. Other rows are skipped.
FigureComparison compare_to_reference(std::span<const FigureRow> rows, std::uint32_t q,
                                      double tolerance = kFigureTolerance);

// "n,g,f,mu,h_min,achievable,converse" with 12 significant digits.
std::string figure_csv(std::span<const FigureRow> rows);

// 12 significant digits, shortest form ("%.12g").
std::string format_number(double x);

}  // namespace privcomp

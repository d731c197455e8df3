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
#include "privcomp/figure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "privcomp/candidates.hpp"
#include "privcomp/errors.hpp"
#include "privcomp/rates.hpp"

namespace privcomp {

FigureRow figure_row(std::uint32_t q, std::uint32_t n, std::uint32_t g, std::uint32_t f) {
  if (g == 0 || f == 0) throw UsageError("figure rows need f >= 1 and g >= 1");
  const auto monomials = generate_nonparallel_monomials(f, g, q);
  const auto set = monomial_candidate_set(monomials, q, f);
  const auto& profile = set.profile();

  FigureRow row{n, g, f, set.mu(), profile.h_min, 1.0, 1.0, set.mu() == 1};
  if (row.degenerate) return row;
  if (!set.includes_messages()) throw ProtocolError("monomial set does not lead with the messages");
  row.achievable = achievable_rate_messages(n, f, profile);
  row.converse = outer_bound_messages(profile.h_min, n, f);
  return row;
}

std::vector<FigureRow> figure_rows(std::uint32_t q, std::span<const std::uint32_t> ns,
                                   std::span<const std::uint32_t> gs, std::uint32_t f_max) {
  std::vector<std::future<FigureRow>> cells;
  for (auto n : ns) {
    for (auto g : gs) {
      for (std::uint32_t f = 1; f <= f_max; ++f) {
        cells.push_back(std::async(std::launch::async, [=] { return figure_row(q, n, g, f); }));
      }
    }
  }
  std::vector<FigureRow> rows;
  rows.reserve(cells.size());
  for (auto& c : cells) rows.push_back(c.get());
  return rows;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint32_t to_u32(std::string_view s, std::size_t line) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw UsageError("reference line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

double to_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw UsageError("reference line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<ReferencePoint> parse_reference(std::string_view csv) {
  std::vector<ReferencePoint> points;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (auto line : split(csv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "n,g,f,achievable,converse") throw UsageError("reference header mismatch");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 5) throw UsageError("reference line " + std::to_string(line_no) + ": expected 5 columns");
    points.push_back({to_u32(cols[0], line_no), to_u32(cols[1], line_no), to_u32(cols[2], line_no),
                      to_double(cols[3], line_no), to_double(cols[4], line_no)});
  }
  return points;
}

const std::vector<ReferencePoint>& reference_points() {
  static const std::vector<ReferencePoint> points = parse_reference(reference_csv());
  return points;
}

std::optional<ReferencePoint> find_reference(std::uint32_t n, std::uint32_t g, std::uint32_t f) {
  for (const auto& p : reference_points()) {
    if (p.n == n && p.g == g && p.f == f) return p;
  }
  return std::nullopt;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

FigureComparison compare_to_reference(std::span<const FigureRow> rows, std::uint32_t q, double tolerance) {
  FigureComparison cmp;
  if (q != kReferenceField) return cmp;
  for (const auto& row : rows) {
    const auto ref = find_reference(row.n, row.g, row.f);
    if (!ref) continue;
    const std::pair<const char*, std::pair<double, double>> checks[] = {
        {"achievable", {row.achievable, ref->achievable}},
        {"converse", {row.converse, ref->converse}}};
    for (const auto& [name, values] : checks) {
      const double dev = std::abs(values.first - values.second);
      ++cmp.compared;
      cmp.max_deviation = std::max(cmp.max_deviation, dev);
      if (!(dev <= tolerance)) {
        std::ostringstream os;
        os.precision(15);
        os << "n=" << row.n << " g=" << row.g << " f=" << row.f << " " << name << ": got " << values.first
           << ", reference " << values.second;
        cmp.mismatches.push_back(os.str());
      }
    }
  }
  return cmp;
}

std::string figure_csv(std::span<const FigureRow> rows) {
  std::string out = "n,g,f,mu,h_min,achievable,converse\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.g) + "," + std::to_string(r.f) + "," +
           std::to_string(r.mu) + "," + format_number(r.h_min) + "," + format_number(r.achievable) + "," +
           format_number(r.converse) + "\n";
  }
  return out;
}

}  // namespace privcomp

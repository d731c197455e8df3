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

// Round-based sum scheme for private computation over n replicated
// databases. Candidate images X^(v) are split into beta = n^mu segments of
// L symbols; the user hides which candidate it wants behind a secret
// segment permutation and a query structure that is the same for every v.
//
// Labels ("subindices") t in [0, beta) are the user's bookkeeping. A
// database only sees segment positions pi(t).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "privcomp/candidates.hpp"
#include "privcomp/compression.hpp"

namespace privcomp {

enum class AnswerMode { kSymbolic, kConcrete };

std::string to_string(AnswerMode mode);
AnswerMode parse_answer_mode(std::string_view text);

// Largest beta = n^mu a plan may have.
inline constexpr std::uint64_t kMaxSegments = std::uint64_t{1} << 20;
// Largest number of stored symbols (messages and candidate images) in a run.
inline constexpr std::uint64_t kMaxSimulationSymbols = std::uint64_t{1} << 27;

class Permutation {
 public:
  // Uniform Fisher-Yates permutation of [0, size).
  static Permutation random(std::uint64_t size, std::uint64_t seed);
  static Permutation identity(std::uint64_t size);
  explicit Permutation(std::vector<std::uint64_t> mapping);

  std::uint64_t size() const noexcept { return map_.size(); }
  std::uint64_t operator()(std::uint64_t t) const { return map_.at(t); }
  std::span<const std::uint64_t> mapping() const noexcept { return map_; }
  bool is_bijection() const;

 private:
  std::vector<std::uint64_t> map_;
};

struct TauSum {
  std::vector<std::uint32_t> type;        // candidate indices, ascending
  std::vector<std::uint64_t> subindices;  // one label per member of type
  std::uint32_t round = 0;
  std::uint32_t db = 0;
  bool desired = false;

  std::size_t tau() const noexcept { return type.size(); }
  // Label of candidate c in this sum, if c is a member.
  std::optional<std::uint64_t> label_of(std::uint32_t c) const;
};

struct QueryPlan {
  std::uint32_t n = 0;
  std::uint32_t mu = 0;
  std::uint32_t desired = 0;  // 0-based candidate index
  std::uint64_t beta = 0;
  std::uint64_t seed = 0;
  Permutation permutation = Permutation::identity(0);
  // Per database, sums grouped by ascending round.
  std::vector<std::vector<TauSum>> per_db;
};

// Segments per candidate: n^mu. Throws ResourceError above kMaxSegments.
std::uint64_t segment_count(std::uint32_t n, std::uint32_t mu);

QueryPlan generate_query_plan(std::uint32_t n, std::uint32_t mu, std::uint32_t desired,
                              std::uint64_t seed);

// Throws ProtocolError naming the first violated invariant: per-round type
// counts, exact desired coverage, side information for every desired sum,
// and no repeated (candidate, label) at a database.
void verify_plan_structure(const QueryPlan& plan);

// What database j receives: per sum, its type and the segment positions.
struct QueryItem {
  std::vector<std::uint32_t> type;
  std::vector<std::uint64_t> positions;

  friend auto operator<=>(const QueryItem&, const QueryItem&) = default;
};

struct DatabaseQuery {
  std::uint32_t db = 0;
  std::vector<QueryItem> items;
};

DatabaseQuery database_query(const QueryPlan& plan, std::uint32_t db);

// Canonical (sorted) form of a database's query.
std::vector<QueryItem> database_view(const QueryPlan& plan, std::uint32_t db);

// f uniform messages of beta * L symbols, identical at every database.
class MessageStore {
 public:
  MessageStore(std::uint32_t q, std::uint32_t f, std::uint64_t beta, std::size_t segment_length,
               std::uint64_t seed);

  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t f() const noexcept { return f_; }
  std::uint64_t beta() const noexcept { return beta_; }
  std::size_t segment_length() const noexcept { return length_; }
  std::uint64_t symbols_per_message() const noexcept { return beta_ * length_; }
  std::span<const std::uint32_t> message(std::uint32_t m) const;

  // Base-q index of (W^(1)_i, ..., W^(f)_i).
  std::uint64_t input_index_at(std::uint64_t i) const;

 private:
  std::uint32_t q_;
  std::uint32_t f_;
  std::uint64_t beta_;
  std::size_t length_;
  std::vector<std::vector<std::uint32_t>> messages_;
};

// Candidate image X^(v) = phi^(v)(W) evaluated pointwise and cut into
// beta segments of L symbols.
class SegmentedFunction {
 public:
  SegmentedFunction(const MessageStore& store, const FunctionTable& fn);

  std::uint64_t beta() const noexcept { return beta_; }
  std::size_t segment_length() const noexcept { return length_; }
  std::span<const std::uint32_t> segment(std::uint64_t position) const;
  std::span<const std::uint32_t> symbols() const noexcept { return values_; }

 private:
  std::uint64_t beta_;
  std::size_t length_;
  std::vector<std::uint32_t> values_;
};

// Codes shared by databases and user in concrete mode.
struct CodeBook {
  std::vector<FixedCode> per_candidate;
  // Joint code over the tuple alphabet of all mu images; absent when the
  // alphabet exceeds kMaxCodeAlphabet (round 1 is then charged symbolically).
  std::optional<FixedCode> joint;
  // Tuple (as base-q index over candidates) -> joint symbol.
  std::vector<std::pair<std::vector<std::uint32_t>, std::uint32_t>> joint_alphabet;
  double epsilon = 0.05;

  std::uint32_t joint_symbol(std::span<const std::uint32_t> tuple) const;
  std::span<const std::uint32_t> joint_tuple(std::uint32_t symbol) const;
};

inline constexpr double kDefaultSlack = 0.05;

CodeBook build_codebook(const CandidateSet& set, std::size_t segment_length,
                        double epsilon = kDefaultSlack);

struct LedgerEntry {
  std::uint32_t db = 0;
  std::uint32_t round = 0;
  std::vector<std::uint32_t> type;
  double charge = 0.0;  // q-ary units
};

class DownloadLedger {
 public:
  explicit DownloadLedger(AnswerMode mode) : mode_(mode) {}

  AnswerMode mode() const noexcept { return mode_; }
  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  void add(LedgerEntry entry) { entries_.push_back(std::move(entry)); }
  void append(std::span<const LedgerEntry> entries);

  double total() const;
  // Index r holds the charge of round r + 1.
  std::vector<double> per_round(std::uint32_t rounds) const;

 private:
  AnswerMode mode_;
  std::vector<LedgerEntry> entries_;
};

struct AnswerItem {
  std::vector<std::size_t> query_items;  // indices into DatabaseQuery::items
  std::vector<std::uint32_t> payload;
  std::uint32_t round = 0;
  std::vector<std::uint32_t> type;
  double charge = 0.0;
};

struct DatabaseAnswer {
  std::uint32_t db = 0;
  std::vector<AnswerItem> items;
  std::vector<LedgerEntry> ledger;
  std::size_t atypical_segments = 0;
  std::vector<std::string> warnings;
};

// A database's view of the world: its replica's candidate images.
class Database {
 public:
  Database(std::uint32_t id, const CandidateSet& set, std::span<const SegmentedFunction> images,
           const CodeBook* codes = nullptr);

  std::uint32_t id() const noexcept { return id_; }

  // Singletons sharing a position are answered as one jointly coded bundle;
  // every other sum as one (compressed) sum.
  DatabaseAnswer answer(const DatabaseQuery& query, AnswerMode mode) const;

 private:
  std::uint32_t id_;
  const CandidateSet& set_;
  std::span<const SegmentedFunction> images_;
  const CodeBook* codes_;
};

DatabaseAnswer answer_queries(std::uint32_t db, const QueryPlan& plan, const CandidateSet& set,
                              std::span<const SegmentedFunction> images, AnswerMode mode,
                              const CodeBook* codes = nullptr);

struct DecodeResult {
  std::vector<std::uint32_t> symbols;  // beta * L, natural segment order
  std::vector<bool> segment_ok;        // by segment position
  std::size_t failed_segments = 0;
};

// Round-ordered elimination. Throws ProtocolError if a desired sum has no
// side information from another database.
DecodeResult decode(const QueryPlan& plan, std::span<const DatabaseAnswer> answers,
                    const CandidateSet& set, std::size_t segment_length, AnswerMode mode,
                    const CodeBook* codes = nullptr);

struct PrivacyReport {
  bool ok = true;
  std::string detail;
};

// Exact structural checks across plans for every desired index: equal
// multisets of (round, type) per database, no repeated (candidate, label)
// at a database, and equal label-coincidence signatures per database.
PrivacyReport verify_privacy_structure(std::span<const QueryPlan> plans);

struct UniformityReport {
  bool ok = true;
  std::size_t tests = 0;
  double min_p_value = 1.0;
  double threshold = 0.0;  // Bonferroni-corrected significance
  std::string detail;
};

// Chi-square sanity test on the position of the first member of every
// (database, type) over seeds 1..seeds, for each desired index.
UniformityReport check_position_uniformity(std::uint32_t n, std::uint32_t mu, std::uint32_t seeds,
                                           double significance = 0.01);

struct ViewLawReport {
  bool ok = true;
  std::uint64_t permutations = 0;
  std::size_t distinct_views = 0;
  std::string detail;
};

// Exact distribution of each database's view over every permutation of
// [beta], compared across desired indices. Requires beta <= 9.
ViewLawReport check_view_law_equality(std::uint32_t n, std::uint32_t mu);

struct SimulationConfig {
  std::uint32_t n = 2;
  std::size_t segment_length = 16;
  std::uint32_t desired = 0;  // 0-based, into the entropy-ordered set
  AnswerMode mode = AnswerMode::kSymbolic;
  std::uint64_t seed = 1;
  double epsilon = kDefaultSlack;
  bool check_privacy = true;
};

struct SimulationReport {
  std::uint32_t n = 0;
  std::uint32_t q = 0;
  std::size_t mu = 0;
  std::uint32_t f = 0;
  std::size_t segment_length = 0;
  std::uint32_t desired = 0;  // 1-based, as reported
  AnswerMode mode = AnswerMode::kSymbolic;
  std::uint64_t seed = 0;
  double total_download = 0.0;  // q-ary units
  double rate_measured = 0.0;
  double rate_formula = 0.0;
  bool recovery_ok = false;
  bool privacy_ok = false;
  std::vector<std::pair<std::uint32_t, double>> per_round;
  std::size_t decode_failures = 0;
  std::size_t atypical_segments = 0;
  std::vector<std::string> warnings;
};

SimulationReport run_simulation(const CandidateSet& set, const SimulationConfig& config);

}  // namespace privcomp

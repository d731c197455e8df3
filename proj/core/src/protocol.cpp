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
#include "privcomp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/math/distributions/chi_squared.hpp>

#include "privcomp/errors.hpp"
#include "privcomp/random.hpp"
#include "privcomp/rates.hpp"

namespace privcomp {

std::string to_string(AnswerMode mode) {
  return mode == AnswerMode::kSymbolic ? "symbolic" : "concrete";
}

AnswerMode parse_answer_mode(std::string_view text) {
  if (text == "symbolic") return AnswerMode::kSymbolic;
  if (text == "concrete") return AnswerMode::kConcrete;
  throw UsageError("unknown answer mode '" + std::string(text) + "' (symbolic|concrete)");
}

// ---------------------------------------------------------------------------
// Permutation

Permutation Permutation::random(std::uint64_t size, std::uint64_t seed) {
  std::vector<std::uint64_t> map(size);
  std::iota(map.begin(), map.end(), std::uint64_t{0});
  Rng rng(seed);
  for (std::uint64_t i = size; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    std::swap(map[i - 1], map[j]);
  }
  return Permutation(std::move(map));
}

Permutation Permutation::identity(std::uint64_t size) {
  std::vector<std::uint64_t> map(size);
  std::iota(map.begin(), map.end(), std::uint64_t{0});
  return Permutation(std::move(map));
}

Permutation::Permutation(std::vector<std::uint64_t> mapping) : map_(std::move(mapping)) {
  if (!is_bijection()) throw UsageError("permutation mapping is not a bijection");
}

bool Permutation::is_bijection() const {
  std::vector<bool> seen(map_.size(), false);
  for (auto x : map_) {
    if (x >= map_.size() || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

std::optional<std::uint64_t> TauSum::label_of(std::uint32_t c) const {
  for (std::size_t i = 0; i < type.size(); ++i) {
    if (type[i] == c) return subindices[i];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Plan generation

std::uint64_t segment_count(std::uint32_t n, std::uint32_t mu) {
  std::uint64_t beta = 1;
  for (std::uint32_t i = 0; i < mu; ++i) {
    beta *= n;
    if (beta > kMaxSegments) {
      throw ResourceError("beta = n^mu = " + std::to_string(n) + "^" + std::to_string(mu) +
                          " exceeds the segment cap of " + std::to_string(kMaxSegments));
    }
  }
  return beta;
}

namespace {

using Mask = std::uint32_t;

std::vector<std::uint32_t> members(Mask m) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; m != 0; ++c, m >>= 1U) {
    if (m & 1U) out.push_back(c);
  }
  return out;
}

// k-subsets of [0, mu) in lexicographic order of their sorted members.
std::vector<Mask> subsets_of_size(std::uint32_t mu, std::uint32_t k) {
  std::vector<Mask> out;
  std::vector<std::uint32_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0U);
  if (k > mu) return out;
  while (true) {
    Mask m = 0;
    for (auto i : idx) m |= Mask{1} << i;
    out.push_back(m);
    std::int64_t pos = static_cast<std::int64_t>(k) - 1;
    while (pos >= 0 && idx[pos] == mu - k + static_cast<std::uint32_t>(pos)) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (auto p = static_cast<std::size_t>(pos) + 1; p < k; ++p) idx[p] = idx[p - 1] + 1;
  }
  return out;
}

// A block holds one sum of every type of its round. Z labels the
// (round-1)-subsets; member p of sum S carries label Z(S \ {p}).
struct Block {
  std::uint32_t db = 0;
  std::unordered_map<Mask, std::uint64_t> z;
};

}  // namespace

QueryPlan generate_query_plan(std::uint32_t n, std::uint32_t mu, std::uint32_t desired,
                              std::uint64_t seed) {
  if (n < 2) throw DomainError("query plans need n >= 2 databases");
  if (mu < 1) throw UsageError("query plans need mu >= 1 candidates");
  if (desired >= mu) {
    throw UsageError("desired index " + std::to_string(desired + 1) + " out of range [1, " +
                     std::to_string(mu) + "]");
  }
  if (mu > 31) throw ResourceError("mu > 31 candidates not supported");

  QueryPlan plan;
  plan.n = n;
  plan.mu = mu;
  plan.desired = desired;
  plan.beta = segment_count(n, mu);
  plan.seed = seed;
  plan.per_db.assign(n, {});

  const Mask v_bit = Mask{1} << desired;
  std::uint64_t next_label = 0;

  std::vector<Block> blocks;
  for (std::uint32_t j = 0; j < n; ++j) {
    Block b{j, {{Mask{0}, next_label++}}};
    for (std::uint32_t p = 0; p < mu; ++p) {
      plan.per_db[j].push_back(TauSum{{p}, {b.z.at(0)}, 1, j, p == desired});
    }
    blocks.push_back(std::move(b));
  }

  for (std::uint32_t tau = 2; tau <= mu; ++tau) {
    const auto lower = subsets_of_size(mu, tau - 1);
    const auto types = subsets_of_size(mu, tau);
    std::vector<Block> next;
    for (std::uint32_t j = 0; j < n; ++j) {
      for (const auto& parent : blocks) {
        if (parent.db == j) continue;
        Block child{j, {}};
        child.z.reserve(lower.size());
        for (Mask r : lower) {
          child.z[r] = (r & v_bit) ? parent.z.at(r & ~v_bit) : next_label++;
        }
        for (Mask s : types) {
          TauSum sum;
          sum.type = members(s);
          sum.round = tau;
          sum.db = j;
          sum.desired = (s & v_bit) != 0;
          for (auto p : sum.type) sum.subindices.push_back(child.z.at(s & ~(Mask{1} << p)));
          plan.per_db[j].push_back(std::move(sum));
        }
        next.push_back(std::move(child));
      }
    }
    blocks = std::move(next);
  }

  if (next_label != plan.beta) {
    throw ProtocolError("label allocation used " + std::to_string(next_label) +
                        " labels, expected beta = " + std::to_string(plan.beta));
  }
  plan.permutation = Permutation::random(plan.beta, splitmix64(seed));
  return plan;
}

namespace {

using SumKey = std::pair<std::vector<std::uint32_t>, std::vector<std::uint64_t>>;

SumKey side_key(const TauSum& sum, std::uint32_t desired) {
  SumKey key;
  for (std::size_t i = 0; i < sum.type.size(); ++i) {
    if (sum.type[i] == desired) continue;
    key.first.push_back(sum.type[i]);
    key.second.push_back(sum.subindices[i]);
  }
  return key;
}

struct SumLocation {
  std::uint32_t db;
  std::size_t index;
};

// Undesired sums of every database by (type, labels).
std::map<SumKey, std::vector<SumLocation>> index_undesired(const QueryPlan& plan) {
  std::map<SumKey, std::vector<SumLocation>> index;
  for (std::uint32_t j = 0; j < plan.per_db.size(); ++j) {
    const auto& sums = plan.per_db[j];
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (sums[i].desired) continue;
      index[{sums[i].type, sums[i].subindices}].push_back({j, i});
    }
  }
  return index;
}

std::optional<SumLocation> find_side_information(
    const std::map<SumKey, std::vector<SumLocation>>& index, const TauSum& sum,
    std::uint32_t desired) {
  auto it = index.find(side_key(sum, desired));
  if (it == index.end()) return std::nullopt;
  for (const auto& loc : it->second) {
    if (loc.db != sum.db) return loc;
  }
  return std::nullopt;
}

std::string describe(const TauSum& s) {
  std::ostringstream os;
  os << "db " << s.db + 1 << " round " << s.round << " {";
  for (std::size_t i = 0; i < s.type.size(); ++i) {
    os << (i ? " + " : "") << "U" << s.type[i] + 1 << "_" << s.subindices[i] + 1;
  }
  os << "}";
  return os.str();
}

}  // namespace

void verify_plan_structure(const QueryPlan& plan) {
  const auto n = plan.n;
  const auto mu = plan.mu;
  if (plan.per_db.size() != n) throw ProtocolError("plan does not cover every database");
  if (plan.permutation.size() != plan.beta) throw ProtocolError("permutation size differs from beta");

  std::vector<std::uint32_t> desired_uses(plan.beta, 0);
  for (std::uint32_t j = 0; j < n; ++j) {
    std::map<std::vector<std::uint32_t>, std::uint64_t> type_counts;
    std::set<std::pair<std::uint32_t, std::uint64_t>> seen;
    for (const auto& s : plan.per_db[j]) {
      if (s.db != j) throw ProtocolError(describe(s) + " filed under database " + std::to_string(j + 1));
      if (s.type.empty() || s.type.size() != s.subindices.size() || s.round != s.type.size()) {
        throw ProtocolError(describe(s) + ": malformed sum");
      }
      if (!std::is_sorted(s.type.begin(), s.type.end()) ||
          std::adjacent_find(s.type.begin(), s.type.end()) != s.type.end() || s.type.back() >= mu) {
        throw ProtocolError(describe(s) + ": type is not a subset of the candidates");
      }
      const bool has_desired = std::binary_search(s.type.begin(), s.type.end(), plan.desired);
      if (has_desired != s.desired) throw ProtocolError(describe(s) + ": desired flag inconsistent");
      for (std::size_t i = 0; i < s.type.size(); ++i) {
        const auto t = s.subindices[i];
        if (t >= plan.beta) throw ProtocolError(describe(s) + ": subindex beyond beta");
        if (!seen.insert({s.type[i], t}).second) {
          throw ProtocolError(describe(s) + ": segment requested twice at one database");
        }
        if (s.type[i] == plan.desired) ++desired_uses[t];
      }
      ++type_counts[s.type];
    }
    for (std::uint32_t tau = 1; tau <= mu; ++tau) {
      const auto expected = static_cast<std::uint64_t>(std::llround(std::pow(n - 1.0, tau - 1.0)));
      for (Mask m : subsets_of_size(mu, tau)) {
        const auto got = type_counts[members(m)];
        if (got != expected) {
          throw ProtocolError("database " + std::to_string(j + 1) + " has " + std::to_string(got) +
                              " sums of a round-" + std::to_string(tau) + " type, expected " +
                              std::to_string(expected));
        }
      }
    }
  }
  for (std::uint64_t t = 0; t < plan.beta; ++t) {
    if (desired_uses[t] != 1) {
      throw ProtocolError("desired segment label " + std::to_string(t + 1) + " used " +
                          std::to_string(desired_uses[t]) + " times");
    }
  }
  const auto index = index_undesired(plan);
  for (const auto& sums : plan.per_db) {
    for (const auto& s : sums) {
      if (!s.desired || s.tau() < 2) continue;
      if (!find_side_information(index, s, plan.desired)) {
        throw ProtocolError(describe(s) + ": no matching undesired sum at another database");
      }
    }
  }
}

DatabaseQuery database_query(const QueryPlan& plan, std::uint32_t db) {
  if (db >= plan.per_db.size()) throw UsageError("database index out of range");
  DatabaseQuery q{db, {}};
  q.items.reserve(plan.per_db[db].size());
  for (const auto& s : plan.per_db[db]) {
    QueryItem item{s.type, {}};
    for (auto t : s.subindices) item.positions.push_back(plan.permutation(t));
    q.items.push_back(std::move(item));
  }
  return q;
}

std::vector<QueryItem> database_view(const QueryPlan& plan, std::uint32_t db) {
  auto items = database_query(plan, db).items;
  std::sort(items.begin(), items.end());
  return items;
}

// ---------------------------------------------------------------------------
// Storage

MessageStore::MessageStore(std::uint32_t q, std::uint32_t f, std::uint64_t beta,
                           std::size_t segment_length, std::uint64_t seed)
    : q_(q), f_(f), beta_(beta), length_(segment_length) {
  (void)PrimeField(q);
  if (f == 0 || beta == 0 || segment_length == 0) throw UsageError("empty message store");
  Rng rng(seed);
  messages_.assign(f, std::vector<std::uint32_t>(beta * segment_length));
  for (auto& m : messages_) {
    for (auto& w : m) w = static_cast<std::uint32_t>(uniform_below(rng, q));
  }
}

std::span<const std::uint32_t> MessageStore::message(std::uint32_t m) const {
  return messages_.at(m);
}

std::uint64_t MessageStore::input_index_at(std::uint64_t i) const {
  std::uint64_t idx = 0;
  for (const auto& m : messages_) idx = idx * q_ + m[i];
  return idx;
}

SegmentedFunction::SegmentedFunction(const MessageStore& store, const FunctionTable& fn)
    : beta_(store.beta()), length_(store.segment_length()) {
  if (fn.q() != store.q() || fn.f() != store.f()) throw UsageError("function does not match store");
  const auto total = store.symbols_per_message();
  values_.resize(total);
  for (std::uint64_t i = 0; i < total; ++i) values_[i] = fn.at(store.input_index_at(i));
}

std::span<const std::uint32_t> SegmentedFunction::segment(std::uint64_t position) const {
  if (position >= beta_) throw ProtocolError("unknown segment position " + std::to_string(position));
  return std::span<const std::uint32_t>(values_).subspan(position * length_, length_);
}

// ---------------------------------------------------------------------------
// Codes

std::uint32_t CodeBook::joint_symbol(std::span<const std::uint32_t> tuple) const {
  auto it = std::lower_bound(joint_alphabet.begin(), joint_alphabet.end(), tuple,
                             [](const auto& entry, std::span<const std::uint32_t> t) {
                               return std::lexicographical_compare(entry.first.begin(), entry.first.end(),
                                                                   t.begin(), t.end());
                             });
  if (it == joint_alphabet.end() || !std::equal(it->first.begin(), it->first.end(), tuple.begin(), tuple.end())) {
    throw ProtocolError("value tuple outside the joint alphabet");
  }
  return it->second;
}

std::span<const std::uint32_t> CodeBook::joint_tuple(std::uint32_t symbol) const {
  return joint_alphabet.at(symbol).first;
}

CodeBook build_codebook(const CandidateSet& set, std::size_t segment_length, double epsilon) {
  CodeBook book;
  book.epsilon = epsilon;
  const auto q = set.q();
  for (const auto& c : set.candidates()) {
    book.per_candidate.push_back(FixedCode::for_entropy(q, q, segment_length, c.entropy, epsilon));
  }
  std::set<std::vector<std::uint32_t>> tuples;
  const auto size = set[0].table.size();
  std::vector<std::uint32_t> tuple(set.mu());
  for (std::size_t x = 0; x < size; ++x) {
    for (std::size_t p = 0; p < set.mu(); ++p) tuple[p] = set[p].table.at(x);
    tuples.insert(tuple);
  }
  std::uint32_t symbol = 0;
  for (const auto& t : tuples) book.joint_alphabet.emplace_back(t, symbol++);
  if (book.joint_alphabet.size() <= kMaxCodeAlphabet) {
    book.joint = FixedCode::for_entropy(q, static_cast<std::uint32_t>(book.joint_alphabet.size()),
                                        segment_length, set.profile().joint(set.mu()), epsilon);
  }
  return book;
}

// ---------------------------------------------------------------------------
// Ledger

void DownloadLedger::append(std::span<const LedgerEntry> entries) {
  entries_.insert(entries_.end(), entries.begin(), entries.end());
}

double DownloadLedger::total() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.charge;
  return sum;
}

std::vector<double> DownloadLedger::per_round(std::uint32_t rounds) const {
  std::vector<double> out(rounds, 0.0);
  for (const auto& e : entries_) {
    if (e.round >= 1 && e.round <= rounds) out[e.round - 1] += e.charge;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Databases

Database::Database(std::uint32_t id, const CandidateSet& set,
                   std::span<const SegmentedFunction> images, const CodeBook* codes)
    : id_(id), set_(set), images_(images), codes_(codes) {
  if (images.size() != set.mu()) throw UsageError("need one image per candidate");
}

namespace {

Codeword encode_or_zero(std::span<const std::uint32_t> segment, const FixedCode& code,
                        std::size_t& atypical) {
  if (auto cw = encode_fixed(segment, code)) return std::move(*cw);
  ++atypical;
  return zero_codeword(code.codeword_len());
}

double bundle_joint_entropy(const CandidateSet& set, const std::vector<std::uint32_t>& members) {
  if (members.size() == set.mu()) return set.profile().joint(set.mu());
  std::vector<FunctionTable> tables;
  for (auto p : members) tables.push_back(set[p].table);
  return prefix_joint_entropies(tables).back();
}

}  // namespace

DatabaseAnswer Database::answer(const DatabaseQuery& query, AnswerMode mode) const {
  if (mode == AnswerMode::kConcrete && codes_ == nullptr) {
    throw UsageError("concrete answers need a code book");
  }
  const auto length = images_.front().segment_length();
  const PrimeField field(set_.q());
  DatabaseAnswer out;
  out.db = id_;

  // Singletons at one position form a bundle, in order of first appearance.
  std::vector<std::uint64_t> bundle_order;
  std::map<std::uint64_t, std::vector<std::size_t>> bundles;

  for (std::size_t i = 0; i < query.items.size(); ++i) {
    const auto& item = query.items[i];
    if (item.type.size() != item.positions.size() || item.type.empty()) {
      throw ProtocolError("malformed query item");
    }
    for (auto c : item.type) {
      if (c >= set_.mu()) throw ProtocolError("query names an unknown candidate");
    }
    if (item.type.size() == 1) {
      auto [it, inserted] = bundles.try_emplace(item.positions[0]);
      if (inserted) bundle_order.push_back(item.positions[0]);
      it->second.push_back(i);
    }
  }

  for (auto pos : bundle_order) {
    const auto& idx = bundles[pos];
    AnswerItem a;
    a.query_items = idx;
    a.round = 1;
    for (auto i : idx) a.type.push_back(query.items[i].type[0]);
    std::vector<std::uint32_t> sorted_members = a.type;
    std::sort(sorted_members.begin(), sorted_members.end());

    const bool joint_coding = mode == AnswerMode::kConcrete && codes_->joint.has_value() &&
                              sorted_members.size() == set_.mu();
    if (joint_coding) {
      std::vector<std::uint32_t> symbols(length);
      std::vector<std::uint32_t> tuple(set_.mu());
      for (std::size_t s = 0; s < length; ++s) {
        for (std::uint32_t p = 0; p < set_.mu(); ++p) tuple[p] = images_[p].segment(pos)[s];
        symbols[s] = codes_->joint_symbol(tuple);
      }
      a.payload = encode_or_zero(symbols, *codes_->joint, out.atypical_segments).symbols;
      a.charge = static_cast<double>(codes_->joint->codeword_len());
    } else {
      if (mode == AnswerMode::kConcrete) {
        out.warnings.push_back("joint alphabet too large for concrete coding; round 1 charged symbolically");
      }
      for (auto c : a.type) {
        auto seg = images_[c].segment(pos);
        a.payload.insert(a.payload.end(), seg.begin(), seg.end());
      }
      a.charge = static_cast<double>(length) * bundle_joint_entropy(set_, sorted_members);
    }
    a.type = sorted_members;
    out.ledger.push_back({id_, 1, a.type, a.charge});
    out.items.push_back(std::move(a));
  }

  for (std::size_t i = 0; i < query.items.size(); ++i) {
    const auto& item = query.items[i];
    if (item.type.size() == 1) continue;
    AnswerItem a;
    a.query_items = {i};
    a.round = static_cast<std::uint32_t>(item.type.size());
    a.type = item.type;
    if (mode == AnswerMode::kSymbolic) {
      a.payload.assign(length, 0);
      double hmax = 0.0;
      for (std::size_t k = 0; k < item.type.size(); ++k) {
        auto seg = images_[item.type[k]].segment(item.positions[k]);
        for (std::size_t s = 0; s < length; ++s) a.payload[s] = field.add(a.payload[s], seg[s]);
        hmax = std::max(hmax, set_[item.type[k]].entropy);
      }
      a.charge = static_cast<double>(length) * hmax;
    } else {
      std::size_t len = 0;
      for (auto c : item.type) len = std::max(len, codes_->per_candidate[c].codeword_len());
      Codeword acc = zero_codeword(len);
      for (std::size_t k = 0; k < item.type.size(); ++k) {
        const auto c = item.type[k];
        auto cw = zero_pad(encode_or_zero(images_[c].segment(item.positions[k]),
                                          codes_->per_candidate[c], out.atypical_segments),
                           len);
        const Codeword pair[] = {acc, cw};
        acc = sum_codewords(pair, set_.q());
      }
      a.payload = std::move(acc.symbols);
      a.charge = static_cast<double>(len);
    }
    out.ledger.push_back({id_, a.round, a.type, a.charge});
    out.items.push_back(std::move(a));
  }
  return out;
}

DatabaseAnswer answer_queries(std::uint32_t db, const QueryPlan& plan, const CandidateSet& set,
                              std::span<const SegmentedFunction> images, AnswerMode mode,
                              const CodeBook* codes) {
  return Database(db, set, images, codes).answer(database_query(plan, db), mode);
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

struct ItemRef {
  std::size_t item = 0;
  std::size_t offset = 0;  // position inside a bundle
};

}  // namespace

DecodeResult decode(const QueryPlan& plan, std::span<const DatabaseAnswer> answers,
                    const CandidateSet& set, std::size_t segment_length, AnswerMode mode,
                    const CodeBook* codes) {
  if (answers.size() != plan.n) throw ProtocolError("decoding needs answers from all databases");
  if (mode == AnswerMode::kConcrete && codes == nullptr) throw UsageError("concrete decoding needs a code book");
  const auto L = segment_length;
  const auto v = plan.desired;
  const PrimeField field(set.q());

  // query index -> answer item, per database
  std::vector<std::vector<ItemRef>> refs(plan.n);
  for (std::uint32_t j = 0; j < plan.n; ++j) {
    if (answers[j].db != j) throw ProtocolError("answers are not ordered by database");
    refs[j].resize(plan.per_db[j].size());
    std::vector<bool> covered(plan.per_db[j].size(), false);
    for (std::size_t a = 0; a < answers[j].items.size(); ++a) {
      const auto& qi = answers[j].items[a].query_items;
      for (std::size_t k = 0; k < qi.size(); ++k) {
        if (qi[k] >= refs[j].size()) throw ProtocolError("answer refers to an unknown query item");
        refs[j][qi[k]] = {a, k};
        covered[qi[k]] = true;
      }
    }
    if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
      throw ProtocolError("database " + std::to_string(j + 1) + " left a query unanswered");
    }
  }

  // Raw singleton segments recovered from round-1 bundles, keyed by
  // (database, query index). Concrete bundles that fail to decode stay empty.
  std::vector<std::vector<std::optional<std::vector<std::uint32_t>>>> raw(plan.n);
  for (std::uint32_t j = 0; j < plan.n; ++j) {
    raw[j].resize(plan.per_db[j].size());
    for (const auto& item : answers[j].items) {
      if (item.round != 1) continue;
      const bool coded = mode == AnswerMode::kConcrete && codes->joint.has_value() &&
                         item.payload.size() == codes->joint->codeword_len() &&
                         item.query_items.size() == set.mu();
      if (coded) {
        std::vector<std::uint32_t> symbols;
        try {
          symbols = decode_fixed(Codeword{item.payload}, *codes->joint);
        } catch (const CorruptionError&) {
          continue;
        }
        for (auto qi : item.query_items) {
          const auto c = plan.per_db[j][qi].type[0];
          std::vector<std::uint32_t> seg(L);
          for (std::size_t s = 0; s < L; ++s) seg[s] = codes->joint_tuple(symbols[s])[c];
          raw[j][qi] = std::move(seg);
        }
      } else {
        if (item.payload.size() != item.query_items.size() * L) throw ProtocolError("bundle payload has wrong size");
        for (std::size_t k = 0; k < item.query_items.size(); ++k) {
          raw[j][item.query_items[k]] =
              std::vector<std::uint32_t>(item.payload.begin() + k * L, item.payload.begin() + (k + 1) * L);
        }
      }
    }
  }

  const auto index = index_undesired(plan);
  DecodeResult result;
  result.symbols.assign(plan.beta * L, 0);
  result.segment_ok.assign(plan.beta, false);

  auto place = [&](std::uint64_t label, std::span<const std::uint32_t> seg) {
    const auto pos = plan.permutation(label);
    std::copy(seg.begin(), seg.end(), result.symbols.begin() + static_cast<std::ptrdiff_t>(pos * L));
    result.segment_ok[pos] = true;
  };

  for (std::uint32_t j = 0; j < plan.n; ++j) {
    for (std::size_t i = 0; i < plan.per_db[j].size(); ++i) {
      const auto& s = plan.per_db[j][i];
      if (!s.desired) continue;
      const auto label = *s.label_of(v);
      if (s.tau() == 1) {
        if (raw[j][i]) place(label, *raw[j][i]);
        continue;
      }
      const auto side = find_side_information(index, s, v);
      if (!side) throw ProtocolError(describe(s) + ": missing side information");
      const auto& side_sum = plan.per_db[side->db][side->index];
      const auto& payload = answers[j].items[refs[j][i].item].payload;

      if (mode == AnswerMode::kSymbolic) {
        std::vector<std::uint32_t> known;
        if (side_sum.tau() == 1) {
          if (!raw[side->db][side->index]) continue;
          known = *raw[side->db][side->index];
        } else {
          known = answers[side->db].items[refs[side->db][side->index].item].payload;
        }
        if (known.size() != L || payload.size() != L) throw ProtocolError("sum payload has wrong size");
        std::vector<std::uint32_t> seg(L);
        for (std::size_t k = 0; k < L; ++k) seg[k] = field.sub(payload[k], known[k]);
        place(label, seg);
        continue;
      }

      // Concrete: rebuild the side-information codeword sum, cancel it, and
      // decode what remains with the desired candidate's code.
      Codeword known;
      if (side_sum.tau() == 1) {
        if (!raw[side->db][side->index]) continue;
        std::size_t ignored = 0;
        const auto c = side_sum.type[0];
        known = encode_or_zero(*raw[side->db][side->index], codes->per_candidate[c], ignored);
      } else {
        known.symbols = answers[side->db].items[refs[side->db][side->index].item].payload;
      }
      if (known.symbols.size() > payload.size()) continue;
      const auto diff = subtract_codewords(Codeword{payload}, zero_pad(std::move(known), payload.size()), set.q());
      const auto& code = codes->per_candidate[v];
      if (code.codeword_len() > diff.symbols.size()) continue;
      if (!std::all_of(diff.symbols.begin() + static_cast<std::ptrdiff_t>(code.codeword_len()),
                       diff.symbols.end(), [](std::uint32_t x) { return x == 0; })) {
        continue;
      }
      Codeword desired_cw{std::vector<std::uint32_t>(
          diff.symbols.begin(), diff.symbols.begin() + static_cast<std::ptrdiff_t>(code.codeword_len()))};
      try {
        place(label, decode_fixed(desired_cw, code));
      } catch (const CorruptionError&) {
      }
    }
  }
  result.failed_segments = static_cast<std::size_t>(
      std::count(result.segment_ok.begin(), result.segment_ok.end(), false));
  return result;
}

// ---------------------------------------------------------------------------
// Privacy structure

namespace {

using RoundType = std::pair<std::uint32_t, std::vector<std::uint32_t>>;

std::vector<RoundType> round_type_multiset(const QueryPlan& plan, std::uint32_t j) {
  std::vector<RoundType> out;
  for (const auto& s : plan.per_db[j]) out.emplace_back(s.round, s.type);
  std::sort(out.begin(), out.end());
  return out;
}

// For each label used at a database: the sorted list of (type, candidate)
// entries carrying it. The sorted list of these lists is invariant under
// renaming labels.
using Signature = std::vector<std::vector<std::pair<std::vector<std::uint32_t>, std::uint32_t>>>;

Signature coincidence_signature(const QueryPlan& plan, std::uint32_t j) {
  std::map<std::uint64_t, std::vector<std::pair<std::vector<std::uint32_t>, std::uint32_t>>> by_label;
  for (const auto& s : plan.per_db[j]) {
    for (std::size_t i = 0; i < s.type.size(); ++i) by_label[s.subindices[i]].emplace_back(s.type, s.type[i]);
  }
  Signature sig;
  for (auto& [label, entries] : by_label) {
    std::sort(entries.begin(), entries.end());
    sig.push_back(std::move(entries));
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

std::string type_string(const std::vector<std::uint32_t>& type) {
  std::string s = "{";
  for (std::size_t i = 0; i < type.size(); ++i) s += (i ? "," : "") + std::to_string(type[i] + 1);
  return s + "}";
}

}  // namespace

PrivacyReport verify_privacy_structure(std::span<const QueryPlan> plans) {
  PrivacyReport report;
  if (plans.empty()) return report;
  const auto n = plans.front().n;
  for (const auto& p : plans) {
    if (p.n != n || p.mu != plans.front().mu || p.per_db.size() != n) {
      return {false, "plans disagree on n or mu"};
    }
  }
  for (const auto& p : plans) {
    for (std::uint32_t j = 0; j < n; ++j) {
      std::set<std::pair<std::uint32_t, std::uint64_t>> seen;
      for (const auto& s : p.per_db[j]) {
        for (std::size_t i = 0; i < s.type.size(); ++i) {
          if (!seen.insert({s.type[i], s.subindices[i]}).second) {
            return {false, "v=" + std::to_string(p.desired + 1) + ": database " + std::to_string(j + 1) +
                               " sees segment " + std::to_string(s.subindices[i] + 1) + " of candidate " +
                               std::to_string(s.type[i] + 1) + " twice"};
          }
        }
      }
    }
  }
  for (std::uint32_t j = 0; j < n; ++j) {
    const auto reference = round_type_multiset(plans.front(), j);
    const auto reference_sig = coincidence_signature(plans.front(), j);
    for (std::size_t k = 1; k < plans.size(); ++k) {
      const auto other = round_type_multiset(plans[k], j);
      if (other != reference) {
        std::string detail = "database " + std::to_string(j + 1) + ": (round, type) multiset differs between v=" +
                             std::to_string(plans.front().desired + 1) + " and v=" +
                             std::to_string(plans[k].desired + 1);
        std::vector<RoundType> diff;
        std::set_symmetric_difference(reference.begin(), reference.end(), other.begin(), other.end(),
                                      std::back_inserter(diff));
        if (!diff.empty()) {
          detail += "; e.g. round " + std::to_string(diff.front().first) + " type " + type_string(diff.front().second);
        } else {
          detail += "; sizes " + std::to_string(reference.size()) + " vs " + std::to_string(other.size());
        }
        return {false, detail};
      }
      if (coincidence_signature(plans[k], j) != reference_sig) {
        return {false, "database " + std::to_string(j + 1) + ": segment-coincidence pattern differs between v=" +
                           std::to_string(plans.front().desired + 1) + " and v=" +
                           std::to_string(plans[k].desired + 1)};
      }
    }
  }
  return report;
}

UniformityReport check_position_uniformity(std::uint32_t n, std::uint32_t mu, std::uint32_t seeds,
                                           double significance) {
  if (seeds < 10) throw UsageError("uniformity check needs at least 10 seeds");
  const auto beta = segment_count(n, mu);
  const std::uint64_t bins = std::max<std::uint64_t>(2, std::min<std::uint64_t>(beta, seeds / 5));

  // (desired, db, type) -> histogram of the first member's position.
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::vector<std::uint32_t>>, std::vector<std::uint64_t>> hist;
  for (std::uint32_t v = 0; v < mu; ++v) {
    for (std::uint32_t s = 1; s <= seeds; ++s) {
      const auto plan = generate_query_plan(n, mu, v, s);
      for (std::uint32_t j = 0; j < n; ++j) {
        std::set<std::vector<std::uint32_t>> done;
        for (const auto& sum : plan.per_db[j]) {
          if (!done.insert(sum.type).second) continue;
          auto& h = hist[{v, j, sum.type}];
          h.resize(bins, 0);
          ++h[plan.permutation(sum.subindices[0]) * bins / beta];
        }
      }
    }
  }

  UniformityReport report;
  report.tests = hist.size();
  report.threshold = significance / static_cast<double>(report.tests);
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins - 1));
  for (const auto& [key, h] : hist) {
    double stat = 0.0;
    for (std::uint64_t b = 0; b < bins; ++b) {
      // Bin b covers labels [ceil(b*beta/bins), ceil((b+1)*beta/bins)).
      const auto lo = (b * beta + bins - 1) / bins;
      const auto hi = ((b + 1) * beta + bins - 1) / bins;
      const double expected = static_cast<double>(seeds) * static_cast<double>(hi - lo) / static_cast<double>(beta);
      const double d = static_cast<double>(h[b]) - expected;
      stat += d * d / expected;
    }
    const double p = boost::math::cdf(boost::math::complement(dist, stat));
    if (p < report.min_p_value) {
      report.min_p_value = p;
      const auto& [v, j, type] = key;
      report.detail = "v=" + std::to_string(v + 1) + " database " + std::to_string(j + 1) + " type " +
                      type_string(type) + ": chi2=" + std::to_string(stat);
    }
  }
  report.ok = report.min_p_value >= report.threshold;
  return report;
}

namespace {

std::string encode_view(const QueryPlan& plan, std::uint32_t j, std::span<const std::uint64_t> perm) {
  std::vector<QueryItem> items;
  items.reserve(plan.per_db[j].size());
  for (const auto& s : plan.per_db[j]) {
    QueryItem item{s.type, {}};
    for (auto t : s.subindices) item.positions.push_back(perm[t]);
    items.push_back(std::move(item));
  }
  std::sort(items.begin(), items.end());
  std::string key;
  for (const auto& item : items) {
    key.push_back(static_cast<char>(item.type.size()));
    for (auto c : item.type) key.push_back(static_cast<char>(c));
    for (auto p : item.positions) key.push_back(static_cast<char>(p));
  }
  return key;
}

std::unordered_map<std::string, std::uint32_t> view_law(const QueryPlan& plan, std::uint32_t j) {
  std::vector<std::uint64_t> perm(plan.beta);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  std::unordered_map<std::string, std::uint32_t> law;
  do {
    ++law[encode_view(plan, j, perm)];
  } while (std::next_permutation(perm.begin(), perm.end()));
  return law;
}

}  // namespace

ViewLawReport check_view_law_equality(std::uint32_t n, std::uint32_t mu) {
  const auto beta = segment_count(n, mu);
  if (beta > 9) throw UsageError("exact view-law enumeration needs beta <= 9");
  std::vector<QueryPlan> plans;
  for (std::uint32_t v = 0; v < mu; ++v) plans.push_back(generate_query_plan(n, mu, v, 1));

  ViewLawReport report;
  report.permutations = 1;
  for (std::uint64_t k = 2; k <= beta; ++k) report.permutations *= k;
  for (std::uint32_t j = 0; j < n; ++j) {
    const auto reference = view_law(plans.front(), j);
    report.distinct_views = std::max(report.distinct_views, reference.size());
    for (std::uint32_t v = 1; v < mu; ++v) {
      if (view_law(plans[v], j) != reference) {
        report.ok = false;
        report.detail = "database " + std::to_string(j + 1) + ": view distribution for v=" + std::to_string(v + 1) +
                        " differs from v=1";
        return report;
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// End-to-end run

SimulationReport run_simulation(const CandidateSet& set, const SimulationConfig& config) {
  const auto mu = static_cast<std::uint32_t>(set.mu());
  if (mu == 0) throw UsageError("empty candidate set");
  if (config.desired >= mu) {
    throw UsageError("desired index " + std::to_string(config.desired + 1) + " out of range [1, " +
                     std::to_string(mu) + "]");
  }
  if (config.segment_length == 0) throw UsageError("segment length must be positive");
  if (config.n < 2) throw DomainError("simulation needs n >= 2 databases");
  if (config.mode == AnswerMode::kConcrete && set.q() > kMaxCodeAlphabet) {
    throw UsageError("concrete mode supports q <= " + std::to_string(kMaxCodeAlphabet));
  }
  if (!(config.epsilon > 0.0)) throw UsageError("epsilon must be positive");

  const auto beta = segment_count(config.n, mu);
  const double symbols = static_cast<double>(beta) * static_cast<double>(config.segment_length) *
                         static_cast<double>(set.f() + mu);
  if (symbols > static_cast<double>(kMaxSimulationSymbols)) {
    throw ResourceError("simulation would store " + std::to_string(static_cast<std::uint64_t>(symbols)) +
                        " symbols, above the cap of " + std::to_string(kMaxSimulationSymbols));
  }

  SimulationReport report;
  report.n = config.n;
  report.q = set.q();
  report.mu = mu;
  report.f = set.f();
  report.segment_length = config.segment_length;
  report.desired = config.desired + 1;
  report.mode = config.mode;
  report.seed = config.seed;

  const auto plan = generate_query_plan(config.n, mu, config.desired, config.seed);
  const MessageStore store(set.q(), set.f(), beta, config.segment_length,
                           splitmix64(config.seed ^ 0x6d657373616765ULL));
  std::vector<SegmentedFunction> images;
  images.reserve(mu);
  for (const auto& c : set.candidates()) images.emplace_back(store, c.table);

  std::optional<CodeBook> codes;
  if (config.mode == AnswerMode::kConcrete) {
    codes = build_codebook(set, config.segment_length, config.epsilon);
    if (!codes->joint) {
      report.warnings.push_back("joint alphabet of " + std::to_string(codes->joint_alphabet.size()) +
                                " tuples exceeds " + std::to_string(kMaxCodeAlphabet) +
                                "; round 1 charged symbolically");
    }
  }
  const CodeBook* book = codes ? &*codes : nullptr;

  std::vector<std::future<DatabaseAnswer>> pending;
  for (std::uint32_t j = 0; j < config.n; ++j) {
    pending.push_back(std::async(std::launch::async, [&, j] {
      return answer_queries(j, plan, set, images, config.mode, book);
    }));
  }
  std::vector<DatabaseAnswer> answers;
  DownloadLedger ledger(config.mode);
  for (auto& p : pending) {
    answers.push_back(p.get());
    ledger.append(answers.back().ledger);
    report.atypical_segments += answers.back().atypical_segments;
  }

  const auto decoded = decode(plan, answers, set, config.segment_length, config.mode, book);
  const auto truth = images[config.desired].symbols();
  report.decode_failures = decoded.failed_segments;
  report.recovery_ok = decoded.failed_segments == 0 &&
                       std::equal(truth.begin(), truth.end(), decoded.symbols.begin(), decoded.symbols.end());

  report.total_download = ledger.total();
  const auto rounds = ledger.per_round(mu);
  for (std::uint32_t r = 0; r < mu; ++r) report.per_round.emplace_back(r + 1, rounds[r]);
  const double useful = static_cast<double>(beta) * static_cast<double>(config.segment_length) * set.profile().h_min;
  if (report.total_download > 0.0) {
    report.rate_measured = useful / report.total_download;
  } else {
    report.warnings.push_back("zero download: every candidate is constant");
  }
  try {
    report.rate_formula = achievable_rate(config.n, set.profile());
  } catch (const DegenerateInstanceError& e) {
    report.warnings.push_back(e.what());
  }

  if (config.check_privacy) {
    std::vector<QueryPlan> plans;
    for (std::uint32_t v = 0; v < mu; ++v) plans.push_back(generate_query_plan(config.n, mu, v, config.seed));
    const auto privacy = verify_privacy_structure(plans);
    report.privacy_ok = privacy.ok;
    if (!privacy.ok) report.warnings.push_back("privacy: " + privacy.detail);
  } else {
    report.privacy_ok = true;
  }
  return report;
}

}  // namespace privcomp

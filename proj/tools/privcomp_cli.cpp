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
// privcomp: rate tables, reference curves, candidate listings, entropies
// and protocol simulations.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 resource guard.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "privcomp/candidates.hpp"
#include "privcomp/errors.hpp"
#include "privcomp/figure.hpp"
#include "privcomp/protocol.hpp"
#include "privcomp/rates.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace privcomp;

enum Exit : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kResource = 3 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json num(double x) { return std::stod(format_number(x)); }

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// Candidate source shared by several subcommands: an explicit monomial
// list, or the nonparallel monomials of degree <= g in f variables.
struct CandidateArgs {
  std::uint32_t q = 3;
  std::optional<std::uint32_t> f;
  std::optional<std::uint32_t> g;
  std::string candidates;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--q", q, "Field size (prime)")->capture_default_str();
    cmd->add_option("--f", f, "Number of messages");
    cmd->add_option("--g", g, "Largest monomial degree");
    cmd->add_option("--candidates", candidates, "Monomials, e.g. \"1,0;0,1;1,1\"");
  }

  CandidateSet build() const {
    if (!candidates.empty()) {
      if (g) throw UsageError("--candidates and --g are mutually exclusive");
      const auto ms = parse_monomials(candidates);
      const auto arity = static_cast<std::uint32_t>(ms.front().arity());
      if (f && *f != arity) throw UsageError("--f does not match the candidate arity");
      return monomial_candidate_set(ms, q, arity);
    }
    if (!f || !g) throw UsageError("give --candidates, or both --f and --g");
    return monomial_candidate_set(generate_nonparallel_monomials(*f, *g, q), q, *f);
  }
};

json candidates_json(const CandidateSet& set) {
  json arr = json::array();
  for (std::size_t v = 0; v < set.mu(); ++v) {
    arr.push_back({{"index", v + 1}, {"monomial", set[v].label()}, {"entropy", num(set[v].entropy)},
                   {"joint_prefix", num(set.profile().joint(v + 1))}});
  }
  return arr;
}

int cmd_rates(std::uint32_t n, const CandidateArgs& args) {
  const auto set = args.build();
  const auto r = rate_report(n, set);
  if (r.degenerate) std::cerr << "note: single candidate; rate 1 by convention (degenerate)\n";
  json j;
  j["n"] = r.n;
  j["q"] = r.q;
  j["mu"] = r.mu;
  j["f"] = r.f;
  j["h_min"] = num(r.h_min);
  j["h_max"] = num(r.h_max);
  j["joint_entropy"] = num(r.joint_entropy);
  j["achievable"] = num(r.achievable);
  j["outer_bound"] = num(r.outer_bound);
  j["lower_bound"] = num(r.lower_bound);
  j["baseline_pir"] = num(r.baseline_pir);
  j["baseline_pir_unnormalized"] = num(r.baseline_pir_unnormalized);
  j["d_opt"] = num(r.d_opt);
  j["d_one"] = num(r.d_one);
  j["asymptotic"] = num(r.asymptotic);
  j["capacity_met"] = r.capacity_met;
  j["degenerate"] = r.degenerate;
  j["messages_included"] = r.messages_included;
  j["achievable_messages"] = opt_num(r.achievable_messages);
  j["outer_bound_messages"] = opt_num(r.outer_bound_messages);
  j["candidates"] = candidates_json(set);
  emit(j);
  return kOk;
}

int cmd_figure(std::uint32_t q, const std::vector<std::uint32_t>& ns, const std::vector<std::uint32_t>& gs,
               std::uint32_t f_max, const std::string& out, bool compare) {
  if (ns.empty() || gs.empty() || f_max == 0) throw UsageError("figure needs --n, --g and --f-max >= 1");
  const auto rows = figure_rows(q, ns, gs, f_max);
  for (const auto& r : rows) {
    if (r.degenerate) {
      std::cerr << "note: n=" << r.n << " g=" << r.g << " f=" << r.f
                << " has a single candidate; rate 1 by convention (degenerate)\n";
    }
  }
  const auto csv = figure_csv(rows);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw IoError("cannot open '" + out + "' for writing");
    file << csv;
    file.close();
    if (!file) throw IoError("failed writing '" + out + "'");
  }
  if (!compare) return kOk;
  const auto cmp = compare_to_reference(rows, q);
  std::cerr << "reference: " << cmp.compared << " values compared, max deviation "
            << format_number(cmp.max_deviation) << "\n";
  for (const auto& m : cmp.mismatches) std::cerr << "mismatch: " << m << "\n";
  return cmp.ok() ? kOk : kVerifyFailed;
}

int cmd_monomials(std::uint32_t q, std::uint32_t f, std::uint32_t g, bool csv) {
  const auto ms = generate_nonparallel_monomials(f, g, q);
  const auto set = monomial_candidate_set(ms, q, f);
  if (csv) {
    std::cout << "index,monomial,entropy\n";
    for (std::size_t v = 0; v < set.mu(); ++v) {
      std::cout << v + 1 << ",\"" << set[v].label() << "\"," << format_number(set[v].entropy) << "\n";
    }
    return kOk;
  }
  json j;
  j["q"] = q;
  j["f"] = f;
  j["g"] = g;
  j["count"] = set.mu();
  j["h_min"] = num(set.profile().h_min);
  j["h_max"] = num(set.profile().h_max);
  j["candidates"] = candidates_json(set);
  emit(j);
  return kOk;
}

json pmf_json(const Pmf& p) {
  json arr = json::array();
  for (std::uint32_t x = 0; x < p.q(); ++x) {
    const auto [num_, den] = p.reduced(x);
    arr.push_back({{"value", x}, {"numerator", num_}, {"denominator", den}, {"probability", num(p.probability(x))}});
  }
  return arr;
}

int cmd_entropy(std::uint32_t q, const std::string& monomial, const std::string& table) {
  if (monomial.empty() == table.empty()) throw UsageError("give exactly one of --monomial or --table");
  std::optional<FunctionTable> fn;
  std::string label;
  if (!monomial.empty()) {
    const auto ms = parse_monomials(monomial);
    if (ms.size() != 1) throw UsageError("--monomial takes a single exponent vector");
    fn = build_monomial(ms[0], q, static_cast<std::uint32_t>(ms[0].arity()));
    label = ms[0].to_string();
  } else {
    auto values = parse_table_values(table);
    std::uint32_t f = 0;
    std::uint64_t size = 1;
    while (size < values.size()) {
      size *= q;
      ++f;
    }
    if (size != values.size() || f == 0) {
      throw UsageError("table has " + std::to_string(values.size()) + " entries, not a power q^f with f >= 1");
    }
    fn.emplace(q, f, std::move(values));
    label = "table";
  }
  const auto p = pmf_of(*fn);
  json j;
  j["q"] = q;
  j["f"] = fn->f();
  j["function"] = label;
  j["pmf"] = pmf_json(p);
  j["entropy"] = num(entropy_qary(p));
  emit(j);
  return kOk;
}

int cmd_simulate(std::uint32_t n, const CandidateArgs& args, std::size_t length, std::uint32_t v,
                 const std::string& mode, std::uint64_t seed, double epsilon) {
  const auto set = args.build();
  if (v < 1 || v > set.mu()) {
    throw UsageError("--v " + std::to_string(v) + " out of range [1, " + std::to_string(set.mu()) + "]");
  }
  SimulationConfig cfg;
  cfg.n = n;
  cfg.segment_length = length;
  cfg.desired = v - 1;
  cfg.mode = parse_answer_mode(mode);
  cfg.seed = seed;
  cfg.epsilon = epsilon;
  const auto r = run_simulation(set, cfg);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";

  json j;
  j["n"] = r.n;
  j["q"] = r.q;
  j["mu"] = r.mu;
  j["f"] = r.f;
  j["L"] = r.segment_length;
  j["v"] = r.desired;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  j["D_total_qary"] = num(r.total_download);
  j["rate_measured"] = num(r.rate_measured);
  j["rate_formula"] = num(r.rate_formula);
  j["recovery_ok"] = r.recovery_ok;
  j["privacy_ok"] = r.privacy_ok;
  json rounds = json::array();
  for (const auto& [tau, charge] : r.per_round) rounds.push_back({{"tau", tau}, {"charge", num(charge)}});
  j["per_round"] = rounds;
  j["decode_failures"] = r.decode_failures;
  j["atypical_segments"] = r.atypical_segments;
  emit(j);
  return r.recovery_ok && r.privacy_ok ? kOk : kVerifyFailed;
}

int cmd_privacy(std::uint32_t n, std::uint32_t mu, std::uint32_t seeds) {
  std::vector<QueryPlan> plans;
  for (std::uint32_t v = 0; v < mu; ++v) plans.push_back(generate_query_plan(n, mu, v, 1));
  bool ok = true;
  json j;
  j["n"] = n;
  j["mu"] = mu;
  for (const auto& p : plans) {
    try {
      verify_plan_structure(p);
    } catch (const ProtocolError& e) {
      ok = false;
      j["plan_error"] = e.what();
    }
  }
  const auto structure = verify_privacy_structure(plans);
  ok = ok && structure.ok;
  j["structure_ok"] = structure.ok;
  if (!structure.ok) j["structure_detail"] = structure.detail;
  const auto uniform = check_position_uniformity(n, mu, seeds);
  ok = ok && uniform.ok;
  j["uniformity"] = {{"ok", uniform.ok},
                     {"tests", uniform.tests},
                     {"min_p_value", num(uniform.min_p_value)},
                     {"threshold", num(uniform.threshold)}};
  if (segment_count(n, mu) <= 9) {
    const auto law = check_view_law_equality(n, mu);
    ok = ok && law.ok;
    j["view_law"] = {{"ok", law.ok}, {"permutations", law.permutations}, {"distinct_views", law.distinct_views}};
  } else {
    j["view_law"] = nullptr;
  }
  j["ok"] = ok;
  emit(j);
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private computation rates, reference curves and protocol simulation"};
  app.require_subcommand(1);

  auto* rates = app.add_subcommand("rates", "Rate report for a candidate set");
  std::uint32_t rates_n = 0;
  CandidateArgs rates_args;
  rates->add_option("--n", rates_n, "Number of databases")->required();
  rates_args.add_to(rates);

  auto* figure = app.add_subcommand("figure", "Rate curves for nonparallel monomials (CSV)");
  std::uint32_t fig_q = 3, fig_f_max = 7;
  std::vector<std::uint32_t> fig_n{3, 5}, fig_g{2, 3};
  std::string fig_out;
  bool fig_no_compare = false;
  figure->add_option("--q", fig_q, "Field size (prime)")->capture_default_str();
  figure->add_option("--n", fig_n, "Database counts")->delimiter(',')->capture_default_str();
  figure->add_option("--g", fig_g, "Degrees")->delimiter(',')->capture_default_str();
  figure->add_option("--f-max", fig_f_max, "Largest number of messages")->capture_default_str();
  figure->add_option("--out", fig_out, "Output CSV path (default stdout)");
  figure->add_flag("--no-compare", fig_no_compare, "Skip the reference comparison");

  auto* mono = app.add_subcommand("monomials", "List nonparallel monomials with entropies");
  std::uint32_t mono_q = 3, mono_f = 0, mono_g = 0;
  bool mono_csv = false;
  mono->add_option("--q", mono_q, "Field size (prime)")->capture_default_str();
  mono->add_option("--f", mono_f, "Number of variables")->required();
  mono->add_option("--g", mono_g, "Largest degree")->required();
  mono->add_flag("--csv", mono_csv, "CSV instead of JSON");

  auto* sim = app.add_subcommand("simulate", "Run the protocol end to end");
  std::uint32_t sim_n = 2, sim_v = 1;
  std::size_t sim_length = 16;
  std::string sim_mode = "symbolic";
  std::uint64_t sim_seed = 1;
  double sim_eps = kDefaultSlack;
  CandidateArgs sim_args;
  sim->add_option("--n", sim_n, "Number of databases")->capture_default_str();
  sim_args.add_to(sim);
  sim->add_option("--L", sim_length, "Segment length")->capture_default_str();
  sim->add_option("--v", sim_v, "Desired candidate (1-based, entropy order)")->capture_default_str();
  sim->add_option("--mode", sim_mode, "symbolic | concrete")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  sim->add_option("--epsilon", sim_eps, "Code slack per symbol (concrete mode)")->capture_default_str();

  auto* ent = app.add_subcommand("entropy", "Exact distribution and entropy of one function");
  std::uint32_t ent_q = 3;
  std::string ent_monomial, ent_table;
  ent->add_option("--q", ent_q, "Field size (prime)")->capture_default_str();
  ent->add_option("--monomial", ent_monomial, "Exponent vector, e.g. \"1,1\"");
  ent->add_option("--table", ent_table, "Values at all q^f inputs, comma separated");

  auto* priv = app.add_subcommand("privacy", "Structural and statistical privacy checks of query plans");
  std::uint32_t priv_n = 2, priv_mu = 3, priv_seeds = 500;
  priv->add_option("--n", priv_n, "Number of databases")->capture_default_str();
  priv->add_option("--mu", priv_mu, "Number of candidates")->capture_default_str();
  priv->add_option("--seeds", priv_seeds, "Seeds for the uniformity test")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*rates) return cmd_rates(rates_n, rates_args);
    if (*figure) return cmd_figure(fig_q, fig_n, fig_g, fig_f_max, fig_out, !fig_no_compare);
    if (*mono) return cmd_monomials(mono_q, mono_f, mono_g, mono_csv);
    if (*sim) return cmd_simulate(sim_n, sim_args, sim_length, sim_v, sim_mode, sim_seed, sim_eps);
    if (*ent) return cmd_entropy(ent_q, ent_monomial, ent_table);
    if (*priv) return cmd_privacy(priv_n, priv_mu, priv_seeds);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegenerateInstanceError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kResource;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kResource;
  } catch (const ProtocolError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const CorruptionError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource guard: out of memory\n";
    return kResource;
  }
  return kUsage;
}

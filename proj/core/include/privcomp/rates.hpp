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

#include <cstdint>
#include <optional>

#include "privcomp/candidates.hpp"

namespace privcomp {

// PIR capacity of n noncolluding replicated databases holding f messages.
// Requires n >= 2.
double pir_capacity(std::uint32_t n, std::uint32_t f);

// Converse bound on the computation capacity from the prefix joint entropies.
double outer_bound(std::uint32_t n, const EntropyProfile& profile);

// Converse bound when the f messages are among the candidates: h_min * C_PIR.
double outer_bound_messages(double h_min, std::uint32_t n, std::uint32_t f);

// Achievable rate of the round-based sum scheme as L -> infinity.
// mu = 1 yields 1 (direct retrieval).
double achievable_rate(std::uint32_t n, const EntropyProfile& profile);

// Achievable rate with the f messages leading the candidate list; closed
// form with separate branches for mu <= f+1 and mu >= f+2. Throws UsageError
// if h[v] != 1 for some v <= f.
double achievable_rate_messages(std::uint32_t n, std::uint32_t f, const EntropyProfile& profile);

// (h_min/h_max) (1 - 1/n) / (1 - n^-mu)
double rate_lower_bound(std::uint32_t n, std::size_t mu, double h_min, double h_max);

// Rate of plain PIR over mu virtual messages, scaled by h_min.
double baseline_virtual_pir_rate(std::uint32_t n, std::size_t mu, double h_min);
// Same without the h_min factor.
double baseline_virtual_pir_rate_unnormalized(std::uint32_t n, std::size_t mu);

// Denominator of the converse bound, per L.
double d_opt(std::uint32_t n, const EntropyProfile& profile);

// Download of the achievable scheme per L, summed round by round.
double d_one(std::uint32_t n, const EntropyProfile& profile);

// Closed form of d_one: n [H(X^[mu]) + sum_{v<mu} h_v (n^{mu-v} - 1)].
double d_one_closed_form(std::uint32_t n, const EntropyProfile& profile);

// Round-tau total over all databases, per L. Round 1 is n * H(X^[mu]).
double round_download(std::size_t tau, std::uint32_t n, const EntropyProfile& profile);

// Limit of the rate and of the bound as f grows: h_min (1 - 1/n).
double asymptotic_rate(std::uint32_t n, double h_min);

// Binomial coefficient as a double, for counts that overflow 64 bits.
double binomial_real(std::uint64_t n, std::uint64_t k);

inline constexpr double kCapacityTolerance = 1e-12;

struct RateReport {
  std::uint32_t n = 0;
  std::uint32_t q = 0;
  std::size_t mu = 0;
  std::uint32_t f = 0;
  double h_min = 0.0;
  double h_max = 0.0;
  double joint_entropy = 0.0;
  double achievable = 0.0;
  double outer_bound = 0.0;
  double lower_bound = 0.0;
  double baseline_pir = 0.0;
  double baseline_pir_unnormalized = 0.0;
  double d_opt = 0.0;
  double d_one = 0.0;
  double asymptotic = 0.0;
  bool capacity_met = false;
  bool degenerate = false;  // mu == 1
  bool messages_included = false;
  std::optional<double> achievable_messages;
  std::optional<double> outer_bound_messages;
};

RateReport rate_report(std::uint32_t n, const CandidateSet& set);

}  // namespace privcomp

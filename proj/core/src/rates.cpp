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
#include "privcomp/rates.hpp"

#include <cmath>
#include <string>

#include "privcomp/errors.hpp"

namespace privcomp {

namespace {

void require_databases(std::uint32_t n) {
  if (n < 2) {
    throw DomainError("n = " + std::to_string(n) +
                      ": privacy against each database needs at least 2 replicas");
  }
}

void require_profile(const EntropyProfile& profile) {
  if (profile.mu() == 0) throw UsageError("entropy profile is empty");
  if (profile.prefix_joint.size() != profile.mu()) {
    throw UsageError("prefix joint entropies missing from profile");
  }
}

// 1 - n^-k without cancellation for large n^k.
double one_minus_inverse_power(std::uint32_t n, std::size_t k) {
  return -std::expm1(-static_cast<double>(k) * std::log(static_cast<double>(n)));
}

}  // namespace

double binomial_real(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return result < 9007199254740992.0 ? std::round(result) : result;
}

double pir_capacity(std::uint32_t n, std::uint32_t f) {
  require_databases(n);
  if (f == 0) throw DomainError("PIR capacity needs f >= 1");
  return (1.0 - 1.0 / n) / one_minus_inverse_power(n, f);
}

double outer_bound(std::uint32_t n, const EntropyProfile& profile) {
  require_databases(n);
  require_profile(profile);
  const double x = 1.0 / n;
  const auto mu = profile.mu();
  // sum_v n^{1-v} [H(X^[v]) - H(X^[v-1])], Horner from v = mu down.
  double acc = 0.0;
  for (std::size_t v = mu; v >= 1; --v) {
    acc = acc * x + (profile.joint(v) - profile.joint(v - 1));
  }
  if (acc <= 0.0) throw DegenerateInstanceError("every candidate is constant; bound undefined");
  return profile.h_min / acc;
}

double outer_bound_messages(double h_min, std::uint32_t n, std::uint32_t f) {
  if (h_min < 0.0 || h_min > 1.0 + 1e-12) throw DomainError("h_min must lie in [0, 1]");
  return h_min * pir_capacity(n, f);
}

double achievable_rate(std::uint32_t n, const EntropyProfile& profile) {
  require_databases(n);
  require_profile(profile);
  const auto mu = profile.mu();
  if (profile.joint(mu) <= 0.0) {
    throw DegenerateInstanceError("every candidate is constant; rate undefined");
  }
  if (mu == 1) return 1.0;
  const double x = 1.0 / n;
  double head = 0.0;
  for (std::size_t v = 0; v + 1 < mu; ++v) head += profile.h[v];
  // Coefficients c_v = h_v (v < mu), c_mu = H(X^[mu]) - sum_{v<mu} h_v.
  double acc = profile.joint(mu) - head;
  for (std::size_t v = mu - 1; v >= 1; --v) acc = acc * x + profile.h[v - 1];
  return profile.h_min / acc;
}

double achievable_rate_messages(std::uint32_t n, std::uint32_t f, const EntropyProfile& profile) {
  require_databases(n);
  require_profile(profile);
  const auto mu = profile.mu();
  if (f == 0) throw UsageError("need f >= 1 messages");
  if (mu < f) throw UsageError("candidate set smaller than the number of messages");
  for (std::size_t v = 0; v < f; ++v) {
    if (std::abs(profile.h[v] - 1.0) > 1e-12) {
      throw UsageError("precondition failed: candidate " + std::to_string(v + 1) +
                       " has entropy " + std::to_string(profile.h[v]) +
                       ", the first f candidates must be the messages");
    }
  }
  const double h_min = profile.h_min;
  if (mu <= static_cast<std::size_t>(f) + 1) return h_min * pir_capacity(n, f);

  const double inv_n = 1.0 / n;
  const double tail = std::pow(inv_n, static_cast<double>(mu - 1));
  double sum = 0.0;
  for (std::size_t v = f + 1; v <= mu - 1; ++v) {
    sum += profile.h[v - 1] * (std::pow(inv_n, static_cast<double>(v - 1)) - tail);
  }
  return h_min * (1.0 - inv_n) / (one_minus_inverse_power(n, f) + (1.0 - inv_n) * sum);
}

double rate_lower_bound(std::uint32_t n, std::size_t mu, double h_min, double h_max) {
  require_databases(n);
  if (mu == 0) throw UsageError("mu must be at least 1");
  if (h_max <= 0.0) throw DegenerateInstanceError("h_max = 0: every candidate is constant");
  return (h_min / h_max) * (1.0 - 1.0 / n) / one_minus_inverse_power(n, mu);
}

double baseline_virtual_pir_rate_unnormalized(std::uint32_t n, std::size_t mu) {
  require_databases(n);
  if (mu == 0) throw UsageError("mu must be at least 1");
  return (1.0 - 1.0 / n) / one_minus_inverse_power(n, mu);
}

double baseline_virtual_pir_rate(std::uint32_t n, std::size_t mu, double h_min) {
  return h_min * baseline_virtual_pir_rate_unnormalized(n, mu);
}

double d_opt(std::uint32_t n, const EntropyProfile& profile) {
  require_profile(profile);
  const auto mu = profile.mu();
  double acc = 0.0;
  for (std::size_t v = 1; v <= mu; ++v) {
    acc = acc * n + (profile.joint(v) - profile.joint(v - 1));
  }
  return n * acc;
}

double round_download(std::size_t tau, std::uint32_t n, const EntropyProfile& profile) {
  require_profile(profile);
  const auto mu = profile.mu();
  if (tau < 1 || tau > mu) {
    throw UsageError("round " + std::to_string(tau) + " out of range [1, " + std::to_string(mu) + "]");
  }
  if (tau == 1) return n * profile.joint(mu);
  double inner = 0.0;
  for (std::size_t v = 1; v + tau - 1 <= mu; ++v) {
    inner += binomial_real(mu - v, tau - 1) * profile.h[v - 1];
  }
  return n * std::pow(static_cast<double>(n - 1), static_cast<double>(tau - 1)) * inner;
}

double d_one(std::uint32_t n, const EntropyProfile& profile) {
  require_profile(profile);
  double total = 0.0;
  for (std::size_t tau = 1; tau <= profile.mu(); ++tau) total += round_download(tau, n, profile);
  return total;
}

double d_one_closed_form(std::uint32_t n, const EntropyProfile& profile) {
  require_profile(profile);
  const auto mu = profile.mu();
  double acc = profile.joint(mu);
  for (std::size_t v = 1; v < mu; ++v) {
    acc += profile.h[v - 1] * (std::pow(static_cast<double>(n), static_cast<double>(mu - v)) - 1.0);
  }
  return n * acc;
}

double asymptotic_rate(std::uint32_t n, double h_min) {
  require_databases(n);
  return h_min * (1.0 - 1.0 / n);
}

RateReport rate_report(std::uint32_t n, const CandidateSet& set) {
  const auto& profile = set.profile();
  RateReport r;
  r.n = n;
  r.q = set.q();
  r.mu = set.mu();
  r.f = set.f();
  r.h_min = profile.h_min;
  r.h_max = profile.h_max;
  r.joint_entropy = profile.joint(profile.mu());
  r.achievable = achievable_rate(n, profile);
  r.outer_bound = outer_bound(n, profile);
  r.lower_bound = rate_lower_bound(n, r.mu, r.h_min, r.h_max);
  r.baseline_pir = baseline_virtual_pir_rate(n, r.mu, r.h_min);
  r.baseline_pir_unnormalized = baseline_virtual_pir_rate_unnormalized(n, r.mu);
  r.d_opt = d_opt(n, profile);
  r.d_one = d_one(n, profile);
  r.asymptotic = asymptotic_rate(n, r.h_min);
  r.capacity_met = std::abs(r.achievable - r.outer_bound) <= kCapacityTolerance;
  r.degenerate = r.mu == 1;
  r.messages_included = set.includes_messages();
  if (r.messages_included) {
    r.achievable_messages = achievable_rate_messages(n, r.f, profile);
    r.outer_bound_messages = outer_bound_messages(r.h_min, n, r.f);
  }
  return r;
}

}  // namespace privcomp

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
#include "privcomp/finite_field.hpp"

#include <string>

#include "privcomp/errors.hpp"

namespace privcomp {

bool is_prime(std::uint64_t q) noexcept {
  if (q < 2) return false;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint32_t q) : q_(q) {
  if (!is_prime(q)) {
    throw UsageError("field modulus " + std::to_string(q) + " is not prime");
  }
  if (q > kMaxModulus) {
    throw UsageError("field modulus " + std::to_string(q) + " exceeds supported maximum " +
                     std::to_string(kMaxModulus));
  }
}

FieldElement PrimeField::element(std::uint64_t value) const { return {*this, value}; }
FieldElement PrimeField::zero() const { return {*this, 0}; }
FieldElement PrimeField::one() const { return {*this, 1}; }

std::uint32_t PrimeField::pow(std::uint32_t a, std::uint64_t e) const noexcept {
  std::uint32_t result = 1 % q_;
  std::uint32_t base = a;
  while (e > 0) {
    if (e & 1U) result = mul(result, base);
    base = mul(base, base);
    e >>= 1U;
  }
  return result;
}

std::uint32_t PrimeField::inv(std::uint32_t a) const {
  if (a == 0) throw DomainError("zero has no multiplicative inverse");
  return pow(a, q_ - 2);
}

namespace {

void require_same_field(const FieldElement& a, const FieldElement& b) {
  if (!(a.field() == b.field())) {
    throw UsageError("field mismatch: GF(" + std::to_string(a.field().modulus()) + ") vs GF(" +
                     std::to_string(b.field().modulus()) + ")");
  }
}

}  // namespace

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  require_same_field(a, b);
  return {a.field_, a.field_.add(a.value_, b.value_)};
}

FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  require_same_field(a, b);
  return {a.field_, a.field_.sub(a.value_, b.value_)};
}

FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  require_same_field(a, b);
  return {a.field_, a.field_.mul(a.value_, b.value_)};
}

FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
FieldElement mul(const FieldElement& a, const FieldElement& b) { return a * b; }
FieldElement pow(const FieldElement& a, std::uint64_t e) { return a.pow(e); }

}  // namespace privcomp

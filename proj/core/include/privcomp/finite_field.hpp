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
#include <ostream>

namespace privcomp {

class FieldElement;

// Prime field GF(q). Only prime moduli are supported; construction
// rejects composites.
class PrimeField {
 public:
  static constexpr std::uint32_t kMaxModulus = 65521;

  explicit PrimeField(std::uint32_t q);

  std::uint32_t modulus() const noexcept { return q_; }
  std::uint32_t size() const noexcept { return q_; }

  FieldElement element(std::uint64_t value) const;
  FieldElement zero() const;
  FieldElement one() const;

  // Raw-value arithmetic for hot loops. Inputs must already be reduced.
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
    std::uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept {
    return a >= b ? a - b : a + q_ - b;
  }
  std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : q_ - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % q_);
  }
  // 0^0 = 1.
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept;
  // Multiplicative inverse; a must be nonzero.
  std::uint32_t inv(std::uint32_t a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint32_t q_;
};

bool is_prime(std::uint64_t q) noexcept;

class FieldElement {
 public:
  FieldElement(const PrimeField& field, std::uint64_t value)
      : value_(static_cast<std::uint32_t>(value % field.modulus())), field_(field) {}

  std::uint32_t value() const noexcept { return value_; }
  const PrimeField& field() const noexcept { return field_; }

  FieldElement pow(std::uint64_t e) const { return {field_, field_.pow(value_, e)}; }
  FieldElement inverse() const { return {field_, field_.inv(value_)}; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a) { return {a.field_, a.field_.neg(a.value_)}; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.field_ == b.field_ && a.value_ == b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) {
    return os << x.value_ << " (mod " << x.field_.modulus() << ")";
  }

 private:
  std::uint32_t value_;
  PrimeField field_;
};

FieldElement add(const FieldElement& a, const FieldElement& b);
FieldElement mul(const FieldElement& a, const FieldElement& b);
FieldElement pow(const FieldElement& a, std::uint64_t e);

}  // namespace privcomp

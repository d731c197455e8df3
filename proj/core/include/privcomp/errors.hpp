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

#include <stdexcept>
#include <string>

namespace privcomp {

// Caller passed arguments that violate an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A formula's parameters are outside its domain (e.g. n < 2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Instance on which a rate is undefined, e.g. every candidate is constant.
class DegenerateInstanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An enumeration or allocation cap would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query plan or answer set violates a structural invariant.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A codeword header does not describe a valid type class.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace privcomp

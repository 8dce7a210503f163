// Copyright 2026 The trajgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJGRAPH__ERRORS_HPP_
#define TRAJGRAPH__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace trajgraph
{

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Caller violated an API precondition (wrong mode, bad id, ...).
class ContractError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Malformed configuration or input file.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during a run, e.g. a non-finite loss.
class RunError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace trajgraph

#endif  // TRAJGRAPH__ERRORS_HPP_

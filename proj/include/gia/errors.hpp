// SPDX-License-Identifier: Apache-2.0
//
// gia-sim: grouping-based interference alignment for multi-cell MIMO uplinks
// Copyright (C) 2026 The gia-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef GIA_ERRORS_HPP
#define GIA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gia {

// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, bad index, ...).
class ContractViolation : public Error {
  public:
    using Error::Error;
};

// An iterative kernel failed or a numerical invariant broke down.
class NumericalFailure : public Error {
  public:
    using Error::Error;
};

// A null space that was required to be non-trivial came out empty.
class EmptySubspace : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

// Input that must have full column rank did not.
class RankDeficiency : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

// Not enough spatial dimensions to align or null the interference.
class Infeasible : public Error {
  public:
    using Error::Error;
};

// Channel draw hit a measure-zero degeneracy; the harness resamples on this.
class DegenerateChannel : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

// User images of an aligned cell do not share a common subspace.
class AlignmentFailure : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

// Enumeration or allocation exceeds a configured size cap.
class CapacityError : public Error {
  public:
    using Error::Error;
};

namespace detail {

inline std::string dims(long rows, long cols)
{
    return std::to_string(rows) + "x" + std::to_string(cols);
}

} // namespace detail

} // namespace gia

#endif

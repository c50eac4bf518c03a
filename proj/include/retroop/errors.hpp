// Copyright 2026 The RetroOp Authors
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

namespace retroop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed data, a violated precondition, an undefined
/// conditional. The CLI maps these to exit code 2.
class InputError : public Error {
  public:
    using Error::Error;
};

/// A numerical invariant failed after a computation that should have
/// guaranteed it. The CLI maps these to exit code 3.
class NumericalError : public Error {
  public:
    using Error::Error;
};

#define RETROOP_DEFINE_ERROR(Name, Base)                                       \
    class Name : public Base {                                                 \
      public:                                                                  \
        explicit Name(const std::string &what) : Base(#Name ": " + what) {}    \
    }

RETROOP_DEFINE_ERROR(DimensionMismatch, InputError);
RETROOP_DEFINE_ERROR(NotHermitian, InputError);
RETROOP_DEFINE_ERROR(NotFinite, InputError);
RETROOP_DEFINE_ERROR(NotCP, InputError);
RETROOP_DEFINE_ERROR(NotProjector, InputError);
RETROOP_DEFINE_ERROR(NotUnitary, InputError);
RETROOP_DEFINE_ERROR(NotOperation, InputError);
RETROOP_DEFINE_ERROR(ZeroCondition, InputError);
RETROOP_DEFINE_ERROR(NotResolution, InputError);
RETROOP_DEFINE_ERROR(NotTrivialSum, InputError);
RETROOP_DEFINE_ERROR(NoConditionHits, InputError);
RETROOP_DEFINE_ERROR(ParseError, InputError);
RETROOP_DEFINE_ERROR(ValidationError, InputError);

RETROOP_DEFINE_ERROR(NoConvergence, NumericalError);
RETROOP_DEFINE_ERROR(InvariantViolation, NumericalError);
RETROOP_DEFINE_ERROR(ZeroProbabilityBranch, NumericalError);

#undef RETROOP_DEFINE_ERROR

} // namespace retroop

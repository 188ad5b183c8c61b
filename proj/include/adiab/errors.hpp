// Copyright 2026 The adiab Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace adiab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ADIAB_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// linalg
ADIAB_DEFINE_ERROR(DefectiveMatrix);
ADIAB_DEFINE_ERROR(GapViolation);
ADIAB_DEFINE_ERROR(NotInRange);
ADIAB_DEFINE_ERROR(DimensionTooLarge);

// stochastic calculus
ADIAB_DEFINE_ERROR(AdaptationMismatch);
ADIAB_DEFINE_ERROR(MissingSupBound);
ADIAB_DEFINE_ERROR(GridMismatch);

// propagators
ADIAB_DEFINE_ERROR(GridTooCoarse);
ADIAB_DEFINE_ERROR(AssumptionAViolated);
ADIAB_DEFINE_ERROR(SingularConversion);

// adiabatic expansion
ADIAB_DEFINE_ERROR(NotAProjection);
ADIAB_DEFINE_ERROR(InitialDataNotInKernel);
ADIAB_DEFINE_ERROR(UnsupportedOrder);

// dephasing model
ADIAB_DEFINE_ERROR(SpectrumCollision);
ADIAB_DEFINE_ERROR(NotCommuting);
ADIAB_DEFINE_ERROR(NotHermitian);

// statistics
ADIAB_DEFINE_ERROR(InsufficientSamples);
ADIAB_DEFINE_ERROR(NonPositiveData);
ADIAB_DEFINE_ERROR(InvalidSample);

// orchestration
ADIAB_DEFINE_ERROR(ConfigInvalid);

#undef ADIAB_DEFINE_ERROR

}  // namespace adiab

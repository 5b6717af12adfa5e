// SPDX-License-Identifier: Apache-2.0
//
// mtfcma - sub-structure characteristic modes of microstrip antennas
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

#pragma once

#include <stdexcept>
#include <string>

namespace mtfcma
{

/// Base of every error raised by the library. Callers that only want to
/// report and exit can catch this one type.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

#define MTFCMA_DECLARE_ERROR(Name)                                                                 \
    class Name : public Error                                                                      \
    {                                                                                              \
      public:                                                                                      \
        using Error::Error;                                                                        \
    }

// mesh
MTFCMA_DECLARE_ERROR(ParseError);
MTFCMA_DECLARE_ERROR(TagError);
MTFCMA_DECLARE_ERROR(TopologyError);
MTFCMA_DECLARE_ERROR(AmbiguityError);

// kernels
MTFCMA_DECLARE_ERROR(DomainError);
MTFCMA_DECLARE_ERROR(DegenerateTriangleError);

// assembly and linear algebra
MTFCMA_DECLARE_ERROR(AssemblyError);
MTFCMA_DECLARE_ERROR(DimensionError);
MTFCMA_DECLARE_ERROR(SingularMatrixError);
MTFCMA_DECLARE_ERROR(AsymmetryError);
MTFCMA_DECLARE_ERROR(EigFailure);
MTFCMA_DECLARE_ERROR(EmptySubspace);

// post-processing and reference solutions
MTFCMA_DECLARE_ERROR(MissingGroupError);
MTFCMA_DECLARE_ERROR(NormalizationError);
MTFCMA_DECLARE_ERROR(ConvergenceError);

// driver
MTFCMA_DECLARE_ERROR(ConfigError);
MTFCMA_DECLARE_ERROR(IoError);

#undef MTFCMA_DECLARE_ERROR

} // namespace mtfcma

/*
   Copyright 2025 The asdr authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace asdr {

/// Series or expansion ran out of known coefficients.
struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OddExponentInSqrt : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// c^2 + c = b has no solution in the working field.
struct NoRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSecondKind : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Some place over the bad locus is not rational; min_m is the smallest sufficient degree (0 if unknown).
struct FieldTooSmall : std::runtime_error {
    int min_m;
    FieldTooSmall(const std::string& what, int min_m_) : std::runtime_error(what), min_m(min_m_) {}
};

struct UnsupportedDivisor : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PoleBoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::logic_error {
    using std::logic_error::logic_error;
};

struct InterpolationGap : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotAChain : std::logic_error {
    using std::logic_error::logic_error;
};

struct MalformedWord : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct HypothesisViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Internal consistency check; failure is a bug, never a user error.
inline void ensure(bool cond, const char* what) {
    if (!cond) throw std::logic_error(std::string("invariant violated: ") + what);
}

}  // namespace asdr

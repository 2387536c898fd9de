//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace roikit {

// Library version, embedded in every generated report so outputs are
// attributable to the code that produced them.
inline constexpr const char* version_string = "0.1.0";

// Numeric acceptance thresholds, threaded explicitly through every API that
// makes a tolerance-dependent decision. There is no global mutable state;
// callers that want different thresholds pass their own instance.
struct Tolerances {
  // Max |H - H^dag| entry accepted when constructing a Hermitian operator.
  double herm = 1e-10;
  // Allowed negative slack on eigenvalues of effects, states and parents.
  double psd = 1e-9;
  // Max |sum_c M_{c|k} - I| entry for POVM completeness.
  double completeness = 1e-6;
  // Target accuracy of conic solves; also the verification threshold for
  // solutions labeled optimal.
  double solver = 1e-8;
  // Max |primal - dual| accepted when both sides of a program are solved.
  double gap = 1e-6;
  // Robustness values in [-clamp, 0) are treated as exact zeros; anything
  // more negative is a solver failure.
  double clamp = 1e-8;
  // Row sums of conditional-probability tables must be 1 within this.
  double row_stochastic = 1e-9;
  // Probability mass below this is treated as structurally zero when
  // normalizing constructed ensembles.
  double zero_weight = 1e-12;
};

struct Limits {
  // Hard cap on the number of deterministic outcome strings (product of
  // outcome counts) a single program is allowed to enumerate.
  std::uint64_t max_strings = 1'000'000;
  // Hard cap on the number of deterministic strategies the brute-force
  // oracle will enumerate.
  std::uint64_t brute_force_cap = 10'000'000;
};

// Error taxonomy. The CLI maps these onto its exit-code contract:
//   SchemaError / input problems -> 2
//   ValidationError (a verified mathematical check failed) -> 1
//   SolverError / ResourceError -> 3
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roikit

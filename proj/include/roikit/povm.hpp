//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/rng.hpp"

namespace roikit {

// Row-major pairing of two finite index sets. Used everywhere a pair of
// labels (measurement choices, outcomes) is flattened into one label, so the
// convention lives in exactly one place.
inline int pair_index(int i, int j, int width) { return i * width + j; }

inline std::pair<int, int> unpair_index(int idx, int width) {
  return {idx / width, idx % width};
}

struct Povm {
  std::vector<HermitianOperator> effects;

  int dim() const { return effects.empty() ? 0 : effects.front().dim(); }
  int n_outcomes() const { return static_cast<int>(effects.size()); }
};

// A finite collection of POVMs on a common Hilbert space. The shared
// dimension is a construction invariant; numeric properties (positivity,
// completeness) are checked separately by validate_set so that slightly
// off-cone inputs can be loaded, diagnosed and reported instead of dying in
// a constructor.
class MeasurementSet {
 public:
  MeasurementSet() = default;

  explicit MeasurementSet(std::vector<Povm> povms) : povms_(std::move(povms)) {
    if (povms_.empty()) throw SchemaError("MeasurementSet: no measurements");
    dim_ = povms_.front().dim();
    for (std::size_t k = 0; k < povms_.size(); ++k) {
      if (povms_[k].n_outcomes() == 0) {
        throw SchemaError("MeasurementSet: measurement " + std::to_string(k) +
                          " has no outcomes");
      }
      for (const auto& e : povms_[k].effects) {
        if (e.dim() != dim_) {
          throw SchemaError("MeasurementSet: dimension mismatch in measurement " +
                            std::to_string(k));
        }
      }
    }
  }

  int dim() const { return dim_; }
  int n_measurements() const { return static_cast<int>(povms_.size()); }
  const Povm& povm(int k) const { return povms_.at(k); }
  const std::vector<Povm>& povms() const { return povms_; }
  const Cmat& effect(int k, int c) const { return povms_.at(k).effects.at(c).mat(); }

  std::vector<int> outcome_counts() const {
    std::vector<int> counts;
    counts.reserve(povms_.size());
    for (const auto& p : povms_) counts.push_back(p.n_outcomes());
    return counts;
  }

 private:
  int dim_ = 0;
  std::vector<Povm> povms_;
};

struct SetViolation {
  int povm = 0;
  int outcome = -1;  // -1 for per-POVM (completeness) violations
  std::string kind;  // "psd" or "completeness"
  double residual = 0.0;
};

// Numeric well-formedness report. Empty result means every effect is PSD
// within tol.psd and every POVM sums to the identity within tol.completeness.
inline std::vector<SetViolation> validate_set(const MeasurementSet& set,
                                              const Tolerances& tol = {}) {
  std::vector<SetViolation> out;
  for (int k = 0; k < set.n_measurements(); ++k) {
    const Povm& p = set.povm(k);
    Cmat sum = Cmat::Zero(set.dim(), set.dim());
    for (int c = 0; c < p.n_outcomes(); ++c) {
      const double mineig = psd_residual(p.effects[c]);
      if (mineig < -tol.psd) out.push_back({k, c, "psd", mineig});
      sum += p.effects[c].mat();
    }
    const double comp = (sum - identity_c(set.dim())).cwiseAbs().maxCoeff();
    if (comp > tol.completeness) out.push_back({k, -1, "completeness", comp});
  }
  return out;
}

inline std::uint64_t string_count(const std::vector<int>& outcome_counts,
                                  std::uint64_t cap) {
  std::uint64_t n = 1;
  for (int c : outcome_counts) {
    if (c <= 0) throw SchemaError("string_count: nonpositive outcome count");
    if (n > cap / static_cast<std::uint64_t>(c) + 1) {
      throw ResourceError("deterministic string count exceeds cap of " +
                          std::to_string(cap));
    }
    n *= static_cast<std::uint64_t>(c);
  }
  if (n > cap) {
    throw ResourceError("deterministic string count " + std::to_string(n) +
                        " exceeds cap of " + std::to_string(cap));
  }
  return n;
}

// All assignments of one outcome per measurement, in lexicographic order
// with the last measurement varying fastest:
//   counts (2,2) -> (0,0), (0,1), (1,0), (1,1).
inline std::vector<std::vector<int>> deterministic_strings(
    const std::vector<int>& outcome_counts,
    std::uint64_t cap = Limits{}.max_strings) {
  const std::uint64_t total = string_count(outcome_counts, cap);
  const int nk = static_cast<int>(outcome_counts.size());
  std::vector<std::vector<int>> strings(total, std::vector<int>(nk, 0));
  for (std::uint64_t s = 1; s < total; ++s) {
    strings[s] = strings[s - 1];
    for (int k = nk - 1; k >= 0; --k) {
      if (++strings[s][k] < outcome_counts[k]) break;
      strings[s][k] = 0;
    }
  }
  return strings;
}

// Post-processing table p(c | k, lambda): entries[k][lambda][c].
// Rows (fixed k, lambda) are probability distributions over c.
struct ResponseTable {
  std::vector<std::vector<std::vector<double>>> entries;

  int n_measurements() const { return static_cast<int>(entries.size()); }
  int n_parent_outcomes() const {
    return entries.empty() ? 0 : static_cast<int>(entries.front().size());
  }

  void validate(const Tolerances& tol = {}) const {
    if (entries.empty()) throw SchemaError("ResponseTable: empty");
    const std::size_t n_lambda = entries.front().size();
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (entries[k].size() != n_lambda) {
        throw SchemaError("ResponseTable: ragged parent-outcome axis at k=" +
                          std::to_string(k));
      }
      for (std::size_t l = 0; l < n_lambda; ++l) {
        double sum = 0.0;
        for (double v : entries[k][l]) {
          if (v < -tol.row_stochastic || v > 1.0 + tol.row_stochastic) {
            throw ValidationError("ResponseTable: entry out of [0,1] at k=" +
                                  std::to_string(k));
          }
          sum += v;
        }
        if (std::abs(sum - 1.0) > tol.row_stochastic) {
          throw ValidationError("ResponseTable: row sum " + std::to_string(sum) +
                                " != 1 at k=" + std::to_string(k) +
                                ", lambda=" + std::to_string(l));
        }
      }
    }
  }
};

// The deterministic table selecting outcome string lambda: p(c|k,lambda) is
// 1 exactly when strings[lambda][k] == c.
inline ResponseTable deterministic_response(const std::vector<std::vector<int>>& strings,
                                            const std::vector<int>& outcome_counts) {
  ResponseTable table;
  const int nk = static_cast<int>(outcome_counts.size());
  table.entries.assign(nk, {});
  for (int k = 0; k < nk; ++k) {
    table.entries[k].assign(strings.size(),
                            std::vector<double>(outcome_counts[k], 0.0));
    for (std::size_t s = 0; s < strings.size(); ++s) {
      table.entries[k][s][strings[s][k]] = 1.0;
    }
  }
  return table;
}

// Simulated measurement set M_{c|k} = sum_lambda p(c|k,lambda) G_lambda.
// Always jointly measurable by construction; completeness of the parent and
// row-stochasticity of the table carry over to the children.
inline MeasurementSet apply_parent(const Povm& parent, const ResponseTable& table,
                                   const Tolerances& tol = {}) {
  table.validate(tol);
  if (table.n_parent_outcomes() != parent.n_outcomes()) {
    throw SchemaError("apply_parent: table has " +
                      std::to_string(table.n_parent_outcomes()) +
                      " parent outcomes, parent has " +
                      std::to_string(parent.n_outcomes()));
  }
  const int d = parent.dim();
  std::vector<Povm> povms;
  povms.reserve(table.entries.size());
  for (const auto& per_k : table.entries) {
    Povm p;
    const int n_c = static_cast<int>(per_k.front().size());
    for (int c = 0; c < n_c; ++c) {
      Cmat eff = Cmat::Zero(d, d);
      for (int lam = 0; lam < parent.n_outcomes(); ++lam) {
        eff += per_k[lam][c] * parent.effects[lam].mat();
      }
      p.effects.emplace_back(eff, tol.herm);
    }
    povms.push_back(std::move(p));
  }
  return MeasurementSet(std::move(povms));
}

// Product set on the joint space. Measurement (k,l) and outcome (c,d) are
// flattened row-major: joint measurement index k*Lb+l, joint outcome index
// c*n_l(b)+d, matching pair_index with the second set's count as width.
inline MeasurementSet tensor_sets(const MeasurementSet& a, const MeasurementSet& b) {
  std::vector<Povm> povms;
  povms.reserve(static_cast<std::size_t>(a.n_measurements()) * b.n_measurements());
  for (int k = 0; k < a.n_measurements(); ++k) {
    for (int l = 0; l < b.n_measurements(); ++l) {
      Povm p;
      for (int c = 0; c < a.povm(k).n_outcomes(); ++c) {
        for (int dd = 0; dd < b.povm(l).n_outcomes(); ++dd) {
          p.effects.push_back(kron(a.povm(k).effects[c], b.povm(l).effects[dd]));
        }
      }
      povms.push_back(std::move(p));
    }
  }
  return MeasurementSet(std::move(povms));
}

namespace detail {

inline Cmat ginibre(int rows, int cols, CounterRng& rng) {
  Cmat g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      g(i, j) = Complex(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
  return g;
}

}  // namespace detail

// Random POVM: PSD blocks B_c = A_c A_c^dag from Ginibre matrices, whitened
// by S^{-1/2} with S = sum_c B_c so the effects sum to the identity. A
// singular S triggers a retry; ten failures in a row abort (this has
// probability zero for continuous draws and indicates a broken RNG).
inline Povm random_povm(int dim, int n_outcomes, CounterRng& rng) {
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<Cmat> blocks;
    blocks.reserve(n_outcomes);
    Cmat s = Cmat::Zero(dim, dim);
    for (int c = 0; c < n_outcomes; ++c) {
      Cmat a = detail::ginibre(dim, dim, rng);
      blocks.push_back(a * a.adjoint());
      s += blocks.back();
    }
    Eigen::SelfAdjointEigenSolver<Cmat> es(s);
    if (es.eigenvalues().minCoeff() < 1e-10 * es.eigenvalues().maxCoeff()) continue;
    const Cmat w = es.operatorInverseSqrt();
    Povm p;
    for (const Cmat& b : blocks) p.effects.emplace_back(w * b * w);
    return p;
  }
  throw SolverError("random_povm: singular effect sum after 10 attempts");
}

inline MeasurementSet random_set(int dim, const std::vector<int>& outcome_counts,
                                 std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Povm> povms;
  povms.reserve(outcome_counts.size());
  for (std::size_t k = 0; k < outcome_counts.size(); ++k) {
    CounterRng sub = rng.fork(k);
    povms.push_back(random_povm(dim, outcome_counts[k], sub));
  }
  return MeasurementSet(std::move(povms));
}

// Random density matrix of full rank: normalized Ginibre square.
inline HermitianOperator random_state(int dim, CounterRng& rng) {
  Cmat a = detail::ginibre(dim, dim, rng);
  Cmat rho = a * a.adjoint();
  rho /= rho.trace().real();
  return HermitianOperator(rho);
}

}  // namespace roikit

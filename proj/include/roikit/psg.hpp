//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"
#include "roikit/povm.hpp"
#include "roikit/task.hpp"

namespace roikit {

// Precomputed Born terms tr[rho_{b|y} (E^1 (x) ... (x) E^n)] for every joint
// measurement choice and joint outcome. Joint indices are row-major with
// party 0 most significant; the outcome radix of a joint choice follows the
// per-party outcome counts of the chosen measurements.
//
// data[y][kflat][b][cflat]. Imaginary parts are a computation error, not a
// modelling choice, so anything above 1e-9 is rejected.
class BornTensor {
 public:
  BornTensor(const DiscriminationTask& task, const std::vector<MeasurementSet>& sets) {
    if (sets.size() != task.party_dims.size())
      throw SchemaError("BornTensor: one measurement set per party required");
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (sets[i].dim() != task.party_dims[i])
        throw SchemaError("BornTensor: set dimension mismatch at party " +
                          std::to_string(i));
    n_parties_ = static_cast<int>(sets.size());
    meas_counts_.resize(n_parties_);
    n_choices_ = 1;
    for (int i = 0; i < n_parties_; ++i) {
      meas_counts_[i] = sets[i].n_measurements();
      n_choices_ *= meas_counts_[i];
    }

    // Joint effects per flat choice, shared across ensembles.
    std::vector<std::vector<Cmat>> joint(n_choices_);
    std::vector<std::vector<int>> radix(n_choices_);
    for (int kf = 0; kf < n_choices_; ++kf) {
      std::vector<int> ks = unflatten_choice(kf);
      radix[kf].resize(n_parties_);
      int n_out = 1;
      for (int i = 0; i < n_parties_; ++i) {
        radix[kf][i] = sets[i].povm(ks[i]).n_outcomes();
        n_out *= radix[kf][i];
      }
      joint[kf].reserve(n_out);
      std::vector<int> cs(n_parties_, 0);
      for (int cf = 0; cf < n_out; ++cf) {
        Cmat e = sets[0].effect(ks[0], cs[0]);
        for (int i = 1; i < n_parties_; ++i) e = kron(e, sets[i].effect(ks[i], cs[i]));
        joint[kf].push_back(std::move(e));
        for (int i = n_parties_ - 1; i >= 0; --i) {
          if (++cs[i] < radix[kf][i]) break;
          cs[i] = 0;
        }
      }
    }
    outcome_radix_ = std::move(radix);

    data_.resize(task.n_ensembles());
    for (int y = 0; y < task.n_ensembles(); ++y) {
      const Ensemble& e = task.ensembles[y];
      data_[y].resize(n_choices_);
      for (int kf = 0; kf < n_choices_; ++kf) {
        data_[y][kf].resize(e.states.size());
        for (std::size_t b = 0; b < e.states.size(); ++b) {
          const Cmat& rho = e.states[b].rho.mat();
          std::vector<double>& row = data_[y][kf][b];
          row.reserve(joint[kf].size());
          for (const Cmat& eff : joint[kf]) {
            std::complex<double> t = (rho * eff).trace();
            if (std::abs(t.imag()) > 1e-9)
              throw ValidationError("BornTensor: Born probability has imaginary part " +
                                    std::to_string(t.imag()));
            row.push_back(t.real());
          }
        }
      }
    }
  }

  int n_parties() const { return n_parties_; }
  int n_choices() const { return n_choices_; }
  const std::vector<int>& meas_counts() const { return meas_counts_; }
  const std::vector<int>& outcome_radix(int kflat) const { return outcome_radix_[kflat]; }

  int n_outcomes(int kflat) const {
    int n = 1;
    for (int r : outcome_radix_[kflat]) n *= r;
    return n;
  }

  double at(int y, int kflat, int b, int cflat) const { return data_[y][kflat][b][cflat]; }

  int flatten_choice(const std::vector<int>& ks) const {
    int kf = 0;
    for (int i = 0; i < n_parties_; ++i) kf = kf * meas_counts_[i] + ks[i];
    return kf;
  }

  std::vector<int> unflatten_choice(int kflat) const {
    std::vector<int> ks(n_parties_);
    for (int i = n_parties_ - 1; i >= 0; --i) {
      ks[i] = kflat % meas_counts_[i];
      kflat /= meas_counts_[i];
    }
    return ks;
  }

 private:
  int n_parties_ = 0;
  int n_choices_ = 0;
  std::vector<int> meas_counts_;
  std::vector<std::vector<int>> outcome_radix_;
  std::vector<std::vector<std::vector<std::vector<double>>>> data_;
};

// Local strategy for two parties: measurement choices are picked from y
// alone, the guess is announced from (c, d, y). Tables are row-stochastic;
// outcome-indexed tables must cover every outcome reachable under choices
// of positive probability.
struct StrategyLO {
  std::vector<std::vector<double>> choose_a;                            // [y][k]
  std::vector<std::vector<double>> choose_b;                            // [y][l]
  std::vector<std::vector<std::vector<std::vector<double>>>> guess;     // [y][c][d][b]
};

// One-way adaptive strategy: party A measures first and broadcasts its
// outcome, so party B picks l from (c, y) and the guess again sees (c, d, y).
struct StrategyLocc1 {
  std::vector<std::vector<double>> choose_a;                            // [y][k]
  std::vector<std::vector<std::vector<double>>> choose_b;               // [y][c][l]
  std::vector<std::vector<std::vector<std::vector<double>>>> guess;     // [y][c][d][b]
};

// Deterministic n-party local strategy. guess[y] is indexed by the joint
// outcome flattened in the radix of the chosen measurements.
struct StrategyLoN {
  std::vector<std::vector<int>> choice;                                 // [party][y]
  std::vector<std::vector<int>> guess;                                  // [y][cflat]
};

namespace psg_detail {

inline void check_row(const std::vector<double>& row, std::size_t want,
                      const char* what) {
  if (row.size() != want)
    throw SchemaError(std::string("strategy: ") + what + " row has " +
                      std::to_string(row.size()) + " entries, expected " +
                      std::to_string(want));
  double sum = 0.0;
  for (double p : row) {
    if (p < -1e-12) throw ValidationError(std::string("strategy: negative ") + what);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError(std::string("strategy: ") + what + " row sums to " +
                          std::to_string(sum));
}

// Outcome coverage required of c-indexed tables: the largest outcome count
// among measurements the strategy actually uses.
inline int needed_outcomes(const MeasurementSet& set,
                           const std::vector<double>& choose_row) {
  int need = 0;
  for (int k = 0; k < set.n_measurements(); ++k)
    if (choose_row[k] > 0.0) need = std::max(need, set.povm(k).n_outcomes());
  return need;
}

}  // namespace psg_detail

inline void validate_strategy(const DiscriminationTask& task, const MeasurementSet& ma,
                              const MeasurementSet& mb, const StrategyLO& s) {
  const std::size_t ny = task.ensembles.size();
  if (s.choose_a.size() != ny || s.choose_b.size() != ny || s.guess.size() != ny)
    throw SchemaError("strategy: table count != number of ensembles");
  for (std::size_t y = 0; y < ny; ++y) {
    psg_detail::check_row(s.choose_a[y], ma.n_measurements(), "choose_a");
    psg_detail::check_row(s.choose_b[y], mb.n_measurements(), "choose_b");
    const int need_c = psg_detail::needed_outcomes(ma, s.choose_a[y]);
    const int need_d = psg_detail::needed_outcomes(mb, s.choose_b[y]);
    if (static_cast<int>(s.guess[y].size()) < need_c)
      throw SchemaError("strategy: guess table does not cover party A outcomes");
    for (int c = 0; c < need_c; ++c) {
      if (static_cast<int>(s.guess[y][c].size()) < need_d)
        throw SchemaError("strategy: guess table does not cover party B outcomes");
      for (int d = 0; d < need_d; ++d)
        psg_detail::check_row(s.guess[y][c][d], task.ensembles[y].states.size(), "guess");
    }
  }
}

inline void validate_strategy(const DiscriminationTask& task, const MeasurementSet& ma,
                              const MeasurementSet& mb, const StrategyLocc1& s) {
  const std::size_t ny = task.ensembles.size();
  if (s.choose_a.size() != ny || s.choose_b.size() != ny || s.guess.size() != ny)
    throw SchemaError("strategy: table count != number of ensembles");
  for (std::size_t y = 0; y < ny; ++y) {
    psg_detail::check_row(s.choose_a[y], ma.n_measurements(), "choose_a");
    const int need_c = psg_detail::needed_outcomes(ma, s.choose_a[y]);
    if (static_cast<int>(s.choose_b[y].size()) < need_c ||
        static_cast<int>(s.guess[y].size()) < need_c)
      throw SchemaError("strategy: adaptive tables do not cover party A outcomes");
    for (int c = 0; c < need_c; ++c) {
      psg_detail::check_row(s.choose_b[y][c], mb.n_measurements(), "choose_b");
      const int need_d = psg_detail::needed_outcomes(mb, s.choose_b[y][c]);
      if (static_cast<int>(s.guess[y][c].size()) < need_d)
        throw SchemaError("strategy: guess table does not cover party B outcomes");
      for (int d = 0; d < need_d; ++d)
        psg_detail::check_row(s.guess[y][c][d], task.ensembles[y].states.size(), "guess");
    }
  }
}

// Success probability of a fixed two-party local strategy:
//   sum_y q(y) sum_{k,l} p(k|y) p(l|y) sum_{c,d,b} p(b|c,d,y) q(b|y)
//     tr[rho_{b|y} M_{c|k} (x) N_{d|l}].
inline double psg_fixed(const DiscriminationTask& task, const MeasurementSet& ma,
                        const MeasurementSet& mb, const StrategyLO& s) {
  validate_strategy(task, ma, mb, s);
  const BornTensor born(task, {ma, mb});
  const int n_l = mb.n_measurements();
  double value = 0.0;
  for (int y = 0; y < task.n_ensembles(); ++y) {
    const Ensemble& ens = task.ensembles[y];
    double vy = 0.0;
    for (int k = 0; k < ma.n_measurements(); ++k) {
      if (s.choose_a[y][k] == 0.0) continue;
      for (int l = 0; l < n_l; ++l) {
        if (s.choose_b[y][l] == 0.0) continue;
        const int kf = born.flatten_choice({k, l});
        const int nc = born.outcome_radix(kf)[0];
        const int nd = born.outcome_radix(kf)[1];
        double vkl = 0.0;
        for (int c = 0; c < nc; ++c)
          for (int d = 0; d < nd; ++d)
            for (std::size_t b = 0; b < ens.states.size(); ++b)
              vkl += s.guess[y][c][d][b] * ens.states[b].weight *
                     born.at(y, kf, static_cast<int>(b), pair_index(c, d, nd));
        vy += s.choose_a[y][k] * s.choose_b[y][l] * vkl;
      }
    }
    value += ens.prior * vy;
  }
  return value;
}

inline double psg_fixed(const DiscriminationTask& task, const MeasurementSet& ma,
                        const MeasurementSet& mb, const StrategyLocc1& s) {
  validate_strategy(task, ma, mb, s);
  const BornTensor born(task, {ma, mb});
  double value = 0.0;
  for (int y = 0; y < task.n_ensembles(); ++y) {
    const Ensemble& ens = task.ensembles[y];
    double vy = 0.0;
    for (int k = 0; k < ma.n_measurements(); ++k) {
      if (s.choose_a[y][k] == 0.0) continue;
      const int nc = ma.povm(k).n_outcomes();
      double vk = 0.0;
      for (int c = 0; c < nc; ++c) {
        for (int l = 0; l < mb.n_measurements(); ++l) {
          if (s.choose_b[y][c][l] == 0.0) continue;
          const int kf = born.flatten_choice({k, l});
          const int nd = born.outcome_radix(kf)[1];
          double vcl = 0.0;
          for (int d = 0; d < nd; ++d)
            for (std::size_t b = 0; b < ens.states.size(); ++b)
              vcl += s.guess[y][c][d][b] * ens.states[b].weight *
                     born.at(y, kf, static_cast<int>(b), pair_index(c, d, nd));
          vk += s.choose_b[y][c][l] * vcl;
        }
      }
      vy += s.choose_a[y][k] * vk;
    }
    value += ens.prior * vy;
  }
  return value;
}

struct PsgLoResult {
  double value = 0.0;
  StrategyLO strategy;
};

struct PsgLocc1Result {
  double value = 0.0;
  StrategyLocc1 strategy;
};

struct PsgLoNResult {
  double value = 0.0;
  StrategyLoN strategy;
};

namespace psg_detail {

inline std::vector<double> delta_row(int n, int hot) {
  std::vector<double> row(n, 0.0);
  row[hot] = 1.0;
  return row;
}

}  // namespace psg_detail

// Best deterministic n-party local strategy by exchange of maxima:
//   sum_y q(y) max_{k_1..k_n} sum_{c_1..c_n} max_b q(b|y) tr[rho_{b|y} (x)_i E_i].
// The value is multilinear in the per-party choice distributions and in the
// guess table, so the optimum over all stochastic local strategies is
// attained at this deterministic vertex.
inline PsgLoNResult psg_best_lo_n(const DiscriminationTask& task,
                                  const std::vector<MeasurementSet>& sets) {
  const BornTensor born(task, sets);
  const int n = born.n_parties();
  PsgLoNResult res;
  res.strategy.choice.assign(n, std::vector<int>(task.n_ensembles(), 0));
  res.strategy.guess.resize(task.n_ensembles());
  for (int y = 0; y < task.n_ensembles(); ++y) {
    const Ensemble& ens = task.ensembles[y];
    double best_kf = -1.0;
    int arg_kf = 0;
    std::vector<int> best_guess;
    for (int kf = 0; kf < born.n_choices(); ++kf) {
      const int n_out = born.n_outcomes(kf);
      double v = 0.0;
      std::vector<int> guess(n_out, 0);
      for (int cf = 0; cf < n_out; ++cf) {
        double best_b = -1.0;
        for (std::size_t b = 0; b < ens.states.size(); ++b) {
          const double t = ens.states[b].weight * born.at(y, kf, static_cast<int>(b), cf);
          if (t > best_b) {
            best_b = t;
            guess[cf] = static_cast<int>(b);
          }
        }
        v += best_b;
      }
      if (v > best_kf) {
        best_kf = v;
        arg_kf = kf;
        best_guess = std::move(guess);
      }
    }
    res.value += ens.prior * best_kf;
    const std::vector<int> ks = born.unflatten_choice(arg_kf);
    for (int i = 0; i < n; ++i) res.strategy.choice[i][y] = ks[i];
    res.strategy.guess[y] = std::move(best_guess);
  }
  return res;
}

// Expands a deterministic two-party strategy into stochastic tables.
inline StrategyLO lo_strategy_tables(const DiscriminationTask& task,
                                     const MeasurementSet& ma, const MeasurementSet& mb,
                                     const StrategyLoN& det) {
  StrategyLO s;
  const int ny = task.n_ensembles();
  s.choose_a.resize(ny);
  s.choose_b.resize(ny);
  s.guess.resize(ny);
  for (int y = 0; y < ny; ++y) {
    const int k = det.choice[0][y];
    const int l = det.choice[1][y];
    s.choose_a[y] = psg_detail::delta_row(ma.n_measurements(), k);
    s.choose_b[y] = psg_detail::delta_row(mb.n_measurements(), l);
    const int nc = ma.povm(k).n_outcomes();
    const int nd = mb.povm(l).n_outcomes();
    const int nb = static_cast<int>(task.ensembles[y].states.size());
    s.guess[y].resize(nc);
    for (int c = 0; c < nc; ++c) {
      s.guess[y][c].resize(nd);
      for (int d = 0; d < nd; ++d)
        s.guess[y][c][d] = psg_detail::delta_row(nb, det.guess[y][pair_index(c, d, nd)]);
    }
  }
  return s;
}

inline PsgLoResult psg_best_lo(const DiscriminationTask& task, const MeasurementSet& ma,
                               const MeasurementSet& mb) {
  const PsgLoNResult nres = psg_best_lo_n(task, {ma, mb});
  return {nres.value, lo_strategy_tables(task, ma, mb, nres.strategy)};
}

// Best one-way adaptive strategy. Party B's choice moves inside the sum
// over party A's outcome:
//   sum_y q(y) max_k sum_c max_l sum_d max_b q(b|y) tr[rho (M (x) N)].
// Dominates the local optimum because constant l-tables are one-way tables.
inline PsgLocc1Result psg_best_locc1(const DiscriminationTask& task,
                                     const MeasurementSet& ma, const MeasurementSet& mb) {
  const BornTensor born(task, {ma, mb});
  PsgLocc1Result res;
  const int ny = task.n_ensembles();
  res.strategy.choose_a.resize(ny);
  res.strategy.choose_b.resize(ny);
  res.strategy.guess.resize(ny);
  for (int y = 0; y < ny; ++y) {
    const Ensemble& ens = task.ensembles[y];
    const int nb = static_cast<int>(ens.states.size());
    double best_k = -1.0;
    int arg_k = 0;
    std::vector<int> best_l;                 // [c]
    std::vector<std::vector<int>> best_b;    // [c][d]
    for (int k = 0; k < ma.n_measurements(); ++k) {
      const int nc = ma.povm(k).n_outcomes();
      double vk = 0.0;
      std::vector<int> arg_l(nc, 0);
      std::vector<std::vector<int>> arg_b(nc);
      for (int c = 0; c < nc; ++c) {
        double best_cl = -1.0;
        for (int l = 0; l < mb.n_measurements(); ++l) {
          const int kf = born.flatten_choice({k, l});
          const int nd = born.outcome_radix(kf)[1];
          double vl = 0.0;
          std::vector<int> gb(nd, 0);
          for (int d = 0; d < nd; ++d) {
            double vb = -1.0;
            for (int b = 0; b < nb; ++b) {
              const double t =
                  ens.states[b].weight * born.at(y, kf, b, pair_index(c, d, nd));
              if (t > vb) {
                vb = t;
                gb[d] = b;
              }
            }
            vl += vb;
          }
          if (vl > best_cl) {
            best_cl = vl;
            arg_l[c] = l;
            arg_b[c] = std::move(gb);
          }
        }
        vk += best_cl;
      }
      if (vk > best_k) {
        best_k = vk;
        arg_k = k;
        best_l = std::move(arg_l);
        best_b = std::move(arg_b);
      }
    }
    res.value += ens.prior * best_k;
    res.strategy.choose_a[y] = psg_detail::delta_row(ma.n_measurements(), arg_k);
    const int nc = ma.povm(arg_k).n_outcomes();
    res.strategy.choose_b[y].resize(nc);
    res.strategy.guess[y].resize(nc);
    for (int c = 0; c < nc; ++c) {
      res.strategy.choose_b[y][c] = psg_detail::delta_row(mb.n_measurements(), best_l[c]);
      const int nd = mb.povm(best_l[c]).n_outcomes();
      res.strategy.guess[y][c].resize(nd);
      for (int d = 0; d < nd; ++d)
        res.strategy.guess[y][c][d] = psg_detail::delta_row(nb, best_b[c][d]);
    }
  }
  return res;
}

// Best value attainable when every party measures a fixed parent POVM and
// the guess is announced from the joint parent outcome:
//   sum_y q(y) sum_{lambda_1..lambda_n} max_b q(b|y) tr[rho (x)_i G^i_{lambda_i}].
// Choice tables are moot (one measurement per party), so this is the local
// optimum of the parent sets.
inline double psg_parents_n(const DiscriminationTask& task,
                            const std::vector<Povm>& parents) {
  std::vector<MeasurementSet> sets;
  sets.reserve(parents.size());
  for (const Povm& g : parents) sets.push_back(MeasurementSet({g}));
  return psg_best_lo_n(task, sets).value;
}

inline double psg_parents(const DiscriminationTask& task, const Povm& ga, const Povm& gb) {
  return psg_parents_n(task, {ga, gb});
}

}  // namespace roikit

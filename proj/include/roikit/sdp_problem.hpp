//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "roikit/config.hpp"
#include "roikit/matrix.hpp"

namespace roikit {

// Structured description of a conic program over Hermitian matrix variables
// and real scalars:
//
//   optimize  objective(V, s)
//   s.t.      op_equalities:     E_j(V, s) == 0        (operator valued)
//             scalar_equalities: f_j(V, s) == 0
//             lmi_constraints:   L_j(V, s) >= 0        (PSD)
//             V_t >= 0 for every psd_var, s_u >= 0 for NonNegative scalars.
//
// Every expression is affine with real coefficients on matrix variables and
// Hermitian coefficient matrices on scalars, which is closed under the
// problems this library builds.
struct SdpProblem {
  enum class ScalarSign { NonNegative, Free };

  struct PsdVar {
    std::string name;
    int dim = 0;
  };

  struct ScalarVar {
    std::string name;
    ScalarSign sign = ScalarSign::NonNegative;
  };

  // constant + sum_t coeff_t V_t + sum_u s_u K_u, all of one dimension.
  struct OpExpr {
    int dim = 0;
    Cmat constant;
    std::vector<std::pair<int, double>> mat_terms;
    std::vector<std::pair<int, Cmat>> scalar_terms;

    explicit OpExpr(int d) : dim(d), constant(Cmat::Zero(d, d)) {}
    OpExpr() = default;

    OpExpr& add(int psd_var, double coeff) {
      mat_terms.emplace_back(psd_var, coeff);
      return *this;
    }
    OpExpr& add_scalar(int scalar_var, const Cmat& k) {
      scalar_terms.emplace_back(scalar_var, k);
      return *this;
    }
  };

  // constant + sum_t tr[K_t V_t] + sum_u c_u s_u.
  struct LinFunc {
    double constant = 0.0;
    std::vector<std::pair<int, Cmat>> mat_terms;
    std::vector<std::pair<int, double>> scalar_terms;

    LinFunc& add(int psd_var, const Cmat& k) {
      mat_terms.emplace_back(psd_var, k);
      return *this;
    }
    LinFunc& add_scalar(int scalar_var, double c) {
      scalar_terms.emplace_back(scalar_var, c);
      return *this;
    }
  };

  std::vector<PsdVar> psd_vars;
  std::vector<ScalarVar> scalar_vars;
  LinFunc objective;
  bool maximize = false;
  std::vector<OpExpr> op_equalities;
  std::vector<LinFunc> scalar_equalities;
  std::vector<OpExpr> lmi_constraints;

  int add_psd_var(std::string name, int dim) {
    psd_vars.push_back({std::move(name), dim});
    return static_cast<int>(psd_vars.size()) - 1;
  }

  int add_scalar_var(std::string name, ScalarSign sign = ScalarSign::NonNegative) {
    scalar_vars.push_back({std::move(name), sign});
    return static_cast<int>(scalar_vars.size()) - 1;
  }

  void check_well_formed() const {
    auto check_expr = [&](const OpExpr& e, const char* where) {
      if (e.dim <= 0 || e.constant.rows() != e.dim || e.constant.cols() != e.dim)
        throw SchemaError(std::string("SdpProblem: bad constant in ") + where);
      for (auto& [t, coeff] : e.mat_terms) {
        (void)coeff;
        if (t < 0 || t >= static_cast<int>(psd_vars.size()))
          throw SchemaError(std::string("SdpProblem: bad var index in ") + where);
        if (psd_vars[t].dim != e.dim)
          throw SchemaError(std::string("SdpProblem: dimension mismatch in ") + where);
      }
      for (auto& [u, k] : e.scalar_terms) {
        if (u < 0 || u >= static_cast<int>(scalar_vars.size()))
          throw SchemaError(std::string("SdpProblem: bad scalar index in ") + where);
        if (k.rows() != e.dim || k.cols() != e.dim)
          throw SchemaError(std::string("SdpProblem: scalar coefficient shape in ") +
                            where);
      }
    };
    auto check_func = [&](const LinFunc& f, const char* where) {
      for (auto& [t, k] : f.mat_terms) {
        if (t < 0 || t >= static_cast<int>(psd_vars.size()))
          throw SchemaError(std::string("SdpProblem: bad var index in ") + where);
        if (k.rows() != psd_vars[t].dim || k.cols() != psd_vars[t].dim)
          throw SchemaError(std::string("SdpProblem: coefficient shape in ") + where);
      }
      for (auto& [u, c] : f.scalar_terms) {
        (void)c;
        if (u < 0 || u >= static_cast<int>(scalar_vars.size()))
          throw SchemaError(std::string("SdpProblem: bad scalar index in ") + where);
      }
    };
    for (const auto& e : op_equalities) check_expr(e, "op_equalities");
    for (const auto& e : lmi_constraints) check_expr(e, "lmi_constraints");
    for (const auto& f : scalar_equalities) check_func(f, "scalar_equalities");
    check_func(objective, "objective");
  }
};

enum class SolveStatus { optimal, inaccurate, infeasible, failed };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::inaccurate: return "inaccurate";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::failed: return "failed";
  }
  return "failed";
}

struct SdpSolution {
  SolveStatus status = SolveStatus::failed;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<Cmat> psd_values;
  std::vector<double> scalar_values;
  int iterations = 0;
  // Residuals reported by the backend, in its own scaled norms.
  double backend_gap = std::numeric_limits<double>::quiet_NaN();
  double backend_pfeas = std::numeric_limits<double>::quiet_NaN();
  double backend_dfeas = std::numeric_limits<double>::quiet_NaN();
  std::string form;  // which compilation was used
  std::string message;
};

inline Cmat eval_op_expr(const SdpProblem::OpExpr& e, const std::vector<Cmat>& psd,
                         const std::vector<double>& scalars) {
  Cmat out = e.constant;
  for (auto& [t, coeff] : e.mat_terms) out += coeff * psd[t];
  for (auto& [u, k] : e.scalar_terms) out += scalars[u] * k;
  return out;
}

inline double eval_lin_func(const SdpProblem::LinFunc& f, const std::vector<Cmat>& psd,
                            const std::vector<double>& scalars) {
  double out = f.constant;
  for (auto& [t, k] : f.mat_terms) out += frob_inner(k, psd[t]);
  for (auto& [u, c] : f.scalar_terms) out += c * scalars[u];
  return out;
}

struct VerifyReport {
  double objective = std::numeric_limits<double>::quiet_NaN();
  // Largest entrywise violation over operator and scalar equalities.
  double max_eq_residual = 0.0;
  // Smallest eigenvalue over variable cones (psd vars, sign constraints).
  double min_var_eig = std::numeric_limits<double>::infinity();
  // Smallest eigenvalue over LMI constraint values.
  double min_lmi_eig = std::numeric_limits<double>::infinity();

  double worst(double) const {
    double w = max_eq_residual;
    w = std::max(w, std::max(0.0, -min_var_eig));
    w = std::max(w, std::max(0.0, -min_lmi_eig));
    return w;
  }
};

// Residual recomputation straight from the problem data and the returned
// variable values. Shares nothing with the solve path except the expression
// evaluators, so a bug in the lowering or the backend shows up here.
inline VerifyReport verify_solution(const SdpProblem& p, const SdpSolution& sol) {
  VerifyReport rep;
  if (sol.psd_values.size() != p.psd_vars.size() ||
      sol.scalar_values.size() != p.scalar_vars.size()) {
    throw SchemaError("verify_solution: value count does not match problem");
  }
  rep.objective = eval_lin_func(p.objective, sol.psd_values, sol.scalar_values);
  for (const auto& e : p.op_equalities) {
    rep.max_eq_residual =
        std::max(rep.max_eq_residual,
                 eval_op_expr(e, sol.psd_values, sol.scalar_values).cwiseAbs().maxCoeff());
  }
  for (const auto& f : p.scalar_equalities) {
    rep.max_eq_residual = std::max(
        rep.max_eq_residual, std::abs(eval_lin_func(f, sol.psd_values, sol.scalar_values)));
  }
  for (std::size_t t = 0; t < p.psd_vars.size(); ++t) {
    rep.min_var_eig = std::min(rep.min_var_eig, psd_residual(sol.psd_values[t]));
  }
  for (std::size_t u = 0; u < p.scalar_vars.size(); ++u) {
    if (p.scalar_vars[u].sign == SdpProblem::ScalarSign::NonNegative)
      rep.min_var_eig = std::min(rep.min_var_eig, sol.scalar_values[u]);
  }
  for (const auto& e : p.lmi_constraints) {
    rep.min_lmi_eig = std::min(
        rep.min_lmi_eig,
        psd_residual(eval_op_expr(e, sol.psd_values, sol.scalar_values)));
  }
  return rep;
}

}  // namespace roikit

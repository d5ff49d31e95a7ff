#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pdilab/params.hpp"
#include "pdilab/radial.hpp"
#include "pdilab/source.hpp"

namespace pdilab {

struct DirichletValue {
  double value = 0.0;
};
/// Zero radial flux; the symmetry condition when r_in = 0.
struct NeumannZero {};

using LeftBoundary = std::variant<DirichletValue, NeumannZero>;

struct BoundaryConditions {
  LeftBoundary left = NeumannZero{};
  double right = 0.0;
};

struct RadialDomain {
  double r_in = 0.0;
  double r_out = 1.0;
};

struct SolverConfig {
  int n_nodes = 256;
  double newton_tol = 1e-9;
  int max_iter = 60;
  double damping = 1.0;
  /// Strictly decreasing regularization levels; the last one must be <= 1e-8.
  /// Only used for operators whose flux degenerates at zero slope.
  std::vector<double> continuation{1e-2, 1e-4, 1e-6, 1e-8};

  void validate() const;
};

struct SolverMeta {
  int iterations = 0;
  int stages = 0;
  double final_eps = 0.0;
  double final_residual = 0.0;
};

struct DiscreteRadialSolution {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  ProblemParams params;
  OperatorKind kind = OperatorKind::p_laplacian(2.0);
  BoundaryConditions bc;
  SolverMeta meta;
};

/// Solves -r^{1-dim} (r^{dim-1} a(V'))' + lambda V + c_H |V'|^gamma = f on
/// [r_in, r_out] with a conservative finite-volume scheme and damped Newton.
DiscreteRadialSolution solve_radial_dirichlet(const OperatorKind& kind, const ProblemParams& params,
                                              const SourceTerm& f, const RadialDomain& domain,
                                              const BoundaryConditions& bc,
                                              const SolverConfig& config = {});

/// Discrete max-norm residual of `sol`, re-evaluated from scratch.
double solution_residual(const DiscreteRadialSolution& sol, const SourceTerm& f);

/// Linear interpolation of the discrete solution.
double evaluate(const DiscreteRadialSolution& sol, double r);

}  // namespace pdilab

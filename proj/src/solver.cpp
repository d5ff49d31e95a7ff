#include "pdilab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "pdilab/error.hpp"

namespace pdilab {

void SolverConfig::validate() const {
  require(n_nodes >= 16, "n_nodes must be >= 16");
  require(newton_tol > 0.0, "newton_tol must be > 0");
  require(max_iter >= 1, "max_iter must be >= 1");
  require(damping > 0.0 && damping <= 1.0, "damping must be in (0, 1]");
  require(!continuation.empty(), "continuation needs at least one level");
  for (std::size_t i = 0; i < continuation.size(); ++i) {
    require(continuation[i] > 0.0, "continuation levels must be > 0");
    if (i > 0) require(continuation[i] < continuation[i - 1], "continuation must decrease");
  }
  require(continuation.back() <= 1e-8, "final continuation level must be <= 1e-8");
}

namespace {

// Discrete operator on a fixed grid. Unknowns are the nodes that are not
// Dirichlet: [first, n-2].
class Discretization {
 public:
  Discretization(const OperatorKind& kind, const ProblemParams& params, const SourceTerm& f,
                 const Eigen::VectorXd& grid, const BoundaryConditions& bc)
      : kind_(kind), params_(params), grid_(grid), bc_(bc) {
    const Eigen::Index n = grid.size();
    neumann_ = std::holds_alternative<NeumannZero>(bc.left);
    first_ = neumann_ ? 0 : 1;
    const double d = params.dim;
    volume_.resize(n);
    face_lo_.resize(n);
    face_hi_.resize(n);
    source_.resize(n);
    for (Eigen::Index i = first_; i < n - 1; ++i) {
      const double lo = (i == 0) ? grid[0] : 0.5 * (grid[i - 1] + grid[i]);
      const double hi = 0.5 * (grid[i] + grid[i + 1]);
      volume_[i] = (std::pow(hi, d) - std::pow(lo, d)) / d;
      face_lo_[i] = (i == 0) ? 0.0 : std::pow(lo, d - 1.0);
      face_hi_[i] = std::pow(hi, d - 1.0);
      const double fi = f(grid[i]);
      // the origin cell sees a possibly singular point value; use its mean instead
      source_[i] = (i == 0 && !std::isfinite(fi)) ? f.shell_average(lo, hi, params.dim) : fi;
    }
  }

  Eigen::Index first() const { return first_; }
  Eigen::Index size() const { return grid_.size() - 1 - first_; }

  void apply_boundary(Eigen::VectorXd& v) const {
    if (const auto* dv = std::get_if<DirichletValue>(&bc_.left)) v[0] = dv->value;
    v[v.size() - 1] = bc_.right;
  }

  // Centered slope at node i and its stencil weights.
  struct Slope {
    double value, wm, w0, wp;
  };
  Slope slope(const Eigen::VectorXd& v, Eigen::Index i) const {
    if (i == 0 && neumann_) return {0.0, 0.0, 0.0, 0.0};
    const double h1 = grid_[i] - grid_[i - 1];
    const double h2 = grid_[i + 1] - grid_[i];
    const double wm = -h2 / (h1 * (h1 + h2));
    const double w0 = (h2 - h1) / (h1 * h2);
    const double wp = h1 / (h2 * (h1 + h2));
    return {wm * v[i - 1] + w0 * v[i] + wp * v[i + 1], wm, w0, wp};
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& v, double eps) const {
    Eigen::VectorXd out(size());
    for (Eigen::Index i = first_; i < grid_.size() - 1; ++i) out[i - first_] = node_residual(v, i, eps);
    return out;
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& v, double eps) const {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * size());
    const Eigen::Index n = grid_.size();
    const double cg = params_.c_H, g = params_.gamma;
    for (Eigen::Index i = first_; i < n - 1; ++i) {
      const Eigen::Index row = i - first_;
      double dm = 0.0, d0 = 0.0, dp = 0.0;
      // diffusion: -(F_hi - F_lo) / volume
      const double h_hi = grid_[i + 1] - grid_[i];
      const double a_hi = kind_.flux_derivative((v[i + 1] - v[i]) / h_hi, eps) / h_hi;
      dp -= face_hi_[i] * a_hi / volume_[i];
      d0 += face_hi_[i] * a_hi / volume_[i];
      if (i > 0) {
        const double h_lo = grid_[i] - grid_[i - 1];
        const double a_lo = kind_.flux_derivative((v[i] - v[i - 1]) / h_lo, eps) / h_lo;
        d0 += face_lo_[i] * a_lo / volume_[i];
        dm -= face_lo_[i] * a_lo / volume_[i];
      }
      d0 += params_.lambda;
      const Slope s = slope(v, i);
      if (s.value != 0.0) {
        // semismooth: the gradient power contributes nothing at zero slope
        const double dh = cg * g * std::pow(std::abs(s.value), g - 1.0) * (s.value > 0 ? 1.0 : -1.0);
        dm += dh * s.wm;
        d0 += dh * s.w0;
        dp += dh * s.wp;
      }
      if (i - 1 >= first_) entries.emplace_back(row, row - 1, dm);
      entries.emplace_back(row, row, d0);
      if (i + 1 < n - 1) entries.emplace_back(row, row + 1, dp);
    }
    Eigen::SparseMatrix<double> jac(size(), size());
    jac.setFromTriplets(entries.begin(), entries.end());
    return jac;
  }

 private:
  double node_residual(const Eigen::VectorXd& v, Eigen::Index i, double eps) const {
    const double h_hi = grid_[i + 1] - grid_[i];
    const double flux_hi = face_hi_[i] * kind_.flux((v[i + 1] - v[i]) / h_hi, eps);
    double flux_lo = 0.0;
    if (i > 0) {
      const double h_lo = grid_[i] - grid_[i - 1];
      flux_lo = face_lo_[i] * kind_.flux((v[i] - v[i - 1]) / h_lo, eps);
    }
    const double grad = slope(v, i).value;
    return -(flux_hi - flux_lo) / volume_[i] + params_.lambda * v[i] +
           params_.c_H * std::pow(std::abs(grad), params_.gamma) - source_[i];
  }

  const OperatorKind& kind_;
  const ProblemParams& params_;
  const Eigen::VectorXd& grid_;
  const BoundaryConditions& bc_;
  bool neumann_ = false;
  Eigen::Index first_ = 1;
  Eigen::VectorXd volume_, face_lo_, face_hi_, source_;
};

double max_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double effective_eps(const OperatorKind& kind, double eps) {
  return kind.needs_regularization() ? eps : 0.0;
}

}  // namespace

DiscreteRadialSolution solve_radial_dirichlet(const OperatorKind& kind, const ProblemParams& params,
                                              const SourceTerm& f, const RadialDomain& domain,
                                              const BoundaryConditions& bc,
                                              const SolverConfig& config) {
  params.validate();
  config.validate();
  require(domain.r_in >= 0.0 && domain.r_out > domain.r_in, "degenerate solver domain");
  require(domain.r_in > 0.0 || std::holds_alternative<NeumannZero>(bc.left),
          "r_in = 0 requires the symmetry (zero-flux) condition on the left",
          ErrorCode::IllPosedBoundary);

  DiscreteRadialSolution sol;
  sol.params = params;
  sol.kind = kind;
  sol.bc = bc;
  const Eigen::Index n = config.n_nodes;
  sol.grid = Eigen::VectorXd::LinSpaced(n, domain.r_in, domain.r_out);

  const Discretization disc(kind, params, f, sol.grid, bc);

  // initial guess: linear interpolation of the boundary data
  const double left =
      std::holds_alternative<DirichletValue>(bc.left) ? std::get<DirichletValue>(bc.left).value
                                                      : bc.right;
  sol.values = Eigen::VectorXd::LinSpaced(n, left, bc.right);
  disc.apply_boundary(sol.values);

  std::vector<double> levels = config.continuation;
  if (!kind.needs_regularization()) levels = {levels.back()};

  const Eigen::Index first = disc.first();
  const Eigen::Index m = disc.size();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double norm = 0.0;
  for (std::size_t stage = 0; stage < levels.size(); ++stage) {
    const double eps = effective_eps(kind, levels[stage]);
    Eigen::VectorXd res = disc.residual(sol.values, eps);
    norm = max_norm(res);
    for (int it = 0; it < config.max_iter && norm > config.newton_tol; ++it) {
      const Eigen::SparseMatrix<double> jac = disc.jacobian(sol.values, eps);
      lu.compute(jac);
      if (lu.info() != Eigen::Success)
        throw Error(ErrorCode::NoConvergence, "singular Newton Jacobian");
      const Eigen::VectorXd step = lu.solve(-res);
      double t = config.damping;
      Eigen::VectorXd trial = sol.values;
      Eigen::VectorXd trial_res;
      double trial_norm = 0.0;
      for (int halving = 0; halving <= 30; ++halving) {
        trial.segment(first, m) = sol.values.segment(first, m) + t * step;
        trial_res = disc.residual(trial, eps);
        trial_norm = max_norm(trial_res);
        if (std::isfinite(trial_norm) && trial_norm < norm) break;
        t *= 0.5;
      }
      if (!std::isfinite(trial_norm)) break;
      sol.values = trial;
      res = std::move(trial_res);
      norm = trial_norm;
      ++sol.meta.iterations;
    }
    ++sol.meta.stages;
    sol.meta.final_eps = eps;
  }
  sol.meta.final_residual = norm;
  if (!(norm <= config.newton_tol))
    throw Error(ErrorCode::NoConvergence,
                "Newton residual " + std::to_string(norm) + " above tolerance after " +
                    std::to_string(sol.meta.iterations) + " iterations");
  return sol;
}

double solution_residual(const DiscreteRadialSolution& sol, const SourceTerm& f) {
  const Discretization disc(sol.kind, sol.params, f, sol.grid, sol.bc);
  return max_norm(disc.residual(sol.values, sol.meta.final_eps));
}

double evaluate(const DiscreteRadialSolution& sol, double r) {
  const auto& x = sol.grid;
  const Eigen::Index n = x.size();
  require(r >= x[0] - 1e-12 * std::max(1.0, std::abs(x[0])) &&
              r <= x[n - 1] * (1 + 1e-12),
          "radius outside the solution grid", ErrorCode::DomainExceeded);
  if (r <= x[0]) return sol.values[0];
  if (r >= x[n - 1]) return sol.values[n - 1];
  const Eigen::Index hi = std::upper_bound(x.data(), x.data() + n, r) - x.data();
  const Eigen::Index lo = hi - 1;
  const double w = (r - x[lo]) / (x[hi] - x[lo]);
  return (1 - w) * sol.values[lo] + w * sol.values[hi];
}

}  // namespace pdilab

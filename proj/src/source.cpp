#include "pdilab/source.hpp"

#include <algorithm>
#include <cmath>

#include "pdilab/error.hpp"

namespace pdilab {

namespace {

double interpolate(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double r) {
  const Eigen::Index n = x.size();
  if (r <= x[0]) return y[0];
  if (r >= x[n - 1]) return y[n - 1];
  const auto it = std::upper_bound(x.data(), x.data() + n, r);
  const Eigen::Index i = (it - x.data()) - 1;
  const double w = (r - x[i]) / (x[i + 1] - x[i]);
  return (1.0 - w) * y[i] + w * y[i + 1];
}

}  // namespace

SourceTerm SourceTerm::radial_power(double A, double beta) {
  require(std::isfinite(A) && std::isfinite(beta) && beta >= 0.0,
          "radial power source needs finite A and beta >= 0");
  return SourceTerm(RadialPowerSource{A, beta});
}

SourceTerm SourceTerm::sampled(Eigen::VectorXd grid, Eigen::VectorXd values) {
  require(grid.size() >= 2 && grid.size() == values.size(),
          "sampled source needs >= 2 nodes and matching values");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    require(grid[i] > grid[i - 1], "sampled source grid must be strictly increasing");
  require(grid[0] >= 0.0, "sampled source grid must be nonnegative");
  return SourceTerm(SampledSource{std::move(grid), std::move(values)});
}

double SourceTerm::operator()(double r) const {
  struct Visitor {
    double r;
    double operator()(const ZeroSource&) const { return 0.0; }
    double operator()(const RadialPowerSource& s) const {
      if (s.beta == 0.0) return s.A;
      return s.A * std::pow(r, -s.beta);
    }
    double operator()(const SampledSource& s) const { return interpolate(s.grid, s.values, r); }
  };
  return std::visit(Visitor{r}, family_);
}

double SourceTerm::shell_average(double lo, double hi, int dim) const {
  const double d = dim;
  const double volume = (std::pow(hi, d) - std::pow(lo, d)) / d;
  struct Visitor {
    double lo, hi, d, volume;
    double operator()(const ZeroSource&) const { return 0.0; }
    double operator()(const RadialPowerSource& s) const {
      const double e = d - s.beta;
      if (e == 0.0) return s.A * std::log(hi / lo) / volume;
      require(e > 0.0 || lo > 0.0, "source not integrable near the origin",
              ErrorCode::NonIntegrable);
      return s.A * (std::pow(hi, e) - std::pow(lo, e)) / e / volume;
    }
    double operator()(const SampledSource& s) const {
      constexpr int panels = 64;
      const double step = (hi - lo) / panels;
      double acc = 0.0;
      for (int k = 0; k <= panels; ++k) {
        const double r = lo + k * step;
        const double w = (k == 0 || k == panels) ? 0.5 : 1.0;
        acc += w * interpolate(s.grid, s.values, r) * std::pow(r, d - 1.0);
      }
      return acc * step / volume;
    }
  };
  return std::visit(Visitor{lo, hi, d, volume}, family_);
}

}  // namespace pdilab

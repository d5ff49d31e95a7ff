#include "pdilab/report.hpp"

#include <cmath>
#include <cstdio>

namespace pdilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : Json(nullptr);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json numbers(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json to_json(const ProblemParams& p) {
  return Json{{"dim", p.dim},
              {"p", number(p.p)},
              {"gamma", number(p.gamma)},
              {"lambda", number(p.lambda)},
              {"c_H", number(p.c_H)},
              {"nu", number(p.nu)},
              {"q", p.q.is_infinite() ? Json("inf") : number(p.q.value())}};
}

Json to_json(const ExponentReport& r) {
  return Json{{"alpha", optional_number(r.alpha)},
              {"alpha_branch", r.alpha ? Json(std::string(to_string(r.alpha_branch))) : Json(nullptr)},
              {"s", number(r.s)},
              {"s_branch", std::string(to_string(r.s_branch))},
              {"gamma_star", optional_number(r.gamma_star)}};
}

Json to_json(const Regime& r) {
  return Json{{"growth", std::string(to_string(r.growth))},
              {"liouville", std::string(to_string(r.liouville))}};
}

Json to_json(const RadialProfile& u) {
  return std::visit(
      overloaded{
          [](const PowerShifted& f) {
            return Json{{"family", "POWER_SHIFTED"}, {"c", number(f.c)}, {"a", number(f.a)}};
          },
          [](const Power& f) {
            return Json{{"family", "POWER"}, {"c", number(f.c)}, {"a", number(f.a)}};
          },
          [](const Bump& f) {
            return Json{{"family", "BUMP"}, {"c", number(f.c)}, {"delta", number(f.delta)}};
          },
          [](const Sampled& f) {
            return Json{{"family", "SAMPLED"}, {"grid", numbers(f.grid)}, {"values", numbers(f.values)}};
          },
      },
      u.family());
}

Json to_json(const ResidualReport& r, bool with_arrays) {
  Json out{{"nodes", r.grid.size()},
           {"min_residual", number(r.min_residual)},
           {"max_abs_residual", number(r.max_abs_residual)},
           {"tol", number(r.tol)},
           {"pass", r.pass}};
  if (with_arrays) {
    out["grid"] = numbers(r.grid);
    out["residuals"] = numbers(r.residuals);
  }
  return out;
}

Json to_json(const SolverMeta& m) {
  return Json{{"iterations", m.iterations},
              {"stages", m.stages},
              {"final_eps", number(m.final_eps)},
              {"final_residual", number(m.final_residual)}};
}

Json to_json(const CaccioppoliReport& r) {
  return Json{{"R", number(r.R)},
              {"radii_t", numbers(r.radii_t)},
              {"energies", numbers(r.energies)},
              {"predicted_s", number(r.predicted_s)},
              {"predicted_growth", number(r.predicted_growth)},
              {"fitted_growth", number(r.fitted_growth)},
              {"fitted_K", number(r.fitted_K)},
              {"stable", r.stable},
              {"pass", r.pass}};
}

Json to_json(const HolderFitReport& r) {
  return Json{{"scales", numbers(r.scales)},
              {"max_increments", numbers(r.max_increments)},
              {"fitted_alpha", number(r.fitted_alpha)},
              {"r_squared", number(r.r_squared)},
              {"predicted_alpha", optional_number(r.predicted_alpha)},
              {"tolerance", number(r.tolerance)},
              {"one_sided", r.one_sided},
              {"pass", r.pass}};
}

Json to_json(const MorreyNorm& m) {
  return Json{{"s_index", number(m.s_index)},
              {"theta", number(m.theta)},
              {"value", m.value ? number(*m.value) : Json("DIVERGENT")},
              {"argmax_radius", number(m.argmax_radius)},
              {"argmax_center", number(m.argmax_center)}};
}

Json to_json(const SigmaBoundReport& r) {
  return Json{{"R", number(r.R)},
              {"r", number(r.r)},
              {"sigma_R", number(r.sigma_R)},
              {"weight", std::string(to_string(r.weight))},
              {"rho", number(r.rho)},
              {"lhs", number(r.lhs)},
              {"rhs", number(r.rhs)},
              {"constant_C", number(r.constant_C)},
              {"comparison_integral", number(r.comparison_integral)},
              {"area_normalization", number(r.area_normalization)},
              {"reduced_integral", number(r.reduced_integral)},
              {"contradiction", r.contradiction}};
}

Json to_json(const LiouvilleVerdict& v) {
  Json out{{"verdict", std::string(to_string(v.verdict))},
           {"mechanism", v.mechanism ? Json(std::string(to_string(*v.mechanism))) : Json(nullptr)},
           {"witness", std::string(to_string(v.witness))},
           {"gamma_star", number(v.gamma_star)}};
  out["witness_profile"] = v.witness_profile ? to_json(*v.witness_profile) : Json(nullptr);
  out["witness_check"] = v.witness_check ? to_json(*v.witness_check, false) : Json(nullptr);
  return out;
}

}  // namespace pdilab

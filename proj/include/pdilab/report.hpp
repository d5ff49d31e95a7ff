#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pdilab/audit.hpp"
#include "pdilab/liouville.hpp"
#include "pdilab/params.hpp"
#include "pdilab/radial.hpp"
#include "pdilab/solver.hpp"

namespace pdilab {

using Json = nlohmann::ordered_json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Doubles go through nlohmann's shortest round-trip formatting; non-finite values
/// become the strings "inf", "-inf", "nan".
Json number(double v);
Json numbers(const Eigen::VectorXd& v);
Json numbers(const std::vector<double>& v);

Json to_json(const ProblemParams& p);
Json to_json(const ExponentReport& r);
Json to_json(const Regime& r);
Json to_json(const RadialProfile& u);
Json to_json(const ResidualReport& r, bool with_arrays = true);
Json to_json(const SolverMeta& m);
Json to_json(const CaccioppoliReport& r);
Json to_json(const HolderFitReport& r);
Json to_json(const MorreyNorm& m);
Json to_json(const SigmaBoundReport& r);
Json to_json(const LiouvilleVerdict& v);

}  // namespace pdilab

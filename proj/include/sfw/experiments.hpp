#pragma once

// Named algorithm configurations and reproducible campaign plans. A plan
// round-trips through the flat manifest format so a finished campaign
// directory can be replayed from its manifest alone.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfw/globalopt.hpp"
#include "sfw/io.hpp"
#include "sfw/quadratic.hpp"
#include "sfw/solver.hpp"

namespace sfw {

// Identifiers follow the block-coordinate naming scheme: bcfw is the plain
// short-step baseline, the -ssc variants chain short steps per block.
inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> ids = {
      "bcfw", "bcafw-ssc", "pafw-ssc", "gsafw-ssc", "pfw-ssc", "fdfw-ssc"};
  return ids;
}

inline SolverConfig algorithm_config(const std::string& id) {
  SolverConfig cfg;
  if (id == "bcfw") {
    cfg.strategy = Strategy::Random;
    cfg.method = Method::FW;
    cfg.use_ssc = false;
  } else if (id == "bcafw-ssc") {
    cfg.strategy = Strategy::Random;
    cfg.method = Method::AFW;
    cfg.use_ssc = true;
  } else if (id == "pafw-ssc") {
    cfg.strategy = Strategy::Parallel;
    cfg.method = Method::AFW;
    cfg.use_ssc = true;
  } else if (id == "gsafw-ssc") {
    cfg.strategy = Strategy::Greedy;
    cfg.method = Method::AFW;
    cfg.use_ssc = true;
  } else if (id == "pfw-ssc") {
    cfg.strategy = Strategy::Random;
    cfg.method = Method::PFW;
    cfg.use_ssc = true;
  } else if (id == "fdfw-ssc") {
    cfg.strategy = Strategy::Random;
    cfg.method = Method::FDFW;
    cfg.use_ssc = true;
  } else {
    std::string msg = "unknown algorithm id '" + id + "'; known ids:";
    for (const std::string& k : known_algorithms()) msg += ' ' + k;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

inline std::vector<std::string> default_multistart_algorithms() {
  return {"bcfw", "bcafw-ssc", "pafw-ssc", "gsafw-ssc"};
}

inline std::vector<AlgorithmSpec> make_algorithm_specs(std::span<const std::string> ids) {
  std::vector<AlgorithmSpec> specs;
  specs.reserve(ids.size());
  for (const std::string& id : ids) specs.push_back({id, algorithm_config(id)});
  return specs;
}

inline std::uint64_t objective_seed(std::uint64_t master_seed, int index) {
  return derive_seed(master_seed, "objective", static_cast<std::uint64_t>(index));
}

inline std::uint64_t start_seed(std::uint64_t master_seed, int index) {
  return derive_seed(master_seed, "start", static_cast<std::uint64_t>(index));
}

inline std::vector<QuadraticProblem> make_objectives(int l, int m,
                                                     std::uint64_t master_seed, int count) {
  std::vector<QuadraticProblem> objectives;
  objectives.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    objectives.push_back(gen_multistqp(l, m, objective_seed(master_seed, i)));
  return objectives;
}

namespace detail {

inline std::string join_ids(std::span<const std::string> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ',';
    out += ids[i];
  }
  return out;
}

inline std::vector<std::string> split_ids(const std::string& joined) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= joined.size()) {
    const std::size_t comma = joined.find(',', begin);
    const std::size_t end = comma == std::string::npos ? joined.size() : comma;
    if (end > begin) out.push_back(joined.substr(begin, end - begin));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return out;
}

inline long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("manifest: key '" + key + "' has non-integer value '" + value +
                             "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::runtime_error("manifest: key '" + key + "' has non-integer value '" + value +
                             "'");
  }
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("manifest: key '" + key + "' has non-numeric value '" + value +
                             "'");
  }
}

inline std::string require(const ManifestMap& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end()) throw std::runtime_error("manifest: missing key '" + key + "'");
  return it->second;
}

}  // namespace detail

struct MultistartPlan {
  int l = 0;
  int m = 0;
  std::uint64_t master_seed = 0;
  int objectives = 5;
  int starts = 4;
  long budget_grads = 0;  // 0 selects 50 * m
  std::vector<std::string> algorithms = default_multistart_algorithms();
  double gap_offset = 1e-5;

  long resolved_budget() const { return budget_grads > 0 ? budget_grads : 50L * m; }
};

struct MBHPlan {
  int l = 0;
  int m = 0;
  std::uint64_t master_seed = 0;
  int objectives = 5;
  int repetitions = 10;
  int i_max = 9;
  double gamma = 0.25;
  long lo_budget_grads = 0;  // 0 selects 10 * m
  std::vector<std::string> algorithms = default_multistart_algorithms();
  double gap_offset = 1e-1;
};

inline ManifestEntries plan_to_manifest(const MultistartPlan& plan, const std::string& status) {
  ManifestEntries entries;
  entries.emplace_back("schema", "1");
  entries.emplace_back("kind", "multistart");
  entries.emplace_back("l", std::to_string(plan.l));
  entries.emplace_back("m", std::to_string(plan.m));
  entries.emplace_back("master_seed", std::to_string(plan.master_seed));
  entries.emplace_back("objectives", std::to_string(plan.objectives));
  entries.emplace_back("starts", std::to_string(plan.starts));
  entries.emplace_back("budget_grads", std::to_string(plan.resolved_budget()));
  entries.emplace_back("algorithms", detail::join_ids(plan.algorithms));
  entries.emplace_back("gap_offset", fmt_g17(plan.gap_offset));
  entries.emplace_back("status", status);
  return entries;
}

inline ManifestEntries plan_to_manifest(const MBHPlan& plan, const std::string& status) {
  ManifestEntries entries;
  entries.emplace_back("schema", "1");
  entries.emplace_back("kind", "mbh");
  entries.emplace_back("l", std::to_string(plan.l));
  entries.emplace_back("m", std::to_string(plan.m));
  entries.emplace_back("master_seed", std::to_string(plan.master_seed));
  entries.emplace_back("objectives", std::to_string(plan.objectives));
  entries.emplace_back("repetitions", std::to_string(plan.repetitions));
  entries.emplace_back("i_max", std::to_string(plan.i_max));
  entries.emplace_back("gamma", fmt_g17(plan.gamma));
  entries.emplace_back("lo_budget_grads",
                       std::to_string(plan.lo_budget_grads > 0 ? plan.lo_budget_grads
                                                               : 10L * plan.m));
  entries.emplace_back("algorithms", detail::join_ids(plan.algorithms));
  entries.emplace_back("gap_offset", fmt_g17(plan.gap_offset));
  entries.emplace_back("status", status);
  return entries;
}

inline std::string manifest_kind(const ManifestMap& map) {
  return detail::require(map, "kind");
}

inline MultistartPlan multistart_plan_from_manifest(const ManifestMap& map) {
  if (detail::require(map, "kind") != "multistart")
    throw std::runtime_error("manifest: kind is not 'multistart'");
  MultistartPlan plan;
  plan.l = static_cast<int>(detail::parse_long("l", detail::require(map, "l")));
  plan.m = static_cast<int>(detail::parse_long("m", detail::require(map, "m")));
  plan.master_seed = detail::parse_u64("master_seed", detail::require(map, "master_seed"));
  plan.objectives =
      static_cast<int>(detail::parse_long("objectives", detail::require(map, "objectives")));
  plan.starts = static_cast<int>(detail::parse_long("starts", detail::require(map, "starts")));
  plan.budget_grads =
      detail::parse_long("budget_grads", detail::require(map, "budget_grads"));
  plan.algorithms = detail::split_ids(detail::require(map, "algorithms"));
  plan.gap_offset = detail::parse_double("gap_offset", detail::require(map, "gap_offset"));
  return plan;
}

inline MBHPlan mbh_plan_from_manifest(const ManifestMap& map) {
  if (detail::require(map, "kind") != "mbh")
    throw std::runtime_error("manifest: kind is not 'mbh'");
  MBHPlan plan;
  plan.l = static_cast<int>(detail::parse_long("l", detail::require(map, "l")));
  plan.m = static_cast<int>(detail::parse_long("m", detail::require(map, "m")));
  plan.master_seed = detail::parse_u64("master_seed", detail::require(map, "master_seed"));
  plan.objectives =
      static_cast<int>(detail::parse_long("objectives", detail::require(map, "objectives")));
  plan.repetitions =
      static_cast<int>(detail::parse_long("repetitions", detail::require(map, "repetitions")));
  plan.i_max = static_cast<int>(detail::parse_long("i_max", detail::require(map, "i_max")));
  plan.gamma = detail::parse_double("gamma", detail::require(map, "gamma"));
  plan.lo_budget_grads =
      detail::parse_long("lo_budget_grads", detail::require(map, "lo_budget_grads"));
  plan.algorithms = detail::split_ids(detail::require(map, "algorithms"));
  plan.gap_offset = detail::parse_double("gap_offset", detail::require(map, "gap_offset"));
  return plan;
}

inline MultistartOutcome run_multistart_plan(const MultistartPlan& plan, int jobs = 1) {
  const std::vector<QuadraticProblem> objectives =
      make_objectives(plan.l, plan.m, plan.master_seed, plan.objectives);
  std::vector<std::uint64_t> starts;
  starts.reserve(static_cast<std::size_t>(plan.starts));
  for (int s = 0; s < plan.starts; ++s) starts.push_back(start_seed(plan.master_seed, s));
  const std::vector<AlgorithmSpec> specs = make_algorithm_specs(plan.algorithms);
  return multistart_run(objectives, starts, specs, plan.resolved_budget(), jobs,
                        plan.gap_offset);
}

inline MBHCampaignOutcome run_mbh_plan(const MBHPlan& plan, int jobs = 1) {
  const std::vector<QuadraticProblem> objectives =
      make_objectives(plan.l, plan.m, plan.master_seed, plan.objectives);
  const std::vector<AlgorithmSpec> specs = make_algorithm_specs(plan.algorithms);
  MBHConfig proto;
  proto.i_max = plan.i_max;
  proto.gamma = plan.gamma;
  proto.lo_budget_grads = plan.lo_budget_grads;
  return mbh_campaign(objectives, plan.repetitions, specs, proto, plan.master_seed, jobs,
                      plan.gap_offset);
}

}  // namespace sfw

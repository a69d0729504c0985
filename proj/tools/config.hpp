#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "bsopt/engine.hpp"
#include "bsopt/problems.hpp"
#include "json.hpp"

namespace bsopt::cli {

using nlohmann::json;

// A schema violation; path is a JSON pointer into the config document.
struct ConfigError : std::runtime_error {
  ConfigError(std::string path, const std::string& msg)
      : std::runtime_error("config error at " + (path.empty() ? std::string("/") : path) + ": " + msg),
        path(std::move(path)) {}
  std::string path;
};

json load_config(const std::string& file);

Generator parse_generator(const json& j, const std::string& path);
// dimension K is needed for defaults and length checks
ConstraintSet parse_constraint(const json& j, const std::string& path, int K);
EstimatorConfig parse_estimator(const json& j, const std::string& path, int K, double* slab);
EntropySpec parse_entropy(const json& j, const std::string& path);

// The estimate/bounds problem: generator, reference vector or data file, mode,
// constraint.  The constraint set keeps exact equalities; slab is the width
// they get for simulation.
struct ProblemSpec {
  BsProblem problem;
  EstimatorConfig estimator;
  double slab = 0.01;
};
ProblemSpec parse_problem(const json& cfg, const std::string& base_dir);

TransportInstance parse_transport(const json& cfg);
AssignmentInstance parse_assignment(const json& cfg);
QuadraticInstance parse_quadratic(const json& cfg);
EntropyMaxInstance parse_entropy_max(const json& cfg);
// estimator section of the problem commands
SolveOptions parse_solve_options(const json& cfg, int K);

}  // namespace bsopt::cli

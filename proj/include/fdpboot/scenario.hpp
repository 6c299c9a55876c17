#pragma once

#include "fdpboot/bootstrap.hpp"
#include "fdpboot/bounds.hpp"
#include "fdpboot/grf.hpp"
#include "fdpboot/model.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

namespace fdpboot {

// Thrown when a simulation scenario cannot be built (e.g. n < 3).
struct ScenarioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Three-group / two-contrast Monte-Carlo setting: GRF noise, group
// indicator design, contrasts G2 - G1 and G3 - G2, and a random null set of
// size round(pi0 * m) with unit signal everywhere else.
struct ScenarioConfig {
  GrfConfig grf;          // dims + fwhm; n_fields/seed are per repetition
  int n_subjects = 30;
  double pi0 = 1.0;
  double alpha = 0.1;
  int reps = 500;
  int bootstraps = 100;
  std::vector<CalibrationMethod> methods = {CalibrationMethod::StepDown};
  std::uint64_t seed = 0;
  int template_size = 0;  // K; 0 means K = m
  double bh_q = 0.05;
  Sidedness sidedness = Sidedness::TwoSided;
};

struct Scenario {
  Dataset dataset;
  HypothesisSet true_nulls;
  std::vector<int> groups;  // subject -> 0/1/2
};

// Builds one repetition from its own seed. Group assignments with an empty
// group are rejected and redrawn whole.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t rep_seed);

}  // namespace fdpboot

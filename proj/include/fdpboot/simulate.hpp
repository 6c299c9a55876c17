#pragma once

#include "fdpboot/scenario.hpp"

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fdpboot {

enum class PowerSet { Full, Bh, P05 };

std::string power_set_tag(PowerSet set);

// One repetition x method outcome. Power ratios are NaN when the
// conditioning event |R ∩ non-nulls| > 0 did not occur.
struct RepRecord {
  CalibrationMethod method = CalibrationMethod::SingleStep;
  int rep = 0;
  bool violated = false;  // f over the true nulls <= lambda
  double lambda = 0.0;
  double power_full = 0.0;
  double power_bh = 0.0;
  double power_p05 = 0.0;
  // extra diagnostics, not part of the CSV schema
  int bh_size = 0;
  int bh_tp_lower = 0;
};

struct MethodSummary {
  double empirical_jer = 0.0;
  double jer_se = 0.0;
  std::map<std::string, double> power;       // tag -> mean (NaN if undefined)
  std::map<std::string, double> power_se;    // tag -> standard error
  std::map<std::string, int> power_reps;     // tag -> #reps that qualified
  int reps_used = 0;
};

struct SimReport {
  ScenarioConfig config;
  std::map<CalibrationMethod, MethodSummary> methods;
  std::vector<RepRecord> records;  // method-major within each rep
};

SimReport run_simulation(const ScenarioConfig& config, int threads = 1);

// Convenience extractors mirroring the experiment statistics.
double empirical_jer(const ScenarioConfig& config, CalibrationMethod method,
                     int threads = 1);
double power(const ScenarioConfig& config, CalibrationMethod method, PowerSet r_choice,
             int threads = 1);

// CSV with header method,rep,violated,lambda,power_full,power_bh,power_p05
// (one row per repetition and method; undefined power prints as NA).
void write_records_csv(std::ostream& os, const SimReport& report);

}  // namespace fdpboot

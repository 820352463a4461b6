#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "opgrowth/fit.hpp"
#include "opgrowth/ruc.hpp"

namespace opgrowth {

inline constexpr const char* kVersion = "opgrowth 0.1.0";

/// One named pass/fail check of an experiment report. Thresholds live in
/// experiments.cpp, one definition per check name.
struct CriterionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct ExperimentSpec {
  std::string name;
  uint64_t seed = 1;
  std::string output_dir;      // empty: compute only, write nothing
  nlohmann::json overrides;    // experiment-specific knobs
};

struct ExperimentReport {
  std::string name;
  uint64_t seed = 0;
  nlohmann::json data;  // fitted parameters, windows, measured values
  std::vector<CriterionResult> checks;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

std::vector<std::string> experiment_names();
ExperimentSpec load_experiment_spec(const std::string& path);

/// Run one named experiment: simulate, fit, check, and (when output_dir is
/// set) write CSV/SVG artifacts plus manifest.json and report.json.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Gate-model constants measured from error-free runs, with the fit
/// windows that produced them.
struct GateModelConstants {
  double v_butterfly = 0.0;
  double width_coeff = 0.0;
  double size_intercept = 0.0;  // front-establishment offset of the 1D fit
  double action_offset = 0.0;   // early-time offset of int_0^t S dt'
  double lyapunov = 0.0;
  double rel_width = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  nlohmann::json to_json() const;
};

GateModelConstants measure_1d_constants(const GrowthCurve& eps0_curve,
                                        double t_lo, double t_hi);
GateModelConstants measure_all_to_all_constants(const GrowthCurve& eps0_curve,
                                                double s_lo, double s_hi);

}  // namespace opgrowth

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aropt/algorithms/outer.hpp"
#include "aropt/verify/checks.hpp"

namespace aropt::cli {

struct ExperimentConfig {
  std::string case_path;
  std::vector<double> w;  // uncertainty as a fraction of load, each in (0, 1]
  bool correlated = false;
  algorithms::OuterParams outer;
  double squeeze = 0.005;  // warm-start window shrink
  // Degree settings of the checks. auto_degree picks degree 4 up to 9 buses
  // and 2 above.
  verify::DegreeConfig degree;
  bool auto_degree = true;
  bool feasibility_check = false;
  bool infeasibility_check = false;
  bool parallel_rows = false;
  bool timings = true;  // false blanks the time columns
  std::string csv_path, markdown_path;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON object with keys case, w, correlated, seed, squeeze, parallel_rows,
// outer {tol, max_iterations, rank_retries, ap {tol, f0, max_iterations, nu,
// stall_window, stall_fraction}}, checks {feasibility, infeasibility, degree
// ("auto" or an even integer), sigma0_degree, chaining, parallel,
// max_variables, stop_early}, output {csv, markdown, timings}. Unknown keys
// are rejected. A relative case path is resolved against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  double w = 0.0;
  double nominal_lower = 0.0;  // reported units
  std::string nominal_flag;    // set when the nominal relaxation failed
  std::optional<double> upper;  // reported units, present iff flag == "F"
  std::string flag;             // outer flag: F, LNF, NC, NP, RD, PF, or WS when the warm start failed
  int iterations = 0;           // alternating projection iterations
  double seconds_per_iteration = 0.0;
  double total_seconds = 0.0;
  Eigen::VectorXd y, x;         // best feasible iterate, empty otherwise
  double fixed_point_residual = 0.0;  // of its alternating projections
  std::optional<verify::Verdict> feasibility, infeasibility;
  double feasibility_seconds = 0.0, infeasibility_seconds = 0.0;
  std::string message;
};

// Loads the case, bounds the nominal problem once, then for each w builds the
// ellipsoid, runs the squeezed warm start and the outer loop and, for
// feasible rows, the enabled checks. Rows are returned in w order. Throws
// ConfigError or ModelError on bad input only.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string to_csv(const std::vector<ResultRow>& rows, bool timings = true);
std::string to_markdown(const std::vector<ResultRow>& rows, bool timings = true);

}  // namespace aropt::cli

#include "aropt/cli/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aropt/acopf/model.hpp"
#include "aropt/acopf/network.hpp"
#include "aropt/acopf/nominal.hpp"
#include "aropt/error.hpp"
#include "json.hpp"

namespace aropt::cli {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (case_path.empty()) throw ConfigError("config: no case file");
  for (double v : w)
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("config: w values must lie in (0, 1]");
  if (!(squeeze >= 0.0 && squeeze < 1.0)) throw ConfigError("config: squeeze must lie in [0, 1)");
  try {
    outer.validate();
    degree.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError("config: unknown key " + where + "." + k);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    check_keys(j, {"case", "w", "correlated", "seed", "squeeze", "parallel_rows", "outer", "checks", "output"}, "root");
    read(j, "case", c.case_path);
    read(j, "w", c.w);
    read(j, "correlated", c.correlated);
    read(j, "seed", c.seed);
    read(j, "squeeze", c.squeeze);
    read(j, "parallel_rows", c.parallel_rows);
    if (j.contains("outer")) {
      const json& o = j.at("outer");
      check_keys(o, {"tol", "max_iterations", "rank_retries", "ap"}, "outer");
      read(o, "tol", c.outer.tol);
      read(o, "max_iterations", c.outer.max_iterations);
      read(o, "rank_retries", c.outer.rank_retries);
      if (o.contains("ap")) {
        const json& a = o.at("ap");
        check_keys(a, {"tol", "f0", "max_iterations", "nu", "stall_window", "stall_fraction"}, "outer.ap");
        read(a, "tol", c.outer.ap.tol);
        read(a, "f0", c.outer.ap.f0);
        read(a, "max_iterations", c.outer.ap.max_iterations);
        read(a, "nu", c.outer.ap.nu);
        read(a, "stall_window", c.outer.ap.stall_window);
        read(a, "stall_fraction", c.outer.ap.stall_fraction);
      }
    }
    if (j.contains("checks")) {
      const json& k = j.at("checks");
      check_keys(k,
                 {"feasibility", "infeasibility", "degree", "sigma0_degree", "chaining", "parallel", "max_variables",
                  "stop_early"},
                 "checks");
      read(k, "feasibility", c.feasibility_check);
      read(k, "infeasibility", c.infeasibility_check);
      if (k.contains("degree")) {
        const json& d = k.at("degree");
        if (d.is_string()) {
          if (d.get<std::string>() != "auto") throw ConfigError("config: checks.degree must be \"auto\" or an integer");
          c.auto_degree = true;
        } else {
          c.degree.degree = d.get<int>();
          c.auto_degree = false;
        }
      }
      read(k, "sigma0_degree", c.degree.sigma0_degree);
      read(k, "chaining", c.degree.chaining);
      read(k, "parallel", c.degree.parallel);
      read(k, "max_variables", c.degree.max_variables);
      read(k, "stop_early", c.degree.stop_early);
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      check_keys(o, {"csv", "markdown", "timings"}, "output");
      read(o, "csv", c.csv_path);
      read(o, "markdown", c.markdown_path);
      read(o, "timings", c.timings);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!base_dir.empty() && !c.case_path.empty() && std::filesystem::path(c.case_path).is_relative())
    c.case_path = (std::filesystem::path(base_dir) / c.case_path).string();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ResultRow run_row(const acopf::AcopfModel& model, const ExperimentConfig& config, double w, bool inner_parallel) {
  ResultRow row;
  row.w = w;
  const auto t0 = Clock::now();
  conic::SolverOptions solver;
  solver.parallel = inner_parallel;
  acopf::WarmStart ws;
  try {
    ws = acopf::squeeze_warm_start(model, config.squeeze, solver);
  } catch (const ModelError& e) {
    row.flag = "WS";
    row.message = e.what();
    row.total_seconds = since(t0);
    return row;
  }
  const aro::AroProblem prob = acopf::build_aro(model, acopf::load_uncertainty(model, w, config.correlated));
  algorithms::OuterParams outer = config.outer;
  outer.ap.solver.parallel = inner_parallel;
  const auto t1 = Clock::now();
  const algorithms::OuterHistory hist = algorithms::dynamic_outer(prob, ws.y, ws.x, outer);
  const double outer_seconds = since(t1);
  for (const auto& it : hist.iterates) row.iterations += it.ap.iterations;
  const algorithms::OuterIterate& last = hist.iterates.back();
  const algorithms::OuterIterate* best = hist.best();
  row.flag = algorithms::outer_flag(best ? algorithms::OuterStatus::Feasible : last.status);
  row.message = best ? "" : last.message;
  if (best) {
    row.upper = best->objective / acopf::kReportScale;
    row.y = best->y;
    row.x = best->x;
    row.fixed_point_residual = best->ap.fixed_point_residual;
  }
  row.seconds_per_iteration = row.iterations > 0 ? outer_seconds / row.iterations : 0.0;
  row.total_seconds = since(t0);
  if (!best) return row;

  verify::DegreeConfig degree = config.auto_degree ? verify::DegreeConfig::for_buses(model.n) : config.degree;
  if (config.auto_degree) {
    degree.sigma0_degree = config.degree.sigma0_degree;
    degree.chaining = config.degree.chaining;
    degree.parallel = config.degree.parallel;
    degree.max_variables = config.degree.max_variables;
    degree.stop_early = config.degree.stop_early;
  }
  degree.solver.parallel = inner_parallel;
  if (config.feasibility_check) {
    verify::DegreeConfig feas = degree;
    feas.order = acopf::certificate_order(model, prob);
    const verify::FeasibilityReport r = verify::feasibility_check(prob, best->y, feas);
    row.feasibility = r.verdict;
    row.feasibility_seconds = r.seconds;
  }
  if (config.infeasibility_check) {
    const verify::InfeasibilityReport r = verify::infeasibility_check(prob, best->y, degree);
    row.infeasibility = r.verdict;
    row.infeasibility_seconds = r.seconds;
  }
  return row;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<ResultRow> rows(config.w.size());
  const acopf::PowerNetwork net = acopf::load_matpower(config.case_path);
  if (config.w.empty()) return rows;
  const acopf::AcopfModel model = acopf::make_model(net);
  const acopf::NominalBound nominal = acopf::nominal_sdp_bound(net);
  const bool nominal_ok =
      nominal.status == conic::SolveStatus::Optimal || nominal.status == conic::SolveStatus::AlmostOptimal;
  const int n = static_cast<int>(config.w.size());
  auto fill = [&](int i, bool inner_parallel) {
    rows[i] = run_row(model, config, config.w[i], inner_parallel);
    rows[i].nominal_lower = nominal.reported();
    if (!nominal_ok)
      rows[i].nominal_flag = nominal.status == conic::SolveStatus::PrimalInfeasible ? "LNF" : "NP";
  };
  if (config.parallel_rows) {
    // Exceptions may not leave an OpenMP region.
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        fill(i, false);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw ModelError(e);
  } else {
    for (int i = 0; i < n; ++i) fill(i, true);
  }
  return rows;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string percent(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", 100.0 * w);
  return buf;
}

std::vector<std::string> headers(bool timings) {
  std::vector<std::string> h = {"w", "Nom. lower bound", "Upper bound", "Num iter"};
  if (timings) {
    h.push_back("Time/iter (s)");
    h.push_back("Total time (s)");
  }
  h.push_back("Feas");
  if (timings) h.push_back("Feas time (s)");
  h.push_back("Infeas");
  if (timings) h.push_back("Infeas time (s)");
  return h;
}

std::vector<std::string> cells(const ResultRow& r, bool timings) {
  auto verdict = [](const std::optional<verify::Verdict>& v) {
    return v ? std::string(verify::verdict_flag(*v)) : std::string("-");
  };
  std::vector<std::string> c = {percent(r.w), r.nominal_flag.empty() ? fixed(r.nominal_lower, 2) : r.nominal_flag,
                                r.upper ? fixed(*r.upper, 2) : r.flag, std::to_string(r.iterations)};
  if (timings) {
    c.push_back(fixed(r.seconds_per_iteration, 1));
    c.push_back(fixed(r.total_seconds, 1));
  }
  c.push_back(verdict(r.feasibility));
  if (timings) c.push_back(r.feasibility ? fixed(r.feasibility_seconds, 1) : "-");
  c.push_back(verdict(r.infeasibility));
  if (timings) c.push_back(r.infeasibility ? fixed(r.infeasibility_seconds, 1) : "-");
  return c;
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows, bool timings) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
    out << "\n";
  };
  line(headers(timings));
  for (const auto& r : rows) line(cells(r, timings));
  return out.str();
}

std::string to_markdown(const std::vector<ResultRow>& rows, bool timings) {
  std::vector<std::vector<std::string>> table = {headers(timings)};
  for (const auto& r : rows) table.push_back(cells(r, timings));
  std::vector<std::size_t> width(table[0].size(), 3);
  for (const auto& row : table)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& v) {
    out << "|";
    for (std::size_t i = 0; i < v.size(); ++i) out << " " << v[i] << std::string(width[i] - v[i].size(), ' ') << " |";
    out << "\n";
  };
  line(table[0]);
  out << "|";
  for (std::size_t w : width) out << std::string(w + 2, '-') << "|";
  out << "\n";
  for (std::size_t r = 1; r < table.size(); ++r) line(table[r]);
  return out.str();
}

}  // namespace aropt::cli

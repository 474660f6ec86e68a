#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aropt/acopf/model.hpp"
#include "aropt/acopf/network.hpp"
#include "aropt/acopf/nominal.hpp"
#include "aropt/acopf/powerflow.hpp"
#include "aropt/algorithms/outer.hpp"
#include "aropt/algorithms/sampling.hpp"
#include "aropt/cli/experiment.hpp"
#include "aropt/error.hpp"
#include "aropt/verify/checks.hpp"

using namespace aropt;

namespace {

struct Common {
  std::string case_path, config_path, out_path, format = "md";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double w = 0.01;
  bool correlated = false;
};

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.out_path);
  if (!out) throw cli::ConfigError("cannot write " + c.out_path);
  out << text;
}

cli::ExperimentConfig config_of(const Common& c) {
  cli::ExperimentConfig cfg;
  if (!c.config_path.empty()) cfg = cli::load_config(c.config_path);
  if (!c.case_path.empty()) cfg.case_path = c.case_path;
  if (c.seed_set) cfg.seed = c.seed;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw cli::ConfigError("cannot write " + path);
  out << text;
}

int run(const Common& c) {
  const cli::ExperimentConfig cfg = config_of(c);
  const auto rows = cli::run_experiment(cfg);
  if (!cfg.csv_path.empty()) write_file(cfg.csv_path, cli::to_csv(rows, cfg.timings));
  if (!cfg.markdown_path.empty()) write_file(cfg.markdown_path, cli::to_markdown(rows, cfg.timings));
  emit(c, c.format == "csv" ? cli::to_csv(rows, cfg.timings) : cli::to_markdown(rows, cfg.timings));
  return 0;
}

int nominal_bound(const Common& c) {
  const auto net = acopf::load_matpower(config_of(c).case_path);
  const acopf::NominalBound b = acopf::nominal_sdp_bound(net);
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "case %s\nstatus %s\nlower bound %.4f\nrank ratio %.3e\niterations %d\nseconds %.1f\n",
                net.name.c_str(), conic::status_name(b.status), b.reported(), b.rank_ratio, b.iterations, b.seconds);
  out << buf;
  emit(c, out.str());
  return 0;
}

int power_flow(const Common& c) {
  const auto net = acopf::load_matpower(config_of(c).case_path);
  const acopf::AcopfModel m = acopf::make_model(net);
  const acopf::PowerFlowResult pf = acopf::newton_power_flow(m, acopf::case_dispatch(m), {});
  std::ostringstream out;
  out << "status " << acopf::power_flow_status_name(pf.status) << " iterations " << pf.iterations << " residual "
      << pf.residual << "\n";
  if (pf.converged()) {
    out << "bus,vm,va_deg,p_pu,q_pu\n";
    const Eigen::VectorXd p = m.active_injections(pf.x), q = m.reactive_injections(pf.x);
    for (int k = 0; k < m.n; ++k) {
      const double re = pf.x(k), im = pf.x(m.n + k);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%.6f,%.4f,%.6f,%.6f\n", net.buses[k].id, std::hypot(re, im),
                    std::atan2(im, re) * 180.0 / M_PI, p(k), q(k));
      out << buf;
    }
  }
  emit(c, out.str());
  return pf.converged() ? 0 : 3;
}

struct Robust {
  acopf::AcopfModel model;
  aro::AroProblem prob;
  const algorithms::OuterIterate* best = nullptr;
  algorithms::OuterHistory hist;
  cli::ExperimentConfig cfg;
};

Robust solve_robust(const Common& c) {
  Robust r;
  r.cfg = config_of(c);
  r.model = acopf::make_model(acopf::load_matpower(r.cfg.case_path));
  const acopf::WarmStart ws = acopf::squeeze_warm_start(r.model, r.cfg.squeeze);
  r.prob = acopf::build_aro(r.model, acopf::load_uncertainty(r.model, c.w, c.correlated || r.cfg.correlated));
  r.hist = algorithms::dynamic_outer(r.prob, ws.y, ws.x, r.cfg.outer);
  r.best = r.hist.best();
  return r;
}

verify::DegreeConfig degree_of(const Robust& r) {
  verify::DegreeConfig d = r.cfg.degree;
  if (r.cfg.auto_degree) d.degree = verify::DegreeConfig::for_buses(r.model.n).degree;
  return d;
}

int feas_check(const Common& c, int samples) {
  const Robust r = solve_robust(c);
  std::ostringstream out;
  if (!r.best) {
    out << "outer " << algorithms::outer_flag(r.hist.iterates.back().status) << ": no control to check\n";
    emit(c, out.str());
    return 0;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "upper bound %.4f\n", r.best->objective / acopf::kReportScale);
  out << buf;
  verify::DegreeConfig d = degree_of(r);
  d.order = acopf::certificate_order(r.model, r.prob);
  const verify::FeasibilityReport rep = verify::feasibility_check(r.prob, r.best->y, d);
  out << "constraint,t,certified,status,residual,min_eigen,chained,seconds\n";
  for (const auto& b : rep.bounds) {
    std::snprintf(buf, sizeof buf, "%s,%.6e,%d,%s,%.2e,%.2e,%d,%.1f\n", b.label.c_str(), b.t, b.certified ? 1 : 0,
                  conic::status_name(b.status), b.residual, b.min_eigen, b.chained, b.seconds);
    out << buf;
  }
  out << "verdict " << verify::verdict_flag(rep.verdict) << (rep.message.empty() ? "" : " (" + rep.message + ")")
      << "\n";
  if (samples > 0) {
    const auto s = algorithms::sample_robustness(r.prob, r.best->y, r.best->x, samples, r.cfg.seed);
    std::snprintf(buf, sizeof buf, "sampled %d, recovered %d, worst margin %.3e at %s\n", s.samples, s.recovered,
                  s.worst, s.worst_label.c_str());
    out << buf;
  }
  emit(c, out.str());
  return 0;
}

int infeas_check(const Common& c, bool global) {
  std::ostringstream out;
  const cli::ExperimentConfig cfg = config_of(c);
  verify::InfeasibilityReport rep;
  if (global) {
    const acopf::AcopfModel m = acopf::make_model(acopf::load_matpower(cfg.case_path));
    const aro::AroProblem prob = acopf::build_aro(m, acopf::load_uncertainty(m, c.w, c.correlated || cfg.correlated));
    verify::DegreeConfig d = cfg.degree;
    if (cfg.auto_degree) d.degree = verify::DegreeConfig::for_buses(m.n).degree;
    rep = verify::global_infeasibility_check(prob, d);
  } else {
    const Robust r = solve_robust(c);
    if (!r.best) {
      out << "outer " << algorithms::outer_flag(r.hist.iterates.back().status) << ": no control to check\n";
      emit(c, out.str());
      return 0;
    }
    rep = verify::infeasibility_check(r.prob, r.best->y, degree_of(r));
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "objective %.6e\nstatus %s\nresidual %.2e\nbounded %d\nseconds %.1f\n", rep.objective,
                conic::status_name(rep.status), rep.residual, rep.bounded ? 1 : 0, rep.seconds);
  out << buf << "verdict " << verify::verdict_flag(rep.verdict)
      << (rep.message.empty() ? "" : " (" + rep.message + ")") << "\n";
  emit(c, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adjustable robust ACOPF experiments"};
  app.require_subcommand(1);
  Common c;
  int samples = 0;
  bool global = false;
  auto common = [&](CLI::App* sub, bool needs_w) {
    sub->add_option("--case", c.case_path, "MATPOWER case file");
    sub->add_option("--config", c.config_path, "experiment config (JSON)");
    sub->add_option("--out", c.out_path, "output file, stdout when absent");
    sub->add_option("--seed", c.seed, "random seed")->each([&](const std::string&) { c.seed_set = true; });
    sub->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "md"}));
    if (needs_w) {
      sub->add_option("--w", c.w, "uncertainty as a fraction of load")->check(CLI::Range(1e-12, 1.0));
      sub->add_flag("--correlated", c.correlated, "correlated load uncertainty");
    }
  };
  auto* run_cmd = app.add_subcommand("run", "run an experiment table");
  common(run_cmd, false);
  auto* nominal_cmd = app.add_subcommand("nominal-bound", "nominal SDP lower bound");
  common(nominal_cmd, false);
  auto* feas_cmd = app.add_subcommand("feas-check", "outer loop and posterior feasibility check");
  common(feas_cmd, true);
  feas_cmd->add_option("--samples", samples, "uncertainty samples for a sampling audit");
  auto* infeas_cmd = app.add_subcommand("infeas-check", "outer loop and posterior infeasibility check");
  common(infeas_cmd, true);
  infeas_cmd->add_flag("--global", global, "check the problem instead of the computed control");
  auto* pf_cmd = app.add_subcommand("power-flow", "Newton power flow at the case dispatch");
  common(pf_cmd, false);
  CLI11_PARSE(app, argc, argv);
  try {
    if (run_cmd->parsed()) return run(c);
    if (nominal_cmd->parsed()) return nominal_bound(c);
    if (feas_cmd->parsed()) return feas_check(c, samples);
    if (infeas_cmd->parsed()) return infeas_check(c, global);
    if (pf_cmd->parsed()) return power_flow(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <string>
#include <vector>

namespace aropt::acopf {

enum class BusType { PQ = 1, PV = 2, Ref = 3 };

const char* bus_type_name(BusType type);

// Quantities are per unit on baseMVA except where noted.
struct Bus {
  int id = 0;  // external MATPOWER number
  BusType type = BusType::PQ;
  double pd = 0.0, qd = 0.0;
  double gs = 0.0, bs = 0.0;  // shunt admittance
  int area = 1;
  double vm = 1.0, va = 0.0;  // initial magnitude (pu) and angle (degrees)
  double base_kv = 0.0;
  int zone = 1;
  double vmax = 1.1, vmin = 0.9;
};

struct Generator {
  int bus = 0;  // internal bus index
  double pg = 0.0, qg = 0.0;
  double qmax = 0.0, qmin = 0.0;
  double vg = 1.0;
  double mbase = 100.0;
  double pmax = 0.0, pmin = 0.0;
  // Polynomial cost c2 P^2 + c1 P + c0 with P in MW (original currency units).
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;
  double startup = 0.0, shutdown = 0.0;
};

struct Branch {
  int from = 0, to = 0;  // internal bus indices
  double r = 0.0, x = 0.0, b = 0.0;
  double rate = 0.0;   // per unit, 0 means unlimited
  double ratio = 0.0;  // 0 means no transformer
  double angle = 0.0;  // degrees
};

struct PowerNetwork {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Branch> branches;
  int reference = -1;  // internal index of the reference bus

  int num_buses() const { return static_cast<int>(buses.size()); }
  int bus_index(int id) const;
  // Generator index at a bus, or -1.
  int generator_at(int bus) const;
  Eigen::VectorXd active_loads() const;

  // Throws ModelError unless there is one reference bus, every generator
  // sits on a PV or reference bus, each such bus has exactly one generator,
  // and PQ buses have none.
  void validate() const;
};

// Parses the MATPOWER case text format (baseMVA, bus, gen, branch, gencost).
// Out-of-service generators and branches are dropped.
PowerNetwork parse_matpower(const std::string& text);
PowerNetwork load_matpower(const std::string& path);
std::string write_matpower(const PowerNetwork& net);

using ComplexSparse = Eigen::SparseMatrix<std::complex<double>>;

struct BranchAdmittance {
  std::complex<double> yff, yft, ytf, ytt;
};

BranchAdmittance branch_admittance(const Branch& br);

// Bus admittance matrix with shunts, per unit.
ComplexSparse admittance_matrix(const PowerNetwork& net);

// Complex power injections S = V .* conj(Y V).
Eigen::VectorXcd power_injections(const PowerNetwork& net, const Eigen::VectorXcd& V);

}  // namespace aropt::acopf

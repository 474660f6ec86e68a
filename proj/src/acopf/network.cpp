#include "aropt/acopf/network.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <regex>
#include <sstream>

#include "aropt/error.hpp"

namespace aropt::acopf {

const char* bus_type_name(BusType type) {
  switch (type) {
    case BusType::PQ: return "PQ";
    case BusType::PV: return "PV";
    case BusType::Ref: return "ref";
  }
  return "?";
}

int PowerNetwork::bus_index(int id) const {
  for (int k = 0; k < num_buses(); ++k)
    if (buses[k].id == id) return k;
  return -1;
}

int PowerNetwork::generator_at(int bus) const {
  for (std::size_t g = 0; g < generators.size(); ++g)
    if (generators[g].bus == bus) return static_cast<int>(g);
  return -1;
}

Eigen::VectorXd PowerNetwork::active_loads() const {
  Eigen::VectorXd p(num_buses());
  for (int k = 0; k < num_buses(); ++k) p(k) = buses[k].pd;
  return p;
}

void PowerNetwork::validate() const {
  int refs = 0;
  for (const Bus& b : buses) refs += b.type == BusType::Ref;
  if (refs != 1) throw ModelError("network must have exactly one reference bus, found " + std::to_string(refs));
  std::vector<int> count(buses.size(), 0);
  for (const Generator& g : generators) {
    if (g.bus < 0 || g.bus >= num_buses()) throw ModelError("generator on unknown bus");
    ++count[g.bus];
  }
  for (int k = 0; k < num_buses(); ++k) {
    const Bus& b = buses[k];
    if (b.type == BusType::PQ && count[k] > 0)
      throw ModelError("generator at PQ bus " + std::to_string(b.id));
    if (b.type != BusType::PQ && count[k] != 1)
      throw ModelError("bus " + std::to_string(b.id) + " of type " + bus_type_name(b.type) + " needs exactly one generator");
  }
  for (const Branch& br : branches) {
    if (br.from < 0 || br.to < 0 || br.from >= num_buses() || br.to >= num_buses())
      throw ModelError("branch references an unknown bus");
    if (br.r == 0.0 && br.x == 0.0) throw ModelError("branch with zero impedance");
  }
}

namespace {

using Table = std::vector<std::vector<double>>;

std::string strip_comments(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto pct = line.find('%');
    out += line.substr(0, pct);
    out += '\n';
  }
  return out;
}

bool find_matrix(const std::string& text, const std::string& field, Table& rows) {
  const std::regex head("mpc\\." + field + "\\s*=\\s*\\[");
  std::smatch m;
  if (!std::regex_search(text, m, head)) return false;
  const std::size_t begin = m.position(0) + m.length(0);
  const std::size_t end = text.find(']', begin);
  if (end == std::string::npos) throw ParseError("unterminated matrix for " + field);
  std::string body = text.substr(begin, end - begin);
  for (char& ch : body)
    if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
  std::istringstream rs(body);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::istringstream ls(row);
    std::string line;
    while (std::getline(ls, line)) {
      std::istringstream vs(line);
      std::vector<double> vals;
      std::string tok;
      while (vs >> tok) {
        try {
          std::size_t used = 0;
          vals.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw ParseError("bad number '" + tok + "' in " + field);
        } catch (const std::logic_error&) {
          throw ParseError("bad number '" + tok + "' in " + field);
        }
      }
      if (!vals.empty()) rows.push_back(std::move(vals));
    }
  }
  return true;
}

Table require_matrix(const std::string& text, const std::string& field, std::size_t min_cols) {
  Table rows;
  if (!find_matrix(text, field, rows)) throw ParseError("missing section mpc." + field);
  for (const auto& r : rows)
    if (r.size() < min_cols)
      throw ParseError("mpc." + field + " row has " + std::to_string(r.size()) + " columns, need " + std::to_string(min_cols));
  return rows;
}

}  // namespace

PowerNetwork parse_matpower(const std::string& raw) {
  const std::string text = strip_comments(raw);
  PowerNetwork net;
  std::smatch m;
  if (std::regex_search(text, m, std::regex("function\\s+mpc\\s*=\\s*(\\w+)"))) net.name = m[1];
  if (!std::regex_search(text, m, std::regex("mpc\\.baseMVA\\s*=\\s*([-+0-9.eE]+)")))
    throw ParseError("missing section mpc.baseMVA");
  net.base_mva = std::stod(m[1]);
  if (!(net.base_mva > 0.0)) throw ParseError("baseMVA must be positive");
  const double base = net.base_mva;

  const Table bus = require_matrix(text, "bus", 13);
  const Table gen = require_matrix(text, "gen", 10);
  const Table branch = require_matrix(text, "branch", 11);
  const Table gencost = require_matrix(text, "gencost", 4);
  if (bus.empty()) throw ParseError("mpc.bus is empty");

  for (const auto& r : bus) {
    Bus b;
    b.id = static_cast<int>(r[0]);
    const int type = static_cast<int>(r[1]);
    if (type == 4) continue;  // isolated
    if (type < 1 || type > 3) throw ParseError("unknown bus type " + std::to_string(type));
    b.type = static_cast<BusType>(type);
    b.pd = r[2] / base;
    b.qd = r[3] / base;
    b.gs = r[4] / base;
    b.bs = r[5] / base;
    b.area = static_cast<int>(r[6]);
    b.vm = r[7];
    b.va = r[8];
    b.base_kv = r[9];
    b.zone = static_cast<int>(r[10]);
    b.vmax = r[11];
    b.vmin = r[12];
    net.buses.push_back(b);
  }
  for (int k = 0; k < net.num_buses(); ++k)
    if (net.buses[k].type == BusType::Ref) net.reference = k;

  if (gencost.size() < gen.size()) throw ParseError("mpc.gencost has fewer rows than mpc.gen");
  for (std::size_t g = 0; g < gen.size(); ++g) {
    const auto& r = gen[g];
    if (r[7] <= 0.0) continue;
    Generator G;
    G.bus = net.bus_index(static_cast<int>(r[0]));
    if (G.bus < 0) throw ParseError("generator on unknown bus " + std::to_string(static_cast<int>(r[0])));
    G.pg = r[1] / base;
    G.qg = r[2] / base;
    G.qmax = r[3] / base;
    G.qmin = r[4] / base;
    G.vg = r[5];
    G.mbase = r[6];
    G.pmax = r[8] / base;
    G.pmin = r[9] / base;
    const auto& c = gencost[g];
    if (static_cast<int>(c[0]) != 2) throw ParseError("unsupported gencost model " + std::to_string(static_cast<int>(c[0])));
    const int ncoef = static_cast<int>(c[3]);
    if (ncoef < 1 || ncoef > 3) throw ParseError("gencost polynomial degree above 2 is not supported");
    if (c.size() < static_cast<std::size_t>(4 + ncoef)) throw ParseError("gencost row too short");
    double coef[3] = {0.0, 0.0, 0.0};  // c0, c1, c2
    for (int i = 0; i < ncoef; ++i) coef[i] = c[4 + ncoef - 1 - i];
    G.c0 = coef[0];
    G.c1 = coef[1];
    G.c2 = coef[2];
    G.startup = c[1];
    G.shutdown = c[2];
    net.generators.push_back(G);
  }

  for (const auto& r : branch) {
    if (r[10] <= 0.0) continue;
    Branch br;
    br.from = net.bus_index(static_cast<int>(r[0]));
    br.to = net.bus_index(static_cast<int>(r[1]));
    if (br.from < 0 || br.to < 0) throw ParseError("branch references an unknown bus");
    br.r = r[2];
    br.x = r[3];
    br.b = r[4];
    br.rate = r[5] / base;
    br.ratio = r[8];
    br.angle = r[9];
    net.branches.push_back(br);
  }
  return net;
}

PowerNetwork load_matpower(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  PowerNetwork net = parse_matpower(ss.str());
  if (net.name.empty()) {
    const auto slash = path.find_last_of('/');
    std::string base = path.substr(slash == std::string::npos ? 0 : slash + 1);
    net.name = base.substr(0, base.find('.'));
  }
  return net;
}

std::string write_matpower(const PowerNetwork& net) {
  const double base = net.base_mva;
  std::ostringstream out;
  out << std::setprecision(17);
  out << "function mpc = " << (net.name.empty() ? "case" : net.name) << "\n";
  out << "mpc.version = '2';\n";
  out << "mpc.baseMVA = " << base << ";\n";
  out << "mpc.bus = [\n";
  for (const Bus& b : net.buses) {
    out << '\t' << b.id << '\t' << static_cast<int>(b.type) << '\t' << b.pd * base << '\t' << b.qd * base << '\t'
        << b.gs * base << '\t' << b.bs * base << '\t' << b.area << '\t' << b.vm << '\t' << b.va << '\t' << b.base_kv
        << '\t' << b.zone << '\t' << b.vmax << '\t' << b.vmin << ";\n";
  }
  out << "];\nmpc.gen = [\n";
  for (const Generator& g : net.generators) {
    out << '\t' << net.buses[g.bus].id << '\t' << g.pg * base << '\t' << g.qg * base << '\t' << g.qmax * base << '\t'
        << g.qmin * base << '\t' << g.vg << '\t' << g.mbase << "\t1\t" << g.pmax * base << '\t' << g.pmin * base
        << ";\n";
  }
  out << "];\nmpc.branch = [\n";
  for (const Branch& br : net.branches) {
    const double rate = br.rate * base;
    out << '\t' << net.buses[br.from].id << '\t' << net.buses[br.to].id << '\t' << br.r << '\t' << br.x << '\t' << br.b
        << '\t' << rate << '\t' << rate << '\t' << rate << '\t' << br.ratio << '\t' << br.angle << "\t1\t-360\t360;\n";
  }
  out << "];\nmpc.gencost = [\n";
  for (const Generator& g : net.generators)
    out << "\t2\t" << g.startup << '\t' << g.shutdown << "\t3\t" << g.c2 << '\t' << g.c1 << '\t' << g.c0 << ";\n";
  out << "];\n";
  return out.str();
}

BranchAdmittance branch_admittance(const Branch& br) {
  using C = std::complex<double>;
  const C ys = 1.0 / C(br.r, br.x);
  const double ratio = br.ratio == 0.0 ? 1.0 : br.ratio;
  const C tap = std::polar(ratio, br.angle * std::numbers::pi / 180.0);
  const C ytt = ys + C(0.0, br.b / 2.0);
  BranchAdmittance a;
  a.ytt = ytt;
  a.yff = ytt / std::norm(tap);
  a.yft = -ys / std::conj(tap);
  a.ytf = -ys / tap;
  return a;
}

ComplexSparse admittance_matrix(const PowerNetwork& net) {
  using C = std::complex<double>;
  const int n = net.num_buses();
  std::vector<Eigen::Triplet<C>> t;
  for (const Branch& br : net.branches) {
    const BranchAdmittance a = branch_admittance(br);
    t.emplace_back(br.from, br.from, a.yff);
    t.emplace_back(br.from, br.to, a.yft);
    t.emplace_back(br.to, br.from, a.ytf);
    t.emplace_back(br.to, br.to, a.ytt);
  }
  for (int k = 0; k < n; ++k)
    if (net.buses[k].gs != 0.0 || net.buses[k].bs != 0.0) t.emplace_back(k, k, C(net.buses[k].gs, net.buses[k].bs));
  ComplexSparse Y(n, n);
  Y.setFromTriplets(t.begin(), t.end());
  return Y;
}

Eigen::VectorXcd power_injections(const PowerNetwork& net, const Eigen::VectorXcd& V) {
  require_dim(V.size() == net.num_buses(), "voltage vector size must equal the bus count");
  const Eigen::VectorXcd I = admittance_matrix(net) * V;
  return V.cwiseProduct(I.conjugate());
}

}  // namespace aropt::acopf

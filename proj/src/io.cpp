#include "phasefilter/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace phasefilter {

namespace {

struct Spec {
  std::string head;
  std::map<std::string, std::string> kv;
};

// "head:k=v,k=v"; with nested=true the first key swallows the rest of the string
Spec split_spec(const std::string& s, bool nested = false) {
  Spec out;
  const auto colon = s.find(':');
  out.head = s.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::string rest = s.substr(colon + 1);
  while (!rest.empty()) {
    const auto eq = rest.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("malformed spec '" + s + "'");
    const std::string key = rest.substr(0, eq);
    if (nested) {
      out.kv[key] = rest.substr(eq + 1);
      break;
    }
    const auto comma = rest.find(',', eq);
    out.kv[key] = rest.substr(eq + 1, comma == std::string::npos ? std::string::npos : comma - eq - 1);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
  }
  return out;
}

double to_number(const std::string& v, const std::string& what) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ParseError("'" + v + "' is not a number (" + what + ")");
  return x;
}

class Args {
 public:
  Args(Spec s, std::string full) : s_(std::move(s)), full_(std::move(full)) {}
  double number(const std::string& k) {
    used_.push_back(k);
    const auto it = s_.kv.find(k);
    if (it == s_.kv.end()) throw ParseError("'" + full_ + "' is missing " + k + "=");
    return to_number(it->second, full_);
  }
  double number(const std::string& k, double fallback) {
    return s_.kv.count(k) ? number(k) : (used_.push_back(k), fallback);
  }
  int integer(const std::string& k) {
    const double x = number(k);
    if (x != std::floor(x)) throw ParseError("'" + full_ + "': " + k + " must be an integer");
    return static_cast<int>(x);
  }
  std::string text(const std::string& k) {
    used_.push_back(k);
    const auto it = s_.kv.find(k);
    if (it == s_.kv.end()) throw ParseError("'" + full_ + "' is missing " + k + "=");
    return it->second;
  }
  void done() const {
    for (const auto& [k, v] : s_.kv)
      if (std::find(used_.begin(), used_.end(), k) == used_.end())
        throw ParseError("'" + full_ + "': unknown key " + k);
  }

 private:
  Spec s_;
  std::string full_;
  std::vector<std::string> used_;
};

}  // namespace

StateSpec parse_state(const std::string& spec) {
  Args a(split_spec(spec), spec);
  const std::string head = split_spec(spec).head;
  StateSpec s;
  if (head == "vacuum") {
    s = state::Vacuum{};
  } else if (head == "coherent") {
    s = state::Coherent{cplx(a.number("re", 0.0), a.number("im", 0.0))};
  } else if (head == "fock") {
    s = state::Fock{a.integer("n")};
  } else if (head == "thermal") {
    s = state::Thermal{a.number("nbar")};
  } else if (head == "squeezed") {
    s = state::Squeezed{a.number("r"), a.number("phase", 0.0)};
  } else if (head == "cat") {
    s = state::Cat{cplx(a.number("re", 0.0), a.number("im", 0.0)), a.integer("parity")};
  } else if (head == "numeric") {
    const std::string path = a.text("file");
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    s = state::Numeric{fock_from_json(json::parse(in))};
  } else {
    throw ParseError("unknown state '" + spec + "'");
  }
  a.done();
  validate(s);
  return s;
}

Filter parse_filter(const std::string& spec) {
  const std::string head = split_spec(spec).head;
  if (head == "kernel") return Filter::kernel(parse_state(Args(split_spec(spec, true), spec).text("state")));
  Args a(split_spec(spec), spec);
  Filter f = [&] {
    if (head == "gaussian") return Filter::gaussian(a.number("r"));
    if (head == "noncl") return Filter::nonclassicality(a.number("L"), a.number("q"));
    if (head == "klauder") return Filter::klauder(a.number("L"));
    if (head == "narcowich-ce") return Filter::narcowich_counterexample();
    throw ParseError("unknown filter '" + spec + "'");
  }();
  a.done();
  return f;
}

FilterFamily parse_family(const std::string& spec) {
  const std::string head = split_spec(spec).head;
  Args a(split_spec(spec), spec);
  FilterFamily f;
  if (head == "noncl") {
    const double q = a.number("q");
    Filter::nonclassicality(1.0, q);  // validates q
    f = nonclassicality_family(q);
  } else if (head == "gaussian") {
    f = gaussian_family();
  } else {
    throw ParseError("unknown filter family '" + spec + "'");
  }
  a.done();
  return f;
}

PovmSpec parse_povm(const std::string& spec) {
  Args a(split_spec(spec), spec);
  if (split_spec(spec).head != "fock") throw ParseError("unknown POVM '" + spec + "'");
  const int n = a.integer("nmax");
  a.done();
  if (n < 0) throw DomainError("POVM: nmax must be nonnegative");
  return FockProjectors{n};
}

ChannelSpec parse_channel(const std::string& spec) {
  Args a(split_spec(spec), spec);
  if (split_spec(spec).head != "loss") throw ParseError("unknown channel '" + spec + "'");
  const double eta = a.number("eta");
  a.done();
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("loss channel: eta must lie in (0, 1]");
  return channel::Loss{eta};
}

json fock_to_json(const FockMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return {{"dim", m.rows()}, {"entries", std::move(rows)}};
}

FockMatrix fock_from_json(const json& j) {
  const json& rows = j.contains("entries") ? j.at("entries") : j;
  if (!rows.is_array() || rows.empty()) throw ParseError("Fock matrix JSON: expected an array of rows");
  const int n = static_cast<int>(rows.size());
  FockMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
      throw ParseError("Fock matrix JSON: matrix must be square");
    for (int c = 0; c < n; ++c) {
      const json& e = rows[r][c];
      m(r, c) = e.is_array() ? cplx(e.at(0).get<double>(), e.at(1).get<double>()) : cplx(e.get<double>(), 0.0);
    }
  }
  return m;
}

namespace {

json points_json(const std::vector<PhasePoint>& pts) {
  json a = json::array();
  for (const PhasePoint& p : pts) a.push_back({p.re, p.im});
  return a;
}

std::string origin_name(PointSetOrigin o) {
  switch (o) {
    case PointSetOrigin::random_gaussian: return "random-gaussian";
    case PointSetOrigin::lattice: return "lattice";
    case PointSetOrigin::klauder_set: return "klauder-set";
    default: return "explicit";
  }
}

json witness_json(const Witness& w) {
  return {{"points", points_json(w.points.points)},
          {"origin", origin_name(w.points.origin)},
          {"parameter", w.points.parameter},
          {"eta", w.eta_nw},
          {"min_eigenvalue", w.min_eigenvalue}};
}

json sweep_json(const SweepResult& s) {
  json j = {{"eta", s.eta_nw}, {"passed", s.passed}, {"sets_tested", s.sets_tested},
            {"worst_eigenvalue", s.worst_eigenvalue}};
  if (s.witness) j["witness"] = witness_json(*s.witness);
  return j;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const PhysicalityReport& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"sets_tested", r.sets_tested},
            {"tolerance", r.tolerance},      {"seed", r.seed},
            {"note", r.note}};
  j["witness"] = r.witness ? witness_json(*r.witness) : json(nullptr);
  j["fourier_witness"] = r.fourier_witness
                             ? json{{"alpha", {r.fourier_witness->alpha.re, r.fourier_witness->alpha.im}},
                                    {"value", r.fourier_witness->value}}
                             : json(nullptr);
  if (r.eta4) j["eta4"] = sweep_json(*r.eta4);
  if (r.eta2) j["eta2"] = sweep_json(*r.eta2);
  return j;
}

json to_json(const FilteredState& s) {
  json j = {{"input", describe(s.input)}, {"filter", s.filter},
            {"route", to_string(s.route)}, {"route_error", s.route_error},
            {"input_leakage", s.input_leakage}};
  if (s.route == FilterRoute::mc_displacement) {
    j["n_samples"] = s.n_samples;
    j["seed"] = s.seed;
    json e = json::array();
    for (int r = 0; r < s.entry_stderr.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < s.entry_stderr.cols(); ++c) row.push_back(s.entry_stderr(r, c));
      e.push_back(std::move(row));
    }
    j["entry_stderr"] = std::move(e);
  }
  j["fock"] = fock_to_json(s.fock);
  return j;
}

json to_json(const FidelityCertificate& c) {
  json j = {{"f_e", c.f_e},
            {"error", c.error_estimate},
            {"bound", c.trace_distance_bound},
            {"method", c.method == FidelityMethod::quadrature ? "quadrature" : "mc"}};
  j["seed"] = c.method == FidelityMethod::mc ? json(c.seed) : json(nullptr);
  if (c.method == FidelityMethod::mc) j["n_samples"] = c.n_samples;
  j["L"] = opt(c.width_used);
  j["epsilon"] = opt(c.epsilon_target);
  return j;
}

json to_json(const BoundReport& r) {
  const bool f_ok = r.fidelity_slack >= -r.tolerance;
  const bool d_ok = r.distance_slack >= -r.tolerance;
  return {{"f_e", r.f_e},
          {"fidelity", r.fidelity},
          {"trace_distance", r.trace_distance},
          {"bound", r.bound},
          {"fidelity_slack", r.fidelity_slack},
          {"distance_slack", r.distance_slack},
          {"tolerance", r.tolerance},
          {"leakage", r.leakage},
          {"fidelity_bound_holds", f_ok},
          {"distance_bound_holds", d_ok},
          {"verdict", f_ok && d_ok ? "bound-chain-holds" : "bound-chain-violated"}};
}

json to_json(const WidthSolution& w) {
  return {{"L", w.width}, {"evaluations", w.evaluations}, {"certificate", to_json(w.certificate)}};
}

json to_json(const EstimationResult& e) {
  return {{"probabilities", e.probabilities},
          {"stderr", e.standard_errors},
          {"n_samples", e.n_samples},
          {"seed", e.seed},
          {"bound", e.bound},
          {"deficit", e.deficit},
          {"acceptance", e.acceptance}};
}

json to_json(const ChannelOutput& c) {
  return {{"trace", c.trace}, {"min_eigenvalue", c.min_eigenvalue}, {"rho", fock_to_json(c.rho)}};
}

json grid_to_json(const PQDGrid& g) {
  json rows = json::array();
  for (int iy = 0; iy < g.n_points; ++iy) {
    json row = json::array();
    for (int ix = 0; ix < g.n_points; ++ix) row.push_back(g.values(iy, ix));
    rows.push_back(std::move(row));
  }
  return {{"s", g.s},
          {"half_extent", g.half_extent},
          {"n_points", g.n_points},
          {"spacing", g.spacing()},
          {"normalization_residual", g.normalization_residual()},
          {"quadrature_error", g.quadrature_error},
          {"cutoff", g.cutoff},
          {"min_value", g.min_value()},
          {"values", std::move(rows)}};
}

void write_grid_csv(std::ostream& os, const PQDGrid& g, const std::map<std::string, std::string>& header) {
  char buf[96];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& [k, v] : header) os << "# " << k << ": " << v << "\n";
  os << "# s: " << num(g.s) << "\n"
     << "# half_extent: " << num(g.half_extent) << "\n"
     << "# n_points: " << g.n_points << "\n"
     << "# spacing: " << num(g.spacing()) << "\n"
     << "# normalization_residual: " << num(g.normalization_residual()) << "\n"
     << "# quadrature_error: " << num(g.quadrature_error) << "\n"
     << "re,im,value\n";
  for (int iy = 0; iy < g.n_points; ++iy)
    for (int ix = 0; ix < g.n_points; ++ix)
      os << num(g.coord(ix)) << ',' << num(g.coord(iy)) << ',' << num(g.values(iy, ix)) << '\n';
}

}  // namespace phasefilter

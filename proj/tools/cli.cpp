#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "phasefilter/io.hpp"
#include "phasefilter/parallel.hpp"

namespace phasefilter {

namespace {

struct RunConfig {
  std::string command;
  std::string state = "vacuum";
  std::string filter;
  std::string family;
  std::string povm = "fock:nmax=5";
  std::string channel = "loss:eta=0.8";
  std::string route = "quadrature";
  double grid_extent = 6.0;
  int grid_points = 257;
  int dim = 40;
  std::optional<std::uint64_t> seed;
  long samples = 0;
  int sets = 200;
  double epsilon = 0.01;
  int threads = 0;
  std::string out;
  std::string format;  // csv for regularize, json otherwise
  bool seed_generated = false;

  json to_json() const {
    json j = {{"command", command}};
    auto put = [&](const char* k, const json& v) { j[k] = v; };
    if (command != "certify") put("state", state);
    if (!filter.empty()) put("filter", filter);
    if (!family.empty()) put("family", family);
    if (command == "heterodyne-est") put("povm", povm);
    if (command == "channel-out") put("channel", channel);
    if (command == "apply") put("route", route);
    if (command == "regularize" || command == "channel-out") {
      put("grid_extent", grid_extent);
      put("grid_points", grid_points);
    }
    if (command == "bounds" || command == "channel-out" || command == "apply") put("dim", dim);
    if (command == "certify") put("sets", sets);
    if (command == "solve-width") put("epsilon", epsilon);
    if (seed) {
      put("seed", *seed);
      put("seed_generated", seed_generated);
    }
    if (samples > 0) put("samples", samples);
    put("threads", threads);
    put("format", format);
    return j;
  }
};

std::uint64_t ensure_seed(RunConfig& c) {
  if (!c.seed) {
    c.seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
    c.seed_generated = true;
  }
  return *c.seed;
}

json envelope(const RunConfig& c, const json& tolerances, json result) {
  return {{"tool", {{"name", "phasefilter"}, {"version", version}}},
          {"config", c.to_json()},
          {"tolerances", tolerances},
          {"result", std::move(result)}};
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ValidationError("cannot write " + c.out);
  f << text;
}

void emit_json(const RunConfig& c, std::ostream& out, const json& j) {
  if (c.format != "json") throw ValidationError(c.command + " writes JSON only");
  emit(c, out, j.dump(2) + "\n");
}

int cmd_certify(RunConfig& c, std::ostream& out) {
  const Filter f = parse_filter(c.filter);
  if (!c.seed) c.seed = 1;
  const PhysicalityReport r = classify_filter(f, *c.seed, c.sets);
  emit_json(c, out,
            envelope(c, {{"psd", "1e-9 * dim"}, {"fourier_negativity", "1e-10 * max"}}, to_json(r)));
  switch (r.verdict) {
    case Verdict::cptp_evidence: return 0;
    case Verdict::not_cp: return 2;
    case Verdict::positive_not_cp_candidate: return 3;
    default: return exit_inconclusive;
  }
}

int cmd_regularize(RunConfig& c, std::ostream& out) {
  const StateSpec s = parse_state(c.state);
  const Filter f = parse_filter(c.filter);
  if (c.grid_points < 2) throw DomainError("--grid-points must be at least 2");
  if (!(c.grid_extent > 0.0)) throw DomainError("--grid-extent must be positive");
  const PQDGrid g = regularized_p_grid(s, f, c.grid_extent, c.grid_points);
  const json tol = {{"tail", 1e-12}, {"node_agreement", 1e-10}};
  if (c.format == "json") {
    emit(c, out, envelope(c, tol, grid_to_json(g)).dump(2) + "\n");
  } else {
    std::ostringstream os;
    write_grid_csv(os, g,
                   {{"tool", std::string("phasefilter ") + version},
                    {"config", c.to_json().dump()},
                    {"tolerances", tol.dump()}});
    emit(c, out, os.str());
  }
  return 0;
}

int cmd_bounds(RunConfig& c, std::ostream& out) {
  const StateSpec s = parse_state(c.state);
  const Filter f = parse_filter(c.filter);
  const BoundReport r = trace_distance_bound_check(s, f, c.dim);
  emit_json(c, out, envelope(c, {{"bound", r.tolerance}, {"f_e_quadrature", 1e-11}}, to_json(r)));
  return 0;
}

int cmd_solve_width(RunConfig& c, std::ostream& out) {
  const StateSpec s = parse_state(c.state);
  const FilterFamily fam = parse_family(c.family);
  const WidthSearchOptions opt;
  const WidthSolution w = solve_width(s, fam, c.epsilon, opt);
  json r = to_json(w);
  r["family"] = fam.name;
  emit_json(c, out,
            envelope(c, {{"f_e_quadrature", 1e-11}, {"bisections", opt.bisections}, {"cap", opt.cap}}, r));
  return 0;
}

int cmd_channel_out(RunConfig& c, std::ostream& out) {
  const StateSpec s = parse_state(c.state);
  const Filter f = parse_filter(c.filter);
  const ChannelSpec ch = parse_channel(c.channel);
  const ChannelOutput o = channel_output_estimate(ch, s, f, {c.grid_extent, c.grid_points}, c.dim);
  json r = to_json(o);
  r["distance_bound"] = channel_output_distance_bound(s, f);
  const ReconstructOptions ro;
  emit_json(c, out, envelope(c, {{"grid_normalization", ro.norm_tol}, {"leakage", ro.leakage_tol}}, r));
  return 0;
}

int cmd_heterodyne(RunConfig& c, std::ostream& out) {
  const StateSpec s = parse_state(c.state);
  const Filter f = parse_filter(c.filter);
  const PovmSpec p = parse_povm(c.povm);
  if (c.samples <= 0) c.samples = 1000000;
  const EstimationResult e = heterodyne_estimate(s, f, p, c.samples, ensure_seed(c));
  emit_json(c, out, envelope(c, {{"envelope_headroom", 1.1}, {"chunks", 64}}, to_json(e)));
  return 0;
}

int cmd_apply(RunConfig& c, std::ostream& out) {
  const StateSpec s = parse_state(c.state);
  const Filter f = parse_filter(c.filter);
  FilterParams p;
  FilterRoute route = FilterRoute::charfn_quadrature;
  if (c.route == "mc") {
    route = FilterRoute::mc_displacement;
    if (c.samples > 0) p.n_samples = c.samples;
    c.samples = p.n_samples;
    p.seed = ensure_seed(c);
  } else if (c.route != "quadrature") {
    throw ValidationError("--route must be quadrature or mc");
  }
  const FilteredState fs = apply_filter_fock(s, f, c.dim, route, p);
  emit_json(c, out, envelope(c, {{"refinement", p.tol}, {"rank", p.rank_tol}}, to_json(fs)));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"phase-space filtering of quantum states"};
  app.require_subcommand(1);
  RunConfig c;
  c.threads = default_threads();

  auto common = [&](CLI::App* sub) {
    sub->add_option("--threads", c.threads, "worker cap (default: PHASEFILTER_THREADS or all cores)");
    sub->add_option("--out", c.out, "output file (default: stdout)");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto with_state = [&](CLI::App* sub) { sub->add_option("--state", c.state, "input state spec"); };
  auto with_filter = [&](CLI::App* sub) { sub->add_option("--filter", c.filter, "filter spec")->required(); };
  auto with_grid = [&](CLI::App* sub) {
    sub->add_option("--grid-extent", c.grid_extent, "grid half extent");
    sub->add_option("--grid-points", c.grid_points, "grid points per axis");
  };
  auto with_dim = [&](CLI::App* sub) { sub->add_option("--dim", c.dim, "Fock truncation")->check(CLI::PositiveNumber); };
  auto with_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--samples", c.samples, "Monte-Carlo samples");
  };

  CLI::App* certify = app.add_subcommand("certify", "Bochner / Narcowich-Wigner physicality verdict");
  with_filter(certify);
  certify->add_option("--sets", c.sets, "point sets per sweep")->check(CLI::PositiveNumber);
  certify->add_option("--seed", c.seed, "point-set seed");
  common(certify);

  CLI::App* reg = app.add_subcommand("regularize", "regularized P function on a grid");
  with_state(reg);
  with_filter(reg);
  with_grid(reg);
  common(reg);

  CLI::App* bounds = app.add_subcommand("bounds", "entanglement fidelity and the fidelity / distance bounds");
  with_state(bounds);
  with_filter(bounds);
  with_dim(bounds);
  common(bounds);

  CLI::App* sw = app.add_subcommand("solve-width", "smallest filter width reaching F_e >= 1 - epsilon");
  with_state(sw);
  sw->add_option("--family", c.family, "filter family spec")->required();
  sw->add_option("--epsilon", c.epsilon, "target 1 - F_e");
  common(sw);

  CLI::App* chan = app.add_subcommand("channel-out", "channel output from coherent-state responses");
  with_state(chan);
  with_filter(chan);
  chan->add_option("--channel", c.channel, "channel spec");
  with_grid(chan);
  with_dim(chan);
  common(chan);

  CLI::App* het = app.add_subcommand("heterodyne-est", "photon-number probabilities from heterodyne samples");
  with_state(het);
  with_filter(het);
  het->add_option("--povm", c.povm, "POVM spec");
  with_seed(het);
  common(het);

  CLI::App* apply = app.add_subcommand("apply", "filtered density matrix in the Fock basis");
  with_state(apply);
  with_filter(apply);
  with_dim(apply);
  apply->add_option("--route", c.route, "quadrature or mc");
  with_seed(apply);
  common(apply);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : exit_precondition;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.format.empty()) c.format = c.command == "regularize" ? "csv" : "json";
  if (c.command != "regularize" && c.format == "csv") {
    err << "precondition error: " << c.command << " writes JSON only\n";
    return exit_precondition;
  }
  if (c.threads < 1) {
    err << "precondition error: --threads must be at least 1\n";
    return exit_precondition;
  }
  set_thread_cap(c.threads);

  try {
    if (c.command == "certify") return cmd_certify(c, out);
    if (c.command == "regularize") return cmd_regularize(c, out);
    if (c.command == "bounds") return cmd_bounds(c, out);
    if (c.command == "solve-width") return cmd_solve_width(c, out);
    if (c.command == "channel-out") return cmd_channel_out(c, out);
    if (c.command == "heterodyne-est") return cmd_heterodyne(c, out);
    return cmd_apply(c, out);
  } catch (const DomainError& e) {
    err << "precondition error: " << e.what() << "\n";
    return exit_precondition;
  } catch (const ValidationError& e) {
    err << "precondition error: " << e.what() << "\n";
    return exit_precondition;
  } catch (const PhysicalityError& e) {
    err << "precondition error: " << e.what() << "\n";
    return exit_precondition;
  } catch (const UnphysicalFilterError& e) {
    err << "precondition error: " << e.what() << "\n";
    return exit_precondition;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace phasefilter

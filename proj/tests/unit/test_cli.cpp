#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "phasefilter/io.hpp"

using namespace phasefilter;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("state specs round-trip through describe") {
  for (const std::string s : {"vacuum", "coherent:re=0.5,im=-1.25", "fock:n=3", "thermal:nbar=0.5",
                              "squeezed:r=0.3,phase=1.5", "cat:re=1,im=0.5,parity=-1"}) {
    CHECK(describe(parse_state(s)) == s);
  }
  CHECK(std::holds_alternative<state::Coherent>(parse_state("coherent:re=1")));
}

TEST_CASE("filter, family, POVM and channel specs") {
  CHECK(parse_filter("gaussian:r=0.5").describe() == "gaussian:r=0.5");
  CHECK(parse_filter("noncl:L=1.5,q=4").describe() == "noncl:L=1.5,q=4");
  CHECK(parse_filter("klauder:L=2").describe() == "klauder:L=2");
  CHECK(parse_filter("narcowich-ce").describe() == "narcowich-ce");
  CHECK(parse_filter("kernel:state=squeezed:r=0.3,phase=0").describe() == "kernel:state=squeezed:r=0.3,phase=0");
  CHECK(parse_family("noncl:q=4").name == "noncl:q=4");
  CHECK(*parse_family("gaussian").make(2.0).width() == doctest::Approx(2.0));
  CHECK(std::get<FockProjectors>(parse_povm("fock:nmax=5")).n_max == 5);
  CHECK(std::get<channel::Loss>(parse_channel("loss:eta=0.8")).eta == 0.8);
}

TEST_CASE("malformed specs") {
  CHECK_THROWS_AS(parse_state("coherant:re=1"), ParseError);
  CHECK_THROWS_AS(parse_state("fock:n=1.5"), ParseError);
  CHECK_THROWS_AS(parse_state("fock:m=1"), ParseError);
  CHECK_THROWS_AS(parse_state("thermal:nbar=abc"), ParseError);
  CHECK_THROWS_AS(parse_state("thermal:nbar=-1"), ValidationError);
  CHECK_THROWS_AS(parse_filter("gaussian:r=0"), ValidationError);
  CHECK_THROWS_AS(parse_filter("gaussian:r=1,q=2"), ParseError);
  CHECK_THROWS_AS(parse_filter("noncl:L=1"), ParseError);
  CHECK_THROWS_AS(parse_family("klauder"), ParseError);
  CHECK_THROWS_AS(parse_channel("loss:eta=1.5"), DomainError);
}

TEST_CASE("Fock matrix JSON and numeric states") {
  const FockMatrix m = to_fock(state::Cat{cplx(0.8, 0.1), 1}, 12);
  const FockMatrix back = fock_from_json(json::parse(fock_to_json(m).dump()));
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
  const std::string path = "test_cli_numeric.json";
  {
    std::ofstream f(path);
    f << fock_to_json(m).dump();
  }
  const StateSpec s = parse_state("numeric:file=" + path);
  CHECK((std::get<state::Numeric>(s).rho - m).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_state("numeric:file=/nonexistent.json"), ParseError);
}

TEST_CASE("grid CSV layout: imaginary axis outer") {
  PQDGrid g;
  g.s = -1;
  g.half_extent = 1;
  g.n_points = 3;
  g.values = Eigen::MatrixXd::Zero(3, 3);
  g.values(0, 1) = 7;  // (re, im) = (0, -1)
  std::ostringstream os;
  write_grid_csv(os, g, {{"note", "x"}});
  std::istringstream is(os.str());
  std::string line;
  std::vector<std::string> rows;
  int comments = 0;
  while (std::getline(is, line)) {
    if (line[0] == '#') ++comments;
    else rows.push_back(line);
  }
  CHECK(comments >= 5);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "re,im,value");
  CHECK(rows[1] == "-1,-1,0");
  CHECK(rows[2] == "0,-1,7");
  CHECK(rows[4] == "-1,0,0");
}

TEST_CASE("certify exit codes") {
  CHECK(run({"certify", "--filter", "gaussian:r=1"}).code == 0);
  const Run k = run({"certify", "--filter", "klauder:L=1"});
  CHECK(k.code == 2);
  const json j = json::parse(k.out);
  CHECK(j["result"]["verdict"] == "not-cp");
  CHECK(j["result"]["witness"]["points"].size() == 3);
  CHECK(j["tool"]["version"] == version);
  CHECK(run({"certify", "--filter", "narcowich-ce"}).code == 3);
}

TEST_CASE("precondition errors") {
  const Run r = run({"regularize", "--state", "coherent:re=1,im=0", "--filter", "gaussian:r=0"});
  CHECK(r.code == exit_precondition);
  CHECK(r.err.find("precondition error") != std::string::npos);
  CHECK(run({"bounds", "--state", "vacuum", "--filter", "klauder:L=1"}).code == exit_precondition);
  CHECK(run({"bounds", "--state", "vacuum", "--filter", "gaussian:r=1", "--format", "csv"}).code == exit_precondition);
  CHECK(run({"frobnicate"}).code == exit_precondition);
  CHECK(run({"regularize", "--state", "squeezed:r=0.5", "--filter", "gaussian:r=0.5"}).code == exit_numerical);
}

TEST_CASE("regularize writes the grid with its configuration") {
  const Run r = run({"regularize", "--state", "coherent:re=0,im=0", "--filter", "gaussian:r=1", "--grid-extent",
                     "3", "--grid-points", "7"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# config: ") != std::string::npos);
  CHECK(r.out.find("# tolerances: ") != std::string::npos);
  CHECK(r.out.find("# tool: phasefilter") != std::string::npos);
  // centre value of the thermal nbar = 1/2 P function
  CHECK(r.out.find("\n0,0,0.636619772367") != std::string::npos);
  const Run j = run({"regularize", "--state", "vacuum", "--filter", "gaussian:r=1", "--grid-points", "9",
                     "--format", "json"});
  CHECK(json::parse(j.out)["result"]["values"].size() == 9);
}

TEST_CASE("JSON commands") {
  const Run b = run({"bounds", "--state", "thermal:nbar=0.5", "--filter", "gaussian:r=1", "--dim", "40"});
  REQUIRE(b.code == 0);
  const json jb = json::parse(b.out);
  CHECK(jb["result"]["verdict"] == "bound-chain-holds");
  CHECK(jb["result"]["f_e"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(jb["config"]["dim"] == 40);

  const Run w = run({"solve-width", "--state", "vacuum", "--family", "gaussian", "--epsilon", "0.1"});
  REQUIRE(w.code == 0);
  CHECK(json::parse(w.out)["result"]["L"].get<double>() == doctest::Approx(4.5).epsilon(1e-8));

  const Run c = run({"channel-out", "--state", "thermal:nbar=0.3", "--filter", "gaussian:r=0.5", "--channel",
                     "loss:eta=0.9", "--dim", "20", "--grid-points", "129"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out)["result"]["rho"]["dim"] == 20);

  const Run a = run({"apply", "--state", "vacuum", "--filter", "gaussian:r=1", "--dim", "5", "--route", "mc",
                     "--samples", "2000", "--seed", "3"});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["result"]["route"] == "mc-displacement");
}

TEST_CASE("stochastic commands are reproducible and record their seed") {
  const std::vector<std::string> args = {"heterodyne-est", "--state", "coherent:re=1,im=0", "--filter",
                                         "gaussian:r=0.5", "--povm",  "fock:nmax=3",        "--samples",
                                         "20000",          "--seed",  "7"};
  const Run a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["config"]["seed"] == 7);
  CHECK(j["result"]["probabilities"].size() == 4);
  const Run g = run({"heterodyne-est", "--state", "vacuum", "--filter", "gaussian:r=1", "--povm", "fock:nmax=1",
                     "--samples", "1000"});
  REQUIRE(g.code == 0);
  CHECK(json::parse(g.out)["config"]["seed_generated"] == true);
}

TEST_CASE("output file") {
  const std::string path = "test_cli_out.json";
  REQUIRE(run({"bounds", "--state", "vacuum", "--filter", "gaussian:r=1", "--dim", "30", "--out", path}).code == 0);
  std::ifstream f(path);
  CHECK(json::parse(f)["result"]["f_e"].get<double>() == doctest::Approx(2.0 / 3.0));
  std::remove(path.c_str());
}

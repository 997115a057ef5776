#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "threebody/config.hpp"
#include "threebody/errors.hpp"
#include "threebody/io.hpp"

using namespace threebody;

TEST_SUITE("io_config") {

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(json_number(INFINITY) == "inf");
  CHECK(json_number(2.5) == 2.5);
}

TEST_CASE("csv table") {
  CsvTable t({"n", "E_over_J"});
  t.add_row(std::vector<double>{1, -11.5});
  t.add_row(std::vector<std::string>{"2", "x"});
  CHECK(t.str() == "n,E_over_J\n1,-11.5\n2,x\n");
  CHECK_THROWS(t.add_row(std::vector<double>{1}));
}

TEST_CASE("atomic writes and staged output") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "threebody_io_test";
  fs::remove_all(dir);
  OutputSet out(dir / "nested");
  out.add("a.txt", std::string("hello\n"));
  CHECK_FALSE(fs::exists(dir / "nested" / "a.txt"));
  out.commit(json{{"k", 1}});
  std::ifstream in(dir / "nested" / "a.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "hello\n");
  CHECK(fs::exists(dir / "nested" / "manifest.json"));
  for (const auto& e : fs::directory_iterator(dir / "nested"))
    CHECK(e.path().string().find(".tmp.") == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("grid syntax") {
  CHECK(parse_grid("1, 2,3") == std::vector<double>{1, 2, 3});
  const auto lin = parse_grid("lin:0:10:11");
  CHECK(lin.size() == 11);
  CHECK(lin[3] == doctest::Approx(3.0));
  const auto lg = parse_grid("log:1:100:3");
  CHECK(lg[1] == doctest::Approx(10.0));
  CHECK(lg[2] == 100.0);
  CHECK_THROWS_AS(parse_grid(""), ParameterError);
  CHECK_THROWS_AS(parse_grid("log:0:1:3"), ParameterError);
  CHECK_THROWS_AS(parse_grid("lin:0:1"), ParameterError);
  CHECK_THROWS_AS(parse_grid("1,abc"), ParameterError);
  CHECK(parse_label("1,2") == Label{1, 2});
  CHECK_THROWS_AS(parse_label("1"), ParameterError);
}

TEST_CASE("config sections, overrides and unknown keys") {
  Config c = Config::parse(
      "[lattice]\nLx = 3\nLy = 3\nalpha = 0.3333333333333333\nN = 3\nscheme = NNN\n"
      "[interaction]\nU2 = 1.5\nU3 = 20\n[solver]\nk = 6\nseed = 42\n",
      "test.cfg");
  c.set("twist.theta_x=0.5");
  const LatticeSpec s = lattice_from(c);
  const SolveOptions o = solver_from(c);
  CHECK(s.Lx == 3);
  CHECK(s.scheme == HoppingScheme::next_nearest);
  CHECK(s.U2 == 1.5);
  CHECK(s.U3 == 20.0);
  CHECK(s.n_max == 3);  // finite U3 defaults to a triple-occupancy basis
  CHECK(s.theta_x == 0.5);
  CHECK(o.lanczos.k == 6);
  CHECK(o.lanczos.seed == 42);
  CHECK_NOTHROW(c.reject_unused());
  c.set("lattice.colour", "red");
  CHECK_THROWS_WITH_AS(c.reject_unused(), doctest::Contains("lattice.colour"), ParameterError);
}

TEST_CASE("hard core spellings and defaults") {
  Config c = Config::parse("[interaction]\nU3 = hardcore\n");
  const LatticeSpec s = lattice_from(c);
  CHECK(s.hard_core());
  CHECK(s.n_max == 2);
  Config d = Config::parse("[interaction]\nU3 = inf\n");
  CHECK(lattice_from(d).hard_core());
  const QubitParams q = qubit_from(Config{});
  CHECK(q.Ec == 0.05);
  CHECK(q.phi_x == 2.68);
  Config root = Config::parse("[qubit]\nphi_x = zero-U2\n");
  CHECK(qubit_phi_from_root(root, false));
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(Config::load("/nonexistent/x.cfg"), doctest::Contains("/nonexistent/x.cfg"),
                       ParameterError);
  CHECK_THROWS_AS(Config::parse("[a]\nb = 1\n[a]\nb = 2\n"), ParameterError);
  Config c;
  CHECK_THROWS_AS(c.set("nodot=1"), ParameterError);
  c.set("solver.k", "2.5");
  CHECK_THROWS_AS(solver_from(c), ParameterError);
  Config k;
  k.set("solver.k", "3");
  CHECK_THROWS_AS(solver_from(k), ParameterError);  // must exceed the manifold
}

TEST_CASE("effective config round trip") {
  Config c = Config::parse("[b]\ny = 2\n[a]\nx = 1\n");
  const Config again = Config::parse(c.to_ini());
  CHECK(again.entries() == c.entries());
}

}

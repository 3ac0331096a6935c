#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "rayleigh/harness.hpp"

using namespace rayleigh;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
  std::ofstream(name) << text;
  return name;
}

}  // namespace

TEST_CASE("config parsing applies the length unit") {
  const std::string path = write_file("harness_cfg.ini",
                                      "[psf]\nkind = gaussian\nsigma = 2\n"
                                      "[scene]\npositions = -1, 1\nepsilon = 0.05\n"
                                      "[sweep]\ns_min = 0.01\ns_max = 0.1\ns_count = 8\nepsilons = 0.01, 0.1\n"
                                      "[fisher]\ntargets = 2:spade, 3:interleaved-odd\n"
                                      "[units]\nlength_unit = 0.5\n");
  const ExperimentConfig c = load_config(path);
  std::remove(path.c_str());
  CHECK(c.sigma == doctest::Approx(1.0));
  CHECK(c.positions(1) == doctest::Approx(0.5));
  CHECK(c.s_values.size() == 8);
  CHECK(c.s_values.front() == doctest::Approx(0.005));
  CHECK(c.epsilons.size() == 2);
  REQUIRE(c.targets.size() == 2);
  CHECK(c.targets[1].k == 3);
  CHECK(c.targets[1].povm == "interleaved-odd");
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.ini"), Error);
  const std::string bad = write_file("harness_bad.ini", "[povm]\nlmax = four\n");
  CHECK_THROWS_AS(load_config(bad), Error);
  std::remove(bad.c_str());
  ExperimentConfig c;
  c.positions = (Eigen::VectorXd(2) << -1, 1).finished();
  c.weights = Eigen::VectorXd::Ones(2);
  c.s_values = {0.1, 5.0};
  try {
    validate_config(c);
    FAIL("expected OutsideConvergenceRadius");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutsideConvergenceRadius);
  }
}

TEST_CASE("expected exponents") {
  CHECK(expected_exponent({2, "spade"}) == 0);
  CHECK(expected_exponent({6, "spade"}) == 4);
  CHECK(expected_exponent({3, "interleaved-odd"}) == 2);
  CHECK(expected_exponent({5, "interleaved-even"}) == 4);
  CHECK(expected_exponent({3, "direct"}) == 4);
  CHECK_THROWS_AS(expected_exponent({3, "interleaved-even"}), Error);
}

TEST_CASE("log-log fit recovers a power law") {
  const std::vector<double> s = log_space(1e-3, 1e-1, 9);
  std::vector<double> f;
  for (double x : s) f.push_back(3.0 * std::pow(x, 2.5));
  const SlopeFit fit = fit_loglog(s, f);
  CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.se < 1e-10);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 2.0}), Error);
}

TEST_CASE("scaling experiment needs eight points") {
  ExperimentConfig c;
  c.positions = (Eigen::VectorXd(2) << -1, 1).finished();
  c.weights = Eigen::VectorXd::Ones(2);
  c.targets = {{2, "spade"}};
  c.s_values = log_space(1e-3, 1e-2, 5);
  try {
    run_scaling_experiment(c);
    FAIL("expected InsufficientGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientGrid);
  }
}

TEST_CASE("convergence check stays inside its remainder bound") {
  ExperimentConfig c;
  c.positions = (Eigen::VectorXd(3) << -0.6, 0.1, 0.5).finished();
  c.weights = (Eigen::VectorXd(3) << 0.5, 0.3, 0.2).finished();
  c.lmax = 6;
  c.s_values = log_space(0.01, 0.5, 6);
  for (const ConvergenceRow& r : run_convergence_check(c)) {
    CHECK(r.inside);
    CHECK(r.pass);
  }
}

TEST_CASE("result tables round trip through csv and json") {
  Table t;
  t.columns = {"name", "count", "value"};
  t.meta["psf.kind"] = "gaussian";
  t.add({std::string("a, \"quoted\""), 3LL, 0.1});
  t.add({std::string("plain"), -7LL, std::nan("")});
  t.add({std::string(""), 0LL, -HUGE_VAL});
  t.add({std::string("12"), 1LL, 2.0});
  for (const std::string fmt : {"csv", "json"}) {
    const std::string path = "roundtrip." + fmt;
    emit_results(t, fmt, path);
    const Table back = read_results(path, fmt);
    std::remove(path.c_str());
    CHECK(back.columns == t.columns);
    CHECK(back.meta == t.meta);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(std::get<std::string>(back.rows[i][0]) == std::get<std::string>(t.rows[i][0]));
      CHECK(std::get<long long>(back.rows[i][1]) == std::get<long long>(t.rows[i][1]));
      const double a = std::get<double>(t.rows[i][2]), b = std::get<double>(back.rows[i][2]);
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  }
}

TEST_CASE("doubles keep every bit through csv") {
  Table t;
  t.columns = {"x"};
  const double v = 0.1 + 0.2;
  t.add({v});
  t.add({1e300});
  const std::string path = "bits.csv";
  emit_results(t, "csv", path);
  const Table back = read_results(path, "csv");
  std::remove(path.c_str());
  CHECK(std::get<double>(back.rows[0][0]) == v);
  CHECK(std::get<double>(back.rows[1][0]) == 1e300);
}

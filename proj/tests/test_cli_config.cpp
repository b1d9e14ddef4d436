#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fcft/checks.hpp"

using namespace fcft;

TEST_CASE("half-integer parsing") {
  CHECK(parse_half_int("2").twice == 4);
  CHECK(parse_half_int("3/2").twice == 3);
  CHECK(parse_half_int("-1/2").twice == -1);
  CHECK_THROWS_AS(parse_half_int("3/4"), std::invalid_argument);
}

TEST_CASE("complex literal parsing") {
  CHECK(parse_complex("0.5") == Complex(0.5, 0.0));
  CHECK(parse_complex("0.5+0.25i") == Complex(0.5, 0.25));
  CHECK(parse_complex("0.5-0.25i") == Complex(0.5, -0.25));
  CHECK(parse_complex("-1.5e-2+2e-3i") == Complex(-0.015, 0.002));
  CHECK(parse_complex("0.3i") == Complex(0.0, 0.3));
  CHECK(parse_complex("-2i") == Complex(0.0, -2.0));
  CHECK_THROWS_AS(parse_complex("pear"), std::invalid_argument);
}

TEST_CASE("moduli parsing enforces the inequalities") {
  RunConfig cfg;
  CHECK_NOTHROW(
      parse_moduli("0.5+0i,0.1+0i,0.31622776601683794+0i,0.1+0i,0.31622776601683794+0i", cfg));
  CHECK(cfg.has_moduli);
  CHECK(cfg.w == Complex(0.5, 0.0));
  // |q1| + |q2| >= |w| is rejected at parse time
  RunConfig bad;
  CHECK_THROWS_AS(
      parse_moduli("0.15+0i,0.1+0i,0.31622776601683794+0i,0.1+0i,0.31622776601683794+0i", bad),
      std::invalid_argument);
  // square root must square to the modulus
  RunConfig badroot;
  CHECK_THROWS_AS(parse_moduli("0.5+0i,0.1+0i,0.5+0i,0.1+0i,0.31622776601683794+0i", badroot),
                  std::invalid_argument);
}

TEST_CASE("annulus parsing with and without an explicit root") {
  RunConfig cfg;
  parse_annulus("0.25", cfg);
  CHECK(cfg.q == Complex(0.25, 0.0));
  CHECK(std::abs(cfg.qs - Complex(0.5, 0.0)) < 1e-15);
  RunConfig cfg2;
  parse_annulus("0.25+0i,-0.5+0i", cfg2);
  CHECK(cfg2.qs == Complex(-0.5, 0.0));
}

TEST_CASE("config validation ranges") {
  RunConfig cfg;
  cfg.grid = 127;  // odd
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.grid = 128;
  cfg.band = 100;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.band = 8;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("reports embed the resolved config and are byte-stable") {
  RunConfig cfg;
  cfg.seed = 42;
  const auto res = run_supertrace_checks(cfg);
  const std::string a = checks_report_json("supertrace", cfg, res);
  const std::string b = checks_report_json("supertrace", cfg, run_supertrace_checks(cfg));
  CHECK(a == b);
  CHECK(a.find("\"schema\":1") != std::string::npos);
  CHECK(a.find("\"seed\":42") != std::string::npos);
  CHECK(a.find("\"cutoff\":\"2\"") != std::string::npos);
  CHECK(a.find("\"pass\":true") != std::string::npos);
}

TEST_CASE("sweep CSV uses CRLF rows and flags invalid points") {
  RunConfig cfg;
  cfg.cutoff = HalfInt::whole(1);
  cfg.band = 5;
  cfg.fourier = 24;
  const std::string csv = sweep_pants_convergence_csv(cfg);
  CHECK(csv.find("\r\n") != std::string::npos);
  CHECK(csv.find(",0\r\n") != std::string::npos);   // flagged invalid point
  CHECK(csv.find(",1\r\n") != std::string::npos);   // valid rows
  const std::string again = sweep_pants_convergence_csv(cfg);
  CHECK(csv == again);  // byte-stable at fixed config
}

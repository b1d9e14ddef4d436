#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcft/fock.hpp"
#include "fcft/graded.hpp"
#include "fcft/halfint.hpp"

namespace fcft {

/// Resolved batch-run parameters. Numeric ranges are validated by
/// validate(); moduli inequalities are enforced at parse time.
struct RunConfig {
  HalfInt cutoff = HalfInt::whole(2);
  int band = 8;
  int fourier = 64;
  int grid = 128;

  bool has_moduli = false;
  Complex w{0.5, 0.0}, q1{0.1, 0.0}, q1s{0.0, 0.0}, q2{0.1, 0.0}, q2s{0.0, 0.0};

  bool has_annulus = false;
  Complex q{0.5, 0.0}, qs{0.0, 0.0};
  Sector sector = Sector::NS;

  std::string out_path;
  std::uint64_t seed = 1;
  double tolerance = 0;  // > 0 overrides per-check defaults

  void validate() const;  // throws std::invalid_argument
};

/// Complex literal "a+bi" / "a-bi" / "a" (exponents allowed in both parts).
Complex parse_complex(const std::string& s);
/// "w,q1,q1s,q2,q2s" components as complex literals.
void parse_moduli(const std::string& s, RunConfig& cfg);
/// "q[,qs]"; the principal square root is chosen when qs is omitted.
void parse_annulus(const std::string& s, RunConfig& cfg);

struct CheckResult {
  std::string name;
  double measured = 0;
  double tolerance = 0;
  bool pass = false;
};

std::vector<CheckResult> run_fock_checks(const RunConfig& cfg);
std::vector<CheckResult> run_car_checks(const RunConfig& cfg);
std::vector<CheckResult> run_supertrace_checks(const RunConfig& cfg);
std::vector<CheckResult> run_vertex_checks(const RunConfig& cfg);
std::vector<CheckResult> run_surfaces_checks(const RunConfig& cfg);
std::vector<CheckResult> run_cauchy_checks(const RunConfig& cfg);

/// schema-versioned report with the full resolved config embedded
std::string checks_report_json(const std::string& suite, const RunConfig& cfg,
                               const std::vector<CheckResult>& checks);

/// RFC 4180 CSV tables, one row per sweep point; moduli-violating points
/// are emitted with valid=0 and no data columns
std::string sweep_pants_convergence_csv(const RunConfig& cfg);
std::string sweep_ks_decay_csv(const RunConfig& cfg);
std::string sweep_nullspace_gap_csv(const RunConfig& cfg);

}  // namespace fcft

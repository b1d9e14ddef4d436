// Batch front-end: verification suites, convergence sweeps, basis dumps.
#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "fcft/checks.hpp"

namespace {

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content << "\n";
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-fermion conformal field theory engine"};
  app.require_subcommand(1);

  fcft::RunConfig cfg;
  std::string cutoff_str = "2", moduli_str, annulus_str, sector_str = "ns";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--cutoff", cutoff_str, "energy cutoff as an integer or p/2 (e.g. 3/2)");
    cmd->add_option("--band", cfg.band, "band radius for pants partial sums");
    cmd->add_option("--fourier", cfg.fourier, "fourier truncation order for boundary elements");
    cmd->add_option("--grid", cfg.grid, "boundary samples per circle");
    cmd->add_option("--moduli", moduli_str, "pants moduli w,q1,q1s,q2,q2s (complex as re+imi)");
    cmd->add_option("--annulus", annulus_str, "annulus modulus q[,qs]");
    cmd->add_option("--sector", sector_str, "spin sector: ns | r");
    cmd->add_option("--out", cfg.out_path, "output path (stdout when omitted)");
    cmd->add_option("--seed", cfg.seed, "seed for randomized property checks");
    cmd->add_option("--tolerance", cfg.tolerance, "override the per-check tolerances");
  };

  std::string suite;
  CLI::App* verify = app.add_subcommand("verify", "run a module invariant suite");
  verify->add_option("suite", suite, "fock|car|supertrace|vertex|surfaces|cauchy|all")
      ->required();
  add_common(verify);

  std::string target;
  CLI::App* sweep = app.add_subcommand("sweep", "run a convergence sweep, emit CSV");
  sweep->add_option("target", target, "pants-convergence|ks-decay|nullspace-gap")->required();
  add_common(sweep);

  CLI::App* dump = app.add_subcommand("dump", "dump the truncated basis as JSON");
  add_common(dump);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.cutoff = fcft::parse_half_int(cutoff_str);
    if (sector_str == "ns" || sector_str == "NS")
      cfg.sector = fcft::Sector::NS;
    else if (sector_str == "r" || sector_str == "R")
      cfg.sector = fcft::Sector::R;
    else
      throw std::invalid_argument("sector must be ns or r");
    if (!moduli_str.empty()) fcft::parse_moduli(moduli_str, cfg);
    if (!annulus_str.empty()) fcft::parse_annulus(annulus_str, cfg);
    cfg.validate();

    if (verify->parsed()) {
      using Runner = std::vector<fcft::CheckResult> (*)(const fcft::RunConfig&);
      const std::vector<std::pair<std::string, Runner>> suites = {
          {"fock", fcft::run_fock_checks},         {"car", fcft::run_car_checks},
          {"supertrace", fcft::run_supertrace_checks}, {"vertex", fcft::run_vertex_checks},
          {"surfaces", fcft::run_surfaces_checks}, {"cauchy", fcft::run_cauchy_checks}};
      bool all_pass = true;
      std::string combined = "[";
      bool first = true;
      for (const auto& [name, runner] : suites) {
        if (suite != "all" && suite != name) continue;
        const auto results = runner(cfg);
        for (const auto& r : results) {
          all_pass = all_pass && r.pass;
          std::cerr << (r.pass ? "ok   " : "FAIL ") << name << ": " << r.name
                    << " (measured " << r.measured << ", tol " << r.tolerance << ")\n";
        }
        if (!first) combined += ",";
        combined += fcft::checks_report_json(name, cfg, results);
        first = false;
      }
      if (first) {
        std::cerr << "unknown suite: " << suite << "\n";
        return 2;
      }
      combined += "]";
      write_output(cfg.out_path, combined);
      return all_pass ? 0 : 1;
    }

    if (sweep->parsed()) {
      std::string csv;
      if (target == "pants-convergence")
        csv = fcft::sweep_pants_convergence_csv(cfg);
      else if (target == "ks-decay")
        csv = fcft::sweep_ks_decay_csv(cfg);
      else if (target == "nullspace-gap")
        csv = fcft::sweep_nullspace_gap_csv(cfg);
      else {
        std::cerr << "unknown sweep target: " << target << "\n";
        return 2;
      }
      write_output(cfg.out_path, csv);
      return 0;
    }

    if (dump->parsed()) {
      const auto t = fcft::enumerate_basis(cfg.cutoff);
      write_output(cfg.out_path, fcft::truncation_to_json(*t));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

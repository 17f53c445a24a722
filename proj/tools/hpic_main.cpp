#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpic/bracket.hpp"
#include "hpic/config.hpp"
#include "hpic/errors.hpp"
#include "hpic/io.hpp"
#include "hpic/rng.hpp"
#include "hpic/runner.hpp"

namespace {

std::vector<int> parse_thread_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

hpic::ParticleEnsemble random_ensemble(int np, std::uint64_t seed) {
  hpic::ParticleEnsemble e;
  e.dim = 2;
  e.resize(static_cast<std::size_t>(np));
  hpic::Rng rng(seed);
  for (int s = 0; s < np; ++s) {
    for (int c = 0; c < 3; ++c) {
      e.x[c][static_cast<std::size_t>(s)] = 2.0 * rng.u01() - 1.0;
      e.v[c][static_cast<std::size_t>(s)] = rng.normal();
    }
    e.w[static_cast<std::size_t>(s)] = 0.5 + rng.u01();
  }
  return e;
}

int cmd_verify_bracket(int np, const std::string& field_kind, std::uint64_t seed) {
  using hpic::FieldFn;
  FieldFn field;
  if (field_kind == "constant") {
    field = [](const std::array<double, 3>&) { return std::array<double, 3>{0.3, -0.2, 1.0}; };
  } else if (field_kind == "divfree") {
    field = [](const std::array<double, 3>& x) {
      return std::array<double, 3>{x[1], -x[0], 0.5};
    };
  } else if (field_kind == "divful") {
    field = [](const std::array<double, 3>& x) {
      return std::array<double, 3>{x[0], 0.0, 0.0};
    };
  } else {
    std::cerr << "unknown field kind '" << field_kind << "'\n";
    return 2;
  }
  const auto e = random_ensemble(np, seed);
  hpic::write_jacobi_report(std::cout, e, field);
  const auto scan = hpic::jacobi_scan(e, field);
  std::cerr << "max |residual| on zero-expected triples: " << scan.max_zero_expected << "\n";
  for (std::size_t s = 0; s < scan.velocity_triple_residual.size(); ++s) {
    std::cerr << "particle " << s << " velocity-triple residual "
              << scan.velocity_triple_residual[s] << " (1/w^2 = "
              << 1.0 / (e.w[s] * e.w[s]) << ")\n";
  }
  return 0;
}

int cmd_fit_gamma(const std::string& csv, double t_min, int max_peaks) {
  std::vector<double> t, ed;
  hpic::read_diagnostics_csv(csv, t, ed);
  hpic::DampingFitOptions opts;
  opts.t_min = t_min;
  opts.max_peaks = max_peaks;
  const auto fit = hpic::fit_damping_rate(t, ed, opts);
  std::printf("gamma = %.6g\nR2 = %.6g\npeaks = %d\n", fit.gamma, fit.r2, fit.peaks_used);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle-in-cell simulator for the Vlasov-Poisson system"};
  app.require_subcommand(1);

  std::string config_path, out_dir, threads_list = "1,2,4,8", field_kind = "constant";
  std::string csv_path;
  int threads = 0, np = 2;
  std::uint64_t seed = 0;
  bool have_seed = false;
  double t_min = 1.0;
  int max_peaks = 8;

  auto* run = app.add_subcommand("run", "Run a simulation from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--threads", threads, "worker threads (0 = runtime default)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the sampling seed")->each([&](const std::string&) {
    have_seed = true;
  });

  auto* bench = app.add_subcommand("bench", "Time deposit/push/solve phases per thread count");
  bench->add_option("config", config_path, "config file")->required();
  bench->add_option("--threads", threads_list, "comma-separated thread counts");

  auto* verify = app.add_subcommand("verify-bracket", "Scan the Jacobi identity residuals");
  verify->add_option("--np", np, "number of markers (matrix is dense in 6*np)");
  verify->add_option("--field", field_kind, "constant | divfree | divful");
  verify->add_option("--seed", seed, "ensemble seed");

  auto* fit = app.add_subcommand("fit-gamma", "Fit a damping rate from a diagnostics CSV");
  fit->add_option("csv", csv_path, "diagnostics CSV")->required();
  fit->add_option("--tmin", t_min, "ignore samples before this time");
  fit->add_option("--peaks", max_peaks, "number of peaks used");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      hpic::RunConfig cfg = hpic::parse_config_file(config_path);
      if (threads > 0) cfg.threads = threads;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (cfg.out_dir.empty()) cfg.out_dir = "out";
      if (have_seed) cfg.scenario.seed = seed;
      return hpic::main_loop(cfg);
    }
    if (bench->parsed()) {
      hpic::RunConfig cfg = hpic::parse_config_file(config_path);
      const auto rows = hpic::bench_speedup(cfg, parse_thread_list(threads_list));
      std::fputs(hpic::bench_table_csv(rows).c_str(), stdout);
      return 0;
    }
    if (verify->parsed()) return cmd_verify_bracket(np, field_kind, seed ? seed : 42);
    if (fit->parsed()) return cmd_fit_gamma(csv_path, t_min, max_peaks);
  } catch (const hpic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hpic::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

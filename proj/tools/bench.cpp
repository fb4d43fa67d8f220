/**
 * @file bench.cpp
 * @brief Benchmark harness: runs one experiment family, writes CSV or JSON,
 *        and exits 0 iff every acceptance check passes.
 *
 *   bench scalar --orders 1 2 3 --reps 100 --format json --out scalar.json
 *   bench brusselator --sizes 4 8 16 --dump-pattern k4.txt
 *   bench ode-wp --config wp.conf --tol-ladder 1e-2 1e-3
 *
 * The config file holds key=value lines using the long option names;
 * list values are space separated or bracketed. Flags override the file.
 */

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "hosolve/bench.hpp"

int main(int argc, char** argv) {
  hosolve::bench::BenchRunConfig cfg;
  CLI::App app{"hosolve benchmark harness"};
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");
  app.add_option("experiment", cfg.experiment, "Experiment family")
      ->required()
      ->check(CLI::IsMember({"scalar", "chandrasekhar", "brusselator", "ode-wp"}));
  app.add_option("--sizes", cfg.sizes, "n (chandrasekhar) or K (brusselator, ode-wp)")->check(CLI::PositiveNumber);
  app.add_option("--methods", cfg.methods, "Newton, Halley, NaiveHalley");
  app.add_option("--orders", cfg.orders, "Householder orders (scalar)")->check(CLI::Range(1, 8));
  app.add_option("--tol", cfg.tol, "Residual tolerance (default depends on experiment)");
  app.add_option("--tol-ladder", cfg.tolerances, "Work-precision tolerances");
  app.add_option("--ref-tol", cfg.reference_tol, "ode-wp reference tolerance");
  app.add_option("--reps", cfg.repetitions, "Timed repetitions per cell")->check(CLI::PositiveNumber);
  app.add_option("--warmups", cfg.warmups, "Untimed warmup runs per cell")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--seed", cfg.seed, "Seed for randomized checks");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out, "Output path (default stdout)");
  app.add_option("--dump-pattern", cfg.dump_pattern, "Write the detected sparsity pattern (brusselator)");
  app.add_option("--c", cfg.chandrasekhar_c, "Chandrasekhar albedo c");
  app.add_option("--A", cfg.brusselator_A, "Brusselator A");
  app.add_option("--B", cfg.brusselator_B, "Brusselator B");
  app.add_option("--alpha", cfg.brusselator_alpha, "Brusselator diffusion alpha");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream pattern_file;
    if (!cfg.dump_pattern.empty()) {
      pattern_file.open(cfg.dump_pattern);
      if (!pattern_file) throw std::runtime_error("cannot open " + cfg.dump_pattern);
    }
    const auto table = hosolve::bench::run(cfg, pattern_file.is_open() ? &pattern_file : nullptr);

    std::ofstream out_file;
    if (!cfg.out.empty()) {
      out_file.open(cfg.out);
      if (!out_file) throw std::runtime_error("cannot open " + cfg.out);
    }
    std::ostream& out = cfg.out.empty() ? std::cout : out_file;
    if (cfg.format == "json")
      hosolve::bench::write_json(out, table);
    else
      hosolve::bench::write_csv(out, table);

    for (const auto& c : table.checks)
      std::cerr << (c.passed ? "PASS " : (c.acceptance ? "FAIL " : "INFO ")) << c.name
                << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
    return table.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 2;
  }
}

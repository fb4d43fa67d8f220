#pragma once

/**
 * @file bench.hpp
 * @brief Experiment runners behind the `bench` tool: result tables, the
 *        scalar / Chandrasekhar / Brusselator / ODE work-precision sweeps,
 *        and CSV and JSON writers.
 *
 * Requires nlohmann/json (`json.hpp`) on the include path.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hosolve/halley.hpp"
#include "hosolve/householder.hpp"
#include "hosolve/ode.hpp"
#include "hosolve/problems.hpp"
#include "hosolve/sparsity.hpp"

namespace hosolve::bench {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

struct BenchRunConfig {
  std::string experiment = "scalar";
  std::vector<int> sizes;            // n (chandrasekhar) or K (brusselator, ode-wp); empty = defaults
  std::vector<std::string> methods;  // empty = all applicable
  std::vector<int> orders;           // scalar only; empty = 1..5
  std::vector<double> tolerances;    // work-precision ladder; empty = defaults
  double tol = 0.0;                  // <= 0 means the experiment default
  int repetitions = 1;
  int warmups = 3;
  int threads = 0;                   // <= 0 means hardware concurrency
  std::uint64_t seed = 42;
  double reference_tol = 1e-10;      // ode-wp reference run
  double chandrasekhar_c = 0.9;
  double brusselator_A = 3.4;
  double brusselator_B = 1.0;
  double brusselator_alpha = 10.0;
  std::string format = "csv";
  std::string out;
  std::string dump_pattern;

  void validate() const {
    static const std::vector<std::string> known{"scalar", "chandrasekhar", "brusselator", "ode-wp"};
    if (std::find(known.begin(), known.end(), experiment) == known.end())
      throw std::invalid_argument("unknown experiment: " + experiment);
    for (int s : sizes)
      if (s <= 0) throw std::invalid_argument("sizes must be positive");
    for (int p : orders)
      if (p < 1 || p > 8) throw std::invalid_argument("orders must lie in 1..8");
    for (double t : tolerances)
      if (!(t > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (warmups < 0) throw std::invalid_argument("warmups must be >= 0");
    if (!(chandrasekhar_c > 0.0 && chandrasekhar_c < 1.0)) throw std::invalid_argument("c must lie in (0, 1)");
    if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
  }
};

struct Check {
  std::string name;
  bool passed = false;
  /// Informational checks (timing comparisons) never affect the exit code.
  bool acceptance = true;
  std::string detail;
};

class ResultTable {
 public:
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::string> timing_columns;
  std::vector<Json> rows;
  std::vector<Check> checks;
  Json metadata = Json::object();

  void check(std::string name, bool passed, std::string detail = {}, bool acceptance = true) {
    checks.push_back({std::move(name), passed, acceptance, std::move(detail)});
  }

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.acceptance; });
  }

  /// Rows with the timing columns removed, for determinism comparisons.
  std::vector<Json> stable_rows() const {
    std::vector<Json> out;
    for (Json r : rows) {
      for (const auto& c : timing_columns) r.erase(c);
      out.push_back(std::move(r));
    }
    return out;
  }
};

namespace detail {

/// Run `cells` on up to `threads` workers; results keep the cell order.
inline std::vector<Json> run_cells(const std::vector<std::function<Json()>>& cells, int threads) {
  std::vector<Json> results(cells.size());
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) results[i] = cells[i]();
    return results;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr failure;
  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= cells.size() || failure) return;
        i = next++;
      }
      try {
        results[i] = cells[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Median wall time in seconds of `f` over `reps` runs after `warmups` runs.
template <class F>
double median_seconds(F&& f, int reps, int warmups) {
  for (int i = 0; i < warmups; ++i) f();
  std::vector<double> t(static_cast<std::size_t>(reps));
  for (auto& s : t) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  std::sort(t.begin(), t.end());
  const std::size_t m = t.size() / 2;
  return t.size() % 2 ? t[m] : 0.5 * (t[m - 1] + t[m]);
}

inline MvMethod parse_method(const std::string& s) {
  if (s == "Newton" || s == "newton") return MvMethod::Newton;
  if (s == "Halley" || s == "halley") return MvMethod::Halley;
  if (s == "NaiveHalley" || s == "naivehalley" || s == "naive") return MvMethod::NaiveHalley;
  throw std::invalid_argument("unknown method: " + s);
}

inline std::vector<MvMethod> methods_or(const BenchRunConfig& cfg, std::vector<MvMethod> fallback) {
  if (cfg.methods.empty()) return fallback;
  std::vector<MvMethod> out;
  for (const auto& m : cfg.methods) out.push_back(parse_method(m));
  return out;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline Json base_metadata(const BenchRunConfig& cfg) {
  Json m;
  m["version"] = kVersion;
  m["repetitions"] = cfg.repetitions;
  m["warmups"] = cfg.warmups;
  m["seed"] = cfg.seed;
  m["timing"] = "median wall time over repetitions after warmups; informational only";
  return m;
}

inline BrusselatorConfig brusselator_config(const BenchRunConfig& cfg, int k) {
  BrusselatorConfig bc;
  bc.K = k;
  bc.A = cfg.brusselator_A;
  bc.B = cfg.brusselator_B;
  bc.alpha = cfg.brusselator_alpha;
  return bc;
}

inline std::int64_t per_iteration_back_solves(MvMethod m) { return m == MvMethod::Newton ? 1 : 2; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar suite
// ---------------------------------------------------------------------------

inline ResultTable run_scalar(const BenchRunConfig& cfg) {
  cfg.validate();
  ResultTable t;
  t.experiment = "scalar";
  t.columns = {"function_id", "formula", "order", "iterations", "converged", "root", "abs_error",
               "f_evals", "time_per_iter_ns", "total_time_ns"};
  t.timing_columns = {"time_per_iter_ns", "total_time_ns"};
  const std::vector<int> orders = cfg.orders.empty() ? std::vector<int>{1, 2, 3, 4, 5} : cfg.orders;
  ScalarSolveConfig base;
  base.tol = cfg.tol > 0.0 ? cfg.tol : 1e-12;
  t.metadata = detail::base_metadata(cfg);
  t.metadata["tol"] = base.tol;
  t.metadata["max_iter"] = base.max_iter;

  const auto suite = univariate_suite();
  std::vector<std::function<Json()>> cells;
  for (const auto& c : suite)
    for (int p : orders)
      cells.push_back([&c, p, base, &cfg] {
        ScalarSolveConfig sc = base;
        sc.order = p;
        const auto r = householder_solve(c.f, c.x0, sc);
        const double total = detail::median_seconds([&] { (void)householder_solve(c.f, c.x0, sc); },
                                                     cfg.repetitions, cfg.warmups);
        Json row;
        row["function_id"] = c.id;
        row["formula"] = c.formula;
        row["order"] = p;
        row["iterations"] = r.iterations;
        row["converged"] = r.converged();
        row["root"] = r.root;
        row["abs_error"] = std::abs(r.root - c.reference_root);
        row["f_evals"] = r.counters.f_evals;
        row["time_per_iter_ns"] = 1e9 * total / std::max(1, r.iterations);
        row["total_time_ns"] = 1e9 * total;
        return row;
      });
  t.rows = detail::run_cells(cells, cfg.threads);

  std::vector<std::string> failed, off_root;
  std::map<std::pair<int, int>, int> iters;
  for (const auto& r : t.rows) {
    const std::string cell = "f" + std::to_string(r["function_id"].get<int>()) + "/p" + std::to_string(r["order"].get<int>());
    if (!r["converged"].get<bool>()) failed.push_back(cell);
    if (!(r["abs_error"].get<double>() <= 1e-10 * std::max(1.0, std::abs(r["root"].get<double>())))) off_root.push_back(cell);
    iters[{r["function_id"].get<int>(), r["order"].get<int>()}] = r["iterations"].get<int>();
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };
  t.check("all_converged", failed.empty(), failed.empty() ? "" : "not converged: " + join(failed));
  t.check("roots_match_reference", off_root.empty(), off_root.empty() ? "" : "off: " + join(off_root));
  if (iters.count({1, 1}) && iters.count({1, 2}))
    t.check("f1_halley_iterations_le_newton", iters[{1, 2}] <= iters[{1, 1}],
            "p=2: " + std::to_string(iters[{1, 2}]) + ", p=1: " + std::to_string(iters[{1, 1}]));
  return t;
}

// ---------------------------------------------------------------------------
// Chandrasekhar H-equation (dense Jacobian)
// ---------------------------------------------------------------------------

inline ResultTable run_chandrasekhar(const BenchRunConfig& cfg) {
  cfg.validate();
  ResultTable t;
  t.experiment = "chandrasekhar";
  t.columns = {"section", "n", "method", "tol", "iterations", "converged", "factorizations", "back_solves",
               "f_evals", "final_residual", "error", "time_s"};
  t.timing_columns = {"time_s"};
  const std::vector<int> sizes = cfg.sizes.empty() ? std::vector<int>{4, 8, 16, 32, 64, 128} : cfg.sizes;
  const auto methods = detail::methods_or(cfg, {MvMethod::Newton, MvMethod::Halley, MvMethod::NaiveHalley});
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  const std::vector<double> ladder =
      cfg.tolerances.empty() ? std::vector<double>{1e-4, 1e-6, 1e-8, 1e-10, 1e-12} : cfg.tolerances;
  t.metadata = detail::base_metadata(cfg);
  t.metadata["tol"] = tol;
  t.metadata["c"] = cfg.chandrasekhar_c;
  t.metadata["work_precision_tolerances"] = ladder;
  t.metadata["naive_halley_max_n"] = kNaiveHalleyMaxSize;

  // Reference roots for the error column: Halley at 1e-13.
  std::map<int, std::vector<double>> reference;
  for (int n : sizes) {
    MvSolveConfig rc;
    rc.tol = 1e-13;
    const auto r = solve(chandrasekhar({n, cfg.chandrasekhar_c}), rc);
    reference[n] = r.root;
  }

  struct Cell {
    std::string section;
    int n;
    MvMethod m;
    double tol;
  };
  std::vector<Cell> plan;
  for (int n : sizes)
    for (MvMethod m : methods) {
      if (m == MvMethod::NaiveHalley && static_cast<std::size_t>(n) > kNaiveHalleyMaxSize) continue;
      plan.push_back({"scaling", n, m, tol});
    }
  for (int n : sizes)
    for (MvMethod m : methods) {
      if (m == MvMethod::NaiveHalley && static_cast<std::size_t>(n) > kNaiveHalleyMaxSize) continue;
      for (double wt : ladder) plan.push_back({"work_precision", n, m, wt});
    }

  std::vector<std::function<Json()>> cells;
  for (const auto& c : plan)
    cells.push_back([c, &cfg, &reference] {
      const auto prob = chandrasekhar({c.n, cfg.chandrasekhar_c});
      MvSolveConfig sc;
      sc.tol = c.tol;
      sc.method = c.m;
      const auto r = solve(prob, sc);
      const double time = detail::median_seconds([&] { (void)solve(prob, sc); }, cfg.repetitions, cfg.warmups);
      double err = 0.0;
      for (std::size_t i = 0; i < r.root.size(); ++i) err = std::max(err, std::abs(r.root[i] - reference.at(c.n)[i]));
      Json row;
      row["section"] = c.section;
      row["n"] = c.n;
      row["method"] = std::string(to_string(c.m));
      row["tol"] = c.tol;
      row["iterations"] = r.iterations;
      row["converged"] = r.converged();
      row["factorizations"] = r.counters.factorizations;
      row["back_solves"] = r.counters.back_solves;
      row["f_evals"] = r.counters.f_evals;
      row["final_residual"] = r.final_residual();
      row["error"] = err;
      row["time_s"] = time;
      return row;
    });
  t.rows = detail::run_cells(cells, cfg.threads);

  bool all_conv = true, accounting = true;
  std::map<std::pair<int, std::string>, int> it;
  std::map<std::pair<int, std::string>, double> tm;
  for (const auto& r : t.rows) {
    all_conv = all_conv && r["converged"].get<bool>();
    const auto m = detail::parse_method(r["method"].get<std::string>());
    const auto iters = r["iterations"].get<std::int64_t>();
    accounting = accounting && r["factorizations"].get<std::int64_t>() == iters &&
                 r["back_solves"].get<std::int64_t>() == detail::per_iteration_back_solves(m) * iters;
    if (r["section"] == "scaling") {
      it[{r["n"].get<int>(), r["method"].get<std::string>()}] = static_cast<int>(iters);
      tm[{r["n"].get<int>(), r["method"].get<std::string>()}] = r["time_s"].get<double>();
    }
  }
  t.check("all_converged", all_conv);
  t.check("work_accounting", accounting, "1 factorization per iteration; 2 back-solves (Halley) or 1 (Newton)");
  bool fewer = true, naive_same = true;
  std::string detail_fewer, detail_naive;
  for (int n : sizes) {
    if (it.count({n, "Halley"}) && it.count({n, "Newton"})) {
      const bool ok = it[{n, "Halley"}] <= it[{n, "Newton"}];
      fewer = fewer && ok;
      detail_fewer += "n=" + std::to_string(n) + ":" + std::to_string(it[{n, "Halley"}]) + "/" +
                      std::to_string(it[{n, "Newton"}]) + " ";
    }
    if (n <= 16 && it.count({n, "Halley"}) && it.count({n, "NaiveHalley"}))
      naive_same = naive_same && it[{n, "Halley"}] == it[{n, "NaiveHalley"}];
  }
  if (!detail_fewer.empty()) t.check("halley_iterations_le_newton", fewer, detail_fewer + "(Halley/Newton)");
  if (std::find(methods.begin(), methods.end(), MvMethod::NaiveHalley) != methods.end() &&
      std::find(methods.begin(), methods.end(), MvMethod::Halley) != methods.end())
    t.check("naive_halley_iterations_equal_halley", naive_same, "n <= 16");

  // Randomized check: one Taylor-mode Halley step equals the explicit
  // Hessian step at a seeded perturbation of the initial guess.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  double worst = 0.0;
  for (int n : sizes) {
    if (n > 16) continue;
    const auto prob = chandrasekhar({n, cfg.chandrasekhar_c});
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = 1.0 + u(rng);
    const auto f = lu_factor(dense_jacobian(prob, x));
    const auto fx = prob(x);
    const auto a = halley_step(prob, x, f, fx), b = naive_halley_step(prob, x, f, fx);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
  }
  t.check("halley_step_matches_naive", worst <= 1e-9, "max relative difference " + detail::fmt(worst));

  // Timing trend, informational.
  // Compare n = 8 against n = 64 when both ran, else the extremes.
  std::vector<int> timed;
  for (int n : sizes)
    if (tm.count({n, "NaiveHalley"}) && tm.count({n, "Halley"})) timed.push_back(n);
  std::sort(timed.begin(), timed.end());
  auto has = [&](int n) { return std::find(timed.begin(), timed.end(), n) != timed.end(); };
  const int lo = timed.empty() ? 0 : (has(8) ? 8 : timed.front());
  const int hi = timed.empty() ? 0 : (has(64) ? 64 : timed.back());
  if (lo && hi > lo) {
    const double r_lo = tm[{lo, "NaiveHalley"}] / tm[{lo, "Halley"}];
    const double r_hi = tm[{hi, "NaiveHalley"}] / tm[{hi, "Halley"}];
    t.check("naive_time_ratio_grows", r_hi > r_lo,
            "NaiveHalley/Halley time: n=" + std::to_string(lo) + " " + detail::fmt(r_lo) + ", n=" + std::to_string(hi) +
                " " + detail::fmt(r_hi),
            false);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Brusselator steady state (dense vs sparse Jacobian)
// ---------------------------------------------------------------------------

inline ResultTable run_brusselator(const BenchRunConfig& cfg, std::ostream* pattern_out = nullptr) {
  cfg.validate();
  ResultTable t;
  t.experiment = "brusselator";
  t.columns = {"K", "n", "method", "jacobian", "num_colors", "iterations", "converged", "factorizations",
               "back_solves", "f_evals", "final_residual", "time_s"};
  t.timing_columns = {"time_s"};
  const std::vector<int> sizes = cfg.sizes.empty() ? std::vector<int>{4, 8, 16, 32} : cfg.sizes;
  for (int k : sizes)
    if (k < 3) throw std::invalid_argument("brusselator: K must be >= 3");
  const auto methods = detail::methods_or(cfg, {MvMethod::Newton, MvMethod::Halley});
  for (MvMethod m : methods)
    if (m == MvMethod::NaiveHalley) throw std::invalid_argument("brusselator: NaiveHalley is not supported");
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  t.metadata = detail::base_metadata(cfg);
  t.metadata["tol"] = tol;
  t.metadata["A"] = cfg.brusselator_A;
  t.metadata["B"] = cfg.brusselator_B;
  t.metadata["alpha"] = cfg.brusselator_alpha;
  t.metadata["ordering"] = "u then v, index i*K + j for grid point (x_i, y_j)";

  if (pattern_out) {
    BrusselatorConfig bc = detail::brusselator_config(cfg, sizes.front());
    write_pattern(*pattern_out, detect_pattern(brusselator_steady(bc)));
  }

  struct Cell {
    int k;
    MvMethod m;
    JacobianStrategy j;
  };
  std::vector<Cell> plan;
  for (int k : sizes)
    for (MvMethod m : methods)
      for (auto j : {JacobianStrategy::Dense, JacobianStrategy::Sparse}) plan.push_back({k, m, j});

  std::vector<std::function<Json()>> cells;
  for (const auto& c : plan)
    cells.push_back([c, tol, &cfg] {
      const BrusselatorConfig bc = detail::brusselator_config(cfg, c.k);
      const auto prob = brusselator_steady(bc);
      MvSolveConfig sc;
      sc.tol = tol;
      sc.method = c.m;
      sc.jacobian = c.j;
      const auto r = solve(prob, sc);
      const double time = detail::median_seconds([&] { (void)solve(prob, sc); }, cfg.repetitions, cfg.warmups);
      int colors = 0;
      if (c.j == JacobianStrategy::Sparse) colors = color_columns(detect_pattern(prob)).num_colors;
      Json row;
      row["K"] = c.k;
      row["n"] = prob.size();
      row["method"] = std::string(to_string(c.m));
      row["jacobian"] = c.j == JacobianStrategy::Dense ? "Dense" : "Sparse";
      row["num_colors"] = colors;
      row["iterations"] = r.iterations;
      row["converged"] = r.converged();
      row["factorizations"] = r.counters.factorizations;
      row["back_solves"] = r.counters.back_solves;
      row["f_evals"] = r.counters.f_evals;
      row["final_residual"] = r.final_residual();
      row["time_s"] = time;
      return row;
    });
  t.rows = detail::run_cells(cells, cfg.threads);

  bool all_conv = true, accounting = true, fewer = true;
  std::map<std::tuple<int, std::string, std::string>, int> it;
  std::map<std::tuple<int, std::string, std::string>, double> tm;
  std::map<int, int> colors;
  for (const auto& r : t.rows) {
    all_conv = all_conv && r["converged"].get<bool>();
    const auto m = detail::parse_method(r["method"].get<std::string>());
    const auto iters = r["iterations"].get<std::int64_t>();
    accounting = accounting && r["factorizations"].get<std::int64_t>() == iters &&
                 r["back_solves"].get<std::int64_t>() == detail::per_iteration_back_solves(m) * iters;
    const auto key = std::make_tuple(r["K"].get<int>(), r["method"].get<std::string>(), r["jacobian"].get<std::string>());
    it[key] = static_cast<int>(iters);
    tm[key] = r["time_s"].get<double>();
    if (r["jacobian"] == "Sparse") colors[r["K"].get<int>()] = r["num_colors"].get<int>();
  }
  std::string fewer_detail;
  for (int k : sizes)
    for (const char* j : {"Dense", "Sparse"}) {
      const auto h = std::make_tuple(k, std::string("Halley"), std::string(j));
      const auto n = std::make_tuple(k, std::string("Newton"), std::string(j));
      if (it.count(h) && it.count(n)) {
        fewer = fewer && it[h] <= it[n];
        fewer_detail += "K=" + std::to_string(k) + "/" + j + ":" + std::to_string(it[h]) + "/" + std::to_string(it[n]) + " ";
      }
    }
  t.check("all_converged", all_conv);
  t.check("work_accounting", accounting, "1 factorization per iteration; 2 back-solves (Halley) or 1 (Newton)");
  if (!fewer_detail.empty()) t.check("halley_iterations_le_newton", fewer, fewer_detail + "(Halley/Newton)");
  std::set<int> large_colors;
  std::string color_detail;
  for (auto [k, c] : colors) {
    color_detail += "K=" + std::to_string(k) + ":" + std::to_string(c) + " ";
    if (k >= 8) large_colors.insert(c);
  }
  // Natural-order greedy is not guaranteed to give the same count for every
  // K; the check reports the counts as they are.
  if (large_colors.size() >= 1) t.check("num_colors_independent_of_K", large_colors.size() == 1, color_detail);
  const int kmax = *std::max_element(sizes.begin(), sizes.end());
  for (const char* m : {"Newton", "Halley"}) {
    const auto d = std::make_tuple(kmax, std::string(m), std::string("Dense"));
    const auto s = std::make_tuple(kmax, std::string(m), std::string("Sparse"));
    if (tm.count(d) && tm.count(s))
      t.check(std::string("sparse_faster_than_dense_") + m, tm[s] < tm[d],
              "K=" + std::to_string(kmax) + ": sparse " + detail::fmt(tm[s]) + " s, dense " + detail::fmt(tm[d]) + " s",
              false);
  }
  return t;
}

// ---------------------------------------------------------------------------
// ODE work-precision
// ---------------------------------------------------------------------------

inline StepperConfig wp_stepper(OdeScheme s, MvMethod inner, double tol) {
  StepperConfig c;
  c.scheme = s;
  c.inner = inner;
  c.abstol = c.reltol = tol;
  c.h_init = 1e-4;
  c.h_min = 1e-14;
  return c;
}

inline WorkPrecisionRecord work_precision_record(OdeScheme s, MvMethod inner, double tol, const IntegrationResult& r,
                                                 std::span<const double> reference, double wall_time_s) {
  WorkPrecisionRecord rec;
  rec.scheme = s;
  rec.inner = inner;
  rec.tolerance = tol;
  rec.error = relative_l2_error(r.y, reference);
  rec.wall_time_s = wall_time_s;
  rec.total_steps = r.stats.accepted_steps + r.stats.rejected_steps;
  rec.rejected_steps = r.stats.rejected_steps;
  rec.total_nonlinear_iterations = r.stats.work.nonlinear_iterations;
  rec.total_factorizations = r.stats.work.factorizations;
  rec.total_back_solves = r.stats.work.back_solves;
  return rec;
}

inline ResultTable run_ode_wp(const BenchRunConfig& cfg) {
  cfg.validate();
  ResultTable t;
  t.experiment = "ode-wp";
  t.columns = {"K", "scheme", "inner", "tolerance", "error", "wall_time_s", "total_steps", "rejected_steps",
               "total_nonlinear_iterations", "total_factorizations", "total_back_solves"};
  t.timing_columns = {"wall_time_s"};
  const int k = cfg.sizes.empty() ? 8 : cfg.sizes.front();
  const auto inners = detail::methods_or(cfg, {MvMethod::Newton, MvMethod::Halley});
  for (MvMethod m : inners)
    if (m == MvMethod::NaiveHalley) throw std::invalid_argument("ode-wp: inner must be Newton or Halley");
  std::vector<double> ladder = cfg.tolerances.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5} : cfg.tolerances;
  std::sort(ladder.begin(), ladder.end(), std::greater<>());
  const BrusselatorConfig bc = detail::brusselator_config(cfg, k);
  const auto ode = brusselator_rhs(bc);
  t.metadata = detail::base_metadata(cfg);
  t.metadata["K"] = k;
  t.metadata["t_end"] = ode.t_end();
  t.metadata["reference"] = "TRBDF2, Newton inner, abstol = reltol = " + detail::fmt(cfg.reference_tol);
  t.metadata["error_metric"] = "sum (y - y_ref)^2 / sum y_ref^2";
  t.metadata["inner_tol"] = "0.01 * abstol";

  struct Cell {
    OdeScheme s;
    MvMethod m;
    double tol;
  };
  std::vector<Cell> plan;
  for (auto s : {OdeScheme::Trapezoid, OdeScheme::TRBDF2})
    for (MvMethod m : inners)
      for (double tol : ladder) plan.push_back({s, m, tol});

  // The reference is one more cell; all cells store their final state.
  std::vector<IntegrationResult> finals(plan.size() + 1);
  std::vector<double> times(plan.size() + 1);
  std::vector<std::function<Json()>> cells;
  cells.push_back([&] {
    finals[0] = integrate(ode, wp_stepper(OdeScheme::TRBDF2, MvMethod::Newton, cfg.reference_tol));
    return Json();
  });
  std::vector<std::string> failures(plan.size() + 1);
  for (std::size_t i = 0; i < plan.size(); ++i)
    cells.push_back([&, i] {
      const auto sc = wp_stepper(plan[i].s, plan[i].m, plan[i].tol);
      try {
        times[i + 1] = detail::median_seconds([&] { finals[i + 1] = integrate(ode, sc); }, cfg.repetitions,
                                              std::min(cfg.warmups, 1));
      } catch (const std::exception& e) {
        failures[i + 1] = e.what();
      }
      return Json();
    });
  detail::run_cells(cells, cfg.threads);

  const auto& ref = finals[0].y;
  t.metadata["reference_steps"] = finals[0].stats.accepted_steps + finals[0].stats.rejected_steps;
  std::vector<WorkPrecisionRecord> recs;
  std::string failed_detail;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!failures[i + 1].empty()) {
      failed_detail += std::string(to_string(plan[i].s)) + "/" + std::string(to_string(plan[i].m)) + "@" +
                       detail::fmt(plan[i].tol) + ": " + failures[i + 1] + "; ";
      continue;
    }
    recs.push_back(work_precision_record(plan[i].s, plan[i].m, plan[i].tol, finals[i + 1], ref, times[i + 1]));
    const auto& r = recs.back();
    Json row;
    row["K"] = k;
    row["scheme"] = std::string(to_string(r.scheme));
    row["inner"] = std::string(to_string(r.inner));
    row["tolerance"] = r.tolerance;
    row["error"] = r.error;
    row["wall_time_s"] = r.wall_time_s;
    row["total_steps"] = r.total_steps;
    row["rejected_steps"] = r.rejected_steps;
    row["total_nonlinear_iterations"] = r.total_nonlinear_iterations;
    row["total_factorizations"] = r.total_factorizations;
    row["total_back_solves"] = r.total_back_solves;
    t.rows.push_back(std::move(row));
  }

  auto find = [&](OdeScheme s, MvMethod m, double tol) -> const WorkPrecisionRecord* {
    for (const auto& r : recs)
      if (r.scheme == s && r.inner == m && r.tolerance == tol) return &r;
    return nullptr;
  };
  bool decreasing = true, accounting = true, within_half_order = true;
  std::string dec_detail, order_detail;
  for (auto s : {OdeScheme::Trapezoid, OdeScheme::TRBDF2})
    for (MvMethod m : inners)
      for (std::size_t i = 1; i < ladder.size(); ++i) {
        const auto* a = find(s, m, ladder[i - 1]);
        const auto* b = find(s, m, ladder[i]);
        if (!a || !b) continue;
        if (!(b->error < a->error)) {
          decreasing = false;
          dec_detail += std::string(to_string(s)) + "/" + std::string(to_string(m)) + " at " + detail::fmt(ladder[i]) + " ";
        }
      }
  for (const auto& r : recs)
    accounting = accounting && r.total_factorizations == r.total_nonlinear_iterations &&
                 r.total_back_solves == detail::per_iteration_back_solves(r.inner) * r.total_nonlinear_iterations;
  t.check("all_cells_completed", failed_detail.empty(),
          std::to_string(recs.size()) + " of " + std::to_string(plan.size()) + " cells; " + failed_detail);
  t.check("error_decreases_with_tolerance", decreasing, dec_detail);
  t.check("work_accounting", accounting, "factorizations = iterations; back-solves 2x (Halley) or 1x (Newton)");
  const bool both = std::find(inners.begin(), inners.end(), MvMethod::Newton) != inners.end() &&
                    std::find(inners.begin(), inners.end(), MvMethod::Halley) != inners.end();
  if (both) {
    bool fewer = true;
    std::string fewer_detail;
    const std::size_t first_tight = ladder.size() >= 2 ? ladder.size() - 2 : 0;
    for (auto s : {OdeScheme::Trapezoid, OdeScheme::TRBDF2}) {
      for (std::size_t i = first_tight; i < ladder.size(); ++i) {
        const auto* h = find(s, MvMethod::Halley, ladder[i]);
        const auto* n = find(s, MvMethod::Newton, ladder[i]);
        if (!h || !n) continue;
        fewer = fewer && h->total_nonlinear_iterations <= n->total_nonlinear_iterations;
        fewer_detail += std::string(to_string(s)) + "@" + detail::fmt(ladder[i]) + ":" +
                        std::to_string(h->total_nonlinear_iterations) + "/" +
                        std::to_string(n->total_nonlinear_iterations) + " ";
      }
      for (double tol : ladder) {
        const auto* h = find(s, MvMethod::Halley, tol);
        const auto* n = find(s, MvMethod::Newton, tol);
        if (!h || !n) continue;
        const double gap = std::abs(std::log10(h->error) - std::log10(n->error));
        if (!(gap < 0.5)) {
          within_half_order = false;
          order_detail += std::string(to_string(s)) + "@" + detail::fmt(tol) + " gap " + detail::fmt(gap) + " ";
        }
      }
    }
    t.check("halley_iterations_le_newton_tightest_two", fewer, fewer_detail + "(Halley/Newton)");
    t.check("inner_solver_errors_within_half_order", within_half_order, order_detail, false);
  }
  return t;
}

inline ResultTable run(const BenchRunConfig& cfg, std::ostream* pattern_out = nullptr) {
  if (cfg.experiment == "scalar") return run_scalar(cfg);
  if (cfg.experiment == "chandrasekhar") return run_chandrasekhar(cfg);
  if (cfg.experiment == "brusselator") return run_brusselator(cfg, pattern_out);
  if (cfg.experiment == "ode-wp") return run_ode_wp(cfg);
  throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

inline std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) return std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os << std::setprecision(17) << d;
    return os.str();
  }
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

inline void write_csv(std::ostream& os, const ResultTable& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      os << (i ? "," : "") << (r.contains(t.columns[i]) ? csv_cell(r[t.columns[i]]) : "");
    os << '\n';
  }
}

inline Json to_json(const ResultTable& t) {
  Json j;
  j["experiment"] = t.experiment;
  j["metadata"] = t.metadata;
  j["columns"] = t.columns;
  j["timing_columns"] = t.timing_columns;
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row;
    for (const auto& c : t.columns) row[c] = r.contains(c) ? r[c] : Json();
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  Json checks = Json::array();
  for (const auto& c : t.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"acceptance", c.acceptance}, {"detail", c.detail}});
  j["checks"] = std::move(checks);
  j["all_passed"] = t.all_passed();
  return j;
}

inline void write_json(std::ostream& os, const ResultTable& t) { os << to_json(t).dump(2) << '\n'; }

}  // namespace hosolve::bench

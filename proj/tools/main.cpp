#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vanetsec/channel.hpp"
#include "vanetsec/csv.hpp"
#include "vanetsec/errors.hpp"
#include "vanetsec/fista.hpp"
#include "vanetsec/gradient.hpp"
#include "vanetsec/harness.hpp"
#include "vanetsec/phy.hpp"
#include "vanetsec/sca.hpp"
#include "vanetsec/scenario.hpp"

namespace {

using namespace vanetsec;

struct SharedOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_shared(CLI::App* cmd, SharedOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "config file path (default: $VANETSEC_CONFIG if set)");
  cmd->add_option("--set", o.sets, "override a config field, key=value")
      ->take_all();
  cmd->add_option("--seed", o.seed, "override the RNG seed")
      ->each([&o](const std::string&) { o.seed_given = true; });
}

ScenarioConfig resolve_config(const SharedOpts& o) {
  ScenarioConfig cfg;
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("VANETSEC_CONFIG")) path = env;
  }
  if (!path.empty()) cfg = load_config_file(path);
  for (const auto& kv : o.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed_given) cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (b <= s.size()) {
    auto c = s.find(',', b);
    if (c == std::string::npos) {
      out.push_back(s.substr(b));
      break;
    }
    out.push_back(s.substr(b, c - b));
    b = c + 1;
  }
  return out;
}

int cmd_generate_channels(const SharedOpts& o, const std::string& out_path) {
  const ScenarioConfig cfg = resolve_config(o);
  const InterferenceTopology topo = build_topology(cfg);
  const ChannelRealization ch = draw_channels(cfg, topo, cfg.seed);
  if (out_path == "-") {
    dump_channels_csv(ch, std::cout);
  } else {
    std::ofstream f(out_path);
    if (!f) throw ConfigError("cannot write: " + out_path);
    dump_channels_csv(ch, f);
  }
  return 0;
}

int cmd_solve(const SharedOpts& o, const std::string& method,
              const std::string& out_path, int max_iters, double tol,
              double alpha, bool momentum) {
  const ScenarioConfig cfg = resolve_config(o);
  const InterferenceTopology topo = build_topology(cfg);
  const ChannelRealization ch = draw_channels(cfg, topo, cfg.seed);
  const EveCombiner w = eve_combiner(ch, cfg);
  const PowerAllocation p0 =
      PowerAllocation::Constant(cfg.K, cfg.M, 0.5 * cfg.p_max);

  PowerAllocation p;
  SolveTrace trace;
  if (method == "sca") {
    ScaSettings st;
    if (max_iters > 0) st.max_outer = max_iters;
    if (tol > 0) st.outer_tol = tol;
    std::tie(p, trace) = solve_sca(p0, ch, topo, w, cfg, st);
  } else {
    FistaSettings st;
    st.use_linesearch = (method == "fista-l");
    st.use_momentum = momentum;
    if (max_iters > 0) st.max_iters = max_iters;
    if (tol > 0) st.tol = tol;
    if (alpha > 0) st.alpha = alpha;
    std::tie(p, trace) = solve_fista(p0, ch, topo, w, cfg, st);
  }

  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw ConfigError("cannot write: " + out_path);
    write_trace_csv(trace, f);
  }
  std::cout << "method,seed,objective_bits_per_s,per_user_bits_per_s,iters,"
               "status,wall_time_s\n"
            << method << ',' << cfg.seed << ','
            << fmt_double(trace.objective_per_iter.back()) << ','
            << fmt_double(trace.objective_per_iter.back() / cfg.K) << ','
            << trace.iters << ',' << to_string(trace.status) << ','
            << fmt_double(trace.wall_time_s) << '\n';
  return 0;
}

int cmd_sweep(const SharedOpts& o, const std::string& experiment,
              const std::string& out_dir, int seeds,
              const std::string& methods_csv, const std::string& ne_csv,
              const std::string& k_csv, const std::string& speeds_csv) {
  ExperimentSpec spec;
  spec.base = resolve_config(o);
  spec.out_dir = out_dir;
  spec.seed0 = spec.base.seed;

  const auto parse_ints = [](const std::string& s) {
    std::vector<int> v;
    for (const auto& tok : split_list(s)) v.push_back(std::stoi(tok));
    return v;
  };
  const auto parse_reals = [](const std::string& s) {
    std::vector<double> v;
    for (const auto& tok : split_list(s)) v.push_back(std::stod(tok));
    return v;
  };

  std::vector<ResultRow> rows;
  if (experiment == "convergence") {
    spec.methods = methods_csv.empty()
                       ? std::vector<std::string>{"sca", "fista", "fista-l"}
                       : split_list(methods_csv);
    spec.seeds = seeds > 0 ? seeds : 3;
    spec.cells = {{4, 4, 4, 2, spec.base.speed_kmh},
                  {8, 8, 8, 4, spec.base.speed_kmh}};
    rows = run_convergence(spec);
  } else if (experiment == "runtime") {
    spec.methods = methods_csv.empty()
                       ? std::vector<std::string>{"sca", "fista", "fista-l"}
                       : split_list(methods_csv);
    spec.seeds = seeds > 0 ? seeds : 5;
    spec.cells = {{4, 4, 4, 2, spec.base.speed_kmh},
                  {6, 6, 6, 3, spec.base.speed_kmh},
                  {8, 8, 8, 4, spec.base.speed_kmh}};
    rows = run_runtime_table(spec);
  } else if (experiment == "ne") {
    spec.methods = methods_csv.empty() ? std::vector<std::string>{"fista-l"}
                                       : split_list(methods_csv);
    spec.seeds = seeds > 0 ? seeds : 100;
    const auto nes = ne_csv.empty() ? std::vector<int>{2, 4, 6, 8}
                                    : parse_ints(ne_csv);
    const auto ks = k_csv.empty() ? std::vector<int>{2, 4, 8}
                                  : parse_ints(k_csv);
    const auto speeds = speeds_csv.empty() ? std::vector<double>{50.0, 100.0}
                                           : parse_reals(speeds_csv);
    for (double v : speeds)
      for (int k : ks)
        for (int ne : nes) spec.cells.push_back({4, k, 4, ne, v});
    rows = run_ne_sweep(spec);
  } else {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  std::cerr << "wrote " << rows.size() << " result rows to " << out_dir
            << "\n";
  return 0;
}

int cmd_gradcheck(const SharedOpts& o, int points, double step,
                  double threshold) {
  const ScenarioConfig cfg = resolve_config(o);
  const InterferenceTopology topo = build_topology(cfg);
  const ChannelRealization ch = draw_channels(cfg, topo, cfg.seed);
  const EveCombiner w = eve_combiner(ch, cfg);
  const double h = step > 0 ? step : 1e-6 * cfg.p_max;

  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    LinkRng rng(substream_seed(cfg.seed, 99, i, -1, -1));
    PowerAllocation p(cfg.K, cfg.M);
    for (int m = 0; m < cfg.M; ++m)
      for (int k = 0; k < cfg.K; ++k)
        p(k, m) = cfg.p_max * (0.05 + 0.9 * rng.uniform01());
    worst = std::max(worst, finite_diff_check(p, ch, topo, w, cfg, h));
  }
  std::cout << "points,step,max_relative_error\n"
            << points << ',' << fmt_double(h) << ',' << fmt_double(worst)
            << '\n';
  if (worst > threshold) {
    std::cerr << "gradcheck FAILED: " << fmt_double(worst) << " > "
              << fmt_double(threshold) << "\n";
    return 1;
  }
  return 0;
}

int cmd_gridcheck(const SharedOpts& o, int restarts, int points_per_dim,
                  double threshold) {
  const ScenarioConfig cfg = resolve_config(o);
  const InterferenceTopology topo = build_topology(cfg);
  const ChannelRealization ch = draw_channels(cfg, topo, cfg.seed);
  const EveCombiner w = eve_combiner(ch, cfg);

  const double grid_best =
      grid_search_best(ch, topo, w, cfg, points_per_dim);
  std::cout << "method,best_objective_bits_per_s,grid_objective_bits_per_s,"
               "ratio\n";
  bool ok = true;
  for (const std::string method : {"sca", "fista"}) {
    const double best =
        best_of_restarts(method, ch, topo, w, cfg, restarts, cfg.seed);
    const double ratio = grid_best > 0 ? best / grid_best : 1.0;
    std::cout << method << ',' << fmt_double(best) << ','
              << fmt_double(grid_best) << ',' << fmt_double(ratio) << '\n';
    if (ratio < threshold) ok = false;
  }
  if (!ok) {
    std::cerr << "gridcheck FAILED: a solver fell below " << threshold
              << " of the grid optimum\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum secrecy rate maximization for V2V spectrum sharing"};
  app.require_subcommand(1);

  SharedOpts gen_o, solve_o, sweep_o, grad_o, grid_o;

  auto* gen = app.add_subcommand("generate-channels",
                                 "draw one channel realization to CSV");
  add_shared(gen, gen_o);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output CSV path, '-' for stdout")
      ->required();

  auto* solve = app.add_subcommand("solve", "run one solver, write its trace");
  add_shared(solve, solve_o);
  std::string solve_method, solve_out;
  int solve_max_iters = 0;
  double solve_tol = 0, solve_alpha = 0;
  bool solve_momentum = false;
  solve->add_option("--method", solve_method, "sca | fista | fista-l")
      ->required()
      ->check(CLI::IsMember({"sca", "fista", "fista-l"}));
  solve->add_option("--out", solve_out, "trace CSV path");
  solve->add_option("--max-iters", solve_max_iters, "iteration cap");
  solve->add_option("--tol", solve_tol, "relative objective-change tolerance");
  solve->add_option("--alpha", solve_alpha, "fixed step size (fista)");
  solve->add_flag("--momentum", solve_momentum, "enable extrapolation (fista)");

  auto* sweep = app.add_subcommand("sweep", "run a full experiment grid");
  add_shared(sweep, sweep_o);
  std::string sweep_experiment, sweep_out, sweep_methods, sweep_ne, sweep_k,
      sweep_speeds;
  int sweep_seeds = 0;
  sweep->add_option("--experiment", sweep_experiment,
                    "convergence | runtime | ne")
      ->required()
      ->check(CLI::IsMember({"convergence", "runtime", "ne"}));
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_option("--seeds", sweep_seeds, "seeds per cell");
  sweep->add_option("--methods", sweep_methods, "comma list of methods");
  sweep->add_option("--ne-list", sweep_ne, "comma list of Ne values (ne)");
  sweep->add_option("--k-list", sweep_k, "comma list of K values (ne)");
  sweep->add_option("--speeds", sweep_speeds, "comma list of speeds (ne)");

  auto* grad = app.add_subcommand(
      "gradcheck", "closed-form gradient vs central differences");
  add_shared(grad, grad_o);
  int grad_points = 50;
  double grad_step = 0, grad_threshold = 1e-5;
  grad->add_option("--points", grad_points, "random interior points");
  grad->add_option("--step", grad_step, "difference step in watts");
  grad->add_option("--threshold", grad_threshold, "failure threshold");

  auto* grid = app.add_subcommand(
      "gridcheck", "solvers vs exhaustive grid search (tiny scenarios)");
  add_shared(grid, grid_o);
  int grid_restarts = 5, grid_points = 20;
  double grid_threshold = 0.98;
  grid->add_option("--restarts", grid_restarts, "restarts per solver");
  grid->add_option("--points-per-dim", grid_points, "grid resolution");
  grid->add_option("--threshold", grid_threshold, "required ratio vs grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (*gen) return cmd_generate_channels(gen_o, gen_out);
    if (*solve)
      return cmd_solve(solve_o, solve_method, solve_out, solve_max_iters,
                       solve_tol, solve_alpha, solve_momentum);
    if (*sweep)
      return cmd_sweep(sweep_o, sweep_experiment, sweep_out, sweep_seeds,
                       sweep_methods, sweep_ne, sweep_k, sweep_speeds);
    if (*grad)
      return cmd_gradcheck(grad_o, grad_points, grad_step, grad_threshold);
    if (*grid)
      return cmd_gridcheck(grid_o, grid_restarts, grid_points, grid_threshold);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

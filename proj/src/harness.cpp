#include "vanetsec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "vanetsec/channel.hpp"
#include "vanetsec/csv.hpp"
#include "vanetsec/errors.hpp"
#include "vanetsec/phy.hpp"
#include "vanetsec/sca.hpp"

namespace vanetsec {

std::string ExperimentCell::id() const {
  std::ostringstream s;
  s << "M" << M << "_K" << K << "_Nt" << Nt << "_Ne" << Ne << "_v"
    << static_cast<long long>(std::llround(speed_kmh));
  return s.str();
}

void ExperimentSpec::validate() const {
  if (cells.empty()) throw ConfigError("experiment grid must be non-empty");
  if (seeds < 1) throw ConfigError("experiment needs seeds >= 1");
  if (methods.empty()) throw ConfigError("experiment needs >= 1 method");
  for (const auto& m : methods)
    if (m != "sca" && m != "fista" && m != "fista-l")
      throw ConfigError("unknown method '" + m + "'");
}

namespace {

ScenarioConfig cell_config(const ExperimentCell& cell,
                           const ScenarioConfig& base) {
  ScenarioConfig cfg = base;
  cfg.M = cell.M;
  cfg.K = cell.K;
  cfg.Nt = cell.Nt;
  cfg.Ne = cell.Ne;
  cfg.speed_kmh = cell.speed_kmh;
  cfg.validate();
  return cfg;
}

}  // namespace

ResultRow solve_cell(const ExperimentCell& cell, const ScenarioConfig& base,
                     const std::string& method, std::uint64_t seed,
                     SolveTrace* trace_out) {
  const ScenarioConfig cfg = cell_config(cell, base);
  const InterferenceTopology topo = build_topology(cfg);
  const ChannelRealization ch = draw_channels(cfg, topo, seed);
  const EveCombiner w = eve_combiner(ch, cfg);
  const PowerAllocation p0 =
      PowerAllocation::Constant(cfg.K, cfg.M, 0.5 * cfg.p_max);

  PowerAllocation p;
  SolveTrace trace;
  if (method == "sca") {
    std::tie(p, trace) = solve_sca(p0, ch, topo, w, cfg);
  } else {
    FistaSettings st;
    st.use_linesearch = (method == "fista-l");
    std::tie(p, trace) = solve_fista(p0, ch, topo, w, cfg, st);
  }

  ResultRow row;
  row.scenario_id = cell.id();
  row.method = method;
  row.seed = seed;
  row.objective = trace.objective_per_iter.back();
  row.per_user_secrecy = row.objective / cfg.K;
  row.iters = trace.iters;
  row.wall_time_s = trace.wall_time_s;
  if (trace_out) *trace_out = std::move(trace);
  return row;
}

void write_trace_csv(const SolveTrace& trace, std::ostream& out) {
  out << "iter,objective_bits_per_s,step_size,cum_time_s\n";
  for (std::size_t i = 0; i < trace.objective_per_iter.size(); ++i)
    out << i << ',' << fmt_double(trace.objective_per_iter[i]) << ','
        << fmt_double(trace.step_per_iter[i]) << ','
        << fmt_double(trace.cum_time_s[i]) << '\n';
}

namespace {

std::vector<ResultRow> run_grid(const ExperimentSpec& spec,
                                bool write_traces) {
  spec.validate();
  if (!spec.out_dir.empty())
    std::filesystem::create_directories(spec.out_dir);
  std::vector<ResultRow> rows;
  for (const auto& cell : spec.cells)
    for (int s = 0; s < spec.seeds; ++s) {
      const std::uint64_t seed = spec.seed0 + static_cast<std::uint64_t>(s);
      for (const auto& method : spec.methods) {
        SolveTrace trace;
        try {
          rows.push_back(solve_cell(cell, spec.base, method, seed, &trace));
        } catch (const SolverError& e) {
          // a failed cell must not abort the sweep
          std::cerr << "cell " << cell.id() << " method " << method
                    << " seed " << seed << " failed: " << e.what() << "\n";
          continue;
        }
        if (write_traces && !spec.out_dir.empty()) {
          const std::string path = spec.out_dir + "/trace_" + cell.id() + "_" +
                                   method + "_seed" + std::to_string(seed) +
                                   ".csv";
          std::ofstream f(path);
          if (!f) throw ConfigError("cannot write trace file: " + path);
          write_trace_csv(trace, f);
        }
      }
    }
  if (!spec.out_dir.empty()) {
    {
      std::ofstream f(spec.out_dir + "/results.csv");
      if (!f) throw ConfigError("cannot write results.csv");
      write_results_csv(rows, f);
    }
    {
      std::ofstream f(spec.out_dir + "/summary.csv");
      if (!f) throw ConfigError("cannot write summary.csv");
      write_summary_csv(rows, f);
    }
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_convergence(const ExperimentSpec& spec) {
  return run_grid(spec, /*write_traces=*/true);
}

std::vector<ResultRow> run_runtime_table(const ExperimentSpec& spec) {
  auto rows = run_grid(spec, /*write_traces=*/false);
  if (!spec.out_dir.empty()) {
    // speedup ratios of the second-order method over each first-order one
    auto sums = summarize(rows);
    const auto mean_time = [&](const std::string& id,
                               const std::string& method) {
      for (const auto& s : sums)
        if (s.scenario_id == id && s.method == method)
          return s.mean_wall_time_s;
      return -1.0;
    };
    std::ofstream f(spec.out_dir + "/ratios.csv");
    if (!f) throw ConfigError("cannot write ratios.csv");
    f << "scenario_id,sca_over_fista,sca_over_fista_l\n";
    for (const auto& cell : spec.cells) {
      const double ts = mean_time(cell.id(), "sca");
      const double tf = mean_time(cell.id(), "fista");
      const double tl = mean_time(cell.id(), "fista-l");
      if (ts < 0) continue;
      f << cell.id() << ',' << (tf > 0 ? fmt_double(ts / tf) : "")
        << ',' << (tl > 0 ? fmt_double(ts / tl) : "") << '\n';
    }
  }
  return rows;
}

std::vector<ResultRow> run_ne_sweep(const ExperimentSpec& spec) {
  return run_grid(spec, /*write_traces=*/false);
}

double grid_search_best(const ChannelRealization& ch,
                        const InterferenceTopology& topo, const EveCombiner& w,
                        const ScenarioConfig& cfg, int points_per_dim,
                        double epsilon_p) {
  if (points_per_dim < 2) throw ConfigError("grid needs >= 2 points per dim");
  const int dims = ch.K * ch.M;
  double combos = 1.0;
  for (int d = 0; d < dims; ++d) {
    combos *= points_per_dim;
    if (combos > 5e7)
      throw ConfigError("grid search too large: " + std::to_string(dims) +
                        " dims at " + std::to_string(points_per_dim) +
                        " points each");
  }
  const double eps = epsilon_p > 0 ? epsilon_p : 1e-12 * cfg.p_max;
  std::vector<double> levels(points_per_dim);
  for (int i = 0; i < points_per_dim; ++i)
    levels[i] = eps + (cfg.p_max - eps) * i / (points_per_dim - 1);

  const LinkGains lg = make_link_gains(ch, topo, w, cfg);
  PowerAllocation p(ch.K, ch.M);
  std::vector<int> idx(dims, 0);
  for (int d = 0; d < dims; ++d) p(d % ch.K, d / ch.K) = levels[0];
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    const double r = sum_secrecy_rate(p, lg);
    if (r > best) best = r;
    int d = 0;
    for (; d < dims; ++d) {
      if (++idx[d] < points_per_dim) {
        p(d % ch.K, d / ch.K) = levels[idx[d]];
        break;
      }
      idx[d] = 0;
      p(d % ch.K, d / ch.K) = levels[0];
    }
    if (d == dims) break;
  }
  return best;
}

double best_of_restarts(const std::string& method,
                        const ChannelRealization& ch,
                        const InterferenceTopology& topo, const EveCombiner& w,
                        const ScenarioConfig& cfg, int restarts,
                        std::uint64_t seed) {
  const double eps = 1e-12 * cfg.p_max;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    PowerAllocation p0(cfg.K, cfg.M);
    if (r == 0) {
      p0.setConstant(0.5 * cfg.p_max);
    } else {
      LinkRng rng(substream_seed(seed, 77, r, -1, -1));
      for (int m = 0; m < cfg.M; ++m)
        for (int k = 0; k < cfg.K; ++k)
          p0(k, m) = eps + rng.uniform01() * (cfg.p_max - eps);
    }
    SolveTrace trace;
    PowerAllocation p;
    if (method == "sca") {
      std::tie(p, trace) = solve_sca(p0, ch, topo, w, cfg);
    } else {
      FistaSettings st;
      st.use_linesearch = (method == "fista-l");
      std::tie(p, trace) = solve_fista(p0, ch, topo, w, cfg, st);
    }
    best = std::max(best, trace.objective_per_iter.back());
  }
  return best;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "scenario_id,method,seed,objective_bits_per_s,per_user_secrecy_bits_"
         "per_s,iters,wall_time_s\n";
  for (const auto& r : rows)
    out << r.scenario_id << ',' << r.method << ',' << r.seed << ','
        << fmt_double(r.objective) << ',' << fmt_double(r.per_user_secrecy)
        << ',' << r.iters << ',' << fmt_double(r.wall_time_s) << '\n';
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  // keyed by (scenario, method) in first-seen order
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::map<std::size_t, std::vector<const ResultRow*>> bucket;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.scenario_id, r.method);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back(SummaryRow{r.scenario_id, r.method, 0, 0, 0, 0, 0, 0, 0});
    }
    bucket[it->second].push_back(&r);
  }
  for (auto& [idx, group] : bucket) {
    SummaryRow& s = out[idx];
    s.n = static_cast<int>(group.size());
    double so = 0, su = 0, si = 0, st = 0;
    for (const auto* r : group) {
      so += r->objective;
      su += r->per_user_secrecy;
      si += r->iters;
      st += r->wall_time_s;
    }
    s.mean_objective = so / s.n;
    s.mean_per_user = su / s.n;
    s.mean_iters = si / s.n;
    s.mean_wall_time_s = st / s.n;
    double vo = 0, vu = 0;
    for (const auto* r : group) {
      vo += (r->objective - s.mean_objective) * (r->objective - s.mean_objective);
      vu += (r->per_user_secrecy - s.mean_per_user) *
            (r->per_user_secrecy - s.mean_per_user);
    }
    s.std_objective = s.n > 1 ? std::sqrt(vo / (s.n - 1)) : 0.0;
    s.std_per_user = s.n > 1 ? std::sqrt(vu / (s.n - 1)) : 0.0;
  }
  return out;
}

void write_summary_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "scenario_id,method,n,mean_objective_bits_per_s,std_objective_bits_"
         "per_s,mean_per_user_bits_per_s,std_per_user_bits_per_s,mean_iters,"
         "mean_wall_time_s\n";
  for (const auto& s : summarize(rows))
    out << s.scenario_id << ',' << s.method << ',' << s.n << ','
        << fmt_double(s.mean_objective) << ',' << fmt_double(s.std_objective)
        << ',' << fmt_double(s.mean_per_user) << ','
        << fmt_double(s.std_per_user) << ',' << fmt_double(s.mean_iters) << ','
        << fmt_double(s.mean_wall_time_s) << '\n';
}

}  // namespace vanetsec

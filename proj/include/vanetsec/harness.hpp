#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vanetsec/fista.hpp"
#include "vanetsec/scenario.hpp"

namespace vanetsec {

/// One grid point of an experiment: scenario dimensions plus speed.
struct ExperimentCell {
  int M = 4, K = 4, Nt = 4, Ne = 2;
  double speed_kmh = 50.0;
  std::string id() const;  // e.g. "M4_K4_Nt4_Ne2_v50"
};

struct ExperimentSpec {
  std::vector<ExperimentCell> cells;
  std::vector<std::string> methods;  // subset of {"sca","fista","fista-l"}
  int seeds = 3;
  std::uint64_t seed0 = 1;           // seeds used: seed0 .. seed0+seeds-1
  std::string out_dir;               // empty = no files, rows only
  ScenarioConfig base;               // remaining physical constants

  void validate() const;  // throws ConfigError
};

struct ResultRow {
  std::string scenario_id;
  std::string method;
  std::uint64_t seed = 0;
  double objective = 0.0;          // bits/s
  double per_user_secrecy = 0.0;   // bits/s, objective / K
  int iters = 0;
  double wall_time_s = 0.0;
};

/// Builds cfg for one cell (other constants from base) and solves with one
/// method. Channels depend only on (cfg, seed), so methods sharing a seed
/// share the realization.
ResultRow solve_cell(const ExperimentCell& cell, const ScenarioConfig& base,
                     const std::string& method, std::uint64_t seed,
                     SolveTrace* trace_out = nullptr);

/// Convergence experiment: one trace CSV per (cell, method, seed), written
/// under spec.out_dir as trace_<id>_<method>_seed<seed>.csv.
std::vector<ResultRow> run_convergence(const ExperimentSpec& spec);

/// Runtime experiment: rows for every (cell, method, seed); writers below
/// produce results.csv and summary.csv with per-cell means.
std::vector<ResultRow> run_runtime_table(const ExperimentSpec& spec);

/// Eavesdropper-strength sweep: same row schema, typically one first-order
/// method over a (Ne, K, speed) grid with many seeds.
std::vector<ResultRow> run_ne_sweep(const ExperimentSpec& spec);

void write_trace_csv(const SolveTrace& trace, std::ostream& out);
void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);

/// Per (scenario, method) means and standard deviations over seeds.
void write_summary_csv(const std::vector<ResultRow>& rows, std::ostream& out);

/// Exhaustive grid search over the power box: points_per_dim levels per
/// cell, linspace from epsilon_p to p_max, every combination evaluated.
/// Guarded against more than ~5e7 combinations; tiny K*M only.
double grid_search_best(const ChannelRealization& ch,
                        const InterferenceTopology& topo, const EveCombiner& w,
                        const ScenarioConfig& cfg, int points_per_dim,
                        double epsilon_p = 0.0);

/// Best final objective over restarts: p0 = p_max/2 first, then uniform
/// draws over the box from substreams of seed. method as in ExperimentSpec.
double best_of_restarts(const std::string& method,
                        const ChannelRealization& ch,
                        const InterferenceTopology& topo, const EveCombiner& w,
                        const ScenarioConfig& cfg, int restarts,
                        std::uint64_t seed);

/// Aggregate helper used by the summary writer and the sweeps' consumers.
struct SummaryRow {
  std::string scenario_id, method;
  int n = 0;
  double mean_objective = 0.0, std_objective = 0.0;
  double mean_per_user = 0.0, std_per_user = 0.0;
  double mean_iters = 0.0;
  double mean_wall_time_s = 0.0;
};
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

}  // namespace vanetsec

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "vanetsec/phy.hpp"

namespace vanetsec {

enum class SolveStatus { Converged, MaxIters, StallWarning };

const char* to_string(SolveStatus s);

/// Projected-gradient ascent settings. alpha <= 0 asks the solver to derive
/// the fixed step itself as 0.9/L from a global curvature bound, keeping it
/// strictly below 1/L over the whole box.
struct FistaSettings {
  double alpha = 0.0;        // fixed step, watts per (bits/s per watt)
  double delta = 1e-5;       // sufficient-ascent parameter
  int max_iters = 20000;
  double tol = 1e-5;         // relative objective-change termination
  bool use_linesearch = false;
  bool use_momentum = false;
  double epsilon_p = 0.0;    // strict-positivity floor; <=0 -> 1e-12 * p_max

  // observation hook, called with every accepted iterate
  std::function<void(const PowerAllocation&)> on_iterate;
};

/// Per-iteration record of one solve. Entry 0 of objective_per_iter is the
/// initial point; step_per_iter[0] is 0.
struct SolveTrace {
  std::vector<double> objective_per_iter;  // bits/s
  std::vector<double> step_per_iter;       // accepted step size (FISTA) or
                                           // iterate displacement norm (SCA)
  std::vector<double> cum_time_s;
  double wall_time_s = 0.0;
  int iters = 0;
  SolveStatus status = SolveStatus::MaxIters;
};

/// Euclidean projection onto the box [epsilon_p, p_max]^(K*M); exact
/// elementwise minimizer of ||p - x||^2.
PowerAllocation project_box(const Eigen::ArrayXXd& x, double p_max,
                            double epsilon_p);

/// Projected gradient ascent, optionally with per-iteration backtracking
/// line search (largest step from 1, halving, accepted when
/// R(p_new) >= R(p_old) + delta*||p_new - p_old||^2) and optional
/// extrapolation. Every iterate is feasible; with line search the trace is
/// non-decreasing.
std::pair<PowerAllocation, SolveTrace> solve_fista(
    const PowerAllocation& p0, const ChannelRealization& ch,
    const InterferenceTopology& topo, const EveCombiner& w,
    const ScenarioConfig& cfg, const FistaSettings& settings);

}  // namespace vanetsec

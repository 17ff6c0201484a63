#include "vanetsec/fista.hpp"

#include <chrono>
#include <cmath>

#include "vanetsec/errors.hpp"
#include "vanetsec/gradient.hpp"

namespace vanetsec {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::StallWarning: return "StallWarning";
  }
  return "?";
}

PowerAllocation project_box(const Eigen::ArrayXXd& x, double p_max,
                            double epsilon_p) {
  return x.max(epsilon_p).min(p_max);
}

namespace {

constexpr double kAlphaMin = 1e-20;

struct Backtrack {
  bool ok = false;
  double alpha = 0.0;
  PowerAllocation cand;
  double objective = 0.0;  // clipped sum secrecy rate at cand
};

// Largest step from alpha0 (halving) whose projected candidate satisfies the
// sufficient-ascent test on the true clipped objective.
Backtrack backtrack_step(const PowerAllocation& p, double r_clip,
                         const GradientVector& g, const LinkGains& lg,
                         double p_max, double eps_p, double delta,
                         double alpha0) {
  Backtrack out;
  for (double a = alpha0; a >= kAlphaMin; a *= 0.5) {
    PowerAllocation cand = project_box(p + a * g, p_max, eps_p);
    const double rc = sum_secrecy_rate(cand, lg);
    if (!std::isfinite(rc))
      throw NonFiniteObjective("line search produced non-finite objective");
    const double dist2 = (cand - p).matrix().squaredNorm();
    if (rc >= r_clip + delta * dist2) {
      out.ok = true;
      out.alpha = a;
      out.cand = std::move(cand);
      out.objective = rc;
      return out;
    }
  }
  return out;
}

}  // namespace

std::pair<PowerAllocation, SolveTrace> solve_fista(
    const PowerAllocation& p0, const ChannelRealization& ch,
    const InterferenceTopology& topo, const EveCombiner& w,
    const ScenarioConfig& cfg, const FistaSettings& settings) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  const LinkGains lg = make_link_gains(ch, topo, w, cfg);
  const double eps_p =
      settings.epsilon_p > 0 ? settings.epsilon_p : 1e-12 * cfg.p_max;

  PowerAllocation p = project_box(p0, cfg.p_max, eps_p);
  double r_clip = sum_secrecy_rate(p, lg);
  double r_margin = sum_secrecy_margin(p, lg);
  if (!std::isfinite(r_clip) || !std::isfinite(r_margin))
    throw NonFiniteObjective("objective non-finite at the starting point");

  SolveTrace trace;
  trace.objective_per_iter.push_back(r_clip);
  trace.step_per_iter.push_back(0.0);
  trace.cum_time_s.push_back(elapsed());
  trace.status = SolveStatus::MaxIters;

  // Fixed step strictly below 1/L, from the global curvature bound with
  // every denominator floored at its exact minimum over the box.
  double alpha_fixed = settings.alpha;
  if (!settings.use_linesearch && alpha_fixed <= 0)
    alpha_fixed = 0.9 / std::max(gradient_lipschitz_bound(lg), 1e-300);

  PowerAllocation p_prev = p;  // momentum memory
  double t_momentum = 1.0;

  for (int n = 1; n <= settings.max_iters; ++n) {
    PowerAllocation base = p;
    if (settings.use_momentum && n > 1) {
      const double t_next =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      const double beta = (t_momentum - 1.0) / t_next;
      t_momentum = t_next;
      base = project_box(p + beta * (p - p_prev), cfg.p_max, eps_p);
    }
    const GradientVector g =
        grad_sum_secrecy_margin_cached(base, lg, cfg.p_max);

    double alpha_used;
    PowerAllocation p_next;
    double r_clip_next;
    bool converged;
    if (settings.use_linesearch) {
      Backtrack bt = backtrack_step(p, r_clip, g, lg, cfg.p_max, eps_p,
                                    settings.delta, 1.0);
      if (!bt.ok) {
        // no step along this direction improves the clipped objective
        trace.status = SolveStatus::StallWarning;
        break;
      }
      alpha_used = bt.alpha;
      p_next = std::move(bt.cand);
      r_clip_next = bt.objective;
      converged = std::abs(r_clip_next - r_clip) <=
                  settings.tol * std::max(std::abs(r_clip), 1.0);
    } else {
      alpha_used = alpha_fixed;
      p_next = project_box(base + alpha_fixed * g, cfg.p_max, eps_p);
      r_clip_next = sum_secrecy_rate(p_next, lg);
      const double r_margin_next = sum_secrecy_margin(p_next, lg);
      if (!std::isfinite(r_clip_next) || !std::isfinite(r_margin_next))
        throw NonFiniteObjective("objective non-finite at iterate " +
                                 std::to_string(n));
      // the clipped sum is flat wherever every cell is clipped, so the
      // smooth margin drives termination for the fixed-step variant
      converged = std::abs(r_margin_next - r_margin) <=
                  settings.tol * std::max(std::abs(r_margin), 1.0);
      r_margin = r_margin_next;
    }

    trace.objective_per_iter.push_back(r_clip_next);
    trace.step_per_iter.push_back(alpha_used);
    trace.cum_time_s.push_back(elapsed());
    trace.iters = n;

    p_prev = p;
    p = std::move(p_next);
    r_clip = r_clip_next;
    if (settings.on_iterate) settings.on_iterate(p);
    if (converged) {
      trace.status = SolveStatus::Converged;
      break;
    }
  }

  trace.wall_time_s = elapsed();
  return {std::move(p), std::move(trace)};
}

}  // namespace vanetsec

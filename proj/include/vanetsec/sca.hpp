#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "vanetsec/fista.hpp"
#include "vanetsec/phy.hpp"

namespace vanetsec {

/// Convex upper bound of x*y around (xn, yn):
///   x*y <= 1/4 [ (x+y)^2 - 2(x-y)(xn-yn) + (xn-yn)^2 ]
/// valid for all reals, tight at (xn, yn).
double bilinear_upper(double x, double y, double xn, double yn);

/// Concave lower bound of x*y around (xn, yn):
///   x*y >= 1/4 [ 2(x+y)(xn+yn) - (xn+yn)^2 - (x-y)^2 ]
/// valid for all reals, tight at (xn, yn).
double bilinear_lower(double x, double y, double xn, double yn);

/// Linearization constants of one surrogate, per cell. Slacks are per-Hz
/// (rates divided by the RB bandwidth) to keep the exponentials tame.
struct SurrogatePoint {
  Eigen::ArrayXXd x1n;      // legit-side SINR at expansion, 2^zeta_n - 1
  Eigen::ArrayXXd y1n;      // legit-side interference-plus-noise at expansion
  Eigen::ArrayXXd x2n;      // eve-side SINR at expansion, 2^gamma_n - 1
  Eigen::ArrayXXd y2n;      // eve-side denominator (constant in p)
  Eigen::ArrayXXd zeta_n;   // per-Hz legit rate at expansion
  Eigen::ArrayXXd gamma_n;  // per-Hz eve rate at expansion
};

/// Residuals (<= 0 when satisfied) of the per-cell surrogate constraints.
struct CellResiduals {
  double legit_quad;    // quadratic upper bound of e1 * y1 vs p*|g|^2
  double eve_quad;      // p*|w^H h_ve|^2 vs concave lower bound of x2 * y2
  double exp_coupling;  // 2^zeta - 1 - e1
  double zeta_nonneg;
  double gamma_nonneg;
  double p_lower;
  double p_upper;
  double worst() const;
};

/// One convex inner approximation built around an expansion point.
/// Decision variables per cell: p, zeta, gamma, and the auxiliary e1 that
/// stands in for 2^zeta - 1 on the convex side. Blocks are independent
/// across resource blocks; the objective is sum(zeta - gamma), reported
/// rates scale by the RB bandwidth.
struct SubproblemModel {
  int K = 0, M = 0;
  double p_max = 0.0, epsilon_p = 0.0, sigma2 = 1.0, rb_w = 0.0;

  SurrogatePoint point;

  // per-cell constants (from LinkGains)
  Eigen::ArrayXXd gain_v;                // |g|^2
  std::vector<Eigen::MatrixXd> gain_vv;  // per m: |h_vv|^2
  Eigen::ArrayXXd cue_interf_v;          // cue_power * |h_cv|^2
  Eigen::ArrayXXd gain_e;                // |w^H h_ve|^2
  Eigen::ArrayXXd denom_e;               // constant y2

  // expansion-point variables
  Eigen::ArrayXXd p_n, e1_n;

  /// y1(k,m; p): interference-plus-noise seen by the legit receiver.
  double legit_denominator(int k, int m, const PowerAllocation& p) const;

  CellResiduals cell_residuals(int k, int m, const PowerAllocation& p,
                               double zeta, double gamma, double e1) const;

  /// Worst violation over all cells at the expansion point itself.
  double expansion_violation() const;
};

struct ScaSettings {
  double outer_tol = 1e-5;   // relative margin change at a small step
  int max_outer = 2000;
  double tol_kkt = 1e-8;     // inner stationarity residual
  double epsilon_p = 0.0;    // <= 0 -> 1e-12 * p_max
};

struct SubproblemSolution {
  PowerAllocation p;
  Eigen::ArrayXXd zeta, gamma, e1;   // per-Hz slacks at the optimum
  double objective_per_hz = 0.0;     // sum(zeta - gamma)
  double kkt_residual = 0.0;         // Newton-decrement suboptimality bound
                                     // at the final barrier parameter,
                                     // objective (per-Hz) units
  int newton_iters = 0;
};

/// Builds the surrogate around p_n; throws InfeasibleExpansion if the
/// expansion point violates its own model beyond 1e-9.
SubproblemModel build_surrogate(const PowerAllocation& p_n,
                                const ChannelRealization& ch,
                                const InterferenceTopology& topo,
                                const EveCombiner& w, const ScenarioConfig& cfg,
                                double epsilon_p = 0.0);

/// Log-barrier interior-point solve of the surrogate: damped Newton
/// centering, barrier parameter x10 per round from 1 to 1e8, warm-started
/// from the expansion point after a 1e-6 slack relaxation. Throws
/// BarrierDivergence / NumericalIllConditioning on failure.
SubproblemSolution solve_subproblem(const SubproblemModel& model,
                                    double tol_kkt = 1e-8);

/// Outer loop: rebuild + resolve until the inner margin's relative change
/// drops below outer_tol at a small iterate displacement. The trace records
/// the best true (clipped) sum secrecy rate found so far, never the
/// surrogate value, and the returned allocation is that incumbent.
std::pair<PowerAllocation, SolveTrace> solve_sca(
    const PowerAllocation& p0, const ChannelRealization& ch,
    const InterferenceTopology& topo, const EveCombiner& w,
    const ScenarioConfig& cfg, const ScaSettings& settings = {});

}  // namespace vanetsec

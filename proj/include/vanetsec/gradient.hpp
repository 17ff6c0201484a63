#pragma once

#include <Eigen/Dense>

#include "vanetsec/phy.hpp"

namespace vanetsec {

/// K x M gradient of the sum secrecy rate w.r.t. the power grid,
/// bits/s per watt.
using GradientVector = Eigen::ArrayXXd;

/// Closed-form gradient of sum_{k,m} max(C_v - C_e, 0). Cells whose
/// secrecy is clipped to zero contribute nothing (zero subgradient on the
/// clipped side, so the ascent never chases a dead cell). Capacities use
/// log2, hence the 1/ln2 factor on every term.
/// Throws std::invalid_argument when p leaves (0, p_max].
GradientVector grad_sum_secrecy(const PowerAllocation& p,
                                const ChannelRealization& ch,
                                const InterferenceTopology& topo,
                                const EveCombiner& w,
                                const ScenarioConfig& cfg);

GradientVector grad_sum_secrecy_cached(const PowerAllocation& p,
                                       const LinkGains& lg, double p_max);

/// Gradient of the unclipped margin sum(C_v - C_e); every cell contributes
/// regardless of sign. This is the solvers' internal ascent direction.
GradientVector grad_sum_secrecy_margin_cached(const PowerAllocation& p,
                                              const LinkGains& lg,
                                              double p_max);

/// Conservative global bound on the Lipschitz constant of the margin
/// gradient over the power box: per RB, the spectral norms of the rank-one
/// log-curvature terms with every denominator floored at sigma2.
double gradient_lipschitz_bound(const LinkGains& lg);

/// Central-difference gradient with step h (watts), one coordinate at a
/// time. Independent of the closed-form path; used as its oracle.
GradientVector central_diff_gradient(const PowerAllocation& p,
                                     const ChannelRealization& ch,
                                     const InterferenceTopology& topo,
                                     const EveCombiner& w,
                                     const ScenarioConfig& cfg, double h);

/// max over cells of |closed-form - central-difference| /
/// max(|closed-form|, 1e-12).
double finite_diff_check(const PowerAllocation& p, const ChannelRealization& ch,
                         const InterferenceTopology& topo, const EveCombiner& w,
                         const ScenarioConfig& cfg, double h);

}  // namespace vanetsec

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vanetsec/channel.hpp"
#include "vanetsec/scenario.hpp"

namespace vanetsec {

/// K x M grid of VUE transmit powers in watts. Feasible when
/// epsilon_p <= p(k,m) <= p_max elementwise.
using PowerAllocation = Eigen::ArrayXXd;

/// Unit-norm receive vector the eavesdropper applies per (k,m).
struct EveCombiner {
  int K = 0, M = 0, Ne = 0;
  std::vector<Eigen::VectorXcd> w;  // (k,m) row-major

  const Eigen::VectorXcd& at(int k, int m) const {
    return w[static_cast<std::size_t>(k) * M + m];
  }
};

/// Per-cell SINRs, capacities and secrecy rates plus their sum.
/// secrecy = max(cap_v - cap_e, 0); all capacities in bits/s.
struct SecrecyEvaluation {
  Eigen::ArrayXXd sinr_v, sinr_e;   // K x M
  Eigen::ArrayXXd cap_v, cap_e;    // bits/s
  Eigen::ArrayXXd secrecy;         // bits/s, clipped at 0
  double sum_secrecy = 0.0;        // bits/s
};

/// Real per-cell gains derived once per (channel, combiner); everything the
/// objective, gradient and surrogate need without touching complex numbers
/// again. Interference entries for out-of-range pairs are zero.
struct LinkGains {
  int K = 0, M = 0;
  double sigma2 = 1.0;   // noise power
  double cue_power = 1.0;
  double rb_w = 0.0;     // per-RB bandwidth, Hz
  Eigen::ArrayXXd gain_v;               // |g|^2
  std::vector<Eigen::MatrixXd> gain_vv; // per m: |h_vv|^2, diag 0
  Eigen::ArrayXXd cue_interf_v;         // cue_power * |h_cv|^2
  Eigen::ArrayXXd gain_e;               // |w^H h_ve|^2
  Eigen::ArrayXXd denom_e;              // cue_power * |w^H h_ce|^2 + sigma2
};

LinkGains make_link_gains(const ChannelRealization& ch,
                          const InterferenceTopology& topo,
                          const EveCombiner& w, const ScenarioConfig& cfg);

/// Optimal eavesdropper combiner: for each (k,m) the dominant generalized
/// eigenvector of the rank-one pencil, computed in closed form as the
/// whitened wiretap vector (cue_power*h_ce*h_ce^H + sigma2*I)^{-1} h_ve,
/// normalized. Exact for rank-one targets.
EveCombiner eve_combiner(const ChannelRealization& ch,
                         const ScenarioConfig& cfg);

/// Legitimate receiver SINR per cell.
Eigen::ArrayXXd sinr_vue(const PowerAllocation& p, const ChannelRealization& ch,
                         const InterferenceTopology& topo,
                         const ScenarioConfig& cfg);

/// Eavesdropper SINR per cell under combiner w.
Eigen::ArrayXXd sinr_eve(const PowerAllocation& p, const ChannelRealization& ch,
                         const EveCombiner& w, const ScenarioConfig& cfg);

/// Full evaluation: capacities, secrecy rates, sum objective.
SecrecyEvaluation evaluate(const PowerAllocation& p,
                           const ChannelRealization& ch,
                           const InterferenceTopology& topo,
                           const EveCombiner& w, const ScenarioConfig& cfg);

// Fast paths on precomputed gains (used by the solvers; same math).
Eigen::ArrayXXd sinr_vue_cached(const PowerAllocation& p, const LinkGains& lg);
Eigen::ArrayXXd sinr_eve_cached(const PowerAllocation& p, const LinkGains& lg);
double sum_secrecy_rate(const PowerAllocation& p, const LinkGains& lg);

/// Unclipped sum of per-cell secrecy margins, sum(C_v - C_e), bits/s.
/// This is the smooth objective the solvers climb internally; cells whose
/// margin is negative are clipped only in reporting.
double sum_secrecy_margin(const PowerAllocation& p, const LinkGains& lg);

/// Effective reuse decision recovered from a solution: 1 iff the cell keeps
/// more than the strict-positivity floor.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> effective_reuse(
    const PowerAllocation& p, double epsilon_p);

}  // namespace vanetsec

#include "vanetsec/phy.hpp"

#include <cmath>

#include "vanetsec/errors.hpp"

namespace vanetsec {

namespace {

constexpr double kInvLn2 = 1.4426950408889634074;

// single source of truth for per-cell SINRs and capacities
inline void cell_rates(const PowerAllocation& p, const LinkGains& lg, int k,
                       int m, double& sv, double& se, double& cv, double& ce) {
  double denom = lg.cue_interf_v(k, m) + lg.sigma2;
  for (int k2 = 0; k2 < lg.K; ++k2)
    if (k2 != k) denom += p(k2, m) * lg.gain_vv[m](k, k2);
  sv = p(k, m) * lg.gain_v(k, m) / denom;
  se = p(k, m) * lg.gain_e(k, m) / lg.denom_e(k, m);
  cv = lg.rb_w * kInvLn2 * std::log1p(sv);
  ce = lg.rb_w * kInvLn2 * std::log1p(se);
}

}  // namespace

LinkGains make_link_gains(const ChannelRealization& ch,
                          const InterferenceTopology& topo,
                          const EveCombiner& w, const ScenarioConfig& cfg) {
  LinkGains lg;
  lg.K = ch.K;
  lg.M = ch.M;
  lg.sigma2 = cfg.noise_power;
  lg.cue_power = cfg.cue_power;
  lg.rb_w = per_rb_bandwidth(cfg);

  lg.gain_v = ch.g.array().abs2();
  lg.gain_vv.assign(ch.M, Eigen::MatrixXd::Zero(ch.K, ch.K));
  for (int m = 0; m < ch.M; ++m)
    for (int k = 0; k < ch.K; ++k)
      for (int k2 = 0; k2 < ch.K; ++k2) {
        if (k == k2 || !topo.inter_vue_active(k, k2)) continue;
        lg.gain_vv[m](k, k2) = std::norm(ch.h_vv[m](k, k2));
      }
  lg.cue_interf_v = cfg.cue_power * ch.h_cv.array().abs2();

  lg.gain_e.resize(ch.K, ch.M);
  lg.denom_e.resize(ch.K, ch.M);
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m) {
      const auto& wv = w.at(k, m);
      lg.gain_e(k, m) = std::norm(wv.dot(ch.wiretap(k, m)));
      lg.denom_e(k, m) =
          cfg.cue_power * std::norm(wv.dot(ch.h_ce[m])) + cfg.noise_power;
    }
  return lg;
}

EveCombiner eve_combiner(const ChannelRealization& ch,
                         const ScenarioConfig& cfg) {
  EveCombiner comb;
  comb.K = ch.K;
  comb.M = ch.M;
  comb.Ne = ch.Ne;
  comb.w.resize(static_cast<std::size_t>(ch.K) * ch.M);
  for (int m = 0; m < ch.M; ++m) {
    const Eigen::VectorXcd& a = ch.h_ce[m];
    // Sherman-Morrison form of (cue_power*a*a^H + sigma2*I)^{-1} b, up to
    // an irrelevant positive factor; exact for the rank-one pencil
    const double denom = cfg.noise_power + cfg.cue_power * a.squaredNorm();
    for (int k = 0; k < ch.K; ++k) {
      const Eigen::VectorXcd& b = ch.wiretap(k, m);
      Eigen::VectorXcd v = b - a * (cfg.cue_power * a.dot(b) / denom);
      const double n = v.norm();
      if (n < 1e-300) {
        // zero wiretap channel: any unit vector yields zero eve SINR
        v = Eigen::VectorXcd::Zero(ch.Ne);
        v(0) = 1.0;
      } else {
        v /= n;
      }
      comb.w[static_cast<std::size_t>(k) * ch.M + m] = std::move(v);
    }
  }
  return comb;
}

Eigen::ArrayXXd sinr_vue_cached(const PowerAllocation& p, const LinkGains& lg) {
  Eigen::ArrayXXd s(lg.K, lg.M);
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k) {
      double sv, se, cv, ce;
      cell_rates(p, lg, k, m, sv, se, cv, ce);
      s(k, m) = sv;
    }
  return s;
}

Eigen::ArrayXXd sinr_eve_cached(const PowerAllocation& p, const LinkGains& lg) {
  return p * lg.gain_e / lg.denom_e;
}

double sum_secrecy_rate(const PowerAllocation& p, const LinkGains& lg) {
  double sum = 0.0;
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k) {
      double sv, se, cv, ce;
      cell_rates(p, lg, k, m, sv, se, cv, ce);
      const double diff = cv - ce;
      if (diff > 0) sum += diff;
    }
  return sum;
}

double sum_secrecy_margin(const PowerAllocation& p, const LinkGains& lg) {
  double sum = 0.0;
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k) {
      double sv, se, cv, ce;
      cell_rates(p, lg, k, m, sv, se, cv, ce);
      sum += cv - ce;
    }
  return sum;
}

Eigen::ArrayXXd sinr_vue(const PowerAllocation& p, const ChannelRealization& ch,
                         const InterferenceTopology& topo,
                         const ScenarioConfig& cfg) {
  Eigen::ArrayXXd s(ch.K, ch.M);
  for (int m = 0; m < ch.M; ++m)
    for (int k = 0; k < ch.K; ++k) {
      double denom = cfg.cue_power * std::norm(ch.h_cv(k, m)) +
                     cfg.noise_power;
      for (int k2 = 0; k2 < ch.K; ++k2)
        if (k2 != k && topo.inter_vue_active(k, k2))
          denom += p(k2, m) * std::norm(ch.h_vv[m](k, k2));
      s(k, m) = p(k, m) * std::norm(ch.g(k, m)) / denom;
    }
  return s;
}

Eigen::ArrayXXd sinr_eve(const PowerAllocation& p, const ChannelRealization& ch,
                         const EveCombiner& w, const ScenarioConfig& cfg) {
  Eigen::ArrayXXd s(ch.K, ch.M);
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m) {
      const auto& wv = w.at(k, m);
      const double num = p(k, m) * std::norm(wv.dot(ch.wiretap(k, m)));
      const double den = cfg.cue_power * std::norm(wv.dot(ch.h_ce[m])) +
                         cfg.noise_power * wv.squaredNorm();
      s(k, m) = num / den;
    }
  return s;
}

SecrecyEvaluation evaluate(const PowerAllocation& p,
                           const ChannelRealization& ch,
                           const InterferenceTopology& topo,
                           const EveCombiner& w, const ScenarioConfig& cfg) {
  const LinkGains lg = make_link_gains(ch, topo, w, cfg);
  SecrecyEvaluation ev;
  ev.sinr_v.resize(lg.K, lg.M);
  ev.sinr_e.resize(lg.K, lg.M);
  ev.cap_v.resize(lg.K, lg.M);
  ev.cap_e.resize(lg.K, lg.M);
  ev.secrecy.resize(lg.K, lg.M);
  double sum = 0.0;
  // fixed summation order: m outer, k inner
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k) {
      double sv, se, cv, ce;
      cell_rates(p, lg, k, m, sv, se, cv, ce);
      ev.sinr_v(k, m) = sv;
      ev.sinr_e(k, m) = se;
      ev.cap_v(k, m) = cv;
      ev.cap_e(k, m) = ce;
      const double diff = cv - ce;
      ev.secrecy(k, m) = diff > 0 ? diff : 0.0;
      sum += ev.secrecy(k, m);
    }
  ev.sum_secrecy = sum;
  return ev;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> effective_reuse(
    const PowerAllocation& p, double epsilon_p) {
  return p > epsilon_p;
}

}  // namespace vanetsec

#include "vanetsec/gradient.hpp"

#include <cmath>
#include <stdexcept>

namespace vanetsec {

namespace {
constexpr double kInvLn2 = 1.4426950408889634074;
}

GradientVector grad_sum_secrecy_cached(const PowerAllocation& p,
                                       const LinkGains& lg, double p_max) {
  const double hi = p_max * (1.0 + 1e-12);
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k)
      if (!(p(k, m) > 0.0) || p(k, m) > hi)
        throw std::invalid_argument(
            "grad_sum_secrecy: power outside (0, p_max]");

  GradientVector grad = GradientVector::Zero(lg.K, lg.M);
  const double wln = lg.rb_w * kInvLn2;
  for (int m = 0; m < lg.M; ++m) {
    for (int k = 0; k < lg.K; ++k) {
      // per-cell scalars: A desired power, B interference-plus-noise,
      // C eavesdropped power, D its denominator
      double B = lg.cue_interf_v(k, m) + lg.sigma2;
      for (int k2 = 0; k2 < lg.K; ++k2)
        if (k2 != k) B += p(k2, m) * lg.gain_vv[m](k, k2);
      const double A = p(k, m) * lg.gain_v(k, m);
      const double C = p(k, m) * lg.gain_e(k, m);
      const double D = lg.denom_e(k, m);

      const double diff = std::log1p(A / B) - std::log1p(C / D);
      if (diff <= 0) continue;  // clipped cell: zero subgradient

      grad(k, m) += wln * (lg.gain_v(k, m) / (A + B) - lg.gain_e(k, m) / (C + D));
      for (int i = 0; i < lg.K; ++i) {
        if (i == k) continue;
        const double h2 = lg.gain_vv[m](k, i);
        if (h2 == 0.0) continue;
        grad(i, m) += wln * h2 * (1.0 / (A + B) - 1.0 / B);
      }
    }
  }
  return grad;
}

GradientVector grad_sum_secrecy(const PowerAllocation& p,
                                const ChannelRealization& ch,
                                const InterferenceTopology& topo,
                                const EveCombiner& w,
                                const ScenarioConfig& cfg) {
  return grad_sum_secrecy_cached(p, make_link_gains(ch, topo, w, cfg),
                                 cfg.p_max);
}

GradientVector grad_sum_secrecy_margin_cached(const PowerAllocation& p,
                                              const LinkGains& lg,
                                              double p_max) {
  const double hi = p_max * (1.0 + 1e-12);
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k)
      if (!(p(k, m) > 0.0) || p(k, m) > hi)
        throw std::invalid_argument(
            "grad_sum_secrecy_margin: power outside (0, p_max]");

  GradientVector grad = GradientVector::Zero(lg.K, lg.M);
  const double wln = lg.rb_w * kInvLn2;
  for (int m = 0; m < lg.M; ++m) {
    for (int k = 0; k < lg.K; ++k) {
      double B = lg.cue_interf_v(k, m) + lg.sigma2;
      for (int k2 = 0; k2 < lg.K; ++k2)
        if (k2 != k) B += p(k2, m) * lg.gain_vv[m](k, k2);
      const double A = p(k, m) * lg.gain_v(k, m);
      const double C = p(k, m) * lg.gain_e(k, m);
      const double D = lg.denom_e(k, m);

      grad(k, m) += wln * (lg.gain_v(k, m) / (A + B) - lg.gain_e(k, m) / (C + D));
      for (int i = 0; i < lg.K; ++i) {
        if (i == k) continue;
        const double h2 = lg.gain_vv[m](k, i);
        if (h2 == 0.0) continue;
        grad(i, m) += wln * h2 * (1.0 / (A + B) - 1.0 / B);
      }
    }
  }
  return grad;
}

double gradient_lipschitz_bound(const LinkGains& lg) {
  double worst = 0.0;
  for (int m = 0; m < lg.M; ++m) {
    double sum = 0.0;
    for (int k = 0; k < lg.K; ++k) {
      // every denominator is floored at its exact minimum over the box:
      // the CUE interference never moves and the eve denominator is
      // constant outright
      const double b_min = lg.cue_interf_v(k, m) + lg.sigma2;
      double row2 = 0.0;
      for (int k2 = 0; k2 < lg.K; ++k2)
        if (k2 != k) row2 += lg.gain_vv[m](k, k2) * lg.gain_vv[m](k, k2);
      const double g2 = lg.gain_v(k, m) * lg.gain_v(k, m);
      const double de = lg.denom_e(k, m);
      sum += (g2 + 2.0 * row2) / (b_min * b_min) +
             lg.gain_e(k, m) * lg.gain_e(k, m) / (de * de);
    }
    worst = std::max(worst, sum);
  }
  return lg.rb_w * kInvLn2 * worst;
}

GradientVector central_diff_gradient(const PowerAllocation& p,
                                     const ChannelRealization& ch,
                                     const InterferenceTopology& topo,
                                     const EveCombiner& w,
                                     const ScenarioConfig& cfg, double h) {
  const LinkGains lg = make_link_gains(ch, topo, w, cfg);
  GradientVector fd(p.rows(), p.cols());
  PowerAllocation q = p;
  for (int m = 0; m < lg.M; ++m)
    for (int k = 0; k < lg.K; ++k) {
      const double orig = q(k, m);
      q(k, m) = orig + h;
      const double up = sum_secrecy_rate(q, lg);
      q(k, m) = orig - h;
      const double down = sum_secrecy_rate(q, lg);
      q(k, m) = orig;
      fd(k, m) = (up - down) / (2.0 * h);
    }
  return fd;
}

double finite_diff_check(const PowerAllocation& p, const ChannelRealization& ch,
                         const InterferenceTopology& topo, const EveCombiner& w,
                         const ScenarioConfig& cfg, double h) {
  const GradientVector g = grad_sum_secrecy(p, ch, topo, w, cfg);
  const GradientVector fd = central_diff_gradient(p, ch, topo, w, cfg, h);
  double worst = 0.0;
  for (int m = 0; m < p.cols(); ++m)
    for (int k = 0; k < p.rows(); ++k) {
      const double denom = std::max(std::abs(g(k, m)), 1e-12);
      worst = std::max(worst, std::abs(g(k, m) - fd(k, m)) / denom);
    }
  return worst;
}

}  // namespace vanetsec

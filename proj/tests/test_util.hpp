// Test-only oracles, independent of the library paths they check.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "vanetsec/channel.hpp"
#include "vanetsec/phy.hpp"

namespace oracle {

using vanetsec::ChannelRealization;
using vanetsec::InterferenceTopology;
using vanetsec::PowerAllocation;
using vanetsec::ScenarioConfig;

// Eavesdropper SINR for an arbitrary combiner, straight from the model:
// p |w^H h_ve|^2 / (p_c |w^H h_ce|^2 + sigma2 ||w||^2).
inline double eve_sinr_of(const Eigen::VectorXcd& w,
                          const Eigen::VectorXcd& h_ve,
                          const Eigen::VectorXcd& h_ce, double p,
                          double cue_power, double sigma2) {
  const double num = p * std::norm(w.dot(h_ve));
  const double den =
      cue_power * std::norm(w.dot(h_ce)) + sigma2 * w.squaredNorm();
  return num / den;
}

// Dense generalized eigensolver on the Ne x Ne pencil A x = lambda B x,
// A = h_ve h_ve^H, B = cue_power h_ce h_ce^H + sigma2 I. Returns the
// maximal eavesdropper SINR p * lambda_max.
inline double eve_sinr_eigensolver(const Eigen::VectorXcd& h_ve,
                                   const Eigen::VectorXcd& h_ce, double p,
                                   double cue_power, double sigma2) {
  const int ne = static_cast<int>(h_ve.size());
  Eigen::MatrixXcd A = h_ve * h_ve.adjoint();
  Eigen::MatrixXcd B = cue_power * h_ce * h_ce.adjoint() +
                       sigma2 * Eigen::MatrixXcd::Identity(ne, ne);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B);
  return p * es.eigenvalues().maxCoeff();
}

// Uniform random unit vector on the complex sphere.
inline Eigen::VectorXcd random_unit_vector(int ne, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXcd v(ne);
  for (int i = 0; i < ne; ++i) v(i) = vanetsec::cplx(n(gen), n(gen));
  return v / v.norm();
}

// Independent re-implementation of the legitimate SINR, term by term from
// the complex channel coefficients.
inline double vue_sinr_direct(const PowerAllocation& p,
                              const ChannelRealization& ch,
                              const InterferenceTopology& topo,
                              const ScenarioConfig& cfg, int k, int m) {
  double interference = 0.0;
  for (int k2 = 0; k2 < ch.K; ++k2) {
    if (k2 == k || !topo.inter_vue_active(k, k2)) continue;
    interference += p(k2, m) * std::norm(ch.h_vv[m](k, k2));
  }
  interference += cfg.cue_power * std::norm(ch.h_cv(k, m));
  interference += cfg.noise_power;
  return p(k, m) * std::norm(ch.g(k, m)) / interference;
}

}  // namespace oracle

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "vanetsec/scenario.hpp"

namespace vanetsec {

using cplx = std::complex<double>;

/// Every small-scale coefficient for one coherence interval (block fading:
/// constant for the whole solve).
struct ChannelRealization {
  int K = 0, M = 0, Ne = 0;

  Eigen::MatrixXcd g;                  // K x M, desired V2V gain g(k,m)
  std::vector<Eigen::MatrixXcd> h_vv;  // per m: K x K, (k,k') entry; diagonal
                                       // and out-of-range pairs exactly 0
  Eigen::MatrixXcd h_cv;               // K x M, CUE m -> VUE k interference
  std::vector<Eigen::VectorXcd> h_ce;  // per m: length-Ne CUE -> EVE
  std::vector<Eigen::VectorXcd> h_ve;  // (k,m) row-major: length-Ne wiretap

  const Eigen::VectorXcd& wiretap(int k, int m) const {
    return h_ve[static_cast<std::size_t>(k) * M + m];
  }
  Eigen::VectorXcd& wiretap(int k, int m) {
    return h_ve[static_cast<std::size_t>(k) * M + m];
  }
};

/// Deterministic substream derivation: one independent generator per link,
/// keyed on (seed, link tag, indices). Adding antennas, pairs, or blocks
/// extends the realization without disturbing existing links, so smaller
/// scenarios are prefixes of larger ones under the same seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint32_t tag, int a,
                             int b, int c);

/// Generator wrapper with pinned transforms (shift-based uniform,
/// Box-Muller normals) so output depends only on mt19937_64, not on
/// library distribution internals.
class LinkRng {
 public:
  explicit LinkRng(std::uint64_t s) : gen_(s) {}
  double uniform01() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  /// CN(0,1): unit-power circularly-symmetric complex Gaussian.
  cplx standard_complex_gaussian();

 private:
  std::mt19937_64 gen_;
};

/// One Rician draw: sqrt(1/(1+k)) * (sqrt(k) * e^{j*los_phase} + n),
/// n ~ CN(0,1). Unit mean power for every k >= 0.
cplx rician_sample(double k_factor, double los_phase, LinkRng& rng);

/// Draws the full realization. Identical (cfg, topo, seed) gives
/// bit-identical output. Inactive inter-VUE entries are exactly zero.
ChannelRealization draw_channels(const ScenarioConfig& cfg,
                                 const InterferenceTopology& topo,
                                 std::uint64_t seed);

// CSV dump/load, full double precision.
// Columns: link_type,k,k2,m,antenna,re,im  (-1 for unused index fields)
void dump_channels_csv(const ChannelRealization& ch, std::ostream& out);
ChannelRealization load_channels_csv(std::istream& in);

}  // namespace vanetsec

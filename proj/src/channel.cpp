#include "vanetsec/channel.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "vanetsec/csv.hpp"
#include "vanetsec/errors.hpp"

namespace vanetsec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

enum LinkTag : std::uint32_t {
  kTagG = 1,
  kTagHvv = 2,
  kTagHcv = 3,
  kTagHce = 4,
  kTagHve = 5,
};

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint32_t tag, int a,
                             int b, int c) {
  std::uint64_t h = splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * tag));
  h = splitmix64(h ^ (0xC2B2AE3D27D4EB4FULL * static_cast<std::uint64_t>(a + 1)));
  h = splitmix64(h ^ (0x165667B19E3779F9ULL * static_cast<std::uint64_t>(b + 1)));
  h = splitmix64(h ^ (0x27D4EB2F165667C5ULL * static_cast<std::uint64_t>(c + 1)));
  return h;
}

cplx LinkRng::standard_complex_gaussian() {
  // Box-Muller; u1 in (0,1] avoids log(0)
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double re = r * std::cos(kTwoPi * u2);
  const double im = r * std::sin(kTwoPi * u2);
  return cplx(re, im) / std::sqrt(2.0);  // unit mean power
}

cplx rician_sample(double k_factor, double los_phase, LinkRng& rng) {
  const cplx los = std::polar(1.0, los_phase);
  const cplx nlos = rng.standard_complex_gaussian();
  return std::sqrt(1.0 / (1.0 + k_factor)) *
         (std::sqrt(k_factor) * los + nlos);
}

namespace {

cplx draw_scalar_link(const ScenarioConfig& cfg, std::uint64_t seed,
                      std::uint32_t tag, int a, int b, int c, double scale) {
  LinkRng rng(substream_seed(seed, tag, a, b, c));
  const double phase = kTwoPi * rng.uniform01();
  return scale * rician_sample(cfg.rician_k, phase, rng);
}

Eigen::VectorXcd draw_vector_link(const ScenarioConfig& cfg,
                                  std::uint64_t seed, std::uint32_t tag, int a,
                                  int b, int c, double scale) {
  // common LOS phase per link, i.i.d. NLOS across antennas
  LinkRng rng(substream_seed(seed, tag, a, b, c));
  const double phase = kTwoPi * rng.uniform01();
  Eigen::VectorXcd v(cfg.Ne);
  for (int ant = 0; ant < cfg.Ne; ++ant)
    v(ant) = scale * rician_sample(cfg.rician_k, phase, rng);
  return v;
}

}  // namespace

ChannelRealization draw_channels(const ScenarioConfig& cfg,
                                 const InterferenceTopology& topo,
                                 std::uint64_t seed) {
  cfg.validate();
  ChannelRealization ch;
  ch.K = cfg.K;
  ch.M = cfg.M;
  ch.Ne = cfg.Ne;

  ch.g.resize(cfg.K, cfg.M);
  for (int k = 0; k < cfg.K; ++k)
    for (int m = 0; m < cfg.M; ++m)
      ch.g(k, m) = draw_scalar_link(cfg, seed, kTagG, k, -1, m, cfg.scale_g);

  ch.h_vv.assign(cfg.M, Eigen::MatrixXcd::Zero(cfg.K, cfg.K));
  for (int m = 0; m < cfg.M; ++m)
    for (int k = 0; k < cfg.K; ++k)
      for (int k2 = 0; k2 < cfg.K; ++k2) {
        if (k == k2 || !topo.inter_vue_active(k, k2)) continue;
        ch.h_vv[m](k, k2) =
            draw_scalar_link(cfg, seed, kTagHvv, k, k2, m, cfg.scale_h_vv);
      }

  ch.h_cv.resize(cfg.K, cfg.M);
  for (int k = 0; k < cfg.K; ++k)
    for (int m = 0; m < cfg.M; ++m)
      ch.h_cv(k, m) =
          draw_scalar_link(cfg, seed, kTagHcv, k, -1, m, cfg.scale_h_cv);

  ch.h_ce.resize(cfg.M);
  for (int m = 0; m < cfg.M; ++m)
    ch.h_ce[m] =
        draw_vector_link(cfg, seed, kTagHce, -1, -1, m, cfg.scale_h_ce);

  ch.h_ve.resize(static_cast<std::size_t>(cfg.K) * cfg.M);
  for (int k = 0; k < cfg.K; ++k)
    for (int m = 0; m < cfg.M; ++m)
      ch.wiretap(k, m) =
          draw_vector_link(cfg, seed, kTagHve, k, -1, m, cfg.scale_h_ve);

  return ch;
}

namespace {

void emit_row(std::ostream& out, const char* type, int k, int k2, int m,
              int ant, cplx v) {
  out << type << ',' << k << ',' << k2 << ',' << m << ',' << ant << ','
      << fmt_double(v.real()) << ',' << fmt_double(v.imag()) << '\n';
}

}  // namespace

void dump_channels_csv(const ChannelRealization& ch, std::ostream& out) {
  out << "link_type,k,k2,m,antenna,re,im\n";
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m) emit_row(out, "g", k, -1, m, -1, ch.g(k, m));
  for (int m = 0; m < ch.M; ++m)
    for (int k = 0; k < ch.K; ++k)
      for (int k2 = 0; k2 < ch.K; ++k2) {
        if (k == k2) continue;
        emit_row(out, "h_vv", k, k2, m, -1, ch.h_vv[m](k, k2));
      }
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m)
      emit_row(out, "h_cv", k, -1, m, -1, ch.h_cv(k, m));
  for (int m = 0; m < ch.M; ++m)
    for (int ant = 0; ant < ch.Ne; ++ant)
      emit_row(out, "h_ce", -1, -1, m, ant, ch.h_ce[m](ant));
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m)
      for (int ant = 0; ant < ch.Ne; ++ant)
        emit_row(out, "h_ve", k, -1, m, ant, ch.wiretap(k, m)(ant));
}

ChannelRealization load_channels_csv(std::istream& in) {
  struct Row {
    std::string type;
    int k, k2, m, ant;
    cplx v;
  };
  std::vector<Row> rows;
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("channel CSV: empty input");
  int K = 0, M = 0, Ne = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 7)
      throw ConfigError("channel CSV: expected 7 columns, got line '" + line +
                        "'");
    Row r;
    r.type = f[0];
    r.k = std::stoi(f[1]);
    r.k2 = std::stoi(f[2]);
    r.m = std::stoi(f[3]);
    r.ant = std::stoi(f[4]);
    r.v = cplx(std::strtod(f[5].c_str(), nullptr),
               std::strtod(f[6].c_str(), nullptr));
    K = std::max({K, r.k + 1, r.k2 + 1});
    M = std::max(M, r.m + 1);
    Ne = std::max(Ne, r.ant + 1);
    rows.push_back(std::move(r));
  }
  if (K == 0 || M == 0 || Ne == 0)
    throw ConfigError("channel CSV: could not infer dimensions");

  ChannelRealization ch;
  ch.K = K;
  ch.M = M;
  ch.Ne = Ne;
  ch.g = Eigen::MatrixXcd::Zero(K, M);
  ch.h_vv.assign(M, Eigen::MatrixXcd::Zero(K, K));
  ch.h_cv = Eigen::MatrixXcd::Zero(K, M);
  ch.h_ce.assign(M, Eigen::VectorXcd::Zero(Ne));
  ch.h_ve.assign(static_cast<std::size_t>(K) * M, Eigen::VectorXcd::Zero(Ne));
  for (const auto& r : rows) {
    if (r.type == "g")
      ch.g(r.k, r.m) = r.v;
    else if (r.type == "h_vv")
      ch.h_vv[r.m](r.k, r.k2) = r.v;
    else if (r.type == "h_cv")
      ch.h_cv(r.k, r.m) = r.v;
    else if (r.type == "h_ce")
      ch.h_ce[r.m](r.ant) = r.v;
    else if (r.type == "h_ve")
      ch.wiretap(r.k, r.m)(r.ant) = r.v;
    else
      throw ConfigError("channel CSV: unknown link_type '" + r.type + "'");
  }
  return ch;
}

}  // namespace vanetsec

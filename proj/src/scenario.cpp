#include "vanetsec/scenario.hpp"

#include <cctype>
#include <climits>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vanetsec/csv.hpp"
#include "vanetsec/errors.hpp"

namespace vanetsec {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

int parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer from '" +
                      v + "'");
  }
  if (pos != v.size())
    throw ConfigError("config key '" + key + "': trailing characters in '" +
                      v + "'");
  if (out < INT_MIN || out > INT_MAX)
    throw ConfigError("config key '" + key + "': value out of range");
  return static_cast<int>(out);
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number from '" +
                      v + "'");
  }
  if (pos != v.size())
    throw ConfigError("config key '" + key + "': trailing characters in '" +
                      v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  std::uint64_t out;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key +
                      "': cannot parse unsigned integer from '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError("config key '" + key + "': trailing characters in '" +
                      v + "'");
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& field_table() {
  static const std::map<std::string, Setter> table = {
      {"M", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.M = parse_int(k, v);
       }},
      {"K", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.K = parse_int(k, v);
       }},
      {"Nt", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.Nt = parse_int(k, v);
       }},
      {"Ne", [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.Ne = parse_int(k, v);
       }},
      {"bandwidth_total",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.bandwidth_total = parse_real(k, v);
       }},
      {"cue_power",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.cue_power = parse_real(k, v);
       }},
      {"p_max",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.p_max = parse_real(k, v);
       }},
      {"noise_power",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.noise_power = parse_real(k, v);
       }},
      {"rician_k",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.rician_k = parse_real(k, v);
       }},
      {"speed_kmh",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.speed_kmh = parse_real(k, v);
       }},
      {"coherence_ms",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.coherence_ms = parse_real(k, v);
       }},
      {"v2v_range_m",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.v2v_range_m = parse_real(k, v);
       }},
      {"headway_s",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.headway_s = parse_real(k, v);
       }},
      {"pairwise_headway_multiplier",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.pairwise_headway_multiplier = parse_real(k, v);
       }},
      {"seed",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_u64(k, v);
       }},
      {"scale_g",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.scale_g = parse_real(k, v);
       }},
      {"scale_h_vv",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.scale_h_vv = parse_real(k, v);
       }},
      {"scale_h_cv",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.scale_h_cv = parse_real(k, v);
       }},
      {"scale_h_ce",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.scale_h_ce = parse_real(k, v);
       }},
      {"scale_h_ve",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.scale_h_ve = parse_real(k, v);
       }},
  };
  return table;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (M < 1) throw ConfigError("config invariant violated: M >= 1");
  if (K < 1) throw ConfigError("config invariant violated: K >= 1");
  if (Nt < 1) throw ConfigError("config invariant violated: Nt >= 1");
  if (Ne < 1) throw ConfigError("config invariant violated: Ne >= 1");
  if (!(bandwidth_total > 0))
    throw ConfigError("config invariant violated: bandwidth_total > 0");
  if (!(cue_power > 0))
    throw ConfigError("config invariant violated: cue_power > 0");
  if (!(p_max > 0)) throw ConfigError("config invariant violated: p_max > 0");
  if (!(noise_power > 0))
    throw ConfigError("config invariant violated: noise_power > 0");
  if (!(rician_k >= 0))
    throw ConfigError("config invariant violated: rician_k >= 0");
  if (!(speed_kmh >= 0))
    throw ConfigError("config invariant violated: speed_kmh >= 0");
  if (!(coherence_ms > 0))
    throw ConfigError("config invariant violated: coherence_ms > 0");
  if (!(v2v_range_m > 0))
    throw ConfigError("config invariant violated: v2v_range_m > 0");
  if (!(headway_s >= 0))
    throw ConfigError("config invariant violated: headway_s >= 0");
  if (!(pairwise_headway_multiplier > 0))
    throw ConfigError(
        "config invariant violated: pairwise_headway_multiplier > 0");
  for (double s : {scale_g, scale_h_vv, scale_h_cv, scale_h_ce, scale_h_ve})
    if (!(s >= 0))
      throw ConfigError("config invariant violated: scale_* >= 0");
  if (!(bandwidth_total / M > 0))
    throw ConfigError("config invariant violated: per-RB bandwidth B/M > 0");
}

double per_rb_bandwidth(const ScenarioConfig& cfg) {
  return cfg.bandwidth_total / cfg.M;
}

InterferenceTopology build_topology(const ScenarioConfig& cfg) {
  cfg.validate();
  InterferenceTopology topo;
  topo.K = cfg.K;
  topo.inter_vehicle_distance_m = cfg.speed_kmh / 3.6 * cfg.headway_s;
  const double effective =
      topo.inter_vehicle_distance_m * cfg.pairwise_headway_multiplier;
  const bool in_range = effective <= cfg.v2v_range_m;
  topo.active.assign(static_cast<std::size_t>(cfg.K) * cfg.K, 0);
  for (int k = 0; k < cfg.K; ++k)
    for (int k2 = 0; k2 < cfg.K; ++k2)
      if (k != k2)
        topo.active[static_cast<std::size_t>(k) * cfg.K + k2] =
            in_range ? 1 : 0;
  return topo;
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

void apply_override(ScenarioConfig& cfg, const std::string& key,
                    const std::string& value) {
  const auto& table = field_table();
  auto it = table.find(key);
  if (it == table.end())
    throw ConfigError("unknown config key: '" + key + "'");
  it->second(cfg, key, value);
}

std::string dump_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "M = " << cfg.M << "\n";
  out << "K = " << cfg.K << "\n";
  out << "Nt = " << cfg.Nt << "\n";
  out << "Ne = " << cfg.Ne << "\n";
  out << "bandwidth_total = " << fmt_double(cfg.bandwidth_total) << "\n";
  out << "cue_power = " << fmt_double(cfg.cue_power) << "\n";
  out << "p_max = " << fmt_double(cfg.p_max) << "\n";
  out << "noise_power = " << fmt_double(cfg.noise_power) << "\n";
  out << "rician_k = " << fmt_double(cfg.rician_k) << "\n";
  out << "speed_kmh = " << fmt_double(cfg.speed_kmh) << "\n";
  out << "coherence_ms = " << fmt_double(cfg.coherence_ms) << "\n";
  out << "v2v_range_m = " << fmt_double(cfg.v2v_range_m) << "\n";
  out << "headway_s = " << fmt_double(cfg.headway_s) << "\n";
  out << "pairwise_headway_multiplier = "
      << fmt_double(cfg.pairwise_headway_multiplier) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "scale_g = " << fmt_double(cfg.scale_g) << "\n";
  out << "scale_h_vv = " << fmt_double(cfg.scale_h_vv) << "\n";
  out << "scale_h_cv = " << fmt_double(cfg.scale_h_cv) << "\n";
  out << "scale_h_ce = " << fmt_double(cfg.scale_h_ce) << "\n";
  out << "scale_h_ve = " << fmt_double(cfg.scale_h_ve) << "\n";
  return out.str();
}

}  // namespace vanetsec

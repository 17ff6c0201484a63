#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vanetsec {

/// All physical and network constants for one experiment.
///
/// Channel gains are interpreted as already normalized by the noise power,
/// so noise_power = 1 keeps unit-noise SINR denominators; it stays
/// configurable. Large-scale attenuation is not modelled explicitly; the
/// per-link scale_* amplitude multipliers (default 1) are the hook for
/// folding it in.
struct ScenarioConfig {
  int M = 4;   // CUE count == resource block count
  int K = 4;   // VUE pair count
  int Nt = 4;  // BS antenna count (config fidelity only; no BS-side links)
  int Ne = 2;  // eavesdropper antenna count

  double bandwidth_total = 20e6;  // Hz, shared by all M resource blocks
  double cue_power = 1.0;         // W, per-CUE uplink transmit power
  double p_max = 1.0;             // W, per-cell VUE power cap
  double noise_power = 1.0;       // W
  double rician_k = 3.0;          // linear LOS/NLOS power ratio, >= 0

  double speed_kmh = 50.0;
  double coherence_ms = 200.0;
  double v2v_range_m = 100.0;
  double headway_s = 5.0;  // time between successive vehicles at a point
  double pairwise_headway_multiplier = 1.0;

  std::uint64_t seed = 1;

  // Optional per-link-class amplitude multipliers (1 = pure small-scale).
  double scale_g = 1.0;
  double scale_h_vv = 1.0;
  double scale_h_cv = 1.0;
  double scale_h_ce = 1.0;
  double scale_h_ve = 1.0;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

/// Bandwidth of one resource block, B / M.
double per_rb_bandwidth(const ScenarioConfig& cfg);

/// Which ordered inter-VUE interference pairs (k, k') exist. Symmetric,
/// no self-interference slot.
struct InterferenceTopology {
  int K = 0;
  double inter_vehicle_distance_m = 0.0;
  std::vector<char> active;  // K*K row-major, diagonal always 0

  bool inter_vue_active(int k, int k2) const {
    return active[static_cast<std::size_t>(k) * K + k2] != 0;
  }
};

/// Pure function of cfg: all pairs are in range iff the inter-vehicle
/// distance (speed/3.6 * headway, times the configured multiplier) is
/// within the V2V communication range.
InterferenceTopology build_topology(const ScenarioConfig& cfg);

// --- flat "key = value" config file, '#' comments, unknown keys rejected ---

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config_file(const std::string& path);

/// Applies one "key=value" override; throws ConfigError on unknown key or
/// unparseable value. Does not re-validate; callers validate() when done.
void apply_override(ScenarioConfig& cfg, const std::string& key,
                    const std::string& value);

/// Serializes every field, one per line, in a fixed order.
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace vanetsec

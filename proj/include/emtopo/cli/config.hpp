#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "emtopo/types.hpp"
#include "emtopo/weights.hpp"

namespace emtopo::cli {

struct Tolerances {
  double symmetry = 1e-10;
  double zero = 1e-8;
  double link = 1e-6;
  double accept = 0.05;
  double gap = 1e-4;
  double quadrature = 1e-8;
  double validate_samples = 16;

  /// KEY=VAL; throws ConfigError for unknown keys or non-positive values.
  void set(const std::string& assignment);
};

struct SourceConfig {
  IVec3 g{0, 0, 0};
  Eigen::Vector3cd current = Eigen::Vector3cd::Zero();
  double frequency = 0.0;  // J(t) = current exp(-i frequency t) at G
};

struct EvolutionConfig {
  Vec3 k = Vec3(0.1, 0.0, 0.0);  // reduced
  double t_end = 10.0;
  int steps = 10;
  std::string initial = "random_transversal";  // or "mode"
  int mode = 3;  // positive band for initial = "mode"
  std::uint64_t seed = 1;
  std::vector<int> amplitudes{1, 2, 3};  // positive bands reported as |c_n|
  std::optional<SourceConfig> source;
  int nodes_per_unit = 8;
  int order = 8;
};

struct JobConfig {
  std::string base_dir = ".";
  std::optional<std::string> weights_path;
  std::optional<std::string> fixture;
  double cutoff = 2.0;  // units of 2 pi / a
  std::vector<std::string> path_labels;
  std::vector<Vec3> path_points;  // resolved later when labels are used
  int n_per_segment = 20;
  std::array<int, 3> grid{24, 24, 24};
  Vec3 plane_offsets = Vec3::Zero();
  int band_lo = 0;
  int band_hi = 0;
  int n_bands = 8;
  EvolutionConfig evolution;
  std::string out_dir = ".";
  Tolerances tol;
};

/// Parses a job document; paths are resolved against base_dir.
JobConfig parse_config(const nlohmann::json& j, const std::string& base_dir);
JobConfig load_config(const std::string& path);

/// "N1xN2[xN3]".
std::array<int, 3> parse_grid(const std::string& s);
/// "a..b" or "a".
std::pair<int, int> parse_bands(const std::string& s);

/// Loads the weight file or builds the named fixture.
MaterialWeights load_medium(const JobConfig& c);
/// Fixture names accepted by load_medium.
std::vector<std::string> fixture_names();
MaterialWeights make_fixture(const std::string& name);

/// Standard high-symmetry path of a preset lattice; empty for custom lattices.
std::vector<std::string> default_path(const Lattice& l);
/// Configured labels, or the default path when none are given.
std::vector<std::string> path_labels_for(const JobConfig& c, const Lattice& l);
/// Waypoints in reduced coordinates (labels resolved against the lattice).
std::vector<Vec3> resolve_path(const JobConfig& c, const Lattice& l);

}  // namespace emtopo::cli

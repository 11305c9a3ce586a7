#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emtopo/types.hpp"

namespace emtopo {

/// Bravais lattice of dimension d embedded in R^3 (lattice constant a = 1).
class Lattice {
 public:
  Lattice(std::vector<Vec3> basis);

  static Lattice chain();
  static Lattice square();
  static Lattice hexagonal();
  static Lattice cubic();
  /// "chain", "square", "hexagonal", "cubic".
  static Lattice preset(const std::string& name);

  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<Vec3>& basis() const { return basis_; }
  const std::string& name() const { return name_; }
  double cell_volume() const;

  /// Columns a_1..a_3, suppressed axes filled with orthonormal complements.
  const Mat3& full_basis() const { return full_; }
  /// Columns b_1..b_3 with a_i . b_j = 2 pi delta_ij.
  const Mat3& full_reciprocal() const { return recip_; }

  Vec3 cartesian_k(const Vec3& reduced) const { return recip_ * reduced; }
  Vec3 cartesian_G(const IVec3& n) const;
  Vec3 cartesian_r(const Vec3& reduced) const { return full_ * reduced; }

  /// Named BZ points for the preset (reduced coordinates).
  std::optional<Vec3> named_point(const std::string& label) const;

 private:
  std::vector<Vec3> basis_;
  Mat3 full_;
  Mat3 recip_;
  std::string name_;
};

/// x - ceil(x - 1/2), i.e. the representative in (-1/2, 1/2].
double reduce_coordinate(double x);
Vec3 reduce_k(const Vec3& k);

/// d reciprocal vectors, a_i . b_j = 2 pi delta_ij.
std::vector<Vec3> reciprocal_basis(const Lattice& l);

/// Integer tuples n with |sum n_i b_i| <= cutoff, lexicographic order.
class PlaneWaveSet {
 public:
  PlaneWaveSet(const Lattice& l, double cutoff);

  double cutoff() const { return cutoff_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<IVec3>& indices() const { return indices_; }
  const IVec3& operator[](int i) const { return indices_[i]; }
  /// Position of n in the set, or -1.
  int find(const IVec3& n) const;

 private:
  double cutoff_;
  std::vector<IVec3> indices_;
  std::map<IVec3, int> lookup_;
};

/// require_nontrivial: throw EmptySet when only G = 0 survives.
PlaneWaveSet plane_wave_set(const Lattice& l, double cutoff,
                            bool require_nontrivial = false);

struct KPath {
  std::vector<Vec3> waypoints;
  int n_per_segment = 0;
  std::vector<Vec3> points;       // reduced
  std::vector<double> arclength;  // cumulative Cartesian distance
  std::vector<int> waypoint_index;
};

/// Each segment gets n_per_segment samples including both ends; shared
/// endpoints appear once.
KPath bz_path(const Lattice& l, const std::vector<Vec3>& waypoints,
              int n_per_segment);

class KGrid {
 public:
  KGrid(int dimension, std::array<int, 3> n, Vec3 offset = Vec3::Zero());

  int dimension() const { return dim_; }
  const std::array<int, 3>& n() const { return n_; }
  int size() const { return n_[0] * n_[1] * n_[2]; }
  int index(std::array<int, 3> m) const;
  std::array<int, 3> multi(int idx) const;
  /// k = sum (m_i + offset_i)/N_i b_i, reduced to (-1/2, 1/2].
  Vec3 point(int idx) const;
  /// Neighbor in direction mu (0..d-1), step +1 or -1, wrapping.
  int neighbor(int idx, int mu, int step = 1) const;
  /// Reciprocal-vector jump s with point(idx) + e_mu/N_mu = point(neighbor) + s e_mu.
  int wrap_shift(int idx, int mu) const;

 private:
  int dim_;
  std::array<int, 3> n_;
  Vec3 offset_;
};

KGrid bz_grid(const Lattice& l, std::array<int, 3> n, Vec3 offset = Vec3::Zero());

}  // namespace emtopo

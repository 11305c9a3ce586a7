#include "emtopo/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "emtopo/errors.hpp"

namespace emtopo {

namespace {

// Orthonormal completion of the given vectors to a basis of R^3.
Mat3 complete_basis(const std::vector<Vec3>& v) {
  Eigen::MatrixXd a(3, v.size());
  for (size_t i = 0; i < v.size(); ++i) a.col(i) = v[i];
  Mat3 q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  std::vector<Vec3> ortho;
  for (size_t i = 0; i < v.size(); ++i) ortho.push_back(q.col(i));
  Mat3 out = Mat3::Zero();
  for (size_t i = 0; i < v.size(); ++i) out.col(i) = v[i];
  int filled = static_cast<int>(v.size());
  for (int e = 0; e < 3 && filled < 3; ++e) {
    Vec3 c = Vec3::Unit(e);
    for (const Vec3& u : ortho) c -= u * u.dot(c);
    if (c.norm() > 1e-8) {
      ortho.push_back(c.normalized());
      out.col(filled++) = ortho.back();
    }
  }
  return out;
}

}  // namespace

Lattice::Lattice(std::vector<Vec3> basis) : basis_(std::move(basis)), name_("custom") {
  if (basis_.empty() || basis_.size() > 3)
    throw SingularBasis("lattice needs 1 to 3 basis vectors");
  // Gram determinant detects dependence independent of the completion.
  Eigen::MatrixXd g(basis_.size(), basis_.size());
  double scale = 1.0;
  for (size_t i = 0; i < basis_.size(); ++i) {
    scale *= std::max(basis_[i].squaredNorm(), 1e-300);
    for (size_t j = 0; j < basis_.size(); ++j) g(i, j) = basis_[i].dot(basis_[j]);
  }
  if (!(g.determinant() > 1e-20 * scale))
    throw SingularBasis("basis vectors are linearly dependent");
  full_ = complete_basis(basis_);
  recip_ = kTwoPi * full_.inverse().transpose();
}

Lattice Lattice::chain() {
  Lattice l({Vec3(1, 0, 0)});
  l.name_ = "chain";
  return l;
}
Lattice Lattice::square() {
  Lattice l({Vec3(1, 0, 0), Vec3(0, 1, 0)});
  l.name_ = "square";
  return l;
}
Lattice Lattice::hexagonal() {
  Lattice l({Vec3(1, 0, 0), Vec3(0.5, std::sqrt(3.0) / 2.0, 0)});
  l.name_ = "hexagonal";
  return l;
}
Lattice Lattice::cubic() {
  Lattice l({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});
  l.name_ = "cubic";
  return l;
}

Lattice Lattice::preset(const std::string& name) {
  if (name == "chain") return chain();
  if (name == "square") return square();
  if (name == "hexagonal") return hexagonal();
  if (name == "cubic") return cubic();
  throw ConfigError("unknown lattice preset '" + name + "'");
}

double Lattice::cell_volume() const {
  Eigen::MatrixXd g(basis_.size(), basis_.size());
  for (size_t i = 0; i < basis_.size(); ++i)
    for (size_t j = 0; j < basis_.size(); ++j) g(i, j) = basis_[i].dot(basis_[j]);
  return std::sqrt(g.determinant());
}

Vec3 Lattice::cartesian_G(const IVec3& n) const {
  return recip_ * Vec3(n[0], n[1], n[2]);
}

std::optional<Vec3> Lattice::named_point(const std::string& label) const {
  if (label == "G" || label == "Gamma" || label == "Γ") return Vec3::Zero();
  if (name_ == "chain") {
    if (label == "X") return Vec3(0.5, 0, 0);
  } else if (name_ == "square") {
    if (label == "X") return Vec3(0.5, 0, 0);
    if (label == "Y") return Vec3(0, 0.5, 0);
    if (label == "M") return Vec3(0.5, 0.5, 0);
  } else if (name_ == "hexagonal") {
    if (label == "M") return Vec3(0.5, 0, 0);
    if (label == "K") return Vec3(2.0 / 3.0, 1.0 / 3.0, 0);
  } else if (name_ == "cubic") {
    if (label == "X") return Vec3(0.5, 0, 0);
    if (label == "M") return Vec3(0.5, 0.5, 0);
    if (label == "R") return Vec3(0.5, 0.5, 0.5);
  }
  return std::nullopt;
}

double reduce_coordinate(double x) { return x - std::ceil(x - 0.5); }

Vec3 reduce_k(const Vec3& k) {
  return Vec3(reduce_coordinate(k[0]), reduce_coordinate(k[1]), reduce_coordinate(k[2]));
}

std::vector<Vec3> reciprocal_basis(const Lattice& l) {
  std::vector<Vec3> out;
  for (int i = 0; i < l.dimension(); ++i) out.push_back(l.full_reciprocal().col(i));
  return out;
}

PlaneWaveSet::PlaneWaveSet(const Lattice& l, double cutoff) : cutoff_(cutoff) {
  if (!(cutoff > 0)) throw EmptySet("cutoff must be positive");
  const int d = l.dimension();
  const Mat3& b = l.full_reciprocal();
  // |n_i| <= cutoff * |a_i| / 2pi bounds the search box.
  IVec3 lim{0, 0, 0};
  for (int i = 0; i < d; ++i)
    lim[i] = static_cast<int>(std::floor(cutoff * l.full_basis().col(i).norm() / kTwoPi)) + 1;
  const double c2 = cutoff * cutoff * (1.0 + 1e-12);
  for (int n0 = -lim[0]; n0 <= lim[0]; ++n0)
    for (int n1 = -lim[1]; n1 <= lim[1]; ++n1)
      for (int n2 = -lim[2]; n2 <= lim[2]; ++n2) {
        Vec3 g = b * Vec3(n0, n1, n2);
        if (g.squaredNorm() <= c2) indices_.push_back({n0, n1, n2});
      }
  std::sort(indices_.begin(), indices_.end());
  for (size_t i = 0; i < indices_.size(); ++i) lookup_[indices_[i]] = static_cast<int>(i);
}

int PlaneWaveSet::find(const IVec3& n) const {
  auto it = lookup_.find(n);
  return it == lookup_.end() ? -1 : it->second;
}

PlaneWaveSet plane_wave_set(const Lattice& l, double cutoff, bool require_nontrivial) {
  PlaneWaveSet s(l, cutoff);
  if (require_nontrivial && s.size() <= 1)
    throw EmptySet("cutoff below the shortest reciprocal vector");
  return s;
}

KPath bz_path(const Lattice& l, const std::vector<Vec3>& waypoints, int n_per_segment) {
  KPath p;
  p.waypoints = waypoints;
  p.n_per_segment = n_per_segment;
  if (waypoints.empty()) return p;
  if (waypoints.size() == 1 || n_per_segment < 2) {
    p.points = waypoints;
    double s = 0;
    for (size_t i = 0; i < waypoints.size(); ++i) {
      if (i) s += (l.cartesian_k(waypoints[i]) - l.cartesian_k(waypoints[i - 1])).norm();
      p.arclength.push_back(s);
      p.waypoint_index.push_back(static_cast<int>(i));
    }
    return p;
  }
  p.points.push_back(waypoints[0]);
  p.arclength.push_back(0.0);
  p.waypoint_index.push_back(0);
  for (size_t s = 0; s + 1 < waypoints.size(); ++s) {
    const Vec3& a = waypoints[s];
    const Vec3& b = waypoints[s + 1];
    for (int j = 1; j < n_per_segment; ++j) {
      double t = static_cast<double>(j) / (n_per_segment - 1);
      Vec3 k = a + t * (b - a);
      double ds = (l.cartesian_k(k) - l.cartesian_k(p.points.back())).norm();
      p.arclength.push_back(p.arclength.back() + ds);
      p.points.push_back(k);
    }
    p.waypoint_index.push_back(static_cast<int>(p.points.size()) - 1);
  }
  return p;
}

KGrid::KGrid(int dimension, std::array<int, 3> n, Vec3 offset)
    : dim_(dimension), n_(n), offset_(offset) {
  for (int i = 0; i < 3; ++i) {
    if (i >= dim_) n_[i] = 1;
    if (n_[i] < 1) throw ConfigError("grid sizes must be >= 1");
  }
}

int KGrid::index(std::array<int, 3> m) const {
  return (m[0] * n_[1] + m[1]) * n_[2] + m[2];
}

std::array<int, 3> KGrid::multi(int idx) const {
  std::array<int, 3> m;
  m[2] = idx % n_[2];
  idx /= n_[2];
  m[1] = idx % n_[1];
  m[0] = idx / n_[1];
  return m;
}

Vec3 KGrid::point(int idx) const {
  auto m = multi(idx);
  Vec3 k = Vec3::Zero();
  for (int i = 0; i < dim_; ++i) k[i] = reduce_coordinate((m[i] + offset_[i]) / n_[i]);
  return k;
}

int KGrid::neighbor(int idx, int mu, int step) const {
  auto m = multi(idx);
  m[mu] = ((m[mu] + step) % n_[mu] + n_[mu]) % n_[mu];
  return index(m);
}

int KGrid::wrap_shift(int idx, int mu) const {
  const double next = point(idx)[mu] + 1.0 / n_[mu];
  return static_cast<int>(std::lround(next - point(neighbor(idx, mu))[mu]));
}

KGrid bz_grid(const Lattice& l, std::array<int, 3> n, Vec3 offset) {
  return KGrid(l.dimension(), n, offset);
}

}  // namespace emtopo

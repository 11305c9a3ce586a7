#include "emtopo/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emtopo/errors.hpp"

namespace emtopo {

Mat6cd pauli6(int j) {
  Mat6cd s = Mat6cd::Zero();
  const cd i(0, 1);
  for (int a = 0; a < 3; ++a) {
    switch (j) {
      case 0:
        s(a, a) = 1;
        s(a + 3, a + 3) = 1;
        break;
      case 1:
        s(a, a + 3) = 1;
        s(a + 3, a) = 1;
        break;
      case 2:
        s(a, a + 3) = -i;
        s(a + 3, a) = i;
        break;
      case 3:
        s(a, a) = 1;
        s(a + 3, a + 3) = -1;
        break;
      default:
        throw std::out_of_range("pauli index");
    }
  }
  return s;
}

Mat6cd MaterialWeights::coeff(const IVec3& g) const {
  auto it = coeffs.find(g);
  return it == coeffs.end() ? Mat6cd::Zero() : it->second;
}

Mat6cd MaterialWeights::evaluate(const Vec3& x_reduced) const {
  Mat6cd out = Mat6cd::Zero();
  for (const auto& [g, c] : coeffs) {
    double ph = kTwoPi * (g[0] * x_reduced[0] + g[1] * x_reduced[1] + g[2] * x_reduced[2]);
    out += c * std::polar(1.0, ph);
  }
  return out;
}

double MaterialWeights::support_radius() const {
  double r = 0;
  for (const auto& [g, c] : coeffs)
    if (c.norm() > 0) r = std::max(r, lattice.cartesian_G(g).norm());
  return r;
}

double hermiticity_residual(const MaterialWeights& w) {
  double worst = 0;
  for (const auto& [g, c] : w.coeffs) {
    Mat6cd m = w.coeff(negate(g));
    double scale = std::max(c.norm(), m.norm());
    if (scale == 0) continue;
    worst = std::max(worst, (m - c.adjoint()).norm() / scale);
  }
  return worst;
}

WeightDecomposition decompose_weights(const MaterialWeights& w, double tol) {
  double r = hermiticity_residual(w);
  if (r > tol) {
    std::ostringstream os;
    os << "What(-G) != What(G)^dag, relative residual " << r;
    throw NonHermitianField(os.str());
  }
  const cd i(0, 1);
  WeightDecomposition d;
  for (const auto& [g, c] : w.coeffs) {
    Mat3cd a = c.topLeftCorner<3, 3>();
    Mat3cd b = c.topRightCorner<3, 3>();
    Mat3cd cc = c.bottomLeftCorner<3, 3>();
    Mat3cd dd = c.bottomRightCorner<3, 3>();
    d.w[g] = {(a + dd) * 0.5, (b + cc) * 0.5, i * (b - cc) * 0.5, (a - dd) * 0.5};
  }
  return d;
}

std::map<IVec3, Mat6cd> assemble_weights(const WeightDecomposition& d) {
  const cd i(0, 1);
  std::map<IVec3, Mat6cd> out;
  for (const auto& [g, w] : d.w) {
    Mat6cd m;
    m.topLeftCorner<3, 3>() = w[0] + w[3];
    m.topRightCorner<3, 3>() = w[1] - i * w[2];
    m.bottomLeftCorner<3, 3>() = w[1] + i * w[2];
    m.bottomRightCorner<3, 3>() = w[0] - w[3];
    out[g] = m;
  }
  return out;
}

ValidationReport validate_weights(const MaterialWeights& w, int grid_resolution, double tol) {
  for (const auto& [g, c] : w.coeffs)
    if (c.rows() != 6 || c.cols() != 6) throw MalformedCoefficients("coefficient is not 6x6");
  ValidationReport rep;
  rep.hermiticity_residual = hermiticity_residual(w);
  const int n = std::max(1, grid_resolution);
  const int d = w.dimension();
  std::array<int, 3> lim{1, 1, 1};
  for (int i = 0; i < d; ++i) lim[i] = n;
  rep.min_eig = std::numeric_limits<double>::infinity();
  rep.max_eig = -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat6cd> es;
  for (int a = 0; a < lim[0]; ++a)
    for (int b = 0; b < lim[1]; ++b)
      for (int c = 0; c < lim[2]; ++c) {
        Vec3 x(static_cast<double>(a) / lim[0], static_cast<double>(b) / lim[1],
               static_cast<double>(c) / lim[2]);
        Mat6cd m = w.evaluate(x);
        Mat6cd h = 0.5 * (m + m.adjoint());
        es.compute(h, Eigen::EigenvaluesOnly);
        rep.min_eig = std::min(rep.min_eig, es.eigenvalues()(0));
        rep.max_eig = std::max(rep.max_eig, es.eigenvalues()(5));
        ++rep.samples;
      }
  const double slack = tol * std::max(1.0, std::abs(w.c_upper));
  rep.positive = rep.min_eig > 0;
  rep.within_bounds = w.c_lower > 0 && rep.min_eig >= w.c_lower - slack &&
                      rep.max_eig <= w.c_upper + slack;
  const bool herm = rep.hermiticity_residual <= tol;
  rep.pass = rep.positive && rep.within_bounds && herm;
  std::ostringstream os;
  os << "eig(W) in [" << rep.min_eig << ", " << rep.max_eig << "] on " << rep.samples
     << " samples, declared [" << w.c_lower << ", " << w.c_upper << "]";
  if (!herm) os << "; not Hermitian (residual " << rep.hermiticity_residual << ")";
  if (!rep.positive) os << "; not positive definite";
  else if (!rep.within_bounds) os << "; outside declared bounds";
  rep.message = os.str();
  return rep;
}

bool SymmetrySet::contains(Symmetry s) const {
  switch (s) {
    case Symmetry::T1:
      return t1;
    case Symmetry::U2:
      return u2;
    case Symmetry::T3:
      return t3;
  }
  return false;
}

std::string SymmetrySet::str() const {
  std::vector<std::string> parts;
  if (t1) parts.push_back("T1");
  if (u2) parts.push_back("U2");
  if (t3) parts.push_back("T3");
  std::string s = "{";
  for (size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
  return s + "}";
}

namespace {

Mat6cd transformed(const MaterialWeights& w, const IVec3& g, Symmetry s) {
  switch (s) {
    case Symmetry::T1: {
      Mat6cd p = pauli6(1);
      return p * w.coeff(negate(g)).conjugate() * p;
    }
    case Symmetry::T3: {
      Mat6cd p = pauli6(3);
      return p * w.coeff(negate(g)).conjugate() * p;
    }
    case Symmetry::U2: {
      Mat6cd p = pauli6(2);
      return p * w.coeff(g) * p;
    }
  }
  return Mat6cd::Zero();
}

double defect(const MaterialWeights& w, Symmetry s) {
  double worst = 0;
  for (const auto& [g, c] : w.coeffs) {
    double scale = std::max(c.norm(), w.coeff(negate(g)).norm());
    if (scale == 0) continue;
    worst = std::max(worst, (transformed(w, g, s) - c).norm() / scale);
  }
  // -G entries missing from the map still need checking against their partners.
  for (const auto& [g, c] : w.coeffs) {
    IVec3 m = negate(g);
    if (w.coeffs.count(m)) continue;
    double scale = c.norm();
    if (scale == 0) continue;
    worst = std::max(worst, (transformed(w, m, s) - Mat6cd::Zero()).norm() / scale);
  }
  return worst;
}

}  // namespace

SymmetryDefects symmetry_defects(const MaterialWeights& w) {
  return {defect(w, Symmetry::T1), defect(w, Symmetry::U2), defect(w, Symmetry::T3)};
}

SymmetrySet detect_symmetries(const MaterialWeights& w, double tol) {
  SymmetryDefects d = symmetry_defects(w);
  return {d.t1 <= tol, d.u2 <= tol, d.t3 <= tol};
}

std::string to_string(MediaType t) {
  switch (t) {
    case MediaType::DualSymmetric:
      return "DualSymmetric";
    case MediaType::NonGyrotropic:
      return "NonGyrotropic";
    case MediaType::MagnetoElectric:
      return "MagnetoElectric";
    case MediaType::Gyrotropic:
      return "Gyrotropic";
  }
  return "?";
}

std::string to_string(CazClass c) {
  switch (c) {
    case CazClass::TwoTimesAI:
      return "2xAI";
    case CazClass::AI:
      return "AI";
    case CazClass::A:
      return "A";
  }
  return "?";
}

std::string InvariantKind::describe() const {
  if (chern_count == 0) return "none";
  if (chern_count == 1) return "1 first Chern number (Z)";
  return std::to_string(chern_count) + " first Chern numbers (Z^" +
         std::to_string(chern_count) + ")";
}

SymmetryReport classify(const MaterialWeights& w, double tol) {
  SymmetryReport r;
  r.defects = symmetry_defects(w);
  r.surviving = {r.defects.t1 <= tol, r.defects.u2 <= tol, r.defects.t3 <= tol};
  const SymmetrySet& s = r.surviving;
  if (s.t1 && s.t3 && s.u2) {
    r.media_type = MediaType::DualSymmetric;
    r.caz_class = CazClass::TwoTimesAI;
  } else if (s.t3 && !s.t1 && !s.u2) {
    r.media_type = MediaType::NonGyrotropic;
    r.caz_class = CazClass::AI;
  } else if (s.t1 && !s.t3 && !s.u2) {
    r.media_type = MediaType::MagnetoElectric;
    r.caz_class = CazClass::AI;
  } else if (!s.t1 && !s.t3 && !s.u2) {
    r.media_type = MediaType::Gyrotropic;
    r.caz_class = CazClass::A;
  } else {
    std::ostringstream os;
    os << "symmetry set " << s.str() << " matches no media type (defects T1=" << r.defects.t1
       << " U2=" << r.defects.u2 << " T3=" << r.defects.t3 << ")";
    throw AmbiguousClass(os.str());
  }
  for (int d = 1; d <= 3; ++d) {
    int count = 0;
    if (r.caz_class == CazClass::A) count = d == 1 ? 0 : (d == 2 ? 1 : 3);
    r.invariants_by_dim.push_back({d, count});
  }
  r.assumptions.push_back(
      "absence of further unitary symmetries commuting with the positive-frequency operator "
      "is assumed, not checked");
  return r;
}

MaterialWeights translate(const MaterialWeights& w, const Vec3& a) {
  MaterialWeights out = w;
  for (auto& [g, c] : out.coeffs) {
    double ph = kTwoPi * (g[0] * a[0] + g[1] * a[1] + g[2] * a[2]);
    c *= std::polar(1.0, ph);
  }
  return out;
}

MaterialWeights apply_symmetry(const MaterialWeights& w, Symmetry s) {
  MaterialWeights out = w;
  out.coeffs.clear();
  for (const auto& [g, c] : w.coeffs) {
    out.coeffs[g] = transformed(w, g, s);
    IVec3 m = negate(g);
    if (!w.coeffs.count(m)) out.coeffs[m] = transformed(w, m, s);
  }
  return out;
}

MaterialWeights conjugate_medium(const MaterialWeights& w) {
  MaterialWeights out = w;
  out.coeffs.clear();
  for (const auto& [g, c] : w.coeffs) {
    out.coeffs[g] = w.coeff(negate(g)).conjugate();
    IVec3 m = negate(g);
    if (!w.coeffs.count(m)) out.coeffs[m] = c.conjugate();
  }
  return out;
}

}  // namespace emtopo

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emtopo/lattice.hpp"
#include "emtopo/types.hpp"

namespace emtopo {

/// Periodic 6x6 weight field W(x) = sum_G What(G) exp(i G.x), blocks
/// (eps chi; chi^* mu) in (E, H) order.
struct MaterialWeights {
  Lattice lattice = Lattice::cubic();
  std::map<IVec3, Mat6cd> coeffs;
  double c_lower = 0.0;
  double c_upper = 0.0;
  /// Declared support radius (Cartesian, same units as |G|).
  std::optional<double> cutoff;

  int dimension() const { return lattice.dimension(); }
  /// Zero for G not stored.
  Mat6cd coeff(const IVec3& g) const;
  Mat6cd evaluate(const Vec3& x_reduced) const;
  /// Unit-cell average, i.e. What(0).
  Mat6cd average() const { return coeff({0, 0, 0}); }
  /// Largest |G| among stored nonzero coefficients.
  double support_radius() const;
};

/// Sum of sigma_j (x) w_j for each stored coefficient.
struct WeightDecomposition {
  std::map<IVec3, std::array<Mat3cd, 4>> w;
};

/// Max over G of |What(-G) - What(G)^dag|_F relative to max(|What(G)|, |What(-G)|).
double hermiticity_residual(const MaterialWeights& w);

/// Throws NonHermitianField above tol (relative).
WeightDecomposition decompose_weights(const MaterialWeights& w, double tol = 1e-10);
std::map<IVec3, Mat6cd> assemble_weights(const WeightDecomposition& d);

struct ValidationReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double hermiticity_residual = 0.0;
  bool within_bounds = false;
  bool positive = false;
  bool pass = false;
  int samples = 0;
  std::string message;
};

/// Samples W(x) on grid_resolution^d points.
ValidationReport validate_weights(const MaterialWeights& w, int grid_resolution,
                                  double tol = 1e-10);

enum class Symmetry { T1, U2, T3 };

struct SymmetrySet {
  bool t1 = false;
  bool u2 = false;
  bool t3 = false;
  bool operator==(const SymmetrySet&) const = default;
  bool contains(Symmetry s) const;
  std::string str() const;
};

/// Per-coefficient relative defects |S(What)(G) - What(G)|_F / scale.
struct SymmetryDefects {
  double t1 = 0.0;
  double u2 = 0.0;
  double t3 = 0.0;
};
SymmetryDefects symmetry_defects(const MaterialWeights& w);
SymmetrySet detect_symmetries(const MaterialWeights& w, double tol = 1e-10);

enum class MediaType { DualSymmetric, NonGyrotropic, MagnetoElectric, Gyrotropic };
enum class CazClass { TwoTimesAI, AI, A };

struct InvariantKind {
  int dim = 0;
  /// Number of independent first Chern numbers; 0 means trivial.
  int chern_count = 0;
  std::string describe() const;
};

struct SymmetryReport {
  SymmetrySet surviving;
  MediaType media_type = MediaType::Gyrotropic;
  CazClass caz_class = CazClass::A;
  std::vector<InvariantKind> invariants_by_dim;
  SymmetryDefects defects;
  std::vector<std::string> assumptions;
};

std::string to_string(MediaType t);
std::string to_string(CazClass c);

/// Throws AmbiguousClass for sets outside the four table rows.
SymmetryReport classify(const MaterialWeights& w, double tol = 1e-10);

/// W(x) -> W(x + a), a in reduced coordinates.
MaterialWeights translate(const MaterialWeights& w, const Vec3& a_reduced);
/// Apply the transform that defines s: T1, T3 conjugate-reflect, U2 conjugates by sigma_2.
MaterialWeights apply_symmetry(const MaterialWeights& w, Symmetry s);
/// Pointwise complex conjugate field, coefficients conj(What(-G)).
MaterialWeights conjugate_medium(const MaterialWeights& w);

/// sigma_j (x) id_3 as a 6x6 matrix, j = 0..3.
Mat6cd pauli6(int j);

}  // namespace emtopo

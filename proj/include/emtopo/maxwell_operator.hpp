#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "emtopo/lattice.hpp"
#include "emtopo/types.hpp"
#include "emtopo/weights.hpp"

namespace emtopo {

/// Block-Toeplitz weight matrix [(G,G')] = What(G - G') with its Cholesky
/// factor. Independent of k, so shared between fibers.
struct WeightMatrix {
  CMat w;
  CMat l_inv;  // L^-1 with w = L L^dag; empty if not positive definite
  bool positive_definite = false;
  double min_eig_estimate = 0.0;
  int dropped_coefficients = 0;
};

std::shared_ptr<const WeightMatrix> weight_matrix(const MaterialWeights& w,
                                                  const PlaneWaveSet& pws);
std::shared_ptr<const WeightMatrix> weight_matrix(const CMat& w);

/// Layout: index 6 p + c, c = (Ex, Ey, Ez, Hx, Hy, Hz), p the plane wave.
struct FiberOperator {
  Vec3 k = Vec3::Zero();  // reduced
  std::vector<IVec3> indices;
  std::vector<Vec3> kvecs;  // Cartesian k + G
  CMat rot;
  std::shared_ptr<const WeightMatrix> weight;

  int n_pw() const { return static_cast<int>(indices.size()); }
  int dim() const { return 6 * n_pw(); }
  const CMat& weight_matrix() const { return weight->w; }
};

/// Per plane wave (0, -K x; K x, 0), i.e. -sigma_2 (x) (i K x).
Mat6cd rot_block(const Vec3& kvec);
Mat3 cross_matrix(const Vec3& v);

FiberOperator assemble_fiber(const MaterialWeights& w, const PlaneWaveSet& pws, const Vec3& k);
FiberOperator assemble_fiber(std::shared_ptr<const WeightMatrix> weight, const Lattice& l,
                             const PlaneWaveSet& pws, const Vec3& k);

/// Sparse triplet text dump: "row col re im" per nonzero entry.
void dump_triplets(const CMat& m, std::ostream& os);

/// phi^dag W psi.
cd weighted_inner(const CVec& phi, const CVec& psi, const CMat& weight);
double weighted_norm(const CVec& psi, const CMat& weight);

struct SolveOptions {
  double zero_tol_rel = 1e-8;
  bool vectors = true;
  /// Keep vectors only for positive bands [band_lo, band_hi] (1-based) when
  /// band_lo > 0; otherwise all vectors.
  int band_lo = 0;
  int band_hi = 0;
};

struct FiberSpectrum {
  Vec3 k = Vec3::Zero();
  RVec omegas;  // all eigenvalues of the pencil, ascending
  CMat vectors;  // W-orthonormal columns for indices first_vector..
  int first_vector = 0;
  int kernel_dim = 0;
  double zero_tol = 0.0;
  int n_pw = 0;
  int n_requested = 0;
  std::shared_ptr<const WeightMatrix> weight;
  std::vector<Vec3> kvecs;

  int size() const { return static_cast<int>(omegas.size()); }
  /// The upper 2N eigenvalues; at k = 0 two of them are the zero ground bands.
  int n_positive() const { return 2 * n_pw; }
  /// Global index of positive band n (1-based).
  int band_index(int n) const { return size() - 2 * n_pw + n - 1; }
  double band(int n) const { return omegas(band_index(n)); }
  bool has_vector(int idx) const {
    return idx >= first_vector && idx < first_vector + vectors.cols();
  }
  CVec vector(int idx) const;
  /// Columns for positive bands lo..hi (1-based, inclusive).
  CMat band_vectors(int lo, int hi) const;
};

/// Cholesky reduction plus dense Hermitian solve. n_bands < 0 means all 2N.
/// Throws IndefiniteWeight, SolverFailure, DimensionMismatch.
FiberSpectrum eigensolve(const FiberOperator& f, int n_bands = -1, const SolveOptions& opt = {});

/// Largest-magnitude component made real positive.
void fix_phase(CVec& v);

struct SpectrumResiduals {
  double eigen = 0.0;  // max |Rot phi - omega W phi| / |Rot|
  double orthonormality = 0.0;  // max |Phi^dag W Phi - id|
};
SpectrumResiduals spectrum_residuals(const FiberOperator& f, const FiberSpectrum& s);

/// Columns K^ in the E and H slots per plane wave (all six unit vectors when K = 0).
CMat longitudinal_basis(const std::vector<Vec3>& kvecs);

struct HelmholtzSplit {
  CVec transversal;
  CVec longitudinal;
};
HelmholtzSplit helmholtz_split(const CVec& psi, const FiberOperator& f);
HelmholtzSplit helmholtz_split(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight);
/// max_G |K . (W psi)_E(G)| + |K . (W psi)_H(G)|.
double divergence_residual(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight);

/// Spectral weights q_n: 1 above zero_tol, 1/2 on the kernel, 0 below.
/// Throws DegenerateGap for |omega| in (zero_tol, 10 zero_tol).
RVec projector_weights(const FiberSpectrum& s, bool positive = true);
/// Q+ = sum q_n phi_n phi_n^dag W; needs all vectors.
CMat positive_frequency_projector(const FiberSpectrum& s);
CMat negative_frequency_projector(const FiberSpectrum& s);

/// M = W_L D W_R on a finite-dimensional space.
struct MaxwellTypeContract {
  CMat d;
  CMat w_left;
  CMat w_right;
};

struct ContractReport {
  double hermiticity_d = 0.0;
  double hermiticity_w_left = 0.0;
  double hermiticity_w_right = 0.0;
  double commutator = 0.0;  // |[W_L, W_R]|_F
  double c = 0.0;  // min eigenvalue of the Hermitian part of W_R W_L^-1
  bool invertible = false;
  bool pass = false;
};

ContractReport validate_contract(const MaxwellTypeContract& c, double tol = 1e-10);

struct CanonicalForm {
  CMat w_prime;  // W' = W_L^-1 W_R^-1
  CMat d;        // M = W'^-1 D after conjugating by W_R
};
CanonicalForm to_canonical(const MaxwellTypeContract& c);

}  // namespace emtopo

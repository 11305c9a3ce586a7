#pragma once

#include <functional>
#include <memory>
#include <random>

#include "emtopo/maxwell_operator.hpp"

namespace emtopo {

/// Coefficients in the W-orthonormal eigenbasis of one spectrum (all vectors).
struct FiberState {
  std::shared_ptr<const FiberSpectrum> basis;
  CVec coeffs;
  double t = 0.0;

  /// E = 1/2 <psi, psi>_W = 1/2 |c|^2.
  double energy() const { return 0.5 * coeffs.squaredNorm(); }
  CVec field() const { return basis->vectors * coeffs; }
};

/// c = Phi^dag W psi. The spectrum must hold every eigenvector.
FiberState make_state(std::shared_ptr<const FiberSpectrum> basis, const CVec& psi, double t = 0.0);

/// c_n -> exp(-i omega_n dt) c_n.
FiberState evolve(const FiberState& s, double dt);

/// Free current J(G) (3 per plane wave) and, optionally, the charge rho(G)
/// the source claims to carry. Without a charge profile, rho is the one
/// implied by continuity from the initial data.
struct SourceTerm {
  std::function<CVec(double)> current;
  std::function<CVec(double)> charge;
};

struct QuadratureOptions {
  int nodes_per_unit = 8;  // Gauss-Legendre nodes per unit time
  int order = 8;           // nodes per panel
  double tol = 1e-8;       // relative change allowed when nodes double
  bool check = true;
};

struct DuhamelResult {
  FiberState state;
  double quadrature_change = 0.0;  // |c(n) - c(2n)| / |c(2n)|
  double constraint_residual = 0.0;  // at t1
  double continuity_residual = 0.0;  // max over nodes of |d_t rho + i K.J|
};

/// psi(t1) = U(t1 - t0) psi(t0) - int U(t1 - s) W^-1 (J(s), 0) ds, mode by mode.
/// Throws QuadratureUnderResolved when doubling the nodes moves the result
/// by more than opt.tol.
DuhamelResult evolve_with_source(const FiberState& s, const SourceTerm& src, double t0, double t1,
                                 const QuadratureOptions& opt = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Fourier-space charge of a field: rho(G) = i K . (W psi)_E(G).
CVec field_charge(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight);
/// max_G |i K.(W psi)_E - rho| + |i K.(W psi)_H|, relative to max_G |K||W psi|.
double constraint_residual(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight,
                           const CVec& rho);

/// Helmholtz-longitudinal share |psi_long|_W / |psi|_W.
double longitudinal_leakage(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight);

/// Fibers k and -k side by side; block b = 0 holds k, b = 1 holds -k.
/// Complex conjugation maps (b, G, c) to (1 - b, -G, c).
struct FiberPair {
  Lattice lattice = Lattice::cubic();
  FiberOperator plus;
  FiberOperator minus;
  std::shared_ptr<const FiberSpectrum> spec_plus;
  std::shared_ptr<const FiberSpectrum> spec_minus;
  std::vector<int> neg;  // plane wave p -> index of -G_p

  int n_pw() const { return plus.n_pw(); }
  int dim() const { return 2 * plus.dim(); }
  std::vector<Vec3> kvecs() const;
  CMat weight() const;

  CVec conjugate(const CVec& u) const;
  CVec real_part(const CVec& u) const { return 0.5 * (u + conjugate(u)); }
  double norm(const CVec& u) const;
  /// Q+ or Q- applied blockwise.
  CVec project(const CVec& u, bool positive) const;
  /// Full complexified evolution exp(-i t M) blockwise.
  CVec evolve(const CVec& u, double t) const;
  /// Real-space field at reduced position x (6 components).
  Eigen::Matrix<cd, 6, 1> sample(const CVec& u, const Vec3& x_reduced) const;
};

FiberPair make_fiber_pair(const MaterialWeights& w, const PlaneWaveSet& pws, const Vec3& k);

/// Random real field; transversal (rho = 0) when requested.
CVec random_real_field(const FiberPair& p, std::mt19937_64& rng, bool transversal = true);

struct RoundtripReport {
  double residual = 0.0;  // |2 Re Q+ u - u|_W / |u|_W
  double reality_defect = 0.0;  // |C u - u| / |u|
  bool not_real_field = false;
};
RoundtripReport real_roundtrip(const FiberPair& p, const CVec& u, double real_tol = 1e-12);

/// |Q- u - C Q+ u|_W / |u|_W.
double phase_locking_check(const FiberPair& p, const CVec& u);

struct EquivalenceReport {
  double discrepancy = 0.0;  // max pointwise over the sampling grid
  double energy_drift_full = 0.0;
  double energy_drift_projected = 0.0;
  double constraint_drift_full = 0.0;
  double constraint_drift_projected = 0.0;
};

/// (i) Re of the full complexified evolution, (ii) 2 Re of the evolved Q+ part.
EquivalenceReport equivalence_harness(const FiberPair& p, const CVec& u0, double t,
                                      int samples_per_dim = 12);
EquivalenceReport equivalence_harness(const MaterialWeights& w, const PlaneWaveSet& pws,
                                      const Vec3& k, const CVec& u0, double t);

}  // namespace emtopo

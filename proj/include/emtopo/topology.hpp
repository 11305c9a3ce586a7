#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "emtopo/maxwell_operator.hpp"
#include "emtopo/weights.hpp"

namespace emtopo {

struct GapInfo {
  int below = 0;  // band n (1-based)
  int above = 0;  // band n + 1
  double size = 0.0;  // min_k omega_{n+1} - max_k omega_n
};

struct BandMargins {
  int band = 0;
  double below = 0.0;  // min_k (omega_n - omega_{n-1}); omega_0 := 0
  double above = 0.0;  // min_k (omega_{n+1} - omega_n); +inf for the top band
};

struct GapReport {
  std::vector<GapInfo> gaps;
  std::vector<BandMargins> margins;
};

/// bands(k, n): positive band n + 1 at grid point k.
GapReport detect_gaps(const Eigen::MatrixXd& bands);

/// Plane of the BZ torus: k(m1, m2) = origin + m1/n1 e_mu1 + m2/n2 e_mu2,
/// each coordinate reduced to (-1/2, 1/2].
struct KPlane {
  int mu1 = 0;
  int mu2 = 1;
  int n1 = 24;
  int n2 = 24;
  Vec3 origin = Vec3::Zero();

  int size() const { return n1 * n2; }
  int index(int m1, int m2) const { return m1 * n2 + m2; }
  Vec3 point(int m1, int m2) const;
  /// Integer s with point(m) + e_mu/n = point(next) + s e_mu along axis mu1 (dir 0) or mu2 (dir 1).
  int link_shift(int m1, int m2, int dir) const;
};

struct BandSelection {
  int lo = 0;  // positive bands lo..hi, 1-based
  int hi = 0;
  double margin_below = 0.0;
  double margin_above = 0.0;
  int size() const { return hi - lo + 1; }
};

/// Spectra with vectors for one band window on every plane point.
struct PlaneSpectra {
  KPlane plane;
  int lo = 0;
  int hi = 0;
  std::vector<FiberSpectrum> spectra;
  std::vector<IVec3> indices;  // plane-wave set
  double cutoff = 0.0;
};

/// Solves every plane point; vectors kept for bands lo..hi only.
PlaneSpectra solve_plane(const MaterialWeights& w, const PlaneWaveSet& pws, const KPlane& plane,
                         int lo, int hi, double zero_tol_rel = 1e-8);

/// Throws GapClosed when a margin is <= gap_tol, including ground bands
/// that reach omega = 0.
BandSelection make_selection(const PlaneSpectra& ps, int lo, int hi, double gap_tol = 1e-4);

struct CurvatureField {
  std::vector<double> f;  // per plaquette, (-pi, pi], index KPlane::index
  double min_link = 0.0;  // min |det S|
};

struct TopologyOptions {
  double link_tol = 1e-6;
  double accept_residual = 0.05;
  double gap_tol = 1e-4;
};

/// Optional per-point gauge change applied to the band vectors before the
/// overlaps (used to test gauge invariance).
using Redecoration = std::function<void(int point, CMat& vectors)>;

CurvatureField berry_curvature(const BandSelection& sel, const PlaneSpectra& ps,
                               const TopologyOptions& opt = {}, const Redecoration& redecorate = {});

struct ChernResult {
  BandSelection selection;
  KPlane plane;
  std::vector<double> curvature;
  double total = 0.0;  // sum F / 2pi before rounding
  long rounded = 0;
  double residual = 0.0;
  double min_link = 0.0;
  bool converged = false;
};

/// Throws NotConverged when |C - round(C)| >= accept_residual.
ChernResult chern_number(const BandSelection& sel, const PlaneSpectra& ps,
                         const TopologyOptions& opt = {}, const Redecoration& redecorate = {});

/// Selection, spectra and Chern number in one go.
ChernResult chern_for(const MaterialWeights& w, const PlaneWaveSet& pws, const KPlane& plane,
                      int lo, int hi, const TopologyOptions& opt = {});

/// The three coordinate planes of a 3D torus, third coordinate fixed at offsets[i].
std::vector<KPlane> coordinate_planes(int n, const Vec3& offsets = Vec3::Zero());

struct ConsistencyReport {
  std::optional<SymmetryReport> classification;
  std::string classification_error;
  std::vector<std::string> contradictions;
  bool consistent = true;
};

/// Flags stable nonzero Chern numbers in classes AI and 2xAI.
ConsistencyReport classification_consistency(const MaterialWeights& w,
                                             const std::vector<ChernResult>& results,
                                             double accept_residual = 0.05, double sym_tol = 1e-10);

struct GroundStateDirection {
  int axis = 0;  // along b_axis
  double fitted[2] = {0, 0};     // slopes of bands 1, 2
  double predicted[2] = {0, 0};  // averaged medium
  double deviation = 0.0;        // max relative difference
};

struct GroundStateReport {
  double radius = 0.0;
  std::vector<GroundStateDirection> directions;
  double deviation = 0.0;  // max over directions
};

/// radius is an absolute |k| (Cartesian, same units as |b_i|).
GroundStateReport ground_state_dispersion_check(const MaterialWeights& w, const PlaneWaveSet& pws,
                                                double radius, int samples = 4);

/// The two positive eigenvalues of (Rot(k^), W_avg) for unit direction k^.
std::array<double, 2> averaged_medium_slopes(const Mat6cd& w_avg, const Vec3& direction);

}  // namespace emtopo

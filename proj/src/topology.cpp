#include "emtopo/topology.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "emtopo/errors.hpp"

namespace emtopo {

GapReport detect_gaps(const Eigen::MatrixXd& bands) {
  GapReport r;
  const Eigen::Index nk = bands.rows(), nb = bands.cols();
  if (nk == 0) return r;
  for (Eigen::Index n = 0; n < nb; ++n) {
    BandMargins m;
    m.band = static_cast<int>(n) + 1;
    m.below = std::numeric_limits<double>::infinity();
    m.above = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < nk; ++k) {
      const double lower = n > 0 ? bands(k, n - 1) : 0.0;
      m.below = std::min(m.below, bands(k, n) - lower);
      if (n + 1 < nb) m.above = std::min(m.above, bands(k, n + 1) - bands(k, n));
    }
    r.margins.push_back(m);
  }
  for (Eigen::Index n = 0; n + 1 < nb; ++n) {
    const double size = bands.col(n + 1).minCoeff() - bands.col(n).maxCoeff();
    if (size > 0) r.gaps.push_back({static_cast<int>(n) + 1, static_cast<int>(n) + 2, size});
  }
  return r;
}

Vec3 KPlane::point(int m1, int m2) const {
  Vec3 k = origin;
  k[mu1] += static_cast<double>(m1) / n1;
  k[mu2] += static_cast<double>(m2) / n2;
  return reduce_k(k);
}

int KPlane::link_shift(int m1, int m2, int dir) const {
  const int mu = dir == 0 ? mu1 : mu2;
  const double step = 1.0 / (dir == 0 ? n1 : n2);
  const Vec3 next = dir == 0 ? point((m1 + 1) % n1, m2) : point(m1, (m2 + 1) % n2);
  return static_cast<int>(std::lround(point(m1, m2)[mu] + step - next[mu]));
}

PlaneSpectra solve_plane(const MaterialWeights& w, const PlaneWaveSet& pws, const KPlane& plane,
                         int lo, int hi, double zero_tol_rel) {
  if (lo < 1 || hi < lo) throw DimensionMismatch("band selection must satisfy 1 <= lo <= hi");
  if (hi > 2 * pws.size()) throw DimensionMismatch("band selection beyond the computed spectrum");
  PlaneSpectra ps;
  ps.plane = plane;
  ps.lo = lo;
  ps.hi = hi;
  ps.indices = pws.indices();
  ps.cutoff = pws.cutoff();
  auto wm = weight_matrix(w, pws);
  SolveOptions opt;
  opt.zero_tol_rel = zero_tol_rel;
  opt.band_lo = lo;
  opt.band_hi = hi;
  ps.spectra.reserve(plane.size());
  for (int a = 0; a < plane.n1; ++a)
    for (int b = 0; b < plane.n2; ++b)
      ps.spectra.push_back(eigensolve(assemble_fiber(wm, w.lattice, pws, plane.point(a, b)), -1, opt));
  return ps;
}

BandSelection make_selection(const PlaneSpectra& ps, int lo, int hi, double gap_tol) {
  if (lo < ps.lo || hi > ps.hi || hi < lo) throw DimensionMismatch("selection outside the solved window");
  BandSelection s;
  s.lo = lo;
  s.hi = hi;
  s.margin_below = std::numeric_limits<double>::infinity();
  s.margin_above = std::numeric_limits<double>::infinity();
  for (const auto& sp : ps.spectra) {
    const double lower = lo > 1 ? sp.band(lo - 1) : 0.0;
    s.margin_below = std::min(s.margin_below, sp.band(lo) - lower);
    if (hi < sp.n_positive()) s.margin_above = std::min(s.margin_above, sp.band(hi + 1) - sp.band(hi));
  }
  if (!(s.margin_below > gap_tol) || !(s.margin_above > gap_tol)) {
    std::ostringstream os;
    os << "bands " << lo << ".." << hi << " not isolated: margins " << s.margin_below << " below, "
       << s.margin_above << " above (gap_tol " << gap_tol << ")";
    if (lo == 1) os << "; ground-state bands reach omega = 0";
    throw GapClosed(os.str());
  }
  return s;
}

namespace {

// c'(G) = c(G + s e_mu), zero where G + s e_mu leaves the set.
CMat shifted(const CMat& v, const std::vector<IVec3>& idx, int mu, int s) {
  CMat out = CMat::Zero(v.rows(), v.cols());
  std::map<IVec3, int> pos;
  for (size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = static_cast<int>(i);
  for (size_t p = 0; p < idx.size(); ++p) {
    IVec3 g = idx[p];
    g[mu] += s;
    auto it = pos.find(g);
    if (it != pos.end()) out.middleRows(6 * p, 6) = v.middleRows(6 * it->second, 6);
  }
  return out;
}

cd unit_det(const CMat& s, double& mag) {
  cd d = s.rows() == 1 ? s(0, 0) : s.partialPivLu().determinant();
  mag = std::abs(d);
  return mag > 0 ? d / mag : cd(1.0);
}

}  // namespace

CurvatureField berry_curvature(const BandSelection& sel, const PlaneSpectra& ps,
                               const TopologyOptions& opt, const Redecoration& redecorate) {
  const KPlane& pl = ps.plane;
  const int np = pl.size();
  std::vector<CMat> phi(np), wphi(np);
  for (int i = 0; i < np; ++i) {
    phi[i] = ps.spectra[i].band_vectors(sel.lo, sel.hi);
    if (redecorate) redecorate(i, phi[i]);
    wphi[i] = ps.spectra[i].weight->w * phi[i];
  }
  CurvatureField cf;
  cf.min_link = std::numeric_limits<double>::infinity();
  std::vector<cd> u1(np), u2(np);
  for (int a = 0; a < pl.n1; ++a)
    for (int b = 0; b < pl.n2; ++b) {
      const int i = pl.index(a, b);
      double mag;
      const int j1 = pl.index((a + 1) % pl.n1, b);
      const int s1 = pl.link_shift(a, b, 0);
      CMat t1 = s1 ? shifted(phi[j1], ps.indices, pl.mu1, s1) : phi[j1];
      u1[i] = unit_det(wphi[i].adjoint() * t1, mag);
      cf.min_link = std::min(cf.min_link, mag);
      const int j2 = pl.index(a, (b + 1) % pl.n2);
      const int s2 = pl.link_shift(a, b, 1);
      CMat t2 = s2 ? shifted(phi[j2], ps.indices, pl.mu2, s2) : phi[j2];
      u2[i] = unit_det(wphi[i].adjoint() * t2, mag);
      cf.min_link = std::min(cf.min_link, mag);
    }
  if (cf.min_link < opt.link_tol) {
    std::ostringstream os;
    os << "min |det S| = " << cf.min_link << " < link_tol " << opt.link_tol;
    throw SingularLink(os.str());
  }
  cf.f.resize(np);
  for (int a = 0; a < pl.n1; ++a)
    for (int b = 0; b < pl.n2; ++b) {
      const int i = pl.index(a, b);
      cd loop = u1[i] * u2[pl.index((a + 1) % pl.n1, b)] * std::conj(u1[pl.index(a, (b + 1) % pl.n2)]) *
                std::conj(u2[i]);
      double f = std::arg(loop);
      if (f <= -kPi) f += kTwoPi;
      cf.f[i] = f;
    }
  return cf;
}

ChernResult chern_number(const BandSelection& sel, const PlaneSpectra& ps, const TopologyOptions& opt,
                         const Redecoration& redecorate) {
  CurvatureField cf = berry_curvature(sel, ps, opt, redecorate);
  ChernResult r;
  r.selection = sel;
  r.plane = ps.plane;
  r.min_link = cf.min_link;
  double sum = 0;
  for (double f : cf.f) sum += f;
  r.curvature = std::move(cf.f);
  r.total = sum / kTwoPi;
  r.rounded = std::lround(r.total);
  r.residual = std::abs(r.total - static_cast<double>(r.rounded));
  r.converged = r.residual < opt.accept_residual;
  if (!r.converged) {
    std::ostringstream os;
    os << "C = " << r.total << ", residual " << r.residual;
    throw NotConverged(os.str());
  }
  return r;
}

ChernResult chern_for(const MaterialWeights& w, const PlaneWaveSet& pws, const KPlane& plane, int lo,
                      int hi, const TopologyOptions& opt) {
  PlaneSpectra ps = solve_plane(w, pws, plane, lo, hi);
  BandSelection sel = make_selection(ps, lo, hi, opt.gap_tol);
  return chern_number(sel, ps, opt);
}

std::vector<KPlane> coordinate_planes(int n, const Vec3& offsets) {
  std::vector<KPlane> out;
  const int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
  for (int i = 0; i < 3; ++i) {
    KPlane p;
    p.mu1 = pairs[i][0];
    p.mu2 = pairs[i][1];
    p.n1 = p.n2 = n;
    p.origin = Vec3::Zero();
    p.origin[i] = offsets[i];
    out.push_back(p);
  }
  return out;
}

ConsistencyReport classification_consistency(const MaterialWeights& w,
                                             const std::vector<ChernResult>& results,
                                             double accept_residual, double sym_tol) {
  ConsistencyReport r;
  try {
    r.classification = classify(w, sym_tol);
  } catch (const AmbiguousClass& e) {
    r.classification_error = e.what();
    return r;
  }
  if (r.classification->caz_class == CazClass::A) return r;
  for (const auto& c : results) {
    if (c.rounded != 0 && c.residual < accept_residual) {
      std::ostringstream os;
      os << "class " << to_string(r.classification->caz_class) << " medium has stable C = " << c.rounded
         << " for bands " << c.selection.lo << ".." << c.selection.hi;
      r.contradictions.push_back(os.str());
      r.consistent = false;
    }
  }
  return r;
}

std::array<double, 2> averaged_medium_slopes(const Mat6cd& w_avg, const Vec3& direction) {
  Mat6cd rot = rot_block(direction.normalized());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat6cd> es(rot, w_avg, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(4), ev(5)};
}

GroundStateReport ground_state_dispersion_check(const MaterialWeights& w, const PlaneWaveSet& pws,
                                                double radius, int samples) {
  GroundStateReport rep;
  rep.radius = radius;
  auto wm = weight_matrix(w, pws);
  SolveOptions opt;
  opt.vectors = false;
  for (int axis = 0; axis < w.dimension(); ++axis) {
    const Vec3 b = w.lattice.full_reciprocal().col(axis);
    GroundStateDirection d;
    d.axis = axis;
    double num[2] = {0, 0}, den = 0;
    for (int j = 1; j <= samples; ++j) {
      const double r = radius * j / samples;
      Vec3 k = Vec3::Zero();
      k[axis] = r / b.norm();
      FiberSpectrum s = eigensolve(assemble_fiber(wm, w.lattice, pws, k), 2, opt);
      num[0] += r * s.band(1);
      num[1] += r * s.band(2);
      den += r * r;
    }
    auto pred = averaged_medium_slopes(w.average(), b);
    for (int n = 0; n < 2; ++n) {
      d.fitted[n] = num[n] / den;
      d.predicted[n] = pred[n];
      d.deviation = std::max(d.deviation, std::abs(d.fitted[n] - pred[n]) / pred[n]);
    }
    rep.deviation = std::max(rep.deviation, d.deviation);
    rep.directions.push_back(d);
  }
  return rep;
}

}  // namespace emtopo

#include "emtopo/maxwell_operator.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

#include "emtopo/errors.hpp"
#include "emtopo/hermitian_solver.hpp"

namespace emtopo {

std::shared_ptr<const WeightMatrix> weight_matrix(const CMat& w) {
  auto out = std::make_shared<WeightMatrix>();
  out->w = w;
  Eigen::LLT<CMat> llt(w);
  if (llt.info() == Eigen::Success) {
    CMat l = llt.matrixL();
    out->l_inv = l.triangularView<Eigen::Lower>().solve(CMat::Identity(w.rows(), w.cols()));
    out->positive_definite = true;
    CMat tmp = w;
    RVec ev;
    hermitian_eig(tmp, ev, false);
    out->min_eig_estimate = ev.size() ? ev(0) : 0.0;
    out->positive_definite = ev.size() == 0 || ev(0) > 0;
  }
  return out;
}

std::shared_ptr<const WeightMatrix> weight_matrix(const MaterialWeights& w,
                                                  const PlaneWaveSet& pws) {
  const int n = pws.size();
  CMat m = CMat::Zero(6 * n, 6 * n);
  std::set<IVec3> diffs;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      IVec3 g = pws[a] - pws[b];
      diffs.insert(g);
      auto it = w.coeffs.find(g);
      if (it != w.coeffs.end()) m.block<6, 6>(6 * a, 6 * b) = it->second;
    }
  auto out = std::const_pointer_cast<WeightMatrix>(weight_matrix(m));
  for (const auto& [g, c] : w.coeffs)
    if (c.norm() != 0 && !diffs.count(g)) ++out->dropped_coefficients;
  return out;
}

Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0, -v[2], v[1], v[2], 0, -v[0], -v[1], v[0], 0;
  return m;
}

Mat6cd rot_block(const Vec3& kvec) {
  Mat6cd r = Mat6cd::Zero();
  Mat3 kx = cross_matrix(kvec);
  r.topRightCorner<3, 3>() = (-kx).cast<cd>();
  r.bottomLeftCorner<3, 3>() = kx.cast<cd>();
  return r;
}

FiberOperator assemble_fiber(std::shared_ptr<const WeightMatrix> weight, const Lattice& l,
                             const PlaneWaveSet& pws, const Vec3& k) {
  FiberOperator f;
  f.k = k;
  f.indices = pws.indices();
  f.weight = std::move(weight);
  const int n = pws.size();
  if (f.weight->w.rows() != 6 * n) throw DimensionMismatch("weight matrix does not match plane waves");
  f.rot = CMat::Zero(6 * n, 6 * n);
  const Vec3 kc = l.cartesian_k(k);
  for (int p = 0; p < n; ++p) {
    Vec3 kv = kc + l.cartesian_G(pws[p]);
    f.kvecs.push_back(kv);
    f.rot.block<6, 6>(6 * p, 6 * p) = rot_block(kv);
  }
  return f;
}

FiberOperator assemble_fiber(const MaterialWeights& w, const PlaneWaveSet& pws, const Vec3& k) {
  return assemble_fiber(weight_matrix(w, pws), w.lattice, pws, k);
}

void dump_triplets(const CMat& m, std::ostream& os) {
  os.precision(17);
  os << "# rows " << m.rows() << " cols " << m.cols() << "\n";
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != cd(0)) os << r << " " << c << " " << m(r, c).real() << " " << m(r, c).imag() << "\n";
}

cd weighted_inner(const CVec& phi, const CVec& psi, const CMat& weight) {
  if (phi.size() != psi.size() || weight.rows() != phi.size() || weight.cols() != phi.size())
    throw DimensionMismatch("weighted_inner operand sizes differ");
  return phi.dot(weight * psi);  // Eigen dot conjugates the first argument
}

double weighted_norm(const CVec& psi, const CMat& weight) {
  return std::sqrt(std::max(0.0, weighted_inner(psi, psi, weight).real()));
}

void fix_phase(CVec& v) {
  if (v.size() == 0) return;
  double best = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v(i)));
  if (best == 0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) >= best * (1 - 1e-10)) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
}

CVec FiberSpectrum::vector(int idx) const {
  if (!has_vector(idx)) throw DimensionMismatch("eigenvector " + std::to_string(idx) + " not stored");
  return vectors.col(idx - first_vector);
}

CMat FiberSpectrum::band_vectors(int lo, int hi) const {
  int a = band_index(lo), b = band_index(hi);
  if (!has_vector(a) || !has_vector(b)) throw DimensionMismatch("band vectors not stored");
  return vectors.middleCols(a - first_vector, b - a + 1);
}

FiberSpectrum eigensolve(const FiberOperator& f, int n_bands, const SolveOptions& opt) {
  const int n = f.dim();
  if (!f.weight->positive_definite) throw IndefiniteWeight("Cholesky of the weight matrix failed");
  FiberSpectrum s;
  s.k = f.k;
  s.n_pw = f.n_pw();
  s.weight = f.weight;
  s.kvecs = f.kvecs;
  s.n_requested = n_bands < 0 ? 2 * s.n_pw : n_bands;
  if (s.n_requested > 2 * s.n_pw) {
    std::ostringstream os;
    os << "requested " << s.n_requested << " bands, only " << 2 * s.n_pw << " available";
    throw DimensionMismatch(os.str());
  }
  const CMat& li = f.weight->l_inv;
  // Rot is block diagonal per plane wave, so L^-1 Rot costs O(n^2).
  CMat t(n, n);
  for (int p = 0; p < s.n_pw; ++p)
    t.middleCols(6 * p, 6).noalias() = li.middleCols(6 * p, 6) * f.rot.block<6, 6>(6 * p, 6 * p);
  CMat a(n, n);
  a.noalias() = t * li.adjoint();
  a = 0.5 * (a + a.adjoint()).eval();
  hermitian_eig(a, s.omegas, opt.vectors);
  if (!s.omegas.allFinite()) throw SolverFailure("non-finite eigenvalues");
  const double wmax = s.omegas.cwiseAbs().maxCoeff();
  s.zero_tol = opt.zero_tol_rel * (wmax > 0 ? wmax : 1.0);
  for (Eigen::Index i = 0; i < s.omegas.size(); ++i)
    if (std::abs(s.omegas(i)) < s.zero_tol) ++s.kernel_dim;
  if (opt.vectors) {
    int first = 0, count = n;
    if (opt.band_lo > 0) {
      if (opt.band_hi < opt.band_lo || opt.band_hi > 2 * s.n_pw)
        throw DimensionMismatch("band range outside the positive spectrum");
      first = s.band_index(opt.band_lo);
      count = opt.band_hi - opt.band_lo + 1;
    }
    s.first_vector = first;
    s.vectors.noalias() = li.adjoint() * a.middleCols(first, count);
    for (int j = 0; j < count; ++j) {
      CVec v = s.vectors.col(j);
      fix_phase(v);
      s.vectors.col(j) = v;
    }
  }
  return s;
}

SpectrumResiduals spectrum_residuals(const FiberOperator& f, const FiberSpectrum& s) {
  SpectrumResiduals r;
  const CMat& w = f.weight_matrix();
  double rn = 0;
  for (int p = 0; p < f.n_pw(); ++p) rn = std::max(rn, f.kvecs[p].norm());
  rn = std::max(rn, 1e-300);  // |Rot|_2 = max |K|
  CMat wv = w * s.vectors;
  CMat rv = f.rot * s.vectors;
  for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
    double om = s.omegas(s.first_vector + j);
    r.eigen = std::max(r.eigen, (rv.col(j) - om * wv.col(j)).norm() / rn);
  }
  CMat g = s.vectors.adjoint() * wv;
  r.orthonormality = (g - CMat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  return r;
}

CMat longitudinal_basis(const std::vector<Vec3>& kvecs) {
  int cols = 0;
  const double tiny = 1e-12;
  for (const auto& k : kvecs) cols += k.norm() > tiny ? 2 : 6;
  const int n = 6 * static_cast<int>(kvecs.size());
  CMat b = CMat::Zero(n, cols);
  int c = 0;
  for (size_t p = 0; p < kvecs.size(); ++p) {
    const double kn = kvecs[p].norm();
    if (kn > tiny) {
      Vec3 u = kvecs[p] / kn;
      for (int s = 0; s < 2; ++s, ++c)
        for (int i = 0; i < 3; ++i) b(6 * p + 3 * s + i, c) = u[i];
    } else {
      for (int i = 0; i < 6; ++i, ++c) b(6 * p + i, c) = 1.0;
    }
  }
  return b;
}

HelmholtzSplit helmholtz_split(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight) {
  if (psi.size() != 6 * static_cast<Eigen::Index>(kvecs.size()))
    throw DimensionMismatch("state size does not match the fiber");
  CMat b = longitudinal_basis(kvecs);
  CMat wb = weight * b;
  CMat g = b.adjoint() * wb;
  CVec rhs = wb.adjoint() * psi;
  CVec coef = g.llt().solve(rhs);
  HelmholtzSplit h;
  h.longitudinal = b * coef;
  h.transversal = psi - h.longitudinal;
  return h;
}

HelmholtzSplit helmholtz_split(const CVec& psi, const FiberOperator& f) {
  return helmholtz_split(psi, f.kvecs, f.weight_matrix());
}

double divergence_residual(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight) {
  CVec d = weight * psi;
  double worst = 0;
  for (size_t p = 0; p < kvecs.size(); ++p) {
    cd e = 0, h = 0;
    for (int i = 0; i < 3; ++i) {
      e += kvecs[p][i] * d(6 * p + i);
      h += kvecs[p][i] * d(6 * p + 3 + i);
    }
    worst = std::max(worst, std::abs(e) + std::abs(h));
  }
  return worst;
}

RVec projector_weights(const FiberSpectrum& s, bool positive) {
  RVec q(s.size());
  for (int i = 0; i < s.size(); ++i) {
    const double w = s.omegas(i);
    const double a = std::abs(w);
    if (a > s.zero_tol && a < 10 * s.zero_tol) {
      std::ostringstream os;
      os << "eigenvalue " << w << " within a decade of zero_tol " << s.zero_tol;
      throw DegenerateGap(os.str());
    }
    if (a <= s.zero_tol) q(i) = 0.5;
    else q(i) = ((w > 0) == positive) ? 1.0 : 0.0;
  }
  return q;
}

namespace {

CMat build_projector(const FiberSpectrum& s, bool positive) {
  if (s.first_vector != 0 || s.vectors.cols() != s.size())
    throw DimensionMismatch("projector needs the full eigenvector set");
  RVec q = projector_weights(s, positive);
  CMat vq = s.vectors * q.asDiagonal();
  return vq * (s.vectors.adjoint() * s.weight->w);
}

}  // namespace

CMat positive_frequency_projector(const FiberSpectrum& s) { return build_projector(s, true); }
CMat negative_frequency_projector(const FiberSpectrum& s) { return build_projector(s, false); }

ContractReport validate_contract(const MaxwellTypeContract& c, double tol) {
  ContractReport r;
  const auto n = c.d.rows();
  if (c.d.cols() != n || c.w_left.rows() != n || c.w_left.cols() != n || c.w_right.rows() != n ||
      c.w_right.cols() != n)
    throw DimensionMismatch("contract matrices must share one square size");
  auto herm = [](const CMat& m) {
    double s = std::max(m.norm(), 1e-300);
    return (m - m.adjoint()).norm() / s;
  };
  r.hermiticity_d = herm(c.d);
  r.hermiticity_w_left = herm(c.w_left);
  r.hermiticity_w_right = herm(c.w_right);
  r.commutator = (c.w_left * c.w_right - c.w_right * c.w_left).norm();
  Eigen::FullPivLU<CMat> lu_l(c.w_left), lu_r(c.w_right);
  r.invertible = lu_l.isInvertible() && lu_r.isInvertible();
  if (lu_l.isInvertible()) {
    CMat p = c.w_right * lu_l.inverse();
    CMat h = 0.5 * (p + p.adjoint());
    RVec ev;
    hermitian_eig(h, ev, false);
    r.c = ev.size() ? ev(0) : 0.0;
  }
  const double scale = std::max({1.0, c.w_left.norm(), c.w_right.norm()});
  r.pass = r.hermiticity_d <= tol && r.hermiticity_w_left <= tol && r.hermiticity_w_right <= tol &&
           r.commutator <= tol * scale * scale && r.invertible && r.c > 0;
  return r;
}

CanonicalForm to_canonical(const MaxwellTypeContract& c) {
  CanonicalForm f;
  CMat prod = c.w_right * c.w_left;  // = W'^-1 when the weights commute
  f.w_prime = prod.inverse();
  f.d = c.d;
  return f;
}

}  // namespace emtopo
